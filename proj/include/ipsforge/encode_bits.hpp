#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "cnf.hpp"
#include "errors.hpp"
#include "transforms.hpp"

namespace ipsforge
{

/*! \brief Literals of a binary representation, least significant bit first. */
using BitVec = std::vector<int>;

/*! \brief k with 2^(k-1) < q < 2^k. */
inline unsigned bit_width( std::uint64_t q )
{
  if ( q < 3 )
    fail( ErrorKind::Unsupported, "binary encoding needs q > 2" );
  unsigned k = 0;
  while ( ( std::uint64_t{ 1 } << k ) <= q )
    ++k;
  return k;
}

/* Boolean formulas and arithmetization */

struct BoolExpr
{
  enum class Op
  {
    Var,
    False,
    True,
    Not,
    And,
    Or,
    Xor
  };
  Op op = Op::False;
  std::string name;
  std::vector<std::shared_ptr<BoolExpr const>> args;

  using Ptr = std::shared_ptr<BoolExpr const>;
  static Ptr make( Op op, std::vector<Ptr> args = {}, std::string name = {} )
  {
    auto e = std::make_shared<BoolExpr>();
    e->op = op;
    e->args = std::move( args );
    e->name = std::move( name );
    return e;
  }
  static Ptr var( std::string n ) { return make( Op::Var, {}, std::move( n ) ); }
  static Ptr constant( bool v ) { return make( v ? Op::True : Op::False ); }
  static Ptr lnot( Ptr a ) { return make( Op::Not, { std::move( a ) } ); }
  static Ptr land( Ptr a, Ptr b ) { return make( Op::And, { std::move( a ), std::move( b ) } ); }
  static Ptr lor( Ptr a, Ptr b ) { return make( Op::Or, { std::move( a ), std::move( b ) } ); }
  static Ptr lxor( Ptr a, Ptr b ) { return make( Op::Xor, { std::move( a ), std::move( b ) } ); }

  bool evaluate( std::map<std::string, bool> const& a ) const
  {
    switch ( op )
    {
    case Op::Var:
      return a.at( name );
    case Op::False:
      return false;
    case Op::True:
      return true;
    case Op::Not:
      return !args[0]->evaluate( a );
    case Op::And:
      return args[0]->evaluate( a ) && args[1]->evaluate( a );
    case Op::Or:
      return args[0]->evaluate( a ) || args[1]->evaluate( a );
    case Op::Xor:
      return args[0]->evaluate( a ) != args[1]->evaluate( a );
    }
    return false;
  }
};

namespace detail
{
inline NodeId arit_rec( BoolExpr const& e, Circuit& c, std::map<std::string, NodeId>& vars )
{
  auto const& f = c.field();
  auto const neg1 = f.neg( 1 );
  switch ( e.op )
  {
  case BoolExpr::Op::Var:
  {
    auto it = vars.find( e.name );
    return it != vars.end() ? it->second : vars[e.name] = c.input( e.name );
  }
  case BoolExpr::Op::False:
    return c.constant( 0 );
  case BoolExpr::Op::True:
    return c.constant( 1 );
  case BoolExpr::Op::Not:
    return c.add( { Edge( c.constant( 1 ) ), Edge( arit_rec( *e.args[0], c, vars ), neg1 ) } );
  case BoolExpr::Op::And:
    return c.mul( { Edge( arit_rec( *e.args[0], c, vars ) ), Edge( arit_rec( *e.args[1], c, vars ) ) } );
  case BoolExpr::Op::Or:
  {
    auto one = c.constant( 1 );
    auto na = c.add( { Edge( one ), Edge( arit_rec( *e.args[0], c, vars ), neg1 ) } );
    auto nb = c.add( { Edge( one ), Edge( arit_rec( *e.args[1], c, vars ), neg1 ) } );
    return c.add( { Edge( one ), Edge( c.mul( { Edge( na ), Edge( nb ) } ), neg1 ) } );
  }
  case BoolExpr::Op::Xor:
  {
    auto a = arit_rec( *e.args[0], c, vars );
    auto b = arit_rec( *e.args[1], c, vars );
    return c.add( { Edge( a ), Edge( b ), Edge( c.mul( { Edge( a ), Edge( b ) } ), f.neg( f.reduce( 2 ) ) ) } );
  }
  }
  return c.constant( 0 );
}
} // namespace detail

/*! \brief Arithmetization: agrees with the formula on 0-1 inputs. */
inline Circuit arit( BoolExpr const& e, PrimeField const& f )
{
  Circuit c( f );
  std::map<std::string, NodeId> vars;
  c.set_output( detail::arit_rec( e, c, vars ) );
  return c;
}

/*! \brief Bit-level gadgets over a CnfBuilder; gates whose inputs are all constant fold to constants. */
class BitArith
{
public:
  BitArith( CnfBuilder& b, std::uint64_t q ) : b_( b ), q_( q ), k_( bit_width( q ) ) {}

  unsigned width() const noexcept { return k_; }
  std::uint64_t modulus() const noexcept { return q_; }

  BitVec constant( std::uint64_t v, unsigned w ) const
  {
    BitVec r( w );
    for ( unsigned i = 0; i < w; ++i )
      r[i] = ( v >> i ) & 1u ? lit_true : lit_false;
    return r;
  }
  BitVec constant( std::uint64_t v ) const { return constant( v, k_ ); }

  BitVec fresh( std::string const& base, unsigned w )
  {
    BitVec r( w );
    for ( unsigned i = 0; i < w; ++i )
      r[i] = b_.var( base + "_" + std::to_string( i ) );
    return r;
  }

  static bool is_constant( BitVec const& v )
  {
    for ( auto l : v )
      if ( !is_const_lit( l ) )
        return false;
    return true;
  }
  static std::uint64_t value( BitVec const& v )
  {
    std::uint64_t r = 0;
    for ( std::size_t i = 0; i < v.size(); ++i )
      if ( v[i] == lit_true )
        r |= std::uint64_t{ 1 } << i;
    return r;
  }

  template<class Fn>
  int gate( std::string const& name, std::vector<int> const& inputs, Fn&& fn )
  {
    bool all_const = true;
    std::vector<bool> val;
    for ( auto l : inputs )
    {
      all_const = all_const && is_const_lit( l );
      val.push_back( l == lit_true );
    }
    if ( all_const )
      return fn( val ) ? lit_true : lit_false;
    auto out = b_.var( name );
    b_.define( out, inputs, fn );
    return out;
  }

  /*! \brief Carry lookahead addition; k+1 output bits, or k when the overflow is dropped. */
  BitVec addition( BitVec const& x, BitVec const& y, std::string const& ctx, bool overflow = true )
  {
    if ( x.size() != y.size() )
      fail( ErrorKind::WidthMismatch, "addition of widths " + std::to_string( x.size() ) + " and " + std::to_string( y.size() ) );
    auto const w = x.size();
    std::vector<int> carry( w + 1, lit_false );
    BitVec out( w );
    for ( std::size_t i = 0; i < w; ++i )
    {
      if ( i > 0 )
        carry[i] = gate( "carry_" + ctx + "_" + std::to_string( i ), { x[i - 1], y[i - 1], carry[i - 1] },
                         []( std::vector<bool> const& v ) { return ( v[0] && v[1] ) || ( ( v[0] || v[1] ) && v[2] ); } );
      out[i] = gate( "add_" + ctx + "_" + std::to_string( i ), { x[i], y[i], carry[i] },
                     []( std::vector<bool> const& v ) { return ( v[0] != v[1] ) != v[2]; } );
    }
    if ( overflow )
    {
      carry[w] = gate( "carry_" + ctx + "_" + std::to_string( w ), { x[w - 1], y[w - 1], carry[w - 1] },
                       []( std::vector<bool> const& v ) { return ( v[0] && v[1] ) || ( ( v[0] || v[1] ) && v[2] ); } );
      out.push_back( carry[w] );
    }
    return out;
  }

  /*! \brief k-bit vector congruent to VAL(x) + 2^t x' mod q, and below 2^k. */
  BitVec modular( BitVec const& x, int xp, unsigned t, std::string const& ctx )
  {
    if ( x.size() != k_ )
      fail( ErrorKind::WidthMismatch, "modular input of width " + std::to_string( x.size() ) );
    auto const a = pow2_mod( t ), bb = pow2_mod( k_ - 1 ), c = ( a + bb ) % q_;
    BitVec m( k_ );
    for ( unsigned i = 0; i < k_; ++i )
    {
      bool const ai = ( a >> i ) & 1u, bi = ( bb >> i ) & 1u, ci = ( c >> i ) & 1u;
      m[i] = gate( "m_" + ctx + "_" + std::to_string( i ), { xp, x[k_ - 1] }, [=]( std::vector<bool> const& v ) {
        return v[0] ? ( v[1] ? ci : ai ) : ( v[1] ? bi : false );
      } );
    }
    BitVec low = x;
    low[k_ - 1] = lit_false;
    auto u = addition( low, m, "u" + ctx );
    auto const hi = pow2_mod( k_ );
    BitVec w( k_ );
    for ( unsigned i = 0; i < k_; ++i )
    {
      bool const hb = ( hi >> i ) & 1u;
      w[i] = gate( "w_" + ctx + "_" + std::to_string( i ), { u[k_] }, [=]( std::vector<bool> const& v ) { return v[0] && hb; } );
    }
    u.pop_back();
    return addition( u, w, "r" + ctx, false );
  }

  /*! \brief Addition step followed by the modular step. */
  BitVec add_mod( BitVec const& x, BitVec const& y, std::string const& ctx )
  {
    auto s = addition( x, y, ctx );
    auto top = s.back();
    s.pop_back();
    return modular( s, top, k_, ctx + "m" );
  }

  /*! \brief Partial products, per-row modular reduction, then chained modular additions. */
  BitVec mul_mod( BitVec const& x, BitVec const& y, std::string const& ctx )
  {
    if ( x.size() != k_ || y.size() != k_ )
      fail( ErrorKind::WidthMismatch, "multiplication operands must have width " + std::to_string( k_ ) );
    std::vector<BitVec> rows( k_ );
    for ( unsigned i = 0; i < k_; ++i )
    {
      rows[i].assign( k_ + i, lit_false );
      for ( unsigned j = i; j < k_ + i; ++j )
        rows[i][j] = gate( "s_" + ctx + "_" + std::to_string( i ) + "_" + std::to_string( j ), { x[j - i], y[i] },
                           []( std::vector<bool> const& v ) { return v[0] && v[1]; } );
    }
    auto acc = rows[0];
    for ( unsigned i = 1; i < k_; ++i )
    {
      BitVec cur( rows[i].begin(), rows[i].begin() + k_ );
      for ( unsigned j = k_; j < k_ + i; ++j )
        cur = modular( cur, rows[i][j], j, ctx + "u" + std::to_string( i ) + "." + std::to_string( j ) );
      acc = add_mod( acc, cur, ctx + "v" + std::to_string( i ) );
    }
    return acc;
  }

  void connect( BitVec const& a, BitVec const& z )
  {
    if ( a.size() != z.size() )
      fail( ErrorKind::WidthMismatch, "connection of widths " + std::to_string( a.size() ) + " and " + std::to_string( z.size() ) );
    for ( std::size_t i = 0; i < a.size(); ++i )
      b_.equal( a[i], z[i] );
  }

  /*! \brief Blocks every bit pattern with value >= q. */
  void range( BitVec const& x )
  {
    for ( std::uint64_t v = q_; v < ( std::uint64_t{ 1 } << x.size() ); ++v )
    {
      std::vector<int> cl;
      for ( std::size_t i = 0; i < x.size(); ++i )
        cl.push_back( ( v >> i ) & 1u ? -x[i] : x[i] );
      b_.clause( std::move( cl ) );
    }
  }

private:
  std::uint64_t pow2_mod( unsigned t ) const
  {
    std::uint64_t r = 1 % q_;
    for ( unsigned i = 0; i < t; ++i )
      r = ( r * 2 ) % q_;
    return r;
  }

  CnfBuilder& b_;
  std::uint64_t q_;
  unsigned k_;
};

/*! \brief CNF of VAL(z) = x + y mod q over fresh vectors x_, y_, z_. */
inline CnfFormula cnf_add( std::uint64_t q )
{
  CnfBuilder b;
  BitArith a( b, q );
  auto x = a.fresh( "x", a.width() ), y = a.fresh( "y", a.width() ), z = a.fresh( "z", a.width() );
  a.connect( a.add_mod( x, y, "0" ), z );
  return b.take();
}

/*! \brief CNF of VAL(z) = x * y mod q over fresh vectors x_, y_, z_. */
inline CnfFormula cnf_mult( std::uint64_t q )
{
  CnfBuilder b;
  BitArith a( b, q );
  auto x = a.fresh( "x", a.width() ), y = a.fresh( "y", a.width() ), z = a.fresh( "z", a.width() );
  a.connect( a.mul_mod( x, y, "0" ), z );
  return b.take();
}

/*! \brief A bit vector of the circuit encoding with the name of its value. */
struct BitNode
{
  std::string name;
  BitVec bits;
  bool is_input = false;
};

/*! \brief Binary CNF encoding of circuits: inputs range-checked below q, gates chained into binary gadgets. */
class BitsEncoder
{
public:
  explicit BitsEncoder( PrimeField f, std::uint64_t var_budget = 5'000'000 ) : f_( f ), a_( b_, f.modulus() ), budget_( var_budget ) {}

  BitVec input( std::string const& name )
  {
    auto it = inputs_.find( name );
    if ( it != inputs_.end() )
      return it->second;
    auto v = a_.fresh( "b_" + name, a_.width() );
    a_.range( v );
    nodes_.push_back( { name, v, true } );
    return inputs_[name] = v;
  }

  BitVec encode( Circuit const& c, std::string const& prefix = "", bool equation = false )
  {
    auto d = desugar_labels( c ).compacted();
    std::vector<BitVec> val( d.size() );
    for ( NodeId i = 0; i < d.size(); ++i )
    {
      auto const& n = d.node( i );
      if ( n.kind == NodeKind::Input )
        val[i] = input( n.name );
      else if ( n.kind == NodeKind::Const )
        val[i] = a_.constant( n.value );
      else
        val[i] = gate( n, val, prefix + "g" + std::to_string( i ) );
      check_budget();
    }
    auto out = val[d.output()];
    if ( equation )
      force_zero( out, prefix + "out" );
    return out;
  }

  CnfFormula const& cnf() const noexcept { return b_.formula(); }
  CnfFormula take_cnf() { return b_.take(); }
  std::vector<BitNode> const& nodes() const noexcept { return nodes_; }
  BitArith& arith() noexcept { return a_; }

private:
  void check_budget() const
  {
    if ( b_.formula().num_vars() > budget_ )
      fail( ErrorKind::BudgetExceeded, "binary encoding exceeds " + std::to_string( budget_ ) + " variables" );
  }

  BitVec op( NodeKind kind, BitVec const& x, BitVec const& y, std::string const& target )
  {
    if ( BitArith::is_constant( x ) && BitArith::is_constant( y ) )
    {
      auto const u = BitArith::value( x ) % f_.modulus(), v = BitArith::value( y ) % f_.modulus();
      return a_.constant( kind == NodeKind::Add ? f_.add( u, v ) : f_.mul( u, v ) );
    }
    auto r = kind == NodeKind::Add ? a_.add_mod( x, y, target ) : a_.mul_mod( x, y, target );
    auto z = a_.fresh( "b_" + target, a_.width() );
    a_.connect( r, z );
    nodes_.push_back( { target, z, false } );
    return z;
  }

  BitVec gate( Node const& n, std::vector<BitVec> const& val, std::string const& name )
  {
    auto const t = n.children.size();
    if ( t == 0 )
      return a_.constant( n.kind == NodeKind::Add ? 0 : 1 );
    if ( t == 1 )
      return val[n.children[0].child];
    auto acc = val[n.children[0].child];
    for ( std::size_t k = 1; k < t; ++k )
      acc = op( n.kind, val[n.children[k].child], acc, k + 1 == t ? name : name + "v" + std::to_string( k ) );
    return acc;
  }

  /* VAL(g) = 0 mod q iff adding q gives the representative q; checked on both representatives of 0 */
  void force_zero( BitVec const& g, std::string const& ctx )
  {
    auto const q = f_.modulus();
    if ( BitArith::is_constant( g ) )
    {
      if ( BitArith::value( g ) % q != 0 )
        b_.clause( {} );
      return;
    }
    for ( std::uint64_t rep : { std::uint64_t{ 0 }, q } )
      if ( BitArith::value( a_.add_mod( a_.constant( rep ), a_.constant( q ), "sim" ) ) != q )
        fail( ErrorKind::Unsupported, "output connection is incomplete for q = " + std::to_string( q ) );
    a_.connect( a_.add_mod( g, a_.constant( q ), ctx ), a_.constant( q ) );
  }

  PrimeField f_;
  CnfBuilder b_;
  BitArith a_;
  std::uint64_t budget_;
  std::map<std::string, BitVec> inputs_;
  std::vector<BitNode> nodes_;
};

inline CnfFormula cnf_encode_circuit_bits( Circuit const& c, std::uint64_t var_budget = 5'000'000 )
{
  BitsEncoder e( c.field(), var_budget );
  e.encode( c );
  return e.take_cnf();
}

inline CnfFormula cnf_encode_equation_bits( Circuit const& c, std::uint64_t var_budget = 5'000'000 )
{
  BitsEncoder e( c.field(), var_budget );
  e.encode( c, "", true );
  return e.take_cnf();
}

/*! \brief Circuit for x - VAL(bits). */
inline Circuit val_axiom( PrimeField const& f, std::string const& x, std::vector<std::string> const& bits )
{
  Circuit c( f );
  std::vector<Edge> sum{ Edge( c.input( x ) ) };
  std::uint64_t p = 1 % f.modulus();
  for ( auto const& b : bits )
  {
    sum.emplace_back( c.input( b ), f.neg( p ) );
    p = f.mul( p, 2 );
  }
  c.set_output( c.add( std::move( sum ) ) );
  return c;
}

/*! \brief Extended system of an encoder: algebraized clauses, a VAL axiom for every node vector, Boolean axioms. */
inline EquationSystem bits_ecnf_system( BitsEncoder const& e, PrimeField const& f, std::string const& clause_group = "clause",
                                        std::string const& val_group = "val", std::string const& bool_group = "boolean" )
{
  auto const& cnf = e.cnf();
  std::map<int, std::string> ext_before, ext_after;
  for ( auto const& n : e.nodes() )
  {
    if ( n.is_input )
      ext_before[n.bits.front()] = n.name;
    else
      ext_after[n.bits.back()] = extension_var_name( n.name );
  }
  EquationSystem s( f );
  for ( std::size_t i = 0; i < cnf.names.size(); ++i )
  {
    auto const id = static_cast<int>( i + 1 );
    if ( auto it = ext_before.find( id ); it != ext_before.end() )
      s.register_var( it->second );
    s.register_var( cnf.names[i] );
    if ( auto it = ext_after.find( id ); it != ext_after.end() )
      s.register_var( it->second );
  }
  for ( auto const& cl : cnf.clauses )
    s.add( algebraize_clause( cl, cnf.names, f ), clause_group );
  for ( auto const& n : e.nodes() )
  {
    std::vector<std::string> bits;
    for ( auto l : n.bits )
      bits.push_back( cnf.names[static_cast<std::size_t>( l - 1 )] );
    s.add( val_axiom( f, n.is_input ? n.name : extension_var_name( n.name ), bits ), val_group );
  }
  for ( auto const& n : cnf.names )
    s.add( boolean_axiom( f, n ), bool_group );
  return s;
}

inline EquationSystem ecnf_encode_equation_bits( Circuit const& c, std::uint64_t var_budget = 5'000'000 )
{
  BitsEncoder e( c.field(), var_budget );
  e.encode( c, "", true );
  return bits_ecnf_system( e, c.field() );
}

} // namespace ipsforge
