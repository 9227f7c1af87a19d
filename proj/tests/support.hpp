#pragma once

/* Random instance builders and independent brute-force oracles shared by the unit tests and the acceptance runner. */

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <ipsforge/ipsforge.hpp>

namespace ipsforge::testing
{

using Rng = std::mt19937_64;

inline std::uint64_t uniform( Rng& rng, std::uint64_t lo, std::uint64_t hi )
{
  return std::uniform_int_distribution<std::uint64_t>( lo, hi )( rng );
}

/* every assignment of vars over F_q, first variable most significant */
inline void for_each_point( std::vector<std::string> const& vars, std::uint64_t q, std::function<void( Assignment const& )> const& fn )
{
  Assignment a;
  for ( auto const& v : vars )
    a[v] = 0;
  while ( true )
  {
    fn( a );
    std::size_t i = vars.size();
    while ( i > 0 )
    {
      auto& x = a[vars[i - 1]];
      if ( ++x < q )
        break;
      x = 0;
      --i;
    }
    if ( i == 0 )
      return;
  }
}

/* value of a polynomial by direct term summation */
inline std::uint64_t poly_value( SparsePoly const& p, Assignment const& a )
{
  auto const& f = p.field();
  std::uint64_t s = 0;
  for ( auto const& [m, c] : p.terms() )
  {
    std::uint64_t t = c;
    for ( auto const& [v, e] : m.powers() )
      t = f.mul( t, f.pow( a.at( v ), e ) );
    s = f.add( s, t );
  }
  return s;
}

inline std::vector<std::string> union_vars( std::vector<std::string> a, std::vector<std::string> const& b )
{
  std::set<std::string> s( a.begin(), a.end() );
  for ( auto const& v : b )
    if ( s.insert( v ).second )
      a.push_back( v );
  return a;
}

/* pointwise agreement of a circuit with a polynomial at every point of F_q^n */
inline bool agrees_everywhere( Circuit const& c, SparsePoly const& p )
{
  auto vars = union_vars( c.variables(), p.variables() );
  bool ok = true;
  for_each_point( vars, c.field().modulus(), [&]( Assignment const& a ) {
    if ( ok && evaluate( c, a ) != poly_value( p, a ) )
      ok = false;
  } );
  return ok;
}

/* coefficient of the x-monomial m in p, read term by term */
inline SparsePoly read_coefficient( SparsePoly const& p, Monomial const& m, std::set<std::string> const& xvars )
{
  SparsePoly r( p.field() );
  for ( auto const& [mono, c] : p.terms() )
  {
    std::vector<Monomial::Power> xs, ws;
    for ( auto const& pw : mono.powers() )
      ( xvars.count( pw.first ) ? xs : ws ).push_back( pw );
    if ( Monomial( xs ) == m )
    {
      SparsePoly t = SparsePoly::constant( p.field(), c );
      for ( auto const& [v, e] : ws )
        t = t * SparsePoly::variable( p.field(), v ).pow( e );
      r += t;
    }
  }
  return r;
}

/* plain 2^n enumeration of CNF models */
inline std::uint64_t naive_model_count( CnfFormula const& f )
{
  auto const n = f.num_vars();
  std::uint64_t count = 0;
  for ( std::uint64_t bits = 0; bits < ( std::uint64_t{ 1 } << n ); ++bits )
  {
    bool all = true;
    for ( auto const& cl : f.clauses )
    {
      bool sat = false;
      for ( auto l : cl )
      {
        auto const v = static_cast<std::uint64_t>( std::abs( l ) ) - 1;
        if ( ( l > 0 ) == ( ( bits >> v ) & 1u ) )
        {
          sat = true;
          break;
        }
      }
      if ( !sat )
      {
        all = false;
        break;
      }
    }
    count += all;
  }
  return count;
}

/* common roots of a system by plain enumeration of every variable */
inline bool naive_field_sat( EquationSystem const& s )
{
  bool found = false;
  std::vector<std::string> vars = s.variables;
  for ( auto const& eq : s.equations )
    vars = union_vars( vars, eq.circuit.variables() );
  for_each_point( vars, s.field.modulus(), [&]( Assignment const& a ) {
    if ( found )
      return;
    for ( auto const& eq : s.equations )
      if ( evaluate( eq.circuit, a ) != 0 )
        return;
    found = true;
  } );
  return found;
}

inline std::vector<Assignment> naive_roots( Circuit const& c, std::vector<std::string> const& vars )
{
  std::vector<Assignment> r;
  for_each_point( vars, c.field().modulus(), [&]( Assignment const& a ) {
    if ( evaluate( c, a ) == 0 )
      r.push_back( a );
  } );
  return r;
}

/* c - b for a value b outside the image of c, so that c = 0 has no root; c itself when c is onto */
inline Circuit shift_off_image( Circuit const& c )
{
  auto const& f = c.field();
  std::set<std::uint64_t> image;
  auto vars = c.variables();
  for_each_point( vars, f.modulus(), [&]( Assignment const& a ) { image.insert( evaluate( c, a ) ); } );
  for ( std::uint64_t b = 1; b < f.modulus(); ++b )
    if ( !image.count( b ) )
    {
      Circuit r( f );
      auto out = r.import( c );
      r.set_output( r.add( { Edge( out ), Edge( r.constant( f.neg( b ) ) ) } ) );
      return r;
    }
  return c;
}

/* random DAG over the given variables with mixed gates, unit or scalar labels */
inline Circuit random_circuit( Rng& rng, PrimeField const& f, std::vector<std::string> const& vars, std::size_t gates, std::size_t max_fanin = 3 )
{
  Circuit c( f );
  std::vector<NodeId> ids;
  for ( auto const& v : vars )
    ids.push_back( c.input( v ) );
  ids.push_back( c.constant( uniform( rng, 0, f.modulus() - 1 ) ) );
  for ( std::size_t g = 0; g < gates; ++g )
  {
    std::vector<Edge> ch;
    auto const k = uniform( rng, 1, max_fanin );
    for ( std::size_t j = 0; j < k; ++j )
      ch.emplace_back( ids[uniform( rng, 0, ids.size() - 1 )], uniform( rng, 1, f.modulus() - 1 ) );
    ids.push_back( uniform( rng, 0, 1 ) ? c.add( std::move( ch ) ) : c.mul( std::move( ch ) ) );
  }
  c.set_output( ids.back() );
  return c;
}

/* alternating tree with + output and leaves under + nodes; w variables may also appear as edge labels */
inline Circuit random_claim_form( Rng& rng, PrimeField const& f, std::vector<std::string> const& xvars, std::vector<std::string> const& wvars,
                                  std::uint32_t levels, std::size_t max_fanin, std::size_t node_cap )
{
  Circuit c( f );
  std::size_t nodes = 0;
  auto label = [&]() -> Label {
    auto coeff = uniform( rng, 1, f.modulus() - 1 );
    if ( !wvars.empty() && uniform( rng, 0, 3 ) == 0 )
      return Label{ coeff, wvars[uniform( rng, 0, wvars.size() - 1 )] };
    return Label{ coeff, {} };
  };
  auto leaf = [&]() -> NodeId {
    ++nodes;
    auto const pick = uniform( rng, 0, xvars.size() + wvars.size() );
    if ( pick < xvars.size() )
      return c.input( xvars[pick] );
    if ( pick < xvars.size() + wvars.size() )
      return c.input( wvars[pick - xvars.size()] );
    return c.constant( uniform( rng, 1, f.modulus() - 1 ) );
  };
  std::function<NodeId( std::uint32_t, bool )> build = [&]( std::uint32_t left, bool plus ) -> NodeId {
    ++nodes;
    std::vector<Edge> ch;
    auto const k = uniform( rng, 1, max_fanin );
    for ( std::size_t j = 0; j < k; ++j )
    {
      bool const want_leaf = left <= 1 || nodes >= node_cap || uniform( rng, 0, 2 ) == 0;
      if ( plus )
        ch.emplace_back( want_leaf ? leaf() : build( left - 1, false ), label() );
      else
        ch.emplace_back( build( left - 1 == 0 ? 1 : left - 1, true ), label() );
    }
    return plus ? c.add( std::move( ch ) ) : c.mul( std::move( ch ) );
  };
  c.set_output( build( levels, true ) );
  return c;
}

/* normal-form tree with plus_levels + layers, every + layer below the output at most s wide, product fan-in at most t */
inline Circuit random_fitting_ndf( Rng& rng, PrimeField const& f, std::vector<std::string> const& xvars, std::size_t s, std::size_t t,
                                   std::size_t plus_levels )
{
  auto const q = f.modulus();
  struct Item
  {
    std::size_t parent;
    std::uint64_t label;
  };
  std::vector<std::vector<Item>> layers{ { { 0, 1 } } };
  for ( std::size_t k = 1; k < plus_levels; ++k )
  {
    auto const p = layers.back().size();
    std::vector<Item> muls;
    for ( std::size_t i = 0; i < p; ++i )
    {
      muls.push_back( { i, uniform( rng, 1, q - 1 ) } );
      if ( muls.size() + ( p - i - 1 ) < s && uniform( rng, 0, 1 ) )
        muls.push_back( { i, uniform( rng, 1, q - 1 ) } );
    }
    std::vector<std::size_t> fanin( muls.size(), 1 );
    auto spare = s - muls.size();
    for ( std::size_t i = 0; i < muls.size() && spare > 0; ++i )
    {
      auto extra = uniform( rng, 0, std::min( spare, t - 1 ) );
      fanin[i] += extra;
      spare -= extra;
    }
    std::vector<Item> plus;
    for ( std::size_t i = 0; i < muls.size(); ++i )
      for ( std::size_t j = 0; j < fanin[i]; ++j )
        plus.push_back( { i, uniform( rng, 1, q - 1 ) } );
    layers.push_back( std::move( muls ) );
    layers.push_back( std::move( plus ) );
  }
  Circuit c( f );
  std::vector<std::vector<Edge>> kids( layers.back().size() );
  for ( auto& k : kids )
  {
    for ( auto const& x : xvars )
      if ( uniform( rng, 0, 1 ) )
        k.emplace_back( c.input( x ), uniform( rng, 1, q - 1 ) );
    if ( k.empty() || uniform( rng, 0, 2 ) == 0 )
      k.emplace_back( c.constant( uniform( rng, 1, q - 1 ) ), uniform( rng, 1, q - 1 ) );
  }
  for ( auto l = layers.size(); l-- > 0; )
  {
    std::vector<NodeId> ids;
    for ( std::size_t i = 0; i < layers[l].size(); ++i )
      ids.push_back( l % 2 == 0 ? c.add( kids[i] ) : c.mul( kids[i] ) );
    if ( l == 0 )
      c.set_output( ids[0] );
    else
    {
      std::vector<std::vector<Edge>> up( layers[l - 1].size() );
      for ( std::size_t i = 0; i < layers[l].size(); ++i )
        up[layers[l][i].parent].emplace_back( ids[i], layers[l][i].label );
      kids = std::move( up );
    }
  }
  return c;
}

/* structurally distinct normal-form trees over one variable and the constant 1, all labels 1 (every label over F_2);
   + layers below the output at most s wide, product fan-in at most t, up to max_plus_levels + layers */
class NdfShapes
{
public:
  NdfShapes( std::size_t s, std::size_t t, std::size_t max_plus_levels ) : s_( s ), t_( t )
  {
    plus_.resize( max_plus_levels + 1 );
    mul_.resize( max_plus_levels + 1 );
    for ( int mask = 1; mask < 4; ++mask )
      plus_[1].push_back( add( Shape{ true, mask, {}, { 1 } } ) );
    for ( std::size_t h = 2; h <= max_plus_levels; ++h )
    {
      /* products: multisets of 1..t plus shapes of height h-1 */
      multisets( plus_[h - 1], t_, [&]( std::vector<std::size_t> const& pick, std::vector<std::size_t> const& prof ) {
        mul_[h].push_back( add( Shape{ false, 0, pick, prof } ) );
      } );
      /* sums: multisets of at least one product of height h */
      multisets( mul_[h], s_, [&]( std::vector<std::size_t> const& pick, std::vector<std::size_t> const& prof ) {
        std::vector<std::size_t> p{ 1 };
        p.insert( p.end(), prof.begin(), prof.end() );
        plus_[h].push_back( add( Shape{ true, 0, pick, p } ) );
      } );
    }
  }

  std::vector<std::size_t> const& roots( std::size_t plus_levels ) const { return plus_.at( plus_levels ); }

  Circuit build( std::size_t root, PrimeField const& f, std::string const& x ) const
  {
    Circuit c( f );
    c.set_output( emit( c, root, x ) );
    return c;
  }

private:
  struct Shape
  {
    bool plus;
    int leaves; /* bit 0: the variable, bit 1: the constant 1 */
    std::vector<std::size_t> kids;
    std::vector<std::size_t> profile; /* + nodes per + layer, from this node's layer down */
  };

  std::size_t add( Shape sh )
  {
    shapes_.push_back( std::move( sh ) );
    return shapes_.size() - 1;
  }

  /* nondecreasing picks from pool, 1..max_count elements, combined profile within s */
  template<class Fn>
  void multisets( std::vector<std::size_t> const& pool, std::size_t max_count, Fn&& fn )
  {
    std::vector<std::size_t> pick, prof;
    std::function<void( std::size_t )> rec = [&]( std::size_t from ) {
      if ( !pick.empty() )
        fn( pick, prof );
      if ( pick.size() == max_count )
        return;
      for ( std::size_t i = from; i < pool.size(); ++i )
      {
        auto const& p = shapes_[pool[i]].profile;
        auto saved = prof;
        if ( prof.size() < p.size() )
          prof.resize( p.size(), 0 );
        bool ok = true;
        for ( std::size_t k = 0; k < p.size(); ++k )
          if ( ( prof[k] += p[k] ) > s_ )
            ok = false;
        if ( ok )
        {
          pick.push_back( pool[i] );
          rec( i );
          pick.pop_back();
        }
        prof = std::move( saved );
      }
    };
    rec( 0 );
  }

  NodeId emit( Circuit& c, std::size_t id, std::string const& x ) const
  {
    auto const& sh = shapes_[id];
    std::vector<Edge> kids;
    if ( sh.leaves & 1 )
      kids.emplace_back( c.input( x ) );
    if ( sh.leaves & 2 )
      kids.emplace_back( c.constant( 1 ) );
    for ( auto k : sh.kids )
      kids.emplace_back( emit( c, k, x ) );
    return sh.plus ? c.add( std::move( kids ) ) : c.mul( std::move( kids ) );
  }

  std::size_t s_, t_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<std::size_t>> plus_, mul_;
};

/* a random refutable axiom system: two axioms a and a - 1 for a random polynomial a, plus a few extras */
struct PcInstance
{
  EquationSystem axioms;
  PcProof proof;
};

/* PC refutation with a random mix of rules; the derivation is built forward so every line is valid */
inline PcInstance random_pc_refutation( Rng& rng, PrimeField const& f, std::vector<std::string> const& vars, bool use_boolean )
{
  PcInstance inst{ EquationSystem( f ), PcProof{ f, {} } };
  for ( auto const& v : vars )
    inst.axioms.register_var( v );
  auto const q = f.modulus();
  /* base polynomial a: a random linear form plus maybe a product */
  SparsePoly a = SparsePoly::constant( f, uniform( rng, 0, q - 1 ) );
  for ( auto const& v : vars )
    a += SparsePoly::variable( f, v ).scaled( uniform( rng, 0, q - 1 ) );
  if ( vars.size() >= 2 && uniform( rng, 0, 1 ) )
    a += SparsePoly::variable( f, vars[0] ) * SparsePoly::variable( f, vars[1] );
  auto const extra = uniform( rng, 0, 1 );
  std::vector<SparsePoly> axs{ a, a - SparsePoly::constant( f, 1 ) };
  for ( std::uint64_t e = 0; e < extra; ++e )
    axs.push_back( SparsePoly::variable( f, vars[uniform( rng, 0, vars.size() - 1 )] ) * a );
  std::shuffle( axs.begin(), axs.end(), rng );
  for ( auto const& p : axs )
    inst.axioms.add( circuit_from_poly( p ), "axioms" );
  auto& lines = inst.proof.lines;
  auto push = [&]( Justification j, SparsePoly p ) {
    lines.push_back( { j, std::move( p ) } );
    return lines.size() - 1;
  };
  std::size_t ia = 0, ib = 0;
  for ( std::size_t i = 0; i < axs.size(); ++i )
  {
    if ( axs[i] == a )
      ia = i;
    if ( axs[i] == a - SparsePoly::constant( f, 1 ) )
      ib = i;
  }
  auto la = push( { JustKind::Axiom, ia, 0, 0, 0, {} }, axs[ia] );
  auto lb = push( { JustKind::Axiom, ib, 0, 0, 0, {} }, axs[ib] );
  /* optional detours: multiply by a variable and cancel, or add a Boolean axiom times zero */
  if ( uniform( rng, 0, 1 ) )
  {
    auto const& v = vars[uniform( rng, 0, vars.size() - 1 )];
    auto lm = push( { JustKind::MulVar, la, 0, 0, 0, v }, lines[la].poly * SparsePoly::variable( f, v ) );
    auto lm2 = push( { JustKind::MulVar, lb, 0, 0, 0, v }, lines[lb].poly * SparsePoly::variable( f, v ) );
    /* x*a - x*(a-1) = x */
    push( { JustKind::LinComb, lm, lm2, 1, q - 1, {} }, lines[lm].poly - lines[lm2].poly );
  }
  if ( use_boolean )
  {
    auto const& v = vars[uniform( rng, 0, vars.size() - 1 )];
    auto x = SparsePoly::variable( f, v );
    auto lbool = push( { JustKind::Boolean, 0, 0, 0, 0, v }, x * x - x );
    /* fold the Boolean axiom into line a with coefficient 0 and then back out */
    auto const alpha = uniform( rng, 1, q - 1 );
    auto lmix = push( { JustKind::LinComb, la, lbool, 1, alpha, {} }, lines[la].poly + lines[lbool].poly.scaled( alpha ) );
    la = push( { JustKind::LinComb, lmix, lbool, 1, f.neg( alpha ), {} }, lines[la].poly );
  }
  push( { JustKind::LinComb, la, lb, 1, q - 1, {} }, SparsePoly::constant( f, 1 ) );
  return inst;
}

/* term-by-term restriction of v to a */
inline SparsePoly restrict_poly( SparsePoly const& h, std::string const& v, std::uint64_t a )
{
  auto const& f = h.field();
  SparsePoly r( f );
  for ( auto const& [m, c] : h.terms() )
  {
    SparsePoly t = SparsePoly::constant( f, c );
    for ( auto const& [u, e] : m.powers() )
      t = t * ( u == v ? SparsePoly::constant( f, a ).pow( e ) : SparsePoly::variable( f, u ).pow( e ) );
    r += t;
  }
  return r;
}

/* L with h - h|_{v=a} = L (v - a), by the identity v^e - a^e = (v - a) sum_k v^k a^(e-1-k) */
inline SparsePoly divide_linear( SparsePoly const& h, std::string const& v, std::uint64_t a )
{
  auto const& f = h.field();
  SparsePoly r( f );
  for ( auto const& [m, c] : h.terms() )
  {
    std::uint32_t e = 0;
    SparsePoly rest = SparsePoly::constant( f, c );
    for ( auto const& [u, k] : m.powers() )
      if ( u == v )
        e = k;
      else
        rest = rest * SparsePoly::variable( f, u ).pow( k );
    SparsePoly geo( f );
    for ( std::uint32_t k = 0; k < e; ++k )
      geo += SparsePoly::variable( f, v ).pow( k ) * SparsePoly::constant( f, a ).pow( e - 1 - k );
    r += rest * geo;
  }
  return r;
}

inline SparsePoly random_poly( Rng& rng, PrimeField const& f, std::vector<std::string> const& vars, std::uint32_t deg, std::size_t terms )
{
  SparsePoly p( f );
  for ( std::size_t t = 0; t < terms; ++t )
  {
    SparsePoly m = SparsePoly::constant( f, uniform( rng, 1, f.modulus() - 1 ) );
    auto const d = uniform( rng, 0, deg );
    for ( std::uint64_t k = 0; k < d; ++k )
      m = m * SparsePoly::variable( f, vars[uniform( rng, 0, vars.size() - 1 )] );
    p += m;
  }
  return p;
}

/* a valid case certificate for target over axioms (f0, f1); f0 must be a nonzero constant on every case */
inline CaseComponents build_case( Rng& rng, PrimeField const& f, std::vector<SparsePoly> const& axioms, SparsePoly const& target,
                           std::vector<std::string> const& vars, std::vector<bool> const& alpha, bool& valid )
{
  CaseComponents c;
  c.g.resize( axioms.size(), SparsePoly( f ) );
  for ( std::size_t i = 1; i < axioms.size(); ++i )
    c.g[i] = random_poly( rng, f, vars, 1, 2 );
  for ( std::size_t i = 0; i < vars.size(); ++i )
    c.q.push_back( random_poly( rng, f, vars, 1, 1 ) );
  SparsePoly rest = target;
  for ( std::size_t i = 1; i < axioms.size(); ++i )
    rest -= c.g[i] * axioms[i];
  for ( std::size_t i = 0; i < vars.size(); ++i )
  {
    auto x = SparsePoly::variable( f, vars[i] );
    rest -= c.q[i] * ( x * x - x );
  }
  auto f0 = axioms[0];
  auto r = rest;
  for ( std::size_t i = 0; i < alpha.size(); ++i )
  {
    f0 = restrict_poly( f0, vars[i], alpha[i] );
    r = restrict_poly( r, vars[i], alpha[i] );
  }
  valid = f0.degree() == 0 && f0.coefficient( Monomial() ) != 0;
  if ( !valid )
    return c;
  c.g[0] = r.scaled( f.inv( f0.coefficient( Monomial() ) ) );
  rest -= c.g[0] * axioms[0];
  for ( std::size_t i = 0; i < alpha.size(); ++i )
  {
    c.l.push_back( divide_linear( rest, vars[i], alpha[i] ) );
    rest = restrict_poly( rest, vars[i], alpha[i] );
  }
  valid = rest.is_zero();
  return c;
}

} // namespace ipsforge::testing
