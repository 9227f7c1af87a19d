#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "circuit.hpp"
#include "cnf.hpp"
#include "errors.hpp"
#include "transforms.hpp"
#include "ubit.hpp"

namespace ipsforge
{

inline constexpr std::uint64_t max_unary_modulus = 13;

/*! \brief Field value of a node in the unary encoding: a constant or q one-hot variables. */
struct UnaryValue
{
  bool is_const = true;
  std::uint64_t value = 0;
  int base = 0;
  std::size_t group = 0;
};

enum class GroupKind
{
  Input,
  Gate,
  Chain
};

struct UnaryGroup
{
  std::string name;
  GroupKind kind = GroupKind::Input;
  int base = 0;
  std::size_t circuit = 0; /* index into the encoder's desugared circuits */
  NodeId node = 0;
  std::size_t prefix = 0; /* chain groups: number of leading children combined */
};

struct UnaryCensus
{
  std::size_t input_bits = 0, gate_bits = 0, chain_bits = 0;
  std::size_t total() const noexcept { return input_bits + gate_bits + chain_bits; }
};

inline std::string unary_bit_name( std::string const& group, std::uint64_t j ) { return "ub_" + group + "_" + std::to_string( j ); }

/*! \brief Plain CNF encoding with q one-hot bits per value; encodes several circuits over shared inputs. */
class UnaryEncoder
{
public:
  explicit UnaryEncoder( PrimeField f ) : f_( f )
  {
    if ( f.modulus() > max_unary_modulus )
      fail( ErrorKind::FieldTooLargeForUnary, "q = " + std::to_string( f.modulus() ) + " exceeds " + std::to_string( max_unary_modulus ) );
  }

  PrimeField const& field() const noexcept { return f_; }

  UnaryValue input( std::string const& name )
  {
    auto it = inputs_.find( name );
    if ( it != inputs_.end() )
      return it->second;
    auto v = new_group( name, GroupKind::Input, 0, 0, 0 );
    inputs_.emplace( name, v );
    return v;
  }

  /*! \brief Encodes c; with `equation` set, forces the output to 0. Returns the output value. */
  UnaryValue encode( Circuit const& c, std::string const& prefix = "", bool equation = false )
  {
    auto const ci = circuits_.size();
    circuits_.push_back( desugar_labels( c ).compacted() );
    auto const& d = circuits_.back();
    std::vector<UnaryValue> val( d.size() );
    for ( NodeId i = 0; i < d.size(); ++i )
    {
      auto const& n = d.node( i );
      if ( n.kind == NodeKind::Input )
        val[i] = input( n.name );
      else if ( n.kind == NodeKind::Const )
        val[i] = UnaryValue{ true, n.value, 0, 0 };
      else
        val[i] = gate( ci, i, n, val, prefix );
    }
    auto out = val[d.output()];
    if ( equation )
    {
      if ( out.is_const )
      {
        if ( out.value != 0 )
          b_.clause( {} );
      }
      else
      {
        b_.clause( { out.base } );
        for ( std::uint64_t j = 1; j < f_.modulus(); ++j )
          b_.clause( { -( out.base + static_cast<int>( j ) ) } );
      }
    }
    node_values_.push_back( std::move( val ) );
    return out;
  }

  int bit( UnaryValue const& v, std::uint64_t j ) const
  {
    if ( v.is_const )
      return v.value == j ? lit_true : lit_false;
    return v.base + static_cast<int>( j );
  }

  CnfFormula const& cnf() const noexcept { return b_.formula(); }
  CnfFormula take_cnf() { return b_.take(); }
  std::vector<UnaryGroup> const& groups() const noexcept { return groups_; }
  std::vector<Circuit> const& circuits() const noexcept { return circuits_; }
  std::vector<std::vector<UnaryValue>> const& node_values() const noexcept { return node_values_; }

  /*! \brief Group and bit index of a variable id. */
  std::pair<std::size_t, std::uint64_t> origin( int var ) const
  {
    auto const& g = groups_.at( group_of_var_.at( static_cast<std::size_t>( var ) ) );
    return { group_of_var_.at( static_cast<std::size_t>( var ) ), static_cast<std::uint64_t>( var - g.base ) };
  }

  /*! \brief Circuit computing the value the group encodes. */
  Circuit group_circuit( std::size_t gi ) const
  {
    auto const& g = groups_.at( gi );
    Circuit r( f_ );
    if ( g.kind == GroupKind::Input )
    {
      r.set_output( r.input( g.name ) );
      return r;
    }
    auto const& d = circuits_.at( g.circuit );
    if ( g.kind == GroupKind::Gate )
    {
      r.set_output( r.import( d, g.node ) );
      return r;
    }
    auto const& n = d.node( g.node );
    std::unordered_map<NodeId, NodeId> memo;
    std::vector<Edge> kids;
    for ( std::size_t k = 0; k < g.prefix; ++k )
      kids.emplace_back( r.import( d, n.children[k].child, &memo ) );
    r.set_output( r.gate( n.kind, std::move( kids ) ) );
    return r;
  }

  UnaryCensus census() const
  {
    UnaryCensus c;
    auto const q = f_.modulus();
    for ( auto const& g : groups_ )
      ( g.kind == GroupKind::Input ? c.input_bits : g.kind == GroupKind::Gate ? c.gate_bits : c.chain_bits ) += q;
    return c;
  }

private:
  UnaryValue new_group( std::string const& name, GroupKind kind, std::size_t ci, NodeId node, std::size_t prefix )
  {
    UnaryGroup g{ name, kind, 0, ci, node, prefix };
    std::vector<int> bits;
    for ( std::uint64_t j = 0; j < f_.modulus(); ++j )
      bits.push_back( b_.var( unary_bit_name( name, j ) ) );
    g.base = bits.front();
    group_of_var_.resize( static_cast<std::size_t>( bits.back() ) + 1, 0 );
    for ( auto b : bits )
      group_of_var_[static_cast<std::size_t>( b )] = groups_.size();
    groups_.push_back( g );
    b_.exactly_one( bits );
    return UnaryValue{ false, 0, g.base, groups_.size() - 1 };
  }

  UnaryValue combine( NodeKind op, UnaryValue const& a, UnaryValue const& b, std::string const& name, GroupKind kind, std::size_t ci,
                      NodeId node, std::size_t prefix )
  {
    auto apply = [&]( std::uint64_t x, std::uint64_t y ) { return op == NodeKind::Add ? f_.add( x, y ) : f_.mul( x, y ); };
    if ( a.is_const && b.is_const )
      return UnaryValue{ true, apply( a.value, b.value ), 0, 0 };
    auto z = new_group( name, kind, ci, node, prefix );
    auto const q = f_.modulus();
    for ( std::uint64_t x = 0; x < q; ++x )
    {
      if ( a.is_const && a.value != x )
        continue;
      for ( std::uint64_t y = 0; y < q; ++y )
      {
        if ( b.is_const && b.value != y )
          continue;
        for ( std::uint64_t r = 0; r < q; ++r )
          if ( r != apply( x, y ) )
            b_.clause( { -bit( a, x ), -bit( b, y ), -bit( z, r ) } );
      }
    }
    return z;
  }

  UnaryValue gate( std::size_t ci, NodeId i, Node const& n, std::vector<UnaryValue> const& val, std::string const& prefix )
  {
    auto const t = n.children.size();
    auto const gname = prefix + "g" + std::to_string( i );
    if ( t == 0 )
      return UnaryValue{ true, n.kind == NodeKind::Add ? 0u : 1u, 0, 0 };
    if ( t == 1 )
      return val[n.children[0].child];
    auto acc = val[n.children[0].child];
    for ( std::size_t k = 1; k < t; ++k )
    {
      bool const last = k + 1 == t;
      auto const& next = val[n.children[k].child];
      acc = last ? combine( n.kind, next, acc, gname, GroupKind::Gate, ci, i, t )
                 : combine( n.kind, next, acc, gname + "v" + std::to_string( k ), GroupKind::Chain, ci, i, k + 1 );
    }
    return acc;
  }

  PrimeField f_;
  CnfBuilder b_;
  std::vector<UnaryGroup> groups_;
  std::vector<std::size_t> group_of_var_;
  std::map<std::string, UnaryValue> inputs_;
  std::vector<Circuit> circuits_;
  std::vector<std::vector<UnaryValue>> node_values_;
};

/*! \brief Plain unary CNF of a circuit (no output constraint). */
inline CnfFormula cnf_encode_circuit( Circuit const& c )
{
  UnaryEncoder e( c.field() );
  e.encode( c );
  return e.take_cnf();
}

/*! \brief Plain unary CNF of the equation c = 0. */
inline CnfFormula cnf_encode_equation( Circuit const& c )
{
  UnaryEncoder e( c.field() );
  e.encode( c, "", true );
  return e.take_cnf();
}

/*! \brief Extended CNF: algebraized clauses, x_g = sum i*x_{g,i} for every node, Boolean axioms on bits. */
inline EquationSystem ecnf_encode_equation( Circuit const& c )
{
  auto const& f = c.field();
  UnaryEncoder e( f );
  e.encode( c, "", true );
  auto const& cnf = e.cnf();
  EquationSystem s( f );
  for ( auto const& g : e.groups() )
  {
    if ( g.kind == GroupKind::Input )
      s.register_var( g.name );
    for ( std::uint64_t j = 0; j < f.modulus(); ++j )
      s.register_var( cnf.names[static_cast<std::size_t>( g.base + static_cast<int>( j ) - 1 )] );
    if ( g.kind == GroupKind::Gate )
      s.register_var( extension_var_name( g.name ) );
  }
  for ( auto const& cl : cnf.clauses )
    s.add( algebraize_clause( cl, cnf.names, f ), "clause" );
  for ( auto const& g : e.groups() )
  {
    if ( g.kind == GroupKind::Chain )
      continue;
    Circuit ax( f );
    std::vector<Edge> sum{ Edge( ax.input( g.kind == GroupKind::Input ? g.name : extension_var_name( g.name ) ) ) };
    for ( std::uint64_t j = 1; j < f.modulus(); ++j )
      sum.emplace_back( ax.input( cnf.names[static_cast<std::size_t>( g.base + static_cast<int>( j ) - 1 )] ), f.neg( j ) );
    ax.set_output( ax.add( std::move( sum ) ) );
    s.add( std::move( ax ), "extension" );
  }
  for ( auto const& n : cnf.names )
    s.add( boolean_axiom( f, n ), "boolean" );
  return s;
}

/*! \brief Semi-CNF: each unary bit replaced by the selector applied to the circuit it encodes, plus x^q - x. */
inline EquationSystem scnf_encode_equation( Circuit const& c )
{
  auto const& f = c.field();
  UnaryEncoder e( f );
  e.encode( c, "", true );
  EquationSystem s( f );
  for ( auto const& v : c.variables() )
    s.register_var( v );
  std::map<std::pair<std::size_t, std::uint64_t>, Circuit> cache;
  auto selector = [&]( std::size_t g, std::uint64_t j ) -> Circuit const& {
    auto key = std::make_pair( g, j );
    auto it = cache.find( key );
    if ( it == cache.end() )
      it = cache.emplace( key, ubit_circuit( j, e.group_circuit( g ) ) ).first;
    return it->second;
  };
  for ( auto const& cl : e.cnf().clauses )
  {
    Circuit eq( f );
    std::vector<Edge> factors;
    for ( auto l : cl )
    {
      auto [g, j] = e.origin( std::abs( l ) );
      auto id = eq.import( selector( g, j ) );
      if ( l > 0 )
        factors.emplace_back( eq.add( { Edge( eq.constant( 1 ) ), Edge( id, f.neg( 1 ) ) } ) );
      else
        factors.emplace_back( id );
    }
    eq.set_output( eq.mul( std::move( factors ) ) );
    s.add( std::move( eq ), "scnf" );
  }
  for ( auto const& v : c.variables() )
    s.add( field_axiom( f, v ), "field" );
  return s;
}

} // namespace ipsforge
