#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "transforms.hpp"

namespace ipsforge
{

struct SlpOperand
{
  std::string var;
  std::uint64_t value = 0;

  bool is_const() const noexcept { return var.empty(); }
  std::string to_string() const { return is_const() ? std::to_string( value ) : var; }
};

struct SlpEquation
{
  std::string lhs;
  NodeKind op = NodeKind::Add;
  std::vector<SlpOperand> rhs;
};

/*! \brief One equation per internal gate, optionally closed by `g_out = 0`. */
struct Slp
{
  PrimeField field;
  std::vector<SlpEquation> equations;
  std::optional<SlpOperand> zero;

  std::string to_string() const
  {
    std::ostringstream os;
    for ( auto const& eq : equations )
    {
      os << eq.lhs << " =";
      if ( eq.rhs.empty() )
        os << " " << ( eq.op == NodeKind::Add ? "0" : "1" );
      for ( std::size_t i = 0; i < eq.rhs.size(); ++i )
        os << ( i ? ( eq.op == NodeKind::Add ? " + " : " * " ) : " " ) << eq.rhs[i].to_string();
      os << "\n";
    }
    if ( zero )
      os << zero->to_string() << " = 0\n";
    return os.str();
  }
};

/*! \brief Lowers a circuit (labels desugared) to a straight-line program over gates g1, g2, ... */
inline Slp to_slp( Circuit const& c, bool as_equation = false, std::string const& prefix = "g" )
{
  auto d = desugar_labels( c ).compacted();
  Slp s{ c.field(), {}, std::nullopt };
  std::vector<SlpOperand> opnd( d.size() );
  std::size_t next = 1;
  for ( NodeId i = 0; i < d.size(); ++i )
  {
    auto const& n = d.node( i );
    if ( n.kind == NodeKind::Input )
      opnd[i] = SlpOperand{ n.name, 0 };
    else if ( n.kind == NodeKind::Const )
      opnd[i] = SlpOperand{ {}, n.value };
    else
    {
      SlpEquation eq;
      eq.lhs = prefix + std::to_string( next++ );
      eq.op = n.kind;
      for ( auto const& e : n.children )
        eq.rhs.push_back( opnd[e.child] );
      opnd[i] = SlpOperand{ eq.lhs, 0 };
      s.equations.push_back( std::move( eq ) );
    }
  }
  if ( as_equation && d.has_output() )
    s.zero = opnd[d.output()];
  return s;
}

/*! \brief Rebuilds the circuit whose output is the last gate (or the zero operand). */
inline Circuit slp_to_circuit( Slp const& s )
{
  Circuit c( s.field );
  std::map<std::string, NodeId> ids;
  auto operand = [&]( SlpOperand const& o ) -> NodeId {
    if ( o.is_const() )
      return c.constant( o.value );
    auto it = ids.find( o.var );
    if ( it != ids.end() )
      return it->second;
    return ids[o.var] = c.input( o.var );
  };
  std::optional<NodeId> last;
  for ( auto const& eq : s.equations )
  {
    std::vector<Edge> kids;
    for ( auto const& o : eq.rhs )
      kids.emplace_back( operand( o ) );
    last = ids[eq.lhs] = c.gate( eq.op, std::move( kids ) );
  }
  if ( s.zero )
    c.set_output( operand( *s.zero ) );
  else if ( last )
    c.set_output( *last );
  return c;
}

} // namespace ipsforge
