#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"

namespace ipsforge
{

inline constexpr std::uint32_t default_depth_budget = 12;
inline constexpr std::size_t default_tree_budget = 2000000;

/*! \brief Rewrites every non-unit edge label as an explicit multiplication. */
inline Circuit desugar_labels( Circuit const& c )
{
  Circuit r( c.field() );
  std::map<std::uint64_t, NodeId> consts;
  std::map<std::string, NodeId> vars;
  auto const_node = [&]( std::uint64_t v ) {
    auto it = consts.find( v );
    return it != consts.end() ? it->second : consts[v] = r.constant( v );
  };
  auto var_node = [&]( std::string const& v ) {
    auto it = vars.find( v );
    return it != vars.end() ? it->second : vars[v] = r.input( v );
  };
  std::vector<NodeId> map( c.size() );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    if ( n.kind == NodeKind::Input )
    {
      map[i] = var_node( n.name );
      continue;
    }
    if ( n.kind == NodeKind::Const )
    {
      map[i] = const_node( n.value );
      continue;
    }
    std::vector<Edge> kids;
    for ( auto const& e : n.children )
    {
      if ( e.label.is_unit() )
      {
        kids.emplace_back( map[e.child] );
        continue;
      }
      std::vector<Edge> factors{ Edge( map[e.child] ) };
      if ( e.label.coeff != 1 )
        factors.emplace_back( const_node( e.label.coeff ) );
      if ( e.label.has_var() )
        factors.emplace_back( var_node( e.label.var ) );
      kids.emplace_back( r.mul( std::move( factors ) ) );
    }
    map[i] = r.gate( n.kind, std::move( kids ) );
  }
  if ( c.has_output() )
    r.set_output( map[c.output()] );
  return r;
}

/* structural validators */

struct NdfReport
{
  bool leaves_feed_plus = true;
  bool output_is_plus = true;
  bool alternating = true;
  bool tree = true;
  bool uniform_leaf_depth = true;

  bool claim_form() const noexcept { return leaves_feed_plus && output_is_plus && alternating; }
  bool all() const noexcept { return claim_form() && tree && uniform_leaf_depth; }
};

/*! \brief Checks each normal-depth-form clause independently on the output cone. */
inline NdfReport check_normal_form( Circuit const& c )
{
  NdfReport rep;
  if ( !c.has_output() )
    return rep;
  auto reach = c.reachable();
  std::vector<std::uint32_t> parents( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    if ( !reach[i] )
      continue;
    auto const& n = c.node( i );
    for ( auto const& e : n.children )
    {
      auto const& ch = c.node( e.child );
      ++parents[e.child];
      if ( ch.is_leaf() && n.kind != NodeKind::Add )
        rep.leaves_feed_plus = false;
      if ( ch.kind == n.kind )
        rep.alternating = false;
    }
  }
  rep.output_is_plus = c.node( c.output() ).kind == NodeKind::Add;
  for ( NodeId i = 0; i < c.size(); ++i )
    if ( reach[i] && parents[i] > 1 )
      rep.tree = false;
  std::vector<std::set<std::uint32_t>> depths( c.size() );
  depths[c.output()].insert( 0 );
  std::set<std::uint32_t> leaf_depths;
  for ( auto i = c.size(); i-- > 0; )
  {
    if ( !reach[i] )
      continue;
    auto const& n = c.node( static_cast<NodeId>( i ) );
    if ( n.is_leaf() )
      leaf_depths.insert( depths[i].begin(), depths[i].end() );
    for ( auto const& e : n.children )
      for ( auto d : depths[i] )
        depths[e.child].insert( d + 1 );
  }
  rep.uniform_leaf_depth = leaf_depths.size() <= 1;
  return rep;
}

/* normal depth form */

namespace detail
{

struct TEdge;

struct TNode
{
  NodeKind kind = NodeKind::Const;
  std::string name;
  std::uint64_t value = 0;
  std::vector<TEdge> kids;

  bool is_leaf() const noexcept { return kind == NodeKind::Input || kind == NodeKind::Const; }
};

struct TEdge
{
  Label label;
  TNode node;
};

inline std::optional<Label> label_product( PrimeField const& f, Label const& a, Label const& b )
{
  if ( a.has_var() && b.has_var() )
    return std::nullopt;
  return Label{ f.mul( a.coeff, b.coeff ), a.has_var() ? a.var : b.var };
}

inline TNode unfold( Circuit const& c, NodeId id, std::size_t& budget )
{
  if ( budget == 0 )
    fail( ErrorKind::BudgetExceeded, "tree unfolding exceeds node budget" );
  --budget;
  auto const& n = c.node( id );
  TNode t;
  t.kind = n.kind;
  t.name = n.name;
  t.value = n.value;
  for ( auto const& e : n.children )
    t.kids.push_back( TEdge{ e.label, unfold( c, e.child, budget ) } );
  return t;
}

inline TNode wrap( NodeKind kind, Label label, TNode inner )
{
  TNode w;
  w.kind = kind;
  w.kids.push_back( TEdge{ std::move( label ), std::move( inner ) } );
  return w;
}

/*! \brief Merges same-kind chains and removes empty gates, bottom-up. */
inline TNode merge_chains( PrimeField const& f, TNode t )
{
  if ( t.is_leaf() )
    return t;
  std::vector<TEdge> kids;
  for ( auto& e : t.kids )
  {
    TNode child = merge_chains( f, std::move( e.node ) );
    if ( child.kind == t.kind && !child.kids.empty() )
    {
      if ( t.kind == NodeKind::Add )
      {
        bool ok = std::all_of( child.kids.begin(), child.kids.end(), [&]( TEdge const& g ) { return label_product( f, e.label, g.label ).has_value(); } );
        if ( ok )
        {
          for ( auto& g : child.kids )
            kids.push_back( TEdge{ *label_product( f, e.label, g.label ), std::move( g.node ) } );
          continue;
        }
      }
      else if ( auto l = label_product( f, e.label, child.kids.front().label ) )
      {
        child.kids.front().label = *l;
        for ( auto& g : child.kids )
          kids.push_back( std::move( g ) );
        continue;
      }
      auto other = t.kind == NodeKind::Add ? NodeKind::Mul : NodeKind::Add;
      kids.push_back( TEdge{ e.label, wrap( other, Label{}, std::move( child ) ) } );
      continue;
    }
    kids.push_back( TEdge{ e.label, std::move( child ) } );
  }
  if ( kids.empty() )
  {
    TNode k;
    k.kind = NodeKind::Const;
    k.value = t.kind == NodeKind::Add ? 0 : 1;
    return k;
  }
  t.kids = std::move( kids );
  return t;
}

inline void wrap_mul_leaves( TNode& t )
{
  for ( auto& e : t.kids )
  {
    if ( t.kind == NodeKind::Mul && e.node.is_leaf() )
      e.node = wrap( NodeKind::Add, Label{}, std::move( e.node ) );
    else
      wrap_mul_leaves( e.node );
  }
}

inline std::uint32_t max_leaf_depth( TNode const& t, std::uint32_t d )
{
  if ( t.is_leaf() )
    return d;
  std::uint32_t m = d;
  for ( auto const& e : t.kids )
    m = std::max( m, max_leaf_depth( e.node, d + 1 ) );
  return m;
}

inline void pad_leaves( TNode& t, std::uint32_t d, std::uint32_t target )
{
  for ( auto& e : t.kids )
  {
    if ( e.node.is_leaf() )
    {
      auto leaf_depth = d + 1;
      TNode cur = std::move( e.node );
      while ( leaf_depth < target )
      {
        cur = wrap( NodeKind::Mul, Label{}, wrap( NodeKind::Add, Label{}, std::move( cur ) ) );
        leaf_depth += 2;
      }
      e.node = std::move( cur );
    }
    else
      pad_leaves( e.node, d + 1, target );
  }
}

inline NodeId emit( Circuit& c, TNode const& t )
{
  if ( t.kind == NodeKind::Input )
    return c.input( t.name );
  if ( t.kind == NodeKind::Const )
    return c.constant( t.value );
  std::vector<Edge> kids;
  for ( auto const& e : t.kids )
    kids.emplace_back( emit( c, e.node ), e.label );
  return c.gate( t.kind, std::move( kids ) );
}

} // namespace detail

/*! \brief Tree-shaped, alternating, uniform-leaf-depth form with a + output and leaves under + nodes. */
inline Circuit normalize_depth_form( Circuit const& c, std::uint32_t depth_budget = default_depth_budget,
                                     std::size_t tree_budget = default_tree_budget )
{
  if ( depth( c ) > depth_budget )
    fail( ErrorKind::DepthBudgetExceeded, "depth " + std::to_string( depth( c ) ) + " exceeds " + std::to_string( depth_budget ) );
  auto budget = tree_budget;
  auto t = detail::unfold( c, c.output(), budget );
  t = detail::merge_chains( c.field(), std::move( t ) );
  detail::wrap_mul_leaves( t );
  if ( t.kind != NodeKind::Add )
    t = detail::wrap( NodeKind::Add, Label{}, std::move( t ) );
  detail::pad_leaves( t, 0, detail::max_leaf_depth( t, 0 ) );
  Circuit r( c.field() );
  r.set_output( detail::emit( r, t ) );
  return r;
}

/*! \brief Alternation fix-up that keeps sharing: inserts unary dummy gates on offending edges. */
inline Circuit make_alternating( Circuit const& c )
{
  Circuit r( c.field() );
  std::vector<NodeId> map( c.size() );
  std::map<std::pair<NodeId, int>, NodeId> wrappers;
  auto wrapped = [&]( NodeId child, NodeKind kind ) {
    auto key = std::make_pair( child, static_cast<int>( kind ) );
    auto it = wrappers.find( key );
    if ( it != wrappers.end() )
      return it->second;
    return wrappers[key] = r.gate( kind, { Edge( child ) } );
  };
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    if ( n.is_leaf() )
    {
      map[i] = n.kind == NodeKind::Input ? r.input( n.name ) : r.constant( n.value );
      continue;
    }
    std::vector<Edge> kids;
    for ( auto const& e : n.children )
    {
      auto const& ch = c.node( e.child );
      auto id = map[e.child];
      if ( n.kind == NodeKind::Add && ch.kind == NodeKind::Add )
        id = wrapped( id, NodeKind::Mul );
      else if ( n.kind == NodeKind::Mul && ( ch.kind == NodeKind::Mul || ch.is_leaf() ) )
        id = wrapped( id, NodeKind::Add );
      kids.emplace_back( id, e.label );
    }
    map[i] = r.gate( n.kind, std::move( kids ) );
  }
  auto out = map[c.output()];
  if ( c.node( c.output() ).kind != NodeKind::Add )
    out = r.add( { Edge( out ) } );
  r.set_output( out );
  return r.compacted();
}

/*! \brief Splits wide products into balanced t-ary trees, keeping alternation via unary + nodes. */
inline Circuit bound_mul_fanin( Circuit const& c, std::size_t t )
{
  if ( t < 2 )
    fail( ErrorKind::DimensionError, "fan-in bound must be at least 2" );
  Circuit r( c.field() );
  std::vector<NodeId> map( c.size() );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    if ( n.is_leaf() )
    {
      map[i] = n.kind == NodeKind::Input ? r.input( n.name ) : r.constant( n.value );
      continue;
    }
    std::vector<Edge> kids;
    for ( auto const& e : n.children )
      kids.emplace_back( map[e.child], e.label );
    if ( n.kind == NodeKind::Mul )
    {
      while ( kids.size() > t )
      {
        std::size_t const groups = ( kids.size() + t - 1 ) / t;
        std::vector<Edge> next;
        std::size_t pos = 0;
        for ( std::size_t g = 0; g < groups; ++g )
        {
          std::size_t const take = kids.size() / groups + ( g < kids.size() % groups ? 1 : 0 );
          if ( take == 1 )
          {
            next.push_back( kids[pos++] );
            continue;
          }
          std::vector<Edge> chunk( kids.begin() + static_cast<std::ptrdiff_t>( pos ), kids.begin() + static_cast<std::ptrdiff_t>( pos + take ) );
          pos += take;
          next.emplace_back( r.add( { Edge( r.mul( std::move( chunk ) ) ) } ) );
        }
        kids = std::move( next );
      }
    }
    map[i] = r.gate( n.kind, std::move( kids ) );
  }
  if ( c.has_output() )
    r.set_output( map[c.output()] );
  return r;
}

/*! \brief Constant folding, zero-edge removal and unary-gate aliasing; semantics preserved. */
inline Circuit simplify( Circuit const& c )
{
  auto const& f = c.field();
  Circuit r( f );
  std::map<std::string, NodeId> vars;
  std::map<std::uint64_t, NodeId> consts;
  auto var_node = [&]( std::string const& v ) {
    auto it = vars.find( v );
    return it != vars.end() ? it->second : vars[v] = r.input( v );
  };
  auto const_node = [&]( std::uint64_t v ) {
    auto it = consts.find( v );
    return it != consts.end() ? it->second : consts[v] = r.constant( v );
  };
  struct Val
  {
    bool is_const = false;
    std::uint64_t value = 0;
    NodeId id = 0;
  };
  std::vector<Val> val( c.size() );
  auto reach = c.reachable();
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    if ( !reach[i] )
      continue;
    auto const& n = c.node( i );
    if ( n.kind == NodeKind::Const )
    {
      val[i] = Val{ true, n.value, 0 };
      continue;
    }
    if ( n.kind == NodeKind::Input )
    {
      val[i] = Val{ false, 0, var_node( n.name ) };
      continue;
    }
    std::vector<Edge> kids;
    if ( n.kind == NodeKind::Add )
    {
      std::uint64_t k = 0;
      for ( auto const& e : n.children )
      {
        auto const& v = val[e.child];
        if ( e.label.coeff == 0 || ( v.is_const && v.value == 0 ) )
          continue;
        if ( v.is_const && !e.label.has_var() )
          k = f.add( k, f.mul( v.value, e.label.coeff ) );
        else if ( v.is_const )
          kids.emplace_back( var_node( e.label.var ), f.mul( v.value, e.label.coeff ) );
        else
          kids.emplace_back( v.id, e.label );
      }
      if ( kids.empty() )
      {
        val[i] = Val{ true, k, 0 };
        continue;
      }
      if ( k != 0 )
        kids.emplace_back( const_node( k ) );
      if ( kids.size() == 1 && kids[0].label.is_unit() )
      {
        val[i] = Val{ false, 0, kids[0].child };
        continue;
      }
      val[i] = Val{ false, 0, r.add( std::move( kids ) ) };
      continue;
    }
    std::uint64_t k = 1;
    for ( auto const& e : n.children )
    {
      auto const& v = val[e.child];
      k = f.mul( k, e.label.coeff );
      if ( v.is_const )
      {
        k = f.mul( k, v.value );
        if ( e.label.has_var() )
          kids.emplace_back( var_node( e.label.var ) );
      }
      else
        kids.emplace_back( v.id, Label{ 1, e.label.var } );
    }
    if ( k == 0 )
    {
      val[i] = Val{ true, 0, 0 };
      continue;
    }
    if ( kids.empty() )
    {
      val[i] = Val{ true, k, 0 };
      continue;
    }
    kids.front().label.coeff = k;
    if ( kids.size() == 1 && kids[0].label.is_unit() )
    {
      val[i] = Val{ false, 0, kids[0].child };
      continue;
    }
    val[i] = Val{ false, 0, r.mul( std::move( kids ) ) };
  }
  if ( !c.has_output() )
    return r;
  auto const& o = val[c.output()];
  r.set_output( o.is_const ? const_node( o.value ) : o.id );
  return r.compacted();
}

} // namespace ipsforge
