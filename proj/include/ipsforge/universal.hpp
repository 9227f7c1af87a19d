#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "transforms.hpp"

namespace ipsforge
{

inline std::size_t delta_prime( std::size_t delta ) { return ( delta + 2 ) / 2 + 1; }

struct MulSlot
{
  std::size_t group = 1;
  std::vector<std::size_t> children; /* indices into the + level below */
};

/*! \brief Level structure of the universal circuit; level 1 is the output, level 2*delta' holds the leaves. */
struct UniversalLayout
{
  std::size_t s = 0, delta = 0, t = 0, dprime = 0;
  std::string prefix = "w";
  std::vector<std::string> x_vars;
  std::vector<std::vector<NodeId>> levels;     /* levels[0] unused */
  std::vector<std::vector<MulSlot>> mul_slots; /* filled on × levels only */
  std::vector<std::string> edge_vars;

  std::size_t num_levels() const noexcept { return 2 * dprime; }
  std::size_t depth() const noexcept { return 2 * dprime - 1; }
  std::size_t leaf_level() const noexcept { return 2 * dprime; }
  bool is_plus_level( std::size_t level ) const noexcept { return level % 2 == 1 && level < leaf_level(); }

  std::string edge_var( std::size_t level, std::size_t plus, std::size_t child ) const
  {
    return prefix + "_" + std::to_string( level ) + "_" + std::to_string( plus ) + "_" + std::to_string( child );
  }

  std::string to_text() const
  {
    std::ostringstream os;
    os << "layout nvars=" << x_vars.size() << " s=" << s << " delta=" << delta << " t=" << t << " levels=" << num_levels()
       << " edgevars=" << edge_vars.size() << "\n";
    for ( std::size_t l = 1; l <= num_levels(); ++l )
    {
      os << "level " << l << ( l == leaf_level() ? " leaves:" : is_plus_level( l ) ? " plus:" : " mul:" );
      for ( std::size_t k = 0; k < levels[l].size(); ++k )
      {
        os << " n" << levels[l][k];
        if ( l == leaf_level() )
          os << ":" << ( k < x_vars.size() ? x_vars[k] : "1" );
        else if ( !is_plus_level( l ) )
          os << ":g" << mul_slots[l][k].group;
      }
      os << "\n";
    }
    return os.str();
  }
};

namespace detail
{

inline std::size_t mul_level_width( std::size_t s, std::size_t t )
{
  std::size_t w = 0;
  for ( std::size_t j = 1; j <= std::min( s, t ); ++j )
    w += ( s + j - 1 ) / j;
  return w;
}

inline std::vector<MulSlot> mul_wiring( std::size_t s, std::size_t t )
{
  std::vector<MulSlot> slots;
  for ( std::size_t j = 1; j <= std::min( s, t ); ++j )
  {
    std::size_t const count = ( s + j - 1 ) / j;
    for ( std::size_t m = 0; m < count; ++m )
    {
      MulSlot slot;
      slot.group = j;
      std::size_t const start = ( m + 1 ) * j <= s ? m * j : s - j;
      for ( std::size_t r = 0; r < j; ++r )
        slot.children.push_back( start + r );
      slots.push_back( std::move( slot ) );
    }
  }
  return slots;
}

} // namespace detail

/*! \brief Number of edge variables of the layout for (nVars, s, delta, t). */
inline std::uint64_t k_edge_vars( std::size_t n_vars, std::size_t s, std::size_t delta, std::size_t t )
{
  auto const dp = delta_prime( delta );
  auto const x = detail::mul_level_width( s, t );
  return x + ( dp - 2 ) * s * x + s * ( n_vars + 1 );
}

inline constexpr std::size_t default_universal_budget = 10000000;

/*! \brief Universal circuit over the given leaf variables; edge labels are the w variables. */
inline std::pair<Circuit, UniversalLayout> build_universal( std::vector<std::string> const& x_vars, std::size_t s, std::size_t delta,
                                                            std::size_t t, PrimeField const& field, std::string const& prefix = "w",
                                                            std::size_t budget = default_universal_budget )
{
  if ( s == 0 || t < 1 || delta < 1 )
    fail( ErrorKind::DimensionError, "universal layout needs s >= 1, t >= 1, delta >= 1" );
  UniversalLayout lay;
  lay.s = s;
  lay.delta = delta;
  lay.t = t;
  lay.dprime = delta_prime( delta );
  lay.prefix = prefix;
  lay.x_vars = x_vars;
  auto const mulw = detail::mul_level_width( s, t );
  auto const est = x_vars.size() + 1 + lay.dprime * ( s + mulw );
  if ( est > budget || k_edge_vars( x_vars.size(), s, delta, t ) > budget )
    fail( ErrorKind::BudgetExceeded, "universal circuit exceeds node budget" );

  Circuit u( field );
  auto const L = lay.num_levels();
  lay.levels.assign( L + 1, {} );
  lay.mul_slots.assign( L + 1, {} );
  for ( auto const& v : x_vars )
    lay.levels[L].push_back( u.input( v ) );
  lay.levels[L].push_back( u.constant( 1 ) );
  auto const wiring = detail::mul_wiring( s, t );
  for ( std::size_t l = L - 1; l >= 1; --l )
  {
    auto const& below = lay.levels[l + 1];
    if ( lay.is_plus_level( l ) )
    {
      std::size_t const width = l == 1 ? 1 : s;
      for ( std::size_t p = 0; p < width; ++p )
      {
        std::vector<Edge> kids;
        for ( std::size_t k = 0; k < below.size(); ++k )
        {
          auto name = lay.edge_var( l, p, k );
          lay.edge_vars.push_back( name );
          kids.emplace_back( below[k], Label{ 1, name } );
        }
        lay.levels[l].push_back( u.add( std::move( kids ) ) );
      }
    }
    else
    {
      lay.mul_slots[l] = wiring;
      for ( auto const& slot : wiring )
      {
        std::vector<Edge> kids;
        for ( auto k : slot.children )
          kids.emplace_back( below[k] );
        lay.levels[l].push_back( u.mul( std::move( kids ) ) );
      }
    }
  }
  u.set_output( lay.levels[1][0] );
  return { std::move( u ), std::move( lay ) };
}

inline std::pair<Circuit, UniversalLayout> build_universal( std::size_t n_vars, std::size_t s, std::size_t delta, std::size_t t,
                                                            PrimeField const& field )
{
  return build_universal( indexed_vars( "x", n_vars ), s, delta, t, field );
}

namespace detail
{

struct FNode
{
  NodeId id;
  std::uint64_t label; /* label of the edge from the parent */
};

/* assigns ×-nodes of f (by fan-in) to slots with pairwise disjoint child sets */
inline bool pack_slots( std::vector<std::size_t> const& order, std::vector<std::size_t> const& fanin, std::vector<MulSlot> const& slots,
                        std::size_t idx, std::vector<char>& slot_used, std::vector<char>& child_used, std::vector<std::size_t>& chosen )
{
  if ( idx == order.size() )
    return true;
  auto const node = order[idx];
  for ( std::size_t k = 0; k < slots.size(); ++k )
  {
    if ( slot_used[k] || slots[k].group != fanin[node] )
      continue;
    if ( std::any_of( slots[k].children.begin(), slots[k].children.end(), [&]( std::size_t ch ) { return child_used[ch] != 0; } ) )
      continue;
    slot_used[k] = 1;
    for ( auto ch : slots[k].children )
      child_used[ch] = 1;
    chosen[node] = k;
    if ( pack_slots( order, fanin, slots, idx + 1, slot_used, child_used, chosen ) )
      return true;
    slot_used[k] = 0;
    for ( auto ch : slots[k].children )
      child_used[ch] = 0;
  }
  return false;
}

} // namespace detail

/*! \brief Edge-variable witness with U restricted to it computing f; unused edges are 0. */
inline Assignment embed( Circuit const& f_in, UniversalLayout const& lay )
{
  auto const& field = f_in.field();
  Circuit f = check_normal_form( f_in ).all() ? f_in.compacted() : normalize_depth_form( bound_mul_fanin( f_in, std::max<std::size_t>( 2, lay.t ) ) );
  if ( depth( f ) > lay.depth() )
    fail( ErrorKind::DoesNotFit, "depth " + std::to_string( depth( f ) ) + " exceeds layout depth " + std::to_string( lay.depth() ) );
  for ( auto const& n : f.nodes() )
    for ( auto const& e : n.children )
      if ( e.label.has_var() )
        fail( ErrorKind::DoesNotFit, "variable edge labels cannot be embedded" );
  /* pad on top with unary +/x pairs */
  while ( depth( f ) < lay.depth() )
  {
    auto const out = f.output();
    auto m = f.mul( { Edge( out ) } );
    f.set_output( f.add( { Edge( m ) } ) );
  }
  std::map<std::string, std::size_t> leaf_index;
  for ( std::size_t i = 0; i < lay.x_vars.size(); ++i )
    leaf_index[lay.x_vars[i]] = i;
  std::size_t const const_index = lay.x_vars.size();

  Assignment w;
  for ( auto const& v : lay.edge_vars )
    w[v] = 0;

  /* slot of each f node on its level */
  std::map<NodeId, std::size_t> slot;
  slot[f.output()] = 0;
  std::vector<NodeId> plus_level{ f.output() };
  for ( std::size_t l = 1; l < lay.leaf_level(); l += 2 )
  {
    if ( l + 1 == lay.leaf_level() )
    {
      for ( auto p : plus_level )
        for ( auto const& e : f.node( p ).children )
        {
          auto const& leaf = f.node( e.child );
          std::size_t idx = const_index;
          std::uint64_t val = e.label.coeff;
          if ( leaf.kind == NodeKind::Input )
          {
            auto it = leaf_index.find( leaf.name );
            if ( it == leaf_index.end() )
              fail( ErrorKind::DoesNotFit, "variable " + leaf.name + " is not a layout leaf" );
            idx = it->second;
          }
          else if ( leaf.kind == NodeKind::Const )
            val = field.mul( val, leaf.value );
          else
            fail( ErrorKind::DoesNotFit, "non-leaf at leaf level" );
          auto& cell = w[lay.edge_var( l, slot.at( p ), idx )];
          cell = field.add( cell, val );
        }
      break;
    }
    /* × level l+1 */
    std::vector<detail::FNode> muls;
    std::vector<std::pair<NodeId, std::size_t>> parent_of;
    for ( auto p : plus_level )
      for ( auto const& e : f.node( p ).children )
      {
        if ( f.node( e.child ).kind != NodeKind::Mul )
          fail( ErrorKind::DoesNotFit, "leaf above the leaf level" );
        muls.push_back( { e.child, e.label.coeff } );
        parent_of.emplace_back( p, muls.size() - 1 );
      }
    auto const& slots = lay.mul_slots[l + 1];
    std::vector<std::size_t> fanin( muls.size() ), order( muls.size() );
    for ( std::size_t k = 0; k < muls.size(); ++k )
    {
      fanin[k] = f.node( muls[k].id ).children.size();
      if ( fanin[k] == 0 || fanin[k] > std::min( lay.s, lay.t ) )
        fail( ErrorKind::DoesNotFit, "product fan-in " + std::to_string( fanin[k] ) + " outside layout groups" );
      order[k] = k;
    }
    std::stable_sort( order.begin(), order.end(), [&]( std::size_t a, std::size_t b ) { return fanin[a] > fanin[b]; } );
    std::vector<char> slot_used( slots.size(), 0 ), child_used( lay.s, 0 );
    std::vector<std::size_t> chosen( muls.size(), 0 );
    if ( !detail::pack_slots( order, fanin, slots, 0, slot_used, child_used, chosen ) )
      fail( ErrorKind::DoesNotFit, "level " + std::to_string( l + 1 ) + " products do not fit the layout" );
    std::vector<NodeId> next_plus;
    for ( auto const& [p, k] : parent_of )
    {
      auto const& m = f.node( muls[k].id );
      std::uint64_t val = muls[k].label;
      for ( std::size_t r = 0; r < m.children.size(); ++r )
      {
        val = field.mul( val, m.children[r].label.coeff );
        slot[m.children[r].child] = slots[chosen[k]].children[r];
        next_plus.push_back( m.children[r].child );
      }
      auto& cell = w[lay.edge_var( l, slot.at( p ), chosen[k] )];
      cell = field.add( cell, val );
    }
    plus_level = std::move( next_plus );
  }
  return w;
}

} // namespace ipsforge
