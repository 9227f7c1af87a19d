#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"
#include "transforms.hpp"

namespace ipsforge
{

inline constexpr std::uint32_t default_degree_budget = 8;
inline constexpr std::size_t max_split_fanin = 16;

using VarSet = std::set<std::string>;

/*! \brief Coefficient of the x-monomial M, read off an expanded polynomial. */
inline SparsePoly coeff_of( SparsePoly const& p, Monomial const& m, VarSet const& xvars )
{
  SparsePoly r( p.field() );
  for ( auto const& [mono, c] : p.terms() )
  {
    auto [xs, rest] = mono.split( [&]( std::string const& v ) { return xvars.count( v ) > 0; } );
    if ( xs == m )
      r.add_term( rest, c );
  }
  return r;
}

namespace detail
{

/* Add-rooted chain computing 0 with height exactly h */
inline NodeId zero_chain( Circuit& c, std::uint32_t h )
{
  if ( h == 0 )
    return c.add( {} );
  if ( h == 1 )
    return c.add( { Edge( c.constant( 0 ) ) } );
  return c.add( { Edge( c.mul( { Edge( zero_chain( c, h - 2 ) ) } ) ) } );
}

/*! \brief Raises the depth of an Add-output circuit to `target` by attaching a zero-valued branch. */
inline Circuit pad_depth( Circuit const& c, std::uint32_t target )
{
  auto d = depth( c );
  if ( d >= target )
    return c;
  Circuit r = c;
  auto const& out = r.node( r.output() );
  std::vector<Edge> kids = out.children;
  if ( target == 1 )
    kids.emplace_back( r.constant( 0 ) );
  else
    kids.emplace_back( r.mul( { Edge( zero_chain( r, target - 2 ) ) } ) );
  r.set_output( r.add( std::move( kids ) ) );
  return r.compacted();
}

inline void require_claim_form( Circuit const& c, VarSet const& xvars )
{
  auto rep = check_normal_form( c );
  if ( !rep.claim_form() )
    fail( ErrorKind::NotNormalForm, "circuit must have a + output, alternating layers and leaves under + nodes" );
  for ( auto const& n : c.nodes() )
    for ( auto const& e : n.children )
      if ( e.label.has_var() && xvars.count( e.label.var ) )
        fail( ErrorKind::NotNormalForm, "edge label uses extraction variable " + e.label.var );
}

struct SplitResult
{
  Circuit circuit;
  std::optional<NodeId> g;
  std::optional<NodeId> h;
};

/* builds P (coefficient part) and R (x = 0 part) for every node in one circuit */
inline SplitResult split_core( Circuit const& c, std::string const& x )
{
  Circuit r( c.field() );
  auto const n = c.size();
  auto reach = c.reachable();
  std::vector<std::optional<NodeId>> P( n ), R( n );
  std::vector<std::vector<NodeId>> terms( n );
  std::optional<NodeId> one, xplus;
  auto get_one = [&] { return one ? *one : *( one = r.constant( 1 ) ); };
  auto get_xplus = [&] { return xplus ? *xplus : *( xplus = r.add( { Edge( r.input( x ) ) } ) ); };
  for ( NodeId i = 0; i < n; ++i )
  {
    if ( !reach[i] )
      continue;
    auto const& v = c.node( i );
    if ( v.kind == NodeKind::Input )
    {
      if ( v.name == x )
        P[i] = get_one();
      else
        R[i] = r.input( v.name );
      continue;
    }
    if ( v.kind == NodeKind::Const )
    {
      if ( v.value != 0 )
        R[i] = r.constant( v.value );
      continue;
    }
    if ( v.kind == NodeKind::Add )
    {
      std::vector<Edge> pe, re;
      for ( auto const& e : v.children )
      {
        auto const& u = c.node( e.child );
        if ( u.kind == NodeKind::Mul )
          for ( auto t : terms[e.child] )
            pe.emplace_back( t, e.label );
        else if ( P[e.child] )
          pe.emplace_back( *P[e.child], e.label );
        if ( R[e.child] )
          re.emplace_back( *R[e.child], e.label );
      }
      if ( !pe.empty() )
        P[i] = r.add( std::move( pe ) );
      if ( !re.empty() )
        R[i] = r.add( std::move( re ) );
      continue;
    }
    /* product node */
    auto const t = v.children.size();
    if ( t > max_split_fanin )
      fail( ErrorKind::BudgetExceeded, "product fan-in " + std::to_string( t ) + " too large for subset expansion" );
    bool r_zero = false;
    std::vector<Edge> re;
    for ( auto const& e : v.children )
    {
      if ( !R[e.child] )
        r_zero = true;
      else
        re.emplace_back( *R[e.child], e.label );
    }
    if ( !r_zero )
      R[i] = r.mul( std::move( re ) );
    for ( std::uint64_t S = 1; S < ( std::uint64_t{ 1 } << t ); ++S )
    {
      std::vector<Edge> te;
      bool zero = false;
      std::size_t card = 0;
      for ( std::size_t k = 0; k < t && !zero; ++k )
      {
        auto const& e = v.children[k];
        auto const& src = ( S >> k ) & 1u ? P[e.child] : R[e.child];
        if ( !src )
          zero = true;
        else
          te.emplace_back( *src, e.label );
        card += ( S >> k ) & 1u;
      }
      if ( zero )
        continue;
      for ( std::size_t k = 1; k < card; ++k )
        te.emplace_back( get_xplus() );
      terms[i].push_back( r.mul( std::move( te ) ) );
    }
  }
  auto const out = c.output();
  return SplitResult{ std::move( r ), P[out], R[out] };
}

inline Circuit select_output( Circuit const& c, std::optional<NodeId> id )
{
  Circuit r = c;
  r.set_output( id ? *id : r.add( { Edge( r.constant( 0 ) ) } ) );
  return r.compacted();
}

} // namespace detail

/*! \brief Writes c = x*g + h with h free of x; g keeps the depth of c. */
inline std::pair<Circuit, Circuit> split_variable( Circuit const& c, std::string const& x )
{
  detail::require_claim_form( c, VarSet{ x } );
  auto sr = detail::split_core( c, x );
  auto g = detail::pad_depth( detail::select_output( sr.circuit, sr.g ), depth( c ) );
  auto h = detail::select_output( sr.circuit, sr.h );
  return { std::move( g ), std::move( h ) };
}

/*! \brief Depth-preserving circuit for the coefficient of M; all x leaves end up as constant 0. */
inline Circuit coeff_extract_bounded( Circuit const& c, Monomial const& m, VarSet const& xvars,
                                      std::uint32_t degree_budget = default_degree_budget )
{
  if ( m.degree() > degree_budget )
    fail( ErrorKind::DegreeBudgetExceeded, "monomial degree " + std::to_string( m.degree() ) );
  for ( auto const& [v, e] : m.powers() )
    if ( !xvars.count( v ) )
      fail( ErrorKind::NotNormalForm, "monomial variable " + v + " is not an x variable" );
  detail::require_claim_form( c, xvars );
  Circuit cur = c.compacted();
  for ( auto const& [v, e] : m.powers() )
    for ( std::uint32_t k = 0; k < e; ++k )
    {
      auto sr = detail::split_core( cur, v );
      cur = detail::select_output( sr.circuit, sr.g );
    }
  Substitution zero;
  for ( auto const& v : xvars )
    zero.emplace( v, std::uint64_t{ 0 } );
  return detail::pad_depth( restrict( cur, zero ), depth( c ) );
}

/*! \brief Coefficient circuit for arbitrary circuits via truncated products over the box below M. */
inline Circuit coeff_extract_general( Circuit const& c_in, Monomial const& m, VarSet const& xvars,
                                      std::uint32_t degree_budget = default_degree_budget )
{
  if ( m.degree() > degree_budget )
    fail( ErrorKind::DegreeBudgetExceeded, "monomial degree " + std::to_string( m.degree() ) );
  auto const c = desugar_labels( c_in ).compacted();
  auto const& f = c.field();
  auto const& pw = m.powers();
  std::size_t box = 1;
  std::vector<std::size_t> radix;
  for ( auto const& p : pw )
  {
    radix.push_back( p.second + 1 );
    box *= p.second + 1;
  }
  auto digits = [&]( std::size_t a ) {
    std::vector<std::size_t> d( pw.size() );
    for ( std::size_t k = 0; k < pw.size(); ++k )
    {
      d[k] = a % radix[k];
      a /= radix[k];
    }
    return d;
  };
  std::vector<std::vector<std::size_t>> dig( box );
  for ( std::size_t a = 0; a < box; ++a )
    dig[a] = digits( a );
  auto index_of = [&]( std::vector<std::size_t> const& d ) {
    std::size_t a = 0;
    for ( std::size_t k = pw.size(); k-- > 0; )
      a = a * radix[k] + d[k];
    return a;
  };

  using Table = std::vector<std::optional<NodeId>>;
  Circuit r( f );
  std::vector<Table> tab( c.size(), Table( box ) );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& v = c.node( i );
    auto& t = tab[i];
    if ( v.kind == NodeKind::Const )
    {
      if ( v.value )
        t[0] = r.constant( v.value );
    }
    else if ( v.kind == NodeKind::Input )
    {
      if ( !xvars.count( v.name ) )
        t[0] = r.input( v.name );
      else
        for ( std::size_t k = 0; k < pw.size(); ++k )
          if ( pw[k].first == v.name )
          {
            std::vector<std::size_t> d( pw.size(), 0 );
            d[k] = 1;
            t[index_of( d )] = r.constant( 1 );
          }
    }
    else if ( v.kind == NodeKind::Add )
    {
      for ( std::size_t a = 0; a < box; ++a )
      {
        std::vector<Edge> kids;
        for ( auto const& e : v.children )
          if ( tab[e.child][a] )
            kids.emplace_back( *tab[e.child][a] );
        if ( !kids.empty() )
          t[a] = kids.size() == 1 ? kids[0].child : r.add( std::move( kids ) );
      }
    }
    else
    {
      Table acc( box );
      acc[0] = r.constant( 1 );
      for ( auto const& e : v.children )
      {
        auto const& b = tab[e.child];
        Table next( box );
        for ( std::size_t a = 0; a < box; ++a )
        {
          std::vector<Edge> kids;
          for ( std::size_t x = 0; x < box; ++x )
          {
            bool below = true;
            std::vector<std::size_t> rest( pw.size() );
            for ( std::size_t k = 0; k < pw.size(); ++k )
            {
              if ( dig[x][k] > dig[a][k] )
                below = false;
              else
                rest[k] = dig[a][k] - dig[x][k];
            }
            if ( !below || !acc[x] )
              continue;
            auto const y = index_of( rest );
            if ( b[y] )
              kids.emplace_back( r.mul( { Edge( *acc[x] ), Edge( *b[y] ) } ) );
          }
          if ( !kids.empty() )
            next[a] = kids.size() == 1 ? kids[0].child : r.add( std::move( kids ) );
        }
        acc = std::move( next );
      }
      t = std::move( acc );
    }
  }
  auto const& top = tab[c.output()][box - 1];
  r.set_output( top ? *top : r.constant( 0 ) );
  return r.compacted();
}

} // namespace ipsforge
