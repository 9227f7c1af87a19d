#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "cnf.hpp"
#include "errors.hpp"

namespace ipsforge
{

inline constexpr std::uint64_t default_search_budget = 50000000;

namespace detail
{

/* chronological backtracking; each clause is checked once its largest variable is set */
class CnfSearch
{
public:
  CnfSearch( CnfFormula const& f, std::uint64_t budget ) : f_( f ), budget_( budget ), by_max_( f.num_vars() + 1 )
  {
    for ( std::size_t i = 0; i < f.clauses.size(); ++i )
    {
      auto const& cl = f.clauses[i];
      if ( cl.empty() )
      {
        contradiction_ = true;
        continue;
      }
      int m = 0;
      for ( auto l : cl )
        m = std::max( m, std::abs( l ) );
      by_max_[static_cast<std::size_t>( m )].push_back( i );
    }
    val_.assign( f.num_vars() + 1, 0 );
  }

  /* visit(models) returns false to stop */
  template<class Visit>
  void run( Visit&& visit )
  {
    if ( contradiction_ )
      return;
    auto const n = f_.num_vars();
    if ( n == 0 )
    {
      visit( val_ );
      return;
    }
    std::size_t v = 1;
    std::vector<int> state( n + 1, -1 ); /* -1 untried, 0 tried false, 1 tried true */
    while ( v >= 1 )
    {
      if ( v > n )
      {
        if ( !visit( val_ ) )
          return;
        --v;
        continue;
      }
      if ( state[v] == 1 )
      {
        state[v] = -1;
        --v;
        continue;
      }
      state[v] += 1;
      val_[v] = static_cast<char>( state[v] );
      if ( ++nodes_ > budget_ )
        fail( ErrorKind::BudgetExceeded, "SAT search exceeds node budget" );
      if ( consistent( v ) )
        ++v;
    }
  }

private:
  bool consistent( std::size_t v ) const
  {
    for ( auto ci : by_max_[v] )
    {
      bool sat = false;
      for ( auto l : f_.clauses[ci] )
        if ( ( l > 0 ) == ( val_[static_cast<std::size_t>( std::abs( l ) )] != 0 ) )
        {
          sat = true;
          break;
        }
      if ( !sat )
        return false;
    }
    return true;
  }

  CnfFormula const& f_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool contradiction_ = false;
  std::vector<std::vector<std::size_t>> by_max_;
  std::vector<char> val_;
};

} // namespace detail

/*! \brief First model in lexicographic order (variable 1 most significant, false before true). */
inline std::optional<std::vector<bool>> sat_bruteforce( CnfFormula const& f, std::uint64_t budget = default_search_budget )
{
  std::optional<std::vector<bool>> model;
  detail::CnfSearch s( f, budget );
  s.run( [&]( std::vector<char> const& v ) {
    model = std::vector<bool>( f.num_vars() );
    for ( std::size_t i = 0; i < f.num_vars(); ++i )
      ( *model )[i] = v[i + 1] != 0;
    return false;
  } );
  return model;
}

inline std::uint64_t count_models( CnfFormula const& f, std::uint64_t limit = UINT64_MAX, std::uint64_t budget = default_search_budget )
{
  std::uint64_t n = 0;
  detail::CnfSearch s( f, budget );
  s.run( [&]( std::vector<char> const& ) { return ++n < limit; } );
  return n;
}

template<class Visit>
void for_each_model( CnfFormula const& f, Visit&& visit, std::uint64_t budget = default_search_budget )
{
  detail::CnfSearch s( f, budget );
  s.run( [&]( std::vector<char> const& v ) {
    std::vector<bool> m( f.num_vars() );
    for ( std::size_t i = 0; i < f.num_vars(); ++i )
      m[i] = v[i + 1] != 0;
    return visit( m );
  } );
}

namespace detail
{

class FieldSearch
{
public:
  FieldSearch( EquationSystem const& s, std::uint64_t budget ) : s_( s ), budget_( budget ), by_max_( s.variables.size() + 1 )
  {
    std::map<std::string, std::size_t> slots;
    for ( std::size_t i = 0; i < s.variables.size(); ++i )
      slots[s.variables[i]] = i;
    for ( auto const& e : s.equations )
    {
      compiled_.emplace_back( e.circuit, slots );
      std::size_t m = 0;
      for ( auto sl : compiled_.back().slots_used() )
        m = std::max( m, sl + 1 );
      by_max_[m].push_back( compiled_.size() - 1 );
    }
    val_.assign( s.variables.size(), 0 );
  }

  template<class Visit>
  void run( Visit&& visit )
  {
    for ( auto ei : by_max_[0] )
      if ( compiled_[ei]( val_ ) != 0 )
        return;
    auto const n = s_.variables.size();
    auto const q = s_.field.modulus();
    if ( n == 0 )
    {
      visit( val_ );
      return;
    }
    std::size_t v = 1; /* 1-based position */
    std::vector<std::uint64_t> next( n + 1, 0 );
    while ( v >= 1 )
    {
      if ( v > n )
      {
        if ( !visit( val_ ) )
          return;
        --v;
        continue;
      }
      if ( next[v] == q )
      {
        next[v] = 0;
        --v;
        continue;
      }
      val_[v - 1] = next[v]++;
      if ( ++nodes_ > budget_ )
        fail( ErrorKind::BudgetExceeded, "field search exceeds node budget" );
      if ( consistent( v ) )
        ++v;
    }
  }

private:
  bool consistent( std::size_t v ) const
  {
    for ( auto ei : by_max_[v] )
      if ( compiled_[ei]( val_ ) != 0 )
        return false;
    return true;
  }

  EquationSystem const& s_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::vector<std::size_t>> by_max_;
  std::vector<CompiledCircuit> compiled_;
  std::vector<std::uint64_t> val_;
};

} // namespace detail

/*! \brief First common root over F_q in lexicographic order of the registry, if any. */
inline std::optional<Assignment> fieldsat_bruteforce( EquationSystem const& s, std::uint64_t budget = default_search_budget )
{
  std::optional<Assignment> root;
  detail::FieldSearch fs( s, budget );
  fs.run( [&]( std::vector<std::uint64_t> const& v ) {
    Assignment a;
    for ( std::size_t i = 0; i < v.size(); ++i )
      a[s.variables[i]] = v[i];
    root = std::move( a );
    return false;
  } );
  return root;
}

inline std::uint64_t count_field_solutions( EquationSystem const& s, std::uint64_t limit = UINT64_MAX,
                                            std::uint64_t budget = default_search_budget )
{
  std::uint64_t n = 0;
  detail::FieldSearch fs( s, budget );
  fs.run( [&]( std::vector<std::uint64_t> const& ) { return ++n < limit; } );
  return n;
}

/*! \brief Roots of one circuit over F_q^vars by plain enumeration. */
inline std::vector<Assignment> circuit_roots( Circuit const& c, std::vector<std::string> vars = {}, std::uint64_t budget = 10000000 )
{
  if ( vars.empty() )
    vars = c.variables();
  auto const q = c.field().modulus();
  std::uint64_t total = 1;
  for ( std::size_t i = 0; i < vars.size(); ++i )
  {
    total *= q;
    if ( total > budget )
      fail( ErrorKind::BudgetExceeded, "q^vars exceeds enumeration budget" );
  }
  std::map<std::string, std::size_t> slots;
  for ( std::size_t i = 0; i < vars.size(); ++i )
    slots[vars[i]] = i;
  CompiledCircuit cc( c, slots );
  std::vector<std::uint64_t> x( vars.size(), 0 );
  std::vector<Assignment> roots;
  for ( std::uint64_t k = 0; k < total; ++k )
  {
    auto r = k;
    for ( std::size_t i = vars.size(); i-- > 0; )
    {
      x[i] = r % q;
      r /= q;
    }
    if ( cc( x ) == 0 )
    {
      Assignment a;
      for ( std::size_t i = 0; i < vars.size(); ++i )
        a[vars[i]] = x[i];
      roots.push_back( std::move( a ) );
    }
  }
  return roots;
}

} // namespace ipsforge
