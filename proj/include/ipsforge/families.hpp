#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"
#include "poly.hpp"

namespace ipsforge
{

inline std::string matrix_var( std::string const& base, std::size_t i, std::size_t j )
{
  return base + "_" + std::to_string( i ) + "_" + std::to_string( j );
}

namespace detail
{

inline int permutation_sign( std::vector<std::size_t> const& p )
{
  int s = 1;
  for ( std::size_t i = 0; i < p.size(); ++i )
    for ( std::size_t j = i + 1; j < p.size(); ++j )
      if ( p[i] > p[j] )
        s = -s;
  return s;
}

inline SparsePoly permutation_sum( std::size_t n, PrimeField const& f, bool signed_sum )
{
  if ( n > 8 )
    fail( ErrorKind::ExpansionBudgetExceeded, "n! terms for n = " + std::to_string( n ) );
  std::vector<std::size_t> p( n );
  std::iota( p.begin(), p.end(), 0 );
  SparsePoly r( f );
  do
  {
    Monomial m;
    for ( std::size_t i = 0; i < n; ++i )
      m.multiply( matrix_var( "x", i + 1, p[i] + 1 ), 1 );
    r.add_term( m, signed_sum && permutation_sign( p ) < 0 ? f.neg( 1 ) : 1 );
  } while ( std::next_permutation( p.begin(), p.end() ) );
  return r;
}

} // namespace detail

/*! \brief Permanent of the n x n matrix of variables x_i_j. */
inline SparsePoly permanent_poly( std::size_t n, PrimeField const& f ) { return detail::permutation_sum( n, f, false ); }

inline SparsePoly determinant_poly( std::size_t n, PrimeField const& f ) { return detail::permutation_sum( n, f, true ); }

/*! \brief (1,1) entry of the product of d matrices X<k>_i_j of size n x n. */
inline SparsePoly imm_poly( std::size_t n, std::size_t d, PrimeField const& f, std::size_t budget = 1000000 )
{
  if ( d == 0 )
    return SparsePoly::constant( f, 1 );
  std::vector<SparsePoly> row;
  for ( std::size_t j = 1; j <= n; ++j )
    row.push_back( SparsePoly::variable( f, matrix_var( "X1", 1, j ) ) );
  for ( std::size_t k = 2; k <= d; ++k )
  {
    std::vector<SparsePoly> next( n, SparsePoly( f ) );
    for ( std::size_t j = 1; j <= n; ++j )
      for ( std::size_t i = 1; i <= n; ++i )
      {
        next[j - 1] += row[i - 1] * SparsePoly::variable( f, matrix_var( "X" + std::to_string( k ), i, j ) );
        if ( next[j - 1].size() > budget )
          fail( ErrorKind::ExpansionBudgetExceeded, "imm expansion" );
      }
    row = std::move( next );
  }
  return row[0];
}

/*! \brief Depth-2 sum of products circuit for the permanent. */
inline Circuit permanent_circuit( std::size_t n, PrimeField const& f ) { return circuit_from_poly( permanent_poly( n, f ) ); }

inline std::vector<std::string> indexed_vars( std::string const& base, std::size_t n )
{
  std::vector<std::string> v;
  for ( std::size_t i = 1; i <= n; ++i )
    v.push_back( base + std::to_string( i ) );
  return v;
}

inline std::vector<std::string> matrix_vars( std::string const& base, std::size_t rows, std::size_t cols )
{
  std::vector<std::string> v;
  for ( std::size_t i = 1; i <= rows; ++i )
    for ( std::size_t j = 1; j <= cols; ++j )
      v.push_back( matrix_var( base, i, j ) );
  return v;
}

inline constexpr std::uint64_t default_monomial_budget = 1000000;

/*! \brief Number of monomials of total degree at most l in n variables. */
inline std::uint64_t monomial_count( std::uint64_t n, std::uint64_t l )
{
  std::uint64_t total = 0;
  std::uint64_t term = 1; /* C(n+j-1, j) */
  for ( std::uint64_t j = 0; j <= l; ++j )
  {
    if ( j > 0 )
    {
      auto const num = static_cast<unsigned __int128>( term ) * ( n + j - 1 );
      term = static_cast<std::uint64_t>( num / j );
    }
    total += term;
  }
  return total;
}

/*! \brief Graded lexicographic list of monomials of degree <= l over the given ordered variables. */
inline std::vector<Monomial> enumerate_monomials( std::vector<std::string> const& vars, std::uint32_t l,
                                                  std::uint64_t budget = default_monomial_budget )
{
  if ( monomial_count( vars.size(), l ) > budget )
    fail( ErrorKind::ExpansionBudgetExceeded, "monomial list exceeds budget" );
  std::vector<Monomial> out;
  std::vector<std::uint32_t> exps( vars.size(), 0 );
  for ( std::uint32_t d = 0; d <= l; ++d )
  {
    /* exponent vectors of total degree d, lexicographically largest first */
    auto rec = [&]( auto&& self, std::size_t pos, std::uint32_t left ) -> void {
      if ( pos + 1 >= vars.size() )
      {
        if ( vars.empty() )
        {
          if ( left == 0 )
            out.emplace_back();
          return;
        }
        exps[pos] = left;
        Monomial m;
        for ( std::size_t i = 0; i < vars.size(); ++i )
          m.multiply( vars[i], exps[i] );
        out.push_back( std::move( m ) );
        return;
      }
      for ( std::uint32_t e = left + 1; e-- > 0; )
      {
        exps[pos] = e;
        self( self, pos + 1, left - e );
      }
    };
    rec( rec, 0, d );
  }
  return out;
}

inline std::vector<Monomial> enumerate_monomials( std::size_t n_vars, std::uint32_t l, std::uint64_t budget = default_monomial_budget )
{
  return enumerate_monomials( indexed_vars( "x", n_vars ), l, budget );
}

} // namespace ipsforge
