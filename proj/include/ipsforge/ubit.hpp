#pragma once

#include <cstdint>
#include <string>

#include "circuit.hpp"
#include "errors.hpp"
#include "ffield.hpp"
#include "poly.hpp"

namespace ipsforge
{

/*! \brief Lagrange selector in `var`: 1 at j, 0 at every other point of F_q. */
inline SparsePoly ubit_poly( std::uint64_t j, PrimeField const& f, std::string const& var = "x" )
{
  if ( j >= f.modulus() )
    fail( ErrorKind::IndexOutOfField, "index " + std::to_string( j ) + " outside F_" + std::to_string( f.modulus() ) );
  auto p = SparsePoly::constant( f, 1 );
  std::uint64_t denom = 1;
  auto const x = SparsePoly::variable( f, var );
  for ( std::uint64_t i = 0; i < f.modulus(); ++i )
  {
    if ( i == j )
      continue;
    p = p * ( x - SparsePoly::constant( f, i ) );
    denom = f.mul( denom, f.sub( j, i ) );
  }
  return p.scaled( f.inv( denom ) );
}

/*! \brief Selector applied to a circuit value: a product of (c - i) factors with the inverse denominator on one edge. */
inline Circuit ubit_circuit( std::uint64_t j, Circuit const& c )
{
  auto const& f = c.field();
  if ( j >= f.modulus() )
    fail( ErrorKind::IndexOutOfField, "index " + std::to_string( j ) + " outside F_" + std::to_string( f.modulus() ) );
  Circuit r( f );
  auto const inner = r.import( c );
  std::uint64_t denom = 1;
  std::vector<Edge> factors;
  for ( std::uint64_t i = 0; i < f.modulus(); ++i )
  {
    if ( i == j )
      continue;
    denom = f.mul( denom, f.sub( j, i ) );
    std::vector<Edge> sum{ Edge( inner ) };
    if ( i != 0 )
      sum.emplace_back( r.constant( f.neg( i ) ) );
    factors.emplace_back( r.add( std::move( sum ) ) );
  }
  factors.front().label.coeff = f.inv( denom );
  r.set_output( r.mul( std::move( factors ) ) );
  return r;
}

} // namespace ipsforge
