#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "ffield.hpp"

namespace ipsforge
{

/*! \brief GF(q^e) as F_q[t] modulo the lexicographically first monic irreducible of degree e. */
class ExtField
{
public:
  using Elem = std::vector<std::uint64_t>;

  ExtField( PrimeField f, unsigned e ) : f_( f ), e_( e )
  {
    if ( e == 0 )
      fail( ErrorKind::DimensionError, "extension degree must be positive" );
    if ( e == 1 )
    {
      mod_ = { 0, 1 };
      return;
    }
    Elem cand( e + 1, 0 );
    cand[e] = 1;
    while ( true )
    {
      if ( irreducible( cand ) )
      {
        mod_ = cand;
        return;
      }
      if ( !increment( cand, e ) )
        fail( ErrorKind::Unsupported, "no irreducible polynomial found" );
    }
  }

  PrimeField const& base() const noexcept { return f_; }
  unsigned degree() const noexcept { return e_; }
  Elem const& modulus_poly() const noexcept { return mod_; }

  /*! \brief q^e, saturating at UINT64_MAX. */
  std::uint64_t size() const noexcept
  {
    std::uint64_t s = 1;
    for ( unsigned i = 0; i < e_; ++i )
    {
      if ( s > UINT64_MAX / f_.modulus() )
        return UINT64_MAX;
      s *= f_.modulus();
    }
    return s;
  }

  Elem zero() const { return Elem( e_, 0 ); }
  Elem embed( std::uint64_t v ) const
  {
    Elem r = zero();
    r[0] = f_.reduce( v );
    return r;
  }
  Elem one() const { return embed( 1 ); }

  Elem add( Elem const& a, Elem const& b ) const
  {
    Elem r( e_ );
    for ( unsigned i = 0; i < e_; ++i )
      r[i] = f_.add( a[i], b[i] );
    return r;
  }
  Elem sub( Elem const& a, Elem const& b ) const
  {
    Elem r( e_ );
    for ( unsigned i = 0; i < e_; ++i )
      r[i] = f_.sub( a[i], b[i] );
    return r;
  }
  Elem scale( Elem const& a, std::uint64_t c ) const
  {
    Elem r( e_ );
    for ( unsigned i = 0; i < e_; ++i )
      r[i] = f_.mul( a[i], c );
    return r;
  }
  Elem mul( Elem const& a, Elem const& b ) const
  {
    std::vector<std::uint64_t> prod( 2 * e_ - 1, 0 );
    for ( unsigned i = 0; i < e_; ++i )
      if ( a[i] )
        for ( unsigned j = 0; j < e_; ++j )
          prod[i + j] = f_.add( prod[i + j], f_.mul( a[i], b[j] ) );
    reduce( prod, mod_ );
    prod.resize( e_, 0 );
    return prod;
  }

  template<class Rng>
  Elem random( Rng& rng ) const
  {
    std::uniform_int_distribution<std::uint64_t> d( 0, f_.modulus() - 1 );
    Elem r( e_ );
    for ( auto& c : r )
      c = d( rng );
    return r;
  }

  static bool is_zero( Elem const& a )
  {
    for ( auto c : a )
      if ( c )
        return false;
    return true;
  }

private:
  /* remainder of a modulo the monic polynomial m, in place */
  void reduce( std::vector<std::uint64_t>& a, Elem const& m ) const
  {
    auto const d = m.size() - 1;
    for ( std::size_t i = a.size(); i-- > d; )
    {
      auto const c = a[i];
      if ( !c )
        continue;
      for ( std::size_t k = 0; k <= d; ++k )
        a[i - d + k] = f_.sub( a[i - d + k], f_.mul( c, m[k] ) );
    }
  }

  /* next monic polynomial of degree d in the lexicographic order of its lower coefficients */
  bool increment( Elem& p, unsigned d ) const
  {
    for ( unsigned i = 0; i < d; ++i )
    {
      if ( ++p[i] < f_.modulus() )
        return true;
      p[i] = 0;
    }
    return false;
  }

  bool irreducible( Elem const& p ) const
  {
    auto const e = p.size() - 1;
    for ( unsigned d = 1; d <= e / 2; ++d )
    {
      Elem g( d + 1, 0 );
      g[d] = 1;
      do
      {
        auto r = p;
        reduce( r, g );
        r.resize( d );
        if ( is_zero( r ) )
          return false;
      } while ( increment( g, d ) );
    }
    return true;
  }

  PrimeField f_;
  unsigned e_;
  Elem mod_;
};

} // namespace ipsforge
