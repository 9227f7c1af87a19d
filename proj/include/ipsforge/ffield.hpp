#pragma once

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace ipsforge
{

namespace detail
{

inline std::uint64_t mulmod( std::uint64_t a, std::uint64_t b, std::uint64_t m )
{
  return static_cast<std::uint64_t>( static_cast<unsigned __int128>( a ) * b % m );
}

inline std::uint64_t powmod( std::uint64_t a, std::uint64_t e, std::uint64_t m )
{
  std::uint64_t r = 1 % m;
  a %= m;
  while ( e )
  {
    if ( e & 1u )
      r = mulmod( r, a, m );
    a = mulmod( a, a, m );
    e >>= 1;
  }
  return r;
}

} // namespace detail

/*! \brief Deterministic Miller-Rabin, exact for every 64-bit input. */
inline bool is_prime( std::uint64_t n )
{
  if ( n < 2 )
    return false;
  for ( std::uint64_t p : { 2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull } )
  {
    if ( n % p == 0 )
      return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ( ( d & 1u ) == 0 )
  {
    d >>= 1;
    ++s;
  }
  for ( std::uint64_t a : { 2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull } )
  {
    std::uint64_t x = detail::powmod( a, d, n );
    if ( x == 1 || x == n - 1 )
      continue;
    bool composite = true;
    for ( unsigned r = 1; r < s; ++r )
    {
      x = detail::mulmod( x, x, n );
      if ( x == n - 1 )
      {
        composite = false;
        break;
      }
    }
    if ( composite )
      return false;
  }
  return true;
}

/*! \brief Prime field F_q with canonical residues in [0, q). */
class PrimeField
{
public:
  explicit PrimeField( std::uint64_t q = 2 ) : q_( q )
  {
    if ( q < 2 || !is_prime( q ) )
      fail( ErrorKind::NonPrimeModulus, "modulus " + std::to_string( q ) + " is not prime" );
  }

  std::uint64_t modulus() const noexcept { return q_; }

  std::uint64_t reduce( std::uint64_t v ) const noexcept { return v % q_; }
  std::uint64_t from_signed( std::int64_t v ) const noexcept
  {
    auto const m = static_cast<std::int64_t>( q_ );
    auto r = v % m;
    return static_cast<std::uint64_t>( r < 0 ? r + m : r );
  }

  std::uint64_t add( std::uint64_t a, std::uint64_t b ) const noexcept
  {
    auto s = a + b;
    return ( s >= q_ || s < a ) ? s - q_ : s;
  }
  std::uint64_t sub( std::uint64_t a, std::uint64_t b ) const noexcept { return a >= b ? a - b : a + ( q_ - b ); }
  std::uint64_t neg( std::uint64_t a ) const noexcept { return a == 0 ? 0 : q_ - a; }
  std::uint64_t mul( std::uint64_t a, std::uint64_t b ) const noexcept { return detail::mulmod( a, b, q_ ); }
  std::uint64_t pow( std::uint64_t a, std::uint64_t e ) const noexcept { return detail::powmod( a, e, q_ ); }
  std::uint64_t inv( std::uint64_t a ) const
  {
    if ( a % q_ == 0 )
      fail( ErrorKind::IndexOutOfField, "zero has no inverse" );
    return pow( a, q_ - 2 );
  }

  bool operator==( PrimeField const& other ) const noexcept { return q_ == other.q_; }
  bool operator!=( PrimeField const& other ) const noexcept { return q_ != other.q_; }

private:
  std::uint64_t q_;
};

inline PrimeField ff_new( std::uint64_t q ) { return PrimeField( q ); }

inline void require_same_field( PrimeField const& a, PrimeField const& b )
{
  if ( a != b )
    fail( ErrorKind::FieldMismatch, "F_" + std::to_string( a.modulus() ) + " vs F_" + std::to_string( b.modulus() ) );
}

/*! \brief Field element carrying its field. */
class FieldElem
{
public:
  FieldElem( PrimeField field, std::uint64_t value ) : field_( field ), value_( field.reduce( value ) ) {}

  static FieldElem from_signed( PrimeField field, std::int64_t value ) { return FieldElem( field, field.from_signed( value ) ); }

  std::uint64_t value() const noexcept { return value_; }
  PrimeField const& field() const noexcept { return field_; }

  FieldElem operator+( FieldElem const& o ) const { return combine( o, field_.add( value_, o.value_ ) ); }
  FieldElem operator-( FieldElem const& o ) const { return combine( o, field_.sub( value_, o.value_ ) ); }
  FieldElem operator*( FieldElem const& o ) const { return combine( o, field_.mul( value_, o.value_ ) ); }
  FieldElem operator/( FieldElem const& o ) const { return combine( o, field_.mul( value_, field_.inv( o.value_ ) ) ); }
  FieldElem operator-() const { return FieldElem( field_, field_.neg( value_ ) ); }
  FieldElem inv() const { return FieldElem( field_, field_.inv( value_ ) ); }
  FieldElem pow( std::uint64_t e ) const { return FieldElem( field_, field_.pow( value_, e ) ); }

  bool operator==( FieldElem const& o ) const noexcept { return field_ == o.field_ && value_ == o.value_; }
  bool operator!=( FieldElem const& o ) const noexcept { return !( *this == o ); }

private:
  FieldElem combine( FieldElem const& o, std::uint64_t v ) const
  {
    require_same_field( field_, o.field_ );
    return FieldElem( field_, v );
  }

  PrimeField field_;
  std::uint64_t value_;
};

/*! \brief Smallest prime strictly greater than n. */
inline std::uint64_t next_prime( std::uint64_t n )
{
  std::uint64_t p = n + 1;
  while ( !is_prime( p ) )
    ++p;
  return p;
}

/*! \brief A prime in (n^3, (n+1)^3], used to size bit-encoded fields. */
inline std::uint64_t prime_between_cubes( std::uint64_t n )
{
  auto const lo = n * n * n;
  auto const hi = ( n + 1 ) * ( n + 1 ) * ( n + 1 );
  auto const p = next_prime( lo );
  if ( p > hi )
    fail( ErrorKind::Unsupported, "no prime in (n^3, (n+1)^3] for n = " + std::to_string( n ) );
  return p;
}

} // namespace ipsforge
