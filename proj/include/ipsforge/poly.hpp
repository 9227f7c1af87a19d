#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "ffield.hpp"

namespace ipsforge
{

using Assignment = std::map<std::string, std::uint64_t>;

/*! \brief Variable-name order that compares digit runs numerically (x2 < x10). */
inline bool natural_less( std::string_view a, std::string_view b )
{
  std::size_t i = 0, j = 0;
  while ( i < a.size() && j < b.size() )
  {
    if ( std::isdigit( static_cast<unsigned char>( a[i] ) ) && std::isdigit( static_cast<unsigned char>( b[j] ) ) )
    {
      auto si = i, sj = j;
      while ( si < a.size() && a[si] == '0' )
        ++si;
      while ( sj < b.size() && b[sj] == '0' )
        ++sj;
      auto ei = si, ej = sj;
      while ( ei < a.size() && std::isdigit( static_cast<unsigned char>( a[ei] ) ) )
        ++ei;
      while ( ej < b.size() && std::isdigit( static_cast<unsigned char>( b[ej] ) ) )
        ++ej;
      if ( ei - si != ej - sj )
        return ei - si < ej - sj;
      auto c = a.substr( si, ei - si ).compare( b.substr( sj, ej - sj ) );
      if ( c != 0 )
        return c < 0;
      if ( ei - i != ej - j )
        return ei - i < ej - j;
      i = ei;
      j = ej;
      continue;
    }
    if ( a[i] != b[j] )
      return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

struct NaturalLess
{
  bool operator()( std::string const& a, std::string const& b ) const { return natural_less( a, b ); }
};

/*! \brief Monomial as a sparse exponent vector sorted by natural variable order. */
class Monomial
{
public:
  using Power = std::pair<std::string, std::uint32_t>;

  Monomial() = default;
  explicit Monomial( std::vector<Power> powers )
  {
    for ( auto& [v, e] : powers )
      multiply( v, e );
  }

  static Monomial var( std::string const& name, std::uint32_t e = 1 )
  {
    Monomial m;
    m.multiply( name, e );
    return m;
  }

  std::vector<Power> const& powers() const noexcept { return powers_; }
  bool is_one() const noexcept { return powers_.empty(); }

  std::uint32_t degree() const noexcept
  {
    std::uint32_t d = 0;
    for ( auto const& p : powers_ )
      d += p.second;
    return d;
  }

  std::uint32_t exponent( std::string const& name ) const
  {
    for ( auto const& p : powers_ )
      if ( p.first == name )
        return p.second;
    return 0;
  }

  void multiply( std::string const& name, std::uint32_t e )
  {
    if ( e == 0 )
      return;
    auto it = powers_.begin();
    while ( it != powers_.end() && natural_less( it->first, name ) )
      ++it;
    if ( it != powers_.end() && it->first == name )
      it->second += e;
    else
      powers_.insert( it, { name, e } );
  }

  Monomial operator*( Monomial const& o ) const
  {
    Monomial r;
    r.powers_.reserve( powers_.size() + o.powers_.size() );
    std::size_t i = 0, j = 0;
    while ( i < powers_.size() || j < o.powers_.size() )
    {
      if ( j == o.powers_.size() || ( i < powers_.size() && natural_less( powers_[i].first, o.powers_[j].first ) ) )
        r.powers_.push_back( powers_[i++] );
      else if ( i == powers_.size() || natural_less( o.powers_[j].first, powers_[i].first ) )
        r.powers_.push_back( o.powers_[j++] );
      else
      {
        r.powers_.emplace_back( powers_[i].first, powers_[i].second + o.powers_[j].second );
        ++i;
        ++j;
      }
    }
    return r;
  }

  /*! \brief Removes the listed variables; returns the removed part. */
  std::pair<Monomial, Monomial> split( std::function<bool( std::string const& )> const& selected ) const
  {
    Monomial in, out;
    for ( auto const& p : powers_ )
      ( selected( p.first ) ? in : out ).powers_.push_back( p );
    return { in, out };
  }

  bool operator==( Monomial const& o ) const { return powers_ == o.powers_; }
  bool operator!=( Monomial const& o ) const { return powers_ != o.powers_; }

  std::string to_string() const
  {
    if ( powers_.empty() )
      return "1";
    std::string s;
    for ( auto const& [v, e] : powers_ )
    {
      if ( !s.empty() )
        s += "*";
      s += v;
      if ( e > 1 )
        s += "^" + std::to_string( e );
    }
    return s;
  }

private:
  std::vector<Power> powers_;
};

/*! \brief Graded lexicographic order: lower degree first, then earlier variables with higher exponents first. */
struct GradedLex
{
  bool operator()( Monomial const& a, Monomial const& b ) const
  {
    auto da = a.degree(), db = b.degree();
    if ( da != db )
      return da < db;
    auto const& pa = a.powers();
    auto const& pb = b.powers();
    std::size_t i = 0;
    for ( ; i < pa.size() && i < pb.size(); ++i )
    {
      if ( pa[i].first != pb[i].first )
        return natural_less( pa[i].first, pb[i].first );
      if ( pa[i].second != pb[i].second )
        return pa[i].second > pb[i].second;
    }
    return false;
  }
};

/*! \brief Exact sparse polynomial over a prime field; zero coefficients are never stored. */
class SparsePoly
{
public:
  using Terms = std::map<Monomial, std::uint64_t, GradedLex>;

  explicit SparsePoly( PrimeField field = PrimeField( 2 ) ) : field_( field ) {}

  static SparsePoly constant( PrimeField field, std::uint64_t c )
  {
    SparsePoly p( field );
    p.add_term( Monomial(), c );
    return p;
  }
  static SparsePoly variable( PrimeField field, std::string const& name )
  {
    SparsePoly p( field );
    p.add_term( Monomial::var( name ), 1 );
    return p;
  }

  PrimeField const& field() const noexcept { return field_; }
  Terms const& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  std::uint32_t degree() const noexcept { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

  std::uint64_t coefficient( Monomial const& m ) const
  {
    auto it = terms_.find( m );
    return it == terms_.end() ? 0 : it->second;
  }

  void add_term( Monomial const& m, std::uint64_t c )
  {
    c = field_.reduce( c );
    if ( c == 0 )
      return;
    auto [it, inserted] = terms_.try_emplace( m, c );
    if ( !inserted )
    {
      it->second = field_.add( it->second, c );
      if ( it->second == 0 )
        terms_.erase( it );
    }
  }

  SparsePoly& operator+=( SparsePoly const& o )
  {
    require_same_field( field_, o.field_ );
    for ( auto const& [m, c] : o.terms_ )
      add_term( m, c );
    return *this;
  }
  SparsePoly& operator-=( SparsePoly const& o )
  {
    require_same_field( field_, o.field_ );
    for ( auto const& [m, c] : o.terms_ )
      add_term( m, field_.neg( c ) );
    return *this;
  }
  SparsePoly operator+( SparsePoly const& o ) const { return SparsePoly( *this ) += o; }
  SparsePoly operator-( SparsePoly const& o ) const { return SparsePoly( *this ) -= o; }
  SparsePoly operator-() const { return SparsePoly( field_ ) - *this; }

  SparsePoly operator*( SparsePoly const& o ) const
  {
    require_same_field( field_, o.field_ );
    SparsePoly r( field_ );
    for ( auto const& [ma, ca] : terms_ )
      for ( auto const& [mb, cb] : o.terms_ )
        r.add_term( ma * mb, field_.mul( ca, cb ) );
    return r;
  }

  SparsePoly scaled( std::uint64_t c ) const
  {
    SparsePoly r( field_ );
    c = field_.reduce( c );
    if ( c == 0 )
      return r;
    for ( auto const& [m, v] : terms_ )
      r.terms_.emplace( m, field_.mul( v, c ) );
    return r;
  }

  SparsePoly pow( std::uint32_t e ) const
  {
    auto r = constant( field_, 1 );
    for ( std::uint32_t i = 0; i < e; ++i )
      r = r * *this;
    return r;
  }

  bool operator==( SparsePoly const& o ) const { return field_ == o.field_ && terms_ == o.terms_; }
  bool operator!=( SparsePoly const& o ) const { return !( *this == o ); }

  std::uint64_t evaluate( Assignment const& a ) const
  {
    std::uint64_t acc = 0;
    for ( auto const& [m, c] : terms_ )
    {
      auto t = c;
      for ( auto const& [v, e] : m.powers() )
      {
        auto it = a.find( v );
        if ( it == a.end() )
          fail( ErrorKind::MissingAssignment, "variable " + v );
        t = field_.mul( t, field_.pow( field_.reduce( it->second ), e ) );
      }
      acc = field_.add( acc, t );
    }
    return acc;
  }

  /*! \brief Sorted list of variables occurring in the polynomial. */
  std::vector<std::string> variables() const
  {
    std::map<std::string, int, NaturalLess> seen;
    for ( auto const& [m, c] : terms_ )
      for ( auto const& p : m.powers() )
        seen[p.first] = 1;
    std::vector<std::string> r;
    for ( auto const& [v, _] : seen )
      r.push_back( v );
    return r;
  }

  /*! \brief Highest degree first, graded lexicographic within a degree; unit coefficients omitted. */
  std::string to_string() const
  {
    if ( terms_.empty() )
      return "0";
    std::map<std::uint32_t, std::vector<Terms::const_iterator>, std::greater<>> by_degree;
    for ( auto it = terms_.begin(); it != terms_.end(); ++it )
      by_degree[it->first.degree()].push_back( it );
    std::string s;
    for ( auto const& [d, its] : by_degree )
      for ( auto it : its )
      {
        if ( !s.empty() )
          s += " + ";
        if ( it->first.is_one() )
          s += std::to_string( it->second );
        else if ( it->second == 1 )
          s += it->first.to_string();
        else
          s += std::to_string( it->second ) + "*" + it->first.to_string();
      }
    return s;
  }

private:
  PrimeField field_;
  Terms terms_;
};

inline bool is_var_start( char c ) { return std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' || c == '~'; }
inline bool is_var_char( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '~' || c == '.'; }

/*! \brief Parses sums of terms such as `2*x1^2*x2 - x3 + 1`. */
inline SparsePoly parse_poly( PrimeField field, std::string_view text )
{
  SparsePoly p( field );
  std::size_t i = 0;
  auto skip = [&] {
    while ( i < text.size() && std::isspace( static_cast<unsigned char>( text[i] ) ) )
      ++i;
  };
  auto number = [&]() -> std::uint64_t {
    std::uint64_t v = 0;
    if ( i >= text.size() || !std::isdigit( static_cast<unsigned char>( text[i] ) ) )
      fail( ErrorKind::ParseError, "expected number in polynomial '" + std::string( text ) + "'" );
    while ( i < text.size() && std::isdigit( static_cast<unsigned char>( text[i] ) ) )
      v = field.add( field.mul( v, 10 % field.modulus() ), field.reduce( static_cast<std::uint64_t>( text[i++] - '0' ) ) );
    return v;
  };
  skip();
  if ( i == text.size() )
    fail( ErrorKind::ParseError, "empty polynomial" );
  bool first = true;
  while ( true )
  {
    skip();
    if ( i == text.size() )
      break;
    bool negative = false;
    if ( text[i] == '+' || text[i] == '-' )
    {
      negative = text[i] == '-';
      ++i;
      skip();
    }
    else if ( !first )
      fail( ErrorKind::ParseError, "expected '+' or '-' in polynomial" );
    first = false;
    std::uint64_t coeff = 1;
    Monomial m;
    bool factor = false;
    while ( true )
    {
      skip();
      if ( i < text.size() && std::isdigit( static_cast<unsigned char>( text[i] ) ) )
        coeff = field.mul( coeff, number() );
      else if ( i < text.size() && is_var_start( text[i] ) )
      {
        auto s = i;
        while ( i < text.size() && is_var_char( text[i] ) )
          ++i;
        std::string name( text.substr( s, i - s ) );
        std::uint32_t e = 1;
        skip();
        if ( i < text.size() && text[i] == '^' )
        {
          ++i;
          skip();
          auto s2 = i;
          while ( i < text.size() && std::isdigit( static_cast<unsigned char>( text[i] ) ) )
            ++i;
          if ( s2 == i )
            fail( ErrorKind::ParseError, "bad exponent" );
          e = static_cast<std::uint32_t>( std::stoul( std::string( text.substr( s2, i - s2 ) ) ) );
        }
        m.multiply( name, e );
      }
      else
        fail( ErrorKind::ParseError, "unexpected token in polynomial '" + std::string( text ) + "'" );
      factor = true;
      skip();
      if ( i < text.size() && text[i] == '*' )
      {
        ++i;
        continue;
      }
      break;
    }
    if ( !factor )
      fail( ErrorKind::ParseError, "empty term" );
    p.add_term( m, negative ? field.neg( coeff ) : coeff );
  }
  return p;
}

inline Monomial parse_monomial( std::string_view text )
{
  auto p = parse_poly( PrimeField( 2 ), text );
  if ( p.size() != 1 || p.terms().begin()->second != 1 )
    fail( ErrorKind::ParseError, "not a monomial: " + std::string( text ) );
  return p.terms().begin()->first;
}

} // namespace ipsforge
