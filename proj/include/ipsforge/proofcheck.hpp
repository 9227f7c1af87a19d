#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "cnf.hpp"
#include "errors.hpp"
#include "extfield.hpp"
#include "generators.hpp"
#include "poly.hpp"

namespace ipsforge
{

/* IPS certificates */

enum class IpsMode
{
  Algebraic,
  Boolean
};

/*! \brief Circuit over x, placeholders y1..ym and (Boolean mode) z_<x>, checked against axioms and a target. */
struct IpsCertificate
{
  Circuit circuit;
  EquationSystem axioms;
  std::optional<SparsePoly> target; /* defaults to 1 */
  IpsMode mode = IpsMode::Algebraic;

  SparsePoly target_poly() const { return target ? *target : SparsePoly::constant( axioms.field, 1 ); }
};

enum class CheckMethod
{
  Exact,
  Pit
};

struct PitOptions
{
  std::size_t trials = 8;
  std::uint64_t seed = 1;
  unsigned extension_degree = 0; /* 0 picks the smallest e with q^e >= 2 * degree */
};

struct IpsReport
{
  bool accepted = false;
  std::string reason;
  CheckMethod method = CheckMethod::Exact;
  std::size_t size = 0;
  std::uint32_t depth = 0;             /* placeholders as leaves */
  std::uint32_t depth_with_axioms = 0; /* axiom circuits spliced in */
  unsigned extension_degree = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> residuals; /* per trial: value of C(x,0,0) and C(x,F,x^2-x) - p */
};

inline bool is_placeholder_name( std::string const& v )
{
  static std::regex const re( "y[0-9]+" );
  return std::regex_match( v, re );
}

namespace detail
{

struct Placeholders
{
  Substitution zero, axioms;
};

inline Placeholders placeholder_substitutions( IpsCertificate const& cert )
{
  auto const& f = cert.axioms.field;
  require_same_field( f, cert.circuit.field() );
  Placeholders p;
  std::set<std::string> xs( cert.axioms.variables.begin(), cert.axioms.variables.end() );
  for ( auto const& x : xs )
    if ( is_placeholder_name( x ) || x.rfind( "z_", 0 ) == 0 )
      fail( ErrorKind::ArityMismatch, "axiom variable " + x + " collides with a placeholder name" );
  auto const m = cert.axioms.size();
  for ( auto const& v : cert.circuit.variables() )
  {
    if ( is_placeholder_name( v ) )
    {
      auto const j = std::stoull( v.substr( 1 ) );
      if ( j == 0 || j > m )
        fail( ErrorKind::ArityMismatch, "placeholder " + v + " but only " + std::to_string( m ) + " axioms" );
    }
    else if ( v.rfind( "z_", 0 ) == 0 )
    {
      if ( cert.mode != IpsMode::Boolean )
        fail( ErrorKind::ArityMismatch, "Boolean placeholder " + v + " in an algebraic certificate" );
      if ( !xs.count( v.substr( 2 ) ) )
        fail( ErrorKind::ArityMismatch, "Boolean placeholder " + v + " without a matching variable" );
    }
  }
  for ( std::size_t i = 0; i < m; ++i )
  {
    p.zero.emplace( placeholder_name( i ), std::uint64_t{ 0 } );
    p.axioms.emplace( placeholder_name( i ), cert.axioms.equations[i].circuit );
  }
  if ( cert.mode == IpsMode::Boolean )
    for ( auto const& x : xs )
    {
      p.zero.emplace( boolean_placeholder_name( x ), std::uint64_t{ 0 } );
      p.axioms.emplace( boolean_placeholder_name( x ), boolean_axiom( f, x ) );
    }
  return p;
}

template<class Field, class Elem>
Elem evaluate_generic( Circuit const& c, Field const& F, std::map<std::string, Elem> const& point )
{
  std::vector<Elem> val( c.size() );
  auto label_value = [&]( Label const& l ) {
    auto v = F.embed( l.coeff );
    if ( l.has_var() )
      v = F.mul( v, point.at( l.var ) );
    return v;
  };
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    switch ( n.kind )
    {
    case NodeKind::Input:
      val[i] = point.at( n.name );
      break;
    case NodeKind::Const:
      val[i] = F.embed( n.value );
      break;
    case NodeKind::Add:
    {
      auto acc = F.zero();
      for ( auto const& e : n.children )
        acc = F.add( acc, F.mul( label_value( e.label ), val[e.child] ) );
      val[i] = acc;
      break;
    }
    case NodeKind::Mul:
    {
      auto acc = F.one();
      for ( auto const& e : n.children )
        acc = F.mul( acc, F.mul( label_value( e.label ), val[e.child] ) );
      val[i] = acc;
      break;
    }
    }
  }
  return val[c.output()];
}

inline std::string elem_to_string( ExtField::Elem const& a )
{
  std::string s = "[";
  for ( std::size_t i = 0; i < a.size(); ++i )
    s += ( i ? "," : "" ) + std::to_string( a[i] );
  return s + "]";
}

} // namespace detail

/*! \brief Checks C(x,0,0) = 0 and C(x,F,x^2-x) = p, exactly by expansion or by random evaluation. */
inline IpsReport check_ips( IpsCertificate const& cert, CheckMethod method = CheckMethod::Exact, PitOptions const& pit = {},
                            std::size_t expansion_budget = default_expansion_budget )
{
  auto subs = detail::placeholder_substitutions( cert );
  auto const& f = cert.axioms.field;
  auto c0 = restrict( cert.circuit, subs.zero );
  auto c1 = restrict( cert.circuit, subs.axioms );
  auto const p = cert.target_poly();

  IpsReport r;
  r.method = method;
  r.size = cert.circuit.size();
  r.depth = depth( cert.circuit );
  r.depth_with_axioms = depth( c1 );
  if ( method == CheckMethod::Exact )
  {
    if ( !expand( c0, expansion_budget ).is_zero() )
      r.reason = "C(x,0) is not the zero polynomial";
    else if ( expand( c1, expansion_budget ) != p )
      r.reason = "C(x,F) differs from the target";
    else
      r.accepted = true;
    return r;
  }

  auto const deg = std::max<std::uint64_t>( { syntactic_degree( c0 ), syntactic_degree( c1 ), p.degree(), 1 } );
  unsigned e = pit.extension_degree;
  if ( e == 0 )
  {
    e = 1;
    long double s = static_cast<long double>( f.modulus() );
    while ( s < 2.0L * static_cast<long double>( deg ) )
    {
      s *= static_cast<long double>( f.modulus() );
      ++e;
    }
  }
  ExtField F( f, e );
  r.extension_degree = e;
  r.trials = pit.trials;
  r.seed = pit.seed;
  std::mt19937_64 rng( pit.seed );
  std::set<std::string> vars;
  for ( auto const* c : { &c0, &c1 } )
    for ( auto const& v : c->variables() )
      vars.insert( v );
  for ( auto const& v : p.variables() )
    vars.insert( v );
  r.accepted = true;
  for ( std::size_t t = 0; t < pit.trials; ++t )
  {
    std::map<std::string, ExtField::Elem> point;
    for ( auto const& v : vars )
      point[v] = F.random( rng );
    auto v0 = detail::evaluate_generic( c0, F, point );
    auto v1 = detail::evaluate_generic( c1, F, point );
    auto pv = F.zero();
    for ( auto const& [m, coef] : p.terms() )
    {
      auto term = F.embed( coef );
      for ( auto const& [x, k] : m.powers() )
        for ( std::uint32_t i = 0; i < k; ++i )
          term = F.mul( term, point.at( x ) );
      pv = F.add( pv, term );
    }
    auto d1 = F.sub( v1, pv );
    r.residuals.push_back( detail::elem_to_string( v0 ) + " " + detail::elem_to_string( d1 ) );
    if ( r.accepted && !ExtField::is_zero( v0 ) )
    {
      r.accepted = false;
      r.reason = "C(x,0) nonzero at trial " + std::to_string( t );
    }
    else if ( r.accepted && !ExtField::is_zero( d1 ) )
    {
      r.accepted = false;
      r.reason = "C(x,F) differs from the target at trial " + std::to_string( t );
    }
  }
  return r;
}

/* certificate file: `mode <algebraic|boolean>`, optional `target <poly>`, a circuit block, then `axiom <i> eq:<j>` lines */

struct CertificateFile
{
  IpsMode mode = IpsMode::Algebraic;
  std::optional<std::string> target;
  Circuit circuit;
  std::vector<std::pair<std::size_t, std::size_t>> axiom_refs; /* placeholder index (1-based), equation index */
};

inline CertificateFile parse_certificate( std::istream& in )
{
  CertificateFile cf;
  std::string line;
  std::streampos pos = in.tellg();
  while ( true )
  {
    pos = in.tellg();
    if ( !detail::next_content_line( in, line ) )
      fail( ErrorKind::ParseError, "certificate without circuit" );
    if ( line.rfind( "mode ", 0 ) == 0 )
    {
      auto m = line.substr( 5 );
      if ( m == "algebraic" )
        cf.mode = IpsMode::Algebraic;
      else if ( m == "boolean" )
        cf.mode = IpsMode::Boolean;
      else
        fail( ErrorKind::ParseError, "unknown mode '" + m + "'" );
    }
    else if ( line.rfind( "target ", 0 ) == 0 )
      cf.target = line.substr( 7 );
    else
      break;
  }
  in.clear();
  in.seekg( pos );
  cf.circuit = parse_circuit( in );
  while ( detail::next_content_line( in, line ) )
  {
    std::istringstream ls( line );
    std::string tag, idx, ref;
    ls >> tag >> idx >> ref;
    if ( tag != "axiom" || ref.rfind( "eq:", 0 ) != 0 )
      fail( ErrorKind::ParseError, "bad axiom line '" + line + "'" );
    cf.axiom_refs.emplace_back( detail::parse_u64( idx, "axiom index" ), detail::parse_u64( ref.substr( 3 ), "equation reference" ) );
  }
  return cf;
}

inline CertificateFile parse_certificate( std::string const& text )
{
  std::istringstream is( text );
  return parse_certificate( is );
}

inline std::string to_text( CertificateFile const& cf )
{
  std::string s = std::string( "mode " ) + ( cf.mode == IpsMode::Boolean ? "boolean" : "algebraic" ) + "\n";
  if ( cf.target )
    s += "target " + *cf.target + "\n";
  s += to_text( cf.circuit );
  for ( auto const& [i, j] : cf.axiom_refs )
    s += "axiom " + std::to_string( i ) + " eq:" + std::to_string( j ) + "\n";
  return s;
}

/*! \brief Binds a parsed certificate to an axiom system; without axiom lines y_i is equation i-1. */
inline IpsCertificate bind_certificate( CertificateFile const& cf, EquationSystem const& system )
{
  IpsCertificate cert{ cf.circuit, EquationSystem( system.field ), std::nullopt, cf.mode };
  for ( auto const& v : system.variables )
    cert.axioms.register_var( v );
  if ( cf.axiom_refs.empty() )
    for ( auto const& eq : system.equations )
      cert.axioms.add( eq.circuit, eq.group );
  else
  {
    std::map<std::size_t, std::size_t> refs( cf.axiom_refs.begin(), cf.axiom_refs.end() );
    std::size_t expect = 1;
    for ( auto const& [i, j] : refs )
    {
      if ( i != expect++ )
        fail( ErrorKind::ArityMismatch, "axiom indices must be 1..m without gaps" );
      if ( j >= system.size() )
        fail( ErrorKind::ArityMismatch, "axiom reference eq:" + std::to_string( j ) + " out of range" );
      cert.axioms.add( system.equations[j].circuit, system.equations[j].group );
    }
  }
  if ( cf.target )
    cert.target = parse_poly( system.field, *cf.target );
  return cert;
}

/* PC and PCR */

enum class JustKind
{
  Axiom,
  Boolean,
  LinComb,
  MulVar,
  Twin
};

struct Justification
{
  JustKind kind = JustKind::Axiom;
  std::size_t a = 0, b = 0; /* axiom index or line indices (0-based) */
  std::uint64_t alpha = 0, beta = 0;
  std::string var;
};

struct PcLine
{
  Justification just;
  SparsePoly poly;
};

struct PcProof
{
  PrimeField field;
  std::vector<PcLine> lines;
};

inline std::string twin_name( std::string const& x ) { return "~" + x; }

inline std::string to_string( Justification const& j )
{
  switch ( j.kind )
  {
  case JustKind::Axiom: return "axiom:" + std::to_string( j.a );
  case JustKind::Boolean: return "bool:" + j.var;
  case JustKind::LinComb:
    return "lin:" + std::to_string( j.a ) + "," + std::to_string( j.b ) + "," + std::to_string( j.alpha ) + "," + std::to_string( j.beta );
  case JustKind::MulVar: return "mul:" + std::to_string( j.a ) + "," + j.var;
  case JustKind::Twin: return "twin:" + j.var;
  }
  return {};
}

inline Justification parse_justification( std::string const& s )
{
  auto colon = s.find( ':' );
  if ( colon == std::string::npos )
    fail( ErrorKind::ParseError, "bad justification '" + s + "'" );
  auto tag = s.substr( 0, colon );
  std::vector<std::string> parts;
  std::istringstream ps( s.substr( colon + 1 ) );
  std::string tok;
  while ( std::getline( ps, tok, ',' ) )
    parts.push_back( tok );
  Justification j;
  auto need = [&]( std::size_t n ) {
    if ( parts.size() != n )
      fail( ErrorKind::ParseError, "bad justification '" + s + "'" );
  };
  if ( tag == "axiom" )
  {
    need( 1 );
    j.kind = JustKind::Axiom;
    j.a = detail::parse_u64( parts[0], "axiom index" );
  }
  else if ( tag == "bool" || tag == "twin" )
  {
    need( 1 );
    j.kind = tag == "bool" ? JustKind::Boolean : JustKind::Twin;
    j.var = parts[0];
  }
  else if ( tag == "lin" )
  {
    need( 4 );
    j.kind = JustKind::LinComb;
    j.a = detail::parse_u64( parts[0], "line index" );
    j.b = detail::parse_u64( parts[1], "line index" );
    j.alpha = detail::parse_u64( parts[2], "scalar" );
    j.beta = detail::parse_u64( parts[3], "scalar" );
  }
  else if ( tag == "mul" )
  {
    need( 2 );
    j.kind = JustKind::MulVar;
    j.a = detail::parse_u64( parts[0], "line index" );
    j.var = parts[1];
  }
  else
    fail( ErrorKind::ParseError, "unknown justification '" + tag + "'" );
  return j;
}

/*! \brief Proof file: optional `proof q=<q>` header, then `line <i> <justification> <poly>` per step. */
inline PcProof parse_pc_proof( std::istream& in, PrimeField const& f )
{
  PcProof p{ f, {} };
  std::string line;
  while ( detail::next_content_line( in, line ) )
  {
    std::istringstream ls( line );
    std::string tag, idx, just;
    ls >> tag;
    if ( tag == "proof" )
    {
      std::string qs;
      ls >> qs;
      if ( qs.rfind( "q=", 0 ) != 0 )
        fail( ErrorKind::ParseError, "bad proof header" );
      p.field = PrimeField( detail::parse_u64( qs.substr( 2 ), "modulus" ) );
      continue;
    }
    ls >> idx >> just;
    if ( tag != "line" )
      fail( ErrorKind::ParseError, "bad proof line '" + line + "'" );
    if ( detail::parse_u64( idx, "line index" ) != p.lines.size() )
      fail( ErrorKind::ParseError, "line indices must be consecutive from 0" );
    std::string rest;
    std::getline( ls, rest );
    p.lines.push_back( { parse_justification( just ), parse_poly( p.field, rest ) } );
  }
  return p;
}

inline PcProof parse_pc_proof( std::string const& text, PrimeField const& f )
{
  std::istringstream is( text );
  return parse_pc_proof( is, f );
}

inline std::string to_text( PcProof const& p )
{
  std::string s = "proof q=" + std::to_string( p.field.modulus() ) + "\n";
  for ( std::size_t i = 0; i < p.lines.size(); ++i )
    s += "line " + std::to_string( i ) + " " + to_string( p.lines[i].just ) + " " + p.lines[i].poly.to_string() + "\n";
  return s;
}

struct PcReport
{
  bool accepted = false;
  std::optional<std::size_t> bad_line;
  std::string reason;
  std::uint32_t degree = 0;
  std::size_t size = 0; /* distinct monomials over all lines */
};

/*! \brief Re-derives every line; PCR additionally admits twin axioms x + ~x - 1. */
inline PcReport check_pc( PcProof const& proof, std::vector<SparsePoly> const& axioms, bool pcr = false,
                          std::optional<SparsePoly> target = std::nullopt )
{
  auto const& f = proof.field;
  PcReport r;
  std::set<Monomial, GradedLex> monos;
  auto reject = [&]( std::size_t i, std::string why ) {
    r.accepted = false;
    r.bad_line = i;
    r.reason = "line " + std::to_string( i ) + ": " + why;
    return r;
  };
  for ( std::size_t i = 0; i < proof.lines.size(); ++i )
  {
    auto const& ln = proof.lines[i];
    auto const& j = ln.just;
    SparsePoly expect( f );
    switch ( j.kind )
    {
    case JustKind::Axiom:
      if ( j.a >= axioms.size() )
        return reject( i, "no axiom " + std::to_string( j.a ) );
      expect = axioms[j.a];
      break;
    case JustKind::Boolean:
    {
      auto x = SparsePoly::variable( f, j.var );
      expect = x * x - x;
      break;
    }
    case JustKind::Twin:
      if ( !pcr )
        return reject( i, "twin axioms are only available in PCR" );
      expect = SparsePoly::variable( f, j.var ) + SparsePoly::variable( f, twin_name( j.var ) ) - SparsePoly::constant( f, 1 );
      break;
    case JustKind::LinComb:
      if ( j.a >= i || j.b >= i )
        return reject( i, "refers to a later line" );
      expect = proof.lines[j.a].poly.scaled( f.reduce( j.alpha ) ) + proof.lines[j.b].poly.scaled( f.reduce( j.beta ) );
      break;
    case JustKind::MulVar:
      if ( j.a >= i )
        return reject( i, "refers to a later line" );
      expect = proof.lines[j.a].poly * SparsePoly::variable( f, j.var );
      break;
    }
    if ( expect != ln.poly )
      return reject( i, "expected " + expect.to_string() );
    r.degree = std::max( r.degree, ln.poly.degree() );
    for ( auto const& [m, c] : ln.poly.terms() )
      monos.insert( m );
  }
  r.size = monos.size();
  auto const want = target ? *target : SparsePoly::constant( f, 1 );
  if ( proof.lines.empty() || proof.lines.back().poly != want )
  {
    r.reason = "last line is not " + want.to_string();
    return r;
  }
  r.accepted = true;
  return r;
}

/*! \brief Follows the derivation with placeholders: each line becomes a node linear in y and z. */
inline IpsCertificate pc_to_ips( PcProof const& proof, EquationSystem const& axioms, std::optional<SparsePoly> target = std::nullopt )
{
  std::vector<SparsePoly> polys;
  for ( auto const& eq : axioms.equations )
    polys.push_back( expand( eq.circuit ) );
  auto rep = check_pc( proof, polys, false, target );
  if ( !rep.accepted )
    fail( ErrorKind::BadJustification, rep.reason );
  auto const& f = proof.field;
  Circuit c( f );
  std::vector<NodeId> node( proof.lines.size() );
  bool boolean = false;
  for ( std::size_t i = 0; i < proof.lines.size(); ++i )
  {
    auto const& j = proof.lines[i].just;
    switch ( j.kind )
    {
    case JustKind::Axiom: node[i] = c.input( placeholder_name( j.a ) ); break;
    case JustKind::Boolean:
      boolean = true;
      node[i] = c.input( boolean_placeholder_name( j.var ) );
      break;
    case JustKind::LinComb: node[i] = c.add( { Edge( node[j.a], f.reduce( j.alpha ) ), Edge( node[j.b], f.reduce( j.beta ) ) } ); break;
    case JustKind::MulVar: node[i] = c.mul( { Edge( node[j.a] ), Edge( c.input( j.var ) ) } ); break;
    case JustKind::Twin: fail( ErrorKind::Unsupported, "twin axioms have no placeholder" );
    }
  }
  c.set_output( node.back() );
  IpsCertificate cert{ std::move( c ), axioms, target, boolean ? IpsMode::Boolean : IpsMode::Algebraic };
  if ( boolean )
    for ( auto const& ln : proof.lines )
      if ( ln.just.kind == JustKind::Boolean )
        cert.axioms.register_var( ln.just.var );
  return cert;
}

/* proof by Boolean cases */

/*! \brief Components of sum G_i F_i + sum_{i<r} L_i (x_i - a_i) + sum Q_i (x_i^2 - x_i) = f for one case a. */
struct CaseComponents
{
  std::vector<SparsePoly> g, l, q;
};

/*! \brief Eliminates the case variables x_1..x_r (the first r of vars); cases are keyed by their 0-1 prefix. */
inline CaseComponents merge_boolean_cases( std::map<std::vector<bool>, CaseComponents> cases, std::vector<std::string> const& vars,
                                           std::size_t r, PrimeField const& f )
{
  if ( r > vars.size() )
    fail( ErrorKind::DimensionError, "more case variables than variables" );
  for ( std::size_t k = r; k-- > 0; )
  {
    std::map<std::vector<bool>, CaseComponents> next;
    auto const x = SparsePoly::variable( f, vars[k] );
    auto const one_minus_x = SparsePoly::constant( f, 1 ) - x;
    for ( std::uint64_t code = 0; code < ( std::uint64_t{ 1 } << k ); ++code )
    {
      std::vector<bool> prefix( k );
      for ( std::size_t i = 0; i < k; ++i )
        prefix[i] = ( code >> i ) & 1u;
      auto p0 = prefix, p1 = prefix;
      p0.push_back( false );
      p1.push_back( true );
      auto i0 = cases.find( p0 ), i1 = cases.find( p1 );
      if ( i0 == cases.end() || i1 == cases.end() )
        fail( ErrorKind::IncompleteCaseCover, "missing case for x" + std::to_string( k + 1 ) );
      auto const& c0 = i0->second;
      auto const& c1 = i1->second;
      if ( c0.g.size() != c1.g.size() || c0.q.size() != vars.size() || c1.q.size() != vars.size() || c0.l.size() < k + 1 ||
           c1.l.size() < k + 1 )
        fail( ErrorKind::ArityMismatch, "case components have inconsistent lengths" );
      auto mix = [&]( SparsePoly const& a, SparsePoly const& b ) { return one_minus_x * a + x * b; };
      CaseComponents m;
      for ( std::size_t i = 0; i < c0.g.size(); ++i )
        m.g.push_back( mix( c0.g[i], c1.g[i] ) );
      for ( std::size_t i = 0; i < k; ++i )
        m.l.push_back( mix( c0.l[i], c1.l[i] ) );
      for ( std::size_t i = 0; i < vars.size(); ++i )
        m.q.push_back( mix( c0.q[i], c1.q[i] ) );
      m.q[k] = m.q[k] - c0.l[k] + c1.l[k];
      next.emplace( std::move( prefix ), std::move( m ) );
    }
    cases = std::move( next );
  }
  auto it = cases.find( {} );
  if ( it == cases.end() )
    fail( ErrorKind::IncompleteCaseCover, "missing the empty case" );
  return it->second;
}

/*! \brief Left-hand side of the case identity, with the given prefix (empty after merging). */
inline SparsePoly case_identity_lhs( CaseComponents const& c, std::vector<SparsePoly> const& axioms, std::vector<std::string> const& vars,
                                     std::vector<bool> const& alpha, PrimeField const& f )
{
  SparsePoly s( f );
  for ( std::size_t i = 0; i < c.g.size(); ++i )
    s += c.g[i] * axioms.at( i );
  for ( std::size_t i = 0; i < alpha.size(); ++i )
    s += c.l.at( i ) * ( SparsePoly::variable( f, vars[i] ) - SparsePoly::constant( f, alpha[i] ? 1 : 0 ) );
  for ( std::size_t i = 0; i < vars.size(); ++i )
  {
    auto x = SparsePoly::variable( f, vars[i] );
    s += c.q.at( i ) * ( x * x - x );
  }
  return s;
}

/*! \brief Size of a depth-2 component list: total number of terms. */
inline std::size_t components_size( CaseComponents const& c )
{
  std::size_t n = 0;
  for ( auto const* v : { &c.g, &c.l, &c.q } )
    for ( auto const& p : *v )
      n += p.size();
  return n;
}

} // namespace ipsforge
