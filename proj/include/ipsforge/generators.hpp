#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "cnf.hpp"
#include "coeffx.hpp"
#include "encode_bits.hpp"
#include "encode_fixed.hpp"
#include "families.hpp"
#include "slp.hpp"
#include "transforms.hpp"
#include "universal.hpp"

namespace ipsforge
{

/*! \brief Ordered key=value report written next to generated artifacts. */
struct Stats
{
  std::vector<std::pair<std::string, std::string>> entries;

  template<class T>
  void set( std::string const& key, T const& value )
  {
    std::ostringstream os;
    os << value;
    for ( auto& e : entries )
      if ( e.first == key )
      {
        e.second = os.str();
        return;
      }
    entries.emplace_back( key, os.str() );
  }

  std::string get( std::string const& key ) const
  {
    for ( auto const& e : entries )
      if ( e.first == key )
        return e.second;
    return {};
  }

  std::string to_text() const
  {
    std::string s;
    for ( auto const& [k, v] : entries )
      s += k + "=" + v + "\n";
    return s;
  }
};

inline std::map<std::string, std::string> parse_stats( std::string const& text )
{
  std::map<std::string, std::string> r;
  std::istringstream is( text );
  std::string line;
  while ( std::getline( is, line ) )
  {
    auto p = line.find( '=' );
    if ( p == std::string::npos || p == 0 )
      fail( ErrorKind::ParseError, "stats line without key=value: " + line );
    r[line.substr( 0, p )] = line.substr( p + 1 );
  }
  return r;
}

/*! \brief Default degree bound l(r) = ceil(r^epsilon). */
inline std::uint32_t degree_bound( std::uint64_t r, double epsilon = 0.5 )
{
  return static_cast<std::uint32_t>( std::ceil( std::pow( static_cast<double>( r ), epsilon ) - 1e-9 ) );
}

inline constexpr std::size_t default_generator_budget = 20'000'000;

inline void check_node_budget( EquationSystem const& s, std::size_t budget )
{
  if ( s.total_nodes() > budget )
    fail( ErrorKind::BudgetExceeded, "generated system has " + std::to_string( s.total_nodes() ) + " nodes" );
}

/*! \brief c - b as a circuit. */
inline Circuit minus_constant( Circuit c, std::uint64_t b )
{
  auto const& f = c.field();
  b = f.reduce( b );
  if ( b == 0 )
    return c;
  auto out = c.output();
  c.set_output( c.add( { Edge( out ), Edge( c.constant( 1 ), f.neg( b ) ) } ) );
  return c;
}

/*! \brief Equations coeff_M(U) = b_M for every x-monomial M of degree <= l. */
inline EquationSystem coefficient_equations( Circuit const& u, UniversalLayout const& lay, SparsePoly const& target, std::uint32_t l,
                                             std::string const& group, std::size_t budget = default_generator_budget )
{
  auto const& f = u.field();
  VarSet xs( lay.x_vars.begin(), lay.x_vars.end() );
  EquationSystem s( f );
  for ( auto const& w : lay.edge_vars )
    s.register_var( w );
  for ( auto const& m : enumerate_monomials( lay.x_vars, l ) )
  {
    s.add( minus_constant( simplify( coeff_extract_bounded( u, m, xs ) ), target.coefficient( m ) ), group );
    check_node_budget( s, budget );
  }
  return s;
}

struct UniversalParams
{
  std::size_t s = 1, delta = 1, fanin = 2;
};

/*! \brief Equations in the edge variables expressing that a size-s depth-delta circuit agrees with perm_n up to degree l. */
inline EquationSystem gen_vnp_eq_vac0( std::size_t n, UniversalParams const& up, std::uint32_t l, PrimeField const& f,
                                       std::size_t budget = default_generator_budget )
{
  if ( n == 0 )
    fail( ErrorKind::DimensionError, "permanent dimension must be positive" );
  auto [u, lay] = build_universal( matrix_vars( "x", n, n ), up.s, up.delta, up.fanin, f, "w", budget );
  return coefficient_equations( u, lay, permanent_poly( n, f ), l, "vnp", budget );
}

/*! \brief Equations in the edge variables expressing that f has a size-s depth-delta circuit; the general form needs f to fit. */
inline EquationSystem gen_aub( SparsePoly const& p, UniversalParams const& up, std::uint32_t l, bool general = false,
                               std::size_t budget = default_generator_budget )
{
  auto const& f = p.field();
  auto vars = p.variables();
  auto [u, lay] = build_universal( vars, up.s, up.delta, up.fanin, f, "w", budget );
  if ( general )
  {
    try
    {
      embed( circuit_from_poly( p ), lay );
    }
    catch ( Error const& e )
    {
      if ( e.kind() != ErrorKind::DoesNotFit && e.kind() != ErrorKind::NotNormalForm )
        throw;
      fail( ErrorKind::Unsupported, "general upper bound formula needs an unbounded-depth universal circuit" );
    }
  }
  return coefficient_equations( u, lay, p, l, "aub", budget );
}

inline std::string placeholder_name( std::size_t i ) { return "y" + std::to_string( i + 1 ); }
inline std::string boolean_placeholder_name( std::string const& x ) { return "z_" + x; }

struct IpsRefuteParams
{
  UniversalParams universal;
  std::uint32_t l = 1;
  bool boolean = false;
  std::string prefix = "v";
};

/*! \brief Equations in the edge variables expressing a size/depth bounded IPS refutation of the axioms, up to degree l. */
inline EquationSystem gen_ips_refute( EquationSystem const& axioms, IpsRefuteParams const& p, std::size_t budget = default_generator_budget )
{
  auto const& f = axioms.field;
  auto const& xs = axioms.variables;
  std::vector<std::string> leaves = xs;
  for ( std::size_t i = 0; i < axioms.size(); ++i )
    leaves.push_back( placeholder_name( i ) );
  if ( p.boolean )
    for ( auto const& x : xs )
      leaves.push_back( boolean_placeholder_name( x ) );
  auto [u, lay] = build_universal( leaves, p.universal.s, p.universal.delta, p.universal.fanin, f, p.prefix, budget );

  Substitution zero, subst;
  for ( std::size_t i = 0; i < axioms.size(); ++i )
  {
    zero.emplace( placeholder_name( i ), std::uint64_t{ 0 } );
    subst.emplace( placeholder_name( i ), desugar_labels( axioms.equations[i].circuit ) );
  }
  if ( p.boolean )
    for ( auto const& x : xs )
    {
      zero.emplace( boolean_placeholder_name( x ), std::uint64_t{ 0 } );
      subst.emplace( boolean_placeholder_name( x ), boolean_axiom( f, x ) );
    }
  auto u0 = restrict( u, zero ).compacted();
  auto u1 = make_alternating( restrict( u, subst ) );

  VarSet xset( xs.begin(), xs.end() );
  EquationSystem s( f );
  for ( auto const& w : lay.edge_vars )
    s.register_var( w );
  auto const monos = enumerate_monomials( xs, p.l );
  for ( auto const& m : monos )
  {
    s.add( simplify( coeff_extract_bounded( u0, m, xset ) ), "zero" );
    check_node_budget( s, budget );
  }
  for ( auto const& m : monos )
  {
    s.add( minus_constant( simplify( coeff_extract_bounded( u1, m, xset ) ), m.degree() == 0 ? 1 : 0 ), "axioms" );
    check_node_budget( s, budget );
  }
  return s;
}

struct DiagPhiParams
{
  std::size_t n = 1;
  UniversalParams inner{ 1, 1, 1 };
  std::uint32_t l = 1;
  UniversalParams outer{ 1, 1, 1 };
  bool inner_cnf = false; /* inner formula as algebraized plain CNF instead of semi-CNF */
};

struct DiagPhi
{
  CnfFormula cnf;
  Stats stats;
};

/*! \brief Plain unary CNF of the refutation predicate over the encoded upper bound statement. */
inline DiagPhi gen_diag_phi( DiagPhiParams const& p, PrimeField const& f, std::size_t budget = default_generator_budget )
{
  auto vnp = gen_vnp_eq_vac0( p.n, p.inner, p.l, f, budget );
  EquationSystem inner( f );
  bool boolean = false;
  if ( p.inner_cnf )
  {
    UnaryEncoder e( f );
    for ( std::size_t i = 0; i < vnp.size(); ++i )
      e.encode( vnp.equations[i].circuit, "e" + std::to_string( i ) + ".", true );
    inner = algebraize_cnf( e.cnf(), f, "cnf" );
    boolean = true;
  }
  else
  {
    for ( auto const& v : vnp.variables )
      inner.register_var( v );
    for ( auto const& eq : vnp.equations )
    {
      auto s = scnf_encode_equation( eq.circuit );
      for ( auto& e : s.equations )
        if ( e.group == "scnf" )
          inner.add( std::move( e.circuit ), "scnf" );
    }
    for ( auto const& v : vnp.variables )
      inner.add( field_axiom( f, v ), "field" );
  }
  IpsRefuteParams rp{ p.outer, p.l, boolean, "v" };
  auto refute = gen_ips_refute( inner, rp, budget );

  UnaryEncoder enc( f );
  std::size_t edge_vars = 0;
  for ( auto const& v : refute.variables )
    if ( v.rfind( rp.prefix + "_", 0 ) == 0 )
    {
      enc.input( v );
      ++edge_vars;
    }
  for ( std::size_t i = 0; i < refute.size(); ++i )
    enc.encode( refute.equations[i].circuit, "e" + std::to_string( i ) + ".", true );
  auto census = enc.census();

  DiagPhi r;
  r.stats.set( "family", "diag-phi" );
  r.stats.set( "q", f.modulus() );
  r.stats.set( "n", p.n );
  r.stats.set( "l", p.l );
  r.stats.set( "inner", p.inner_cnf ? "cnf" : "scnf" );
  r.stats.set( "inner_s", p.inner.s );
  r.stats.set( "inner_delta", p.inner.delta );
  r.stats.set( "outer_t", p.outer.s );
  r.stats.set( "outer_delta", p.outer.delta );
  r.stats.set( "vnp_equations", vnp.size() );
  r.stats.set( "vnp_edge_vars", vnp.variables.size() );
  r.stats.set( "inner_axioms", inner.size() );
  r.stats.set( "refute_equations", refute.size() );
  r.stats.set( "refute_nodes", refute.total_nodes() );
  r.stats.set( "edge_vars", edge_vars );
  r.stats.set( "edge_var_bits", census.input_bits );
  r.stats.set( "gate_bits", census.gate_bits );
  r.stats.set( "chain_bits", census.chain_bits );
  r.cnf = enc.take_cnf();
  r.stats.set( "variables", r.cnf.num_vars() );
  r.stats.set( "clauses", r.cnf.num_clauses() );
  r.stats.set( "size_expression", "O(q * 2^((n+l)l) * poly(t,Delta') * |F| * N)" );
  return r;
}

struct PhiStarParams
{
  std::size_t n = 1;
  UniversalParams universal{ 1, 1, 1 };
  std::uint32_t l = 1;
};

/*! \brief Binary extended CNF of the upper bound statement plus the extension axioms of its refutation predicate. */
inline EquationSystem gen_phi_star( PhiStarParams const& p, PrimeField const& f, Stats* stats = nullptr,
                                    std::size_t budget = default_generator_budget )
{
  bit_width( f.modulus() );
  auto vnp = gen_vnp_eq_vac0( p.n, p.universal, p.l, f, budget );

  BitsEncoder inner( f );
  for ( std::size_t i = 0; i < vnp.size(); ++i )
    inner.encode( vnp.equations[i].circuit, "e" + std::to_string( i ) + ".", true );
  auto out = bits_ecnf_system( inner, f, "vnp_ecnf", "vnp_ecnf", "vnp_ecnf" );

  auto refute = gen_ips_refute( vnp, IpsRefuteParams{ p.universal, p.l, false, "v" }, budget );
  BitsEncoder outer( f );
  for ( std::size_t i = 0; i < refute.size(); ++i )
    outer.encode( refute.equations[i].circuit, "r" + std::to_string( i ) + ".", false );
  auto ext = bits_ecnf_system( outer, f, "ips_ecnf", "ips_ecnf", "boolean" );
  out.append( ext );

  std::size_t slp_lines = 0;
  for ( std::size_t i = 0; i < refute.size(); ++i )
  {
    auto slp = to_slp( refute.equations[i].circuit, false, "r" + std::to_string( i ) + ".s" );
    for ( std::size_t k = 0; k + 1 < slp.equations.size(); ++k )
    {
      auto const& eq = slp.equations[k];
      Circuit c( f );
      std::vector<Edge> kids;
      for ( auto const& o : eq.rhs )
        kids.emplace_back( o.is_const() ? c.constant( o.value ) : c.input( o.var ) );
      auto rhs = c.gate( eq.op, std::move( kids ) );
      c.set_output( c.add( { Edge( c.input( eq.lhs ) ), Edge( rhs, f.neg( 1 ) ) } ) );
      out.add( std::move( c ), "slp" );
      ++slp_lines;
    }
  }
  check_node_budget( out, budget );
  if ( stats )
  {
    stats->set( "family", "phi-star" );
    stats->set( "q", f.modulus() );
    stats->set( "k", bit_width( f.modulus() ) );
    stats->set( "vnp_equations", vnp.size() );
    stats->set( "refute_equations", refute.size() );
    stats->set( "vnp_ecnf", out.count_group( "vnp_ecnf" ) );
    stats->set( "boolean", out.count_group( "boolean" ) );
    stats->set( "ips_ecnf", out.count_group( "ips_ecnf" ) );
    stats->set( "slp", slp_lines );
    stats->set( "variables", out.variables.size() );
    stats->set( "equations", out.size() );
    stats->set( "size_expression", "O(k * 2^((n+l)l) * poly(s,Delta) * N)" );
  }
  return out;
}

/* rank principles */

/*! \brief Sum_k x_i_k y_k_j = A_ij for all i, j in [m]; A is row-major m x m. */
inline EquationSystem gen_rankp( std::size_t m, std::size_t n, std::vector<std::uint64_t> const& a, PrimeField const& f )
{
  if ( m <= n || n == 0 )
    fail( ErrorKind::DimensionError, "rank principle needs m > n > 0" );
  if ( a.size() != m * m )
    fail( ErrorKind::DimensionError, "matrix must have " + std::to_string( m * m ) + " entries" );
  EquationSystem s( f );
  for ( auto const& v : matrix_vars( "x", m, n ) )
    s.register_var( v );
  for ( auto const& v : matrix_vars( "y", n, m ) )
    s.register_var( v );
  for ( std::size_t i = 1; i <= m; ++i )
    for ( std::size_t j = 1; j <= m; ++j )
    {
      Circuit c( f );
      std::vector<Edge> terms;
      for ( std::size_t k = 1; k <= n; ++k )
        terms.emplace_back( c.mul( { Edge( c.input( matrix_var( "x", i, k ) ) ), Edge( c.input( matrix_var( "y", k, j ) ) ) } ) );
      c.set_output( c.add( std::move( terms ) ) );
      s.add( minus_constant( std::move( c ), a[( i - 1 ) * m + ( j - 1 )] ), "rank" );
    }
  return s;
}

inline std::vector<std::uint64_t> identity_matrix( std::size_t m )
{
  std::vector<std::uint64_t> a( m * m, 0 );
  for ( std::size_t i = 0; i < m; ++i )
    a[i * m + i] = 1;
  return a;
}

/*! \brief r-tensor with ones on the diagonal, row-major. */
inline std::vector<std::uint64_t> diagonal_tensor( std::size_t m, std::size_t r )
{
  std::size_t size = 1, step = 0, stride = 1;
  for ( std::size_t j = 0; j < r; ++j )
  {
    size *= m;
    step += stride;
    stride *= m;
  }
  std::vector<std::uint64_t> a( size, 0 );
  for ( std::size_t i = 0; i < m; ++i )
    a[i * step] = 1;
  return a;
}

inline std::string tensor_var( std::size_t j, std::size_t i, std::size_t k )
{
  return "x_" + std::to_string( j ) + "_" + std::to_string( i ) + "_" + std::to_string( k );
}

/*! \brief Sum_k prod_j x_j_(i_j)_k = A_(i_1..i_r) plus Boolean axioms; A is row-major (i_1 most significant). */
inline EquationSystem gen_trankp( std::size_t m, std::size_t n, std::size_t r, std::vector<std::uint64_t> const& a, PrimeField const& f )
{
  if ( m <= n || n == 0 || r == 0 )
    fail( ErrorKind::DimensionError, "tensor rank principle needs m > n > 0 and r > 0" );
  std::size_t cells = 1;
  for ( std::size_t j = 0; j < r; ++j )
    cells *= m;
  if ( a.size() != cells )
    fail( ErrorKind::DimensionError, "tensor must have " + std::to_string( cells ) + " entries" );
  EquationSystem s( f );
  for ( std::size_t j = 1; j <= r; ++j )
    for ( std::size_t i = 1; i <= m; ++i )
      for ( std::size_t k = 1; k <= n; ++k )
        s.register_var( tensor_var( j, i, k ) );
  std::vector<std::size_t> idx( r, 1 );
  for ( std::size_t cell = 0; cell < cells; ++cell )
  {
    std::size_t rest = cell;
    for ( std::size_t j = r; j-- > 0; )
    {
      idx[j] = rest % m + 1;
      rest /= m;
    }
    Circuit c( f );
    std::vector<Edge> terms;
    for ( std::size_t k = 1; k <= n; ++k )
    {
      std::vector<Edge> factors;
      for ( std::size_t j = 1; j <= r; ++j )
        factors.emplace_back( c.input( tensor_var( j, idx[j - 1], k ) ) );
      terms.emplace_back( c.mul( std::move( factors ) ) );
    }
    c.set_output( c.add( std::move( terms ) ) );
    s.add( minus_constant( std::move( c ), a[cell] ), "tensor" );
  }
  for ( std::size_t j = 1; j <= r; ++j )
    for ( std::size_t i = 1; i <= m; ++i )
      for ( std::size_t k = 1; k <= n; ++k )
        s.add( boolean_axiom( f, tensor_var( j, i, k ) ), "boolean" );
  return s;
}

/*! \brief Name fragment of a vector over F_L: "r" followed by its dot-separated entries. */
inline std::string pi_name( std::vector<std::size_t> const& pi )
{
  std::string s = "r";
  for ( std::size_t i = 0; i < pi.size(); ++i )
    s += ( i ? "." : "" ) + std::to_string( pi[i] );
  return s;
}

/*! \brief All vectors over {0..L-1} of the given length, lexicographic. */
inline std::vector<std::vector<std::size_t>> vectors_of_length( std::size_t L, std::size_t len )
{
  std::vector<std::vector<std::size_t>> out{ {} };
  for ( std::size_t d = 0; d < len; ++d )
  {
    std::vector<std::vector<std::size_t>> next;
    for ( auto const& v : out )
      for ( std::size_t b = 0; b < L; ++b )
      {
        auto w = v;
        w.push_back( b );
        next.push_back( std::move( w ) );
      }
    out = std::move( next );
  }
  return out;
}

struct IRankPParams
{
  std::size_t L = 2, n = 1, K = 1;
  bool extension = false;
  /* A^pi for pi of length n, keyed by pi_name, row-major LK x LK; missing entries are zero matrices */
  std::map<std::string, std::vector<std::uint64_t>> a;
};

/*! \brief Fails before anything is enumerated when the tree of matrices is too large. */
inline void check_irankp_budget( std::size_t L, std::size_t n, std::size_t K, std::size_t budget = default_generator_budget )
{
  double nodes = 0, level = 1;
  for ( std::size_t len = 0; len <= n; ++len, level *= static_cast<double>( L ) )
    nodes += level;
  if ( nodes * static_cast<double>( L * K * L * K ) > static_cast<double>( budget ) )
    fail( ErrorKind::BudgetExceeded, "iterated rank principle exceeds equation budget" );
}

/*! \brief Iterated rank principle, optionally with the z extension equations. */
inline EquationSystem gen_irankp( IRankPParams const& p, PrimeField const& f, std::size_t budget = default_generator_budget )
{
  if ( p.L == 0 || p.K == 0 )
    fail( ErrorKind::DimensionError, "L and K must be positive" );
  auto const LK = p.L * p.K;
  check_irankp_budget( p.L, p.n, p.K, budget );
  std::vector<std::vector<std::size_t>> inner, leaves = vectors_of_length( p.L, p.n );
  for ( std::size_t len = 0; len < p.n; ++len )
    for ( auto& v : vectors_of_length( p.L, len ) )
      inner.push_back( std::move( v ) );
  auto xv = [&]( std::vector<std::size_t> const& pi, std::size_t i, std::size_t k ) {
    return "x_" + pi_name( pi ) + "_" + std::to_string( i ) + "_" + std::to_string( k );
  };
  auto yv = [&]( std::size_t k, std::size_t j ) { return matrix_var( "y", k, j ); };

  EquationSystem s( f );
  for ( auto const* group : { &inner, &leaves } )
    for ( auto const& pi : *group )
      for ( std::size_t i = 1; i <= LK; ++i )
        for ( std::size_t k = 1; k <= p.K; ++k )
          s.register_var( xv( pi, i, k ) );
  for ( std::size_t k = 1; k <= p.K; ++k )
    for ( std::size_t j = 1; j <= LK; ++j )
      s.register_var( yv( k, j ) );

  auto product = [&]( Circuit& c, std::vector<std::size_t> const& pi, std::size_t i, std::size_t j ) {
    std::vector<Edge> terms;
    for ( std::size_t k = 1; k <= p.K; ++k )
      terms.emplace_back( c.mul( { Edge( c.input( xv( pi, i, k ) ) ), Edge( c.input( yv( k, j ) ) ) } ) );
    return terms;
  };
  for ( auto const& pi : inner )
    for ( std::size_t i = 1; i <= LK; ++i )
      for ( std::size_t j = 1; j <= LK; ++j )
      {
        Circuit c( f );
        auto terms = product( c, pi, i, j );
        auto const b = ( j + p.K - 1 ) / p.K - 1;
        auto child = pi;
        child.push_back( b );
        terms.emplace_back( c.input( xv( child, i, j - b * p.K ) ), f.neg( 1 ) );
        c.set_output( c.add( std::move( terms ) ) );
        s.add( std::move( c ), "iterate" );
      }
  for ( auto const& pi : leaves )
  {
    auto it = p.a.find( pi_name( pi ) );
    if ( it != p.a.end() && it->second.size() != LK * LK )
      fail( ErrorKind::DimensionError, "matrix " + it->first + " must have " + std::to_string( LK * LK ) + " entries" );
    for ( std::size_t i = 1; i <= LK; ++i )
      for ( std::size_t j = 1; j <= LK; ++j )
      {
        Circuit c( f );
        c.set_output( c.add( product( c, pi, i, j ) ) );
        s.add( minus_constant( std::move( c ), it == p.a.end() ? 0 : it->second[( i - 1 ) * LK + ( j - 1 )] ), "leaf" );
      }
  }
  if ( p.extension )
    for ( auto const& pi : inner )
      for ( std::size_t i = 1; i <= LK; ++i )
        for ( std::size_t k = 1; k <= p.K; ++k )
          for ( std::size_t j = 1; j <= LK; ++j )
          {
            Circuit c( f );
            auto z = c.input( "z_" + pi_name( pi ) + "_" + std::to_string( i ) + "_" + std::to_string( k ) + "_" + std::to_string( j ) );
            auto xy = c.mul( { Edge( c.input( xv( pi, i, k ) ) ), Edge( c.input( yv( k, j ) ) ) } );
            c.set_output( c.add( { Edge( z ), Edge( xy, f.neg( 1 ) ) } ) );
            s.add( std::move( c ), "extension" );
          }
  return s;
}

} // namespace ipsforge
