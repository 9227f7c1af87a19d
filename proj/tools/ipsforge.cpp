#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <ipsforge/ipsforge.hpp>

using namespace ipsforge;

namespace
{

enum Exit
{
  exit_ok = 0,
  exit_reject = 1,
  exit_budget = 2,
  exit_usage = 3
};

struct Config
{
  std::uint64_t q = 2;
  std::uint64_t seed = 1;
  std::size_t budget_terms = default_expansion_budget;
  std::size_t budget_vars = 26;
  double epsilon = 0.5;
  std::string out, stats, params;
};

std::string read_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    fail( ErrorKind::ParseError, "cannot read " + path );
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output( std::string const& path, std::string const& text )
{
  if ( path.empty() || path == "-" )
  {
    std::cout << text;
    return;
  }
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    fail( ErrorKind::ParseError, "cannot write " + path );
  out << text;
}

struct GenOptions
{
  std::string family;
  std::size_t n = 1, m = 2, r = 2, s = 1, delta = 1, fanin = 1, t = 1, delta2 = 1, fanin2 = 1, L = 2, K = 1;
  std::optional<std::uint32_t> l;
  std::string a = "id", axioms, poly;
  bool boolean = false, general = false, extension = false, inner_cnf = false;
  std::map<std::string, std::vector<std::uint64_t>> a_by_pi; /* irankp matrices from the params file */
};

/* values from a JSON params file fill options not given on the command line */
void apply_params( CLI::App& app, std::string const& path, GenOptions& g )
{
  if ( path.empty() )
    return;
  auto j = nlohmann::json::parse( read_file( path ), nullptr, false );
  if ( j.is_discarded() || !j.is_object() )
    fail( ErrorKind::ParseError, "params file is not a JSON object" );
  for ( auto const& [key, value] : j.items() )
  {
    if ( key == "a" && value.is_object() )
    {
      for ( auto const& [pi, entries] : value.items() )
        g.a_by_pi[pi] = entries.get<std::vector<std::uint64_t>>();
      continue;
    }
    auto* opt = app.get_option_no_throw( "--" + key );
    if ( !opt && app.get_parent() )
      opt = app.get_parent()->get_option_no_throw( "--" + key );
    if ( !opt )
      fail( ErrorKind::ParseError, "unknown parameter '" + key + "'" );
    if ( opt->count() > 0 )
      continue;
    std::string s;
    if ( value.is_string() )
      s = value.get<std::string>();
    else if ( value.is_boolean() )
      s = value.get<bool>() ? "true" : "false";
    else
      s = value.dump();
    opt->add_result( s );
    opt->run_callback();
  }
}

std::vector<std::uint64_t> parse_entries( std::string const& s )
{
  std::vector<std::uint64_t> v;
  std::istringstream is( s );
  std::string tok;
  while ( std::getline( is, tok, ',' ) )
    v.push_back( detail::parse_u64( tok, "entry" ) );
  return v;
}

std::vector<std::uint64_t> matrix_arg( std::string const& a, std::size_t m )
{
  if ( a == "id" )
    return identity_matrix( m );
  if ( a == "zero" )
    return std::vector<std::uint64_t>( m * m, 0 );
  return parse_entries( a );
}

std::vector<std::uint64_t> tensor_arg( std::string const& a, std::size_t m, std::size_t r )
{
  std::size_t cells = 1;
  for ( std::size_t j = 0; j < r; ++j )
    cells *= m;
  if ( a == "id" || a == "diag" )
    return diagonal_tensor( m, r );
  if ( a == "zero" )
    return std::vector<std::uint64_t>( cells, 0 );
  if ( a.find( '=' ) == std::string::npos )
  {
    if ( r > 3 )
      fail( ErrorKind::ParseError, "tensors of order above 3 take the sparse form i1.i2...ir=v;..." );
    return parse_entries( a );
  }
  /* sparse coordinates, 1-based, i1 most significant */
  std::vector<std::uint64_t> v( cells, 0 );
  std::istringstream is( a );
  std::string entry;
  while ( std::getline( is, entry, ';' ) )
  {
    if ( entry.empty() )
      continue;
    auto eq = entry.find( '=' );
    if ( eq == std::string::npos )
      fail( ErrorKind::ParseError, "bad tensor entry '" + entry + "'" );
    std::istringstream cs( entry.substr( 0, eq ) );
    std::string tok;
    std::size_t cell = 0, order = 0;
    while ( std::getline( cs, tok, '.' ) )
    {
      auto const i = detail::parse_u64( tok, "tensor index" );
      if ( i == 0 || i > m )
        fail( ErrorKind::DimensionError, "tensor index " + tok + " outside [1, " + std::to_string( m ) + "]" );
      cell = cell * m + ( i - 1 );
      ++order;
    }
    if ( order != r )
      fail( ErrorKind::DimensionError, "tensor entry '" + entry + "' needs " + std::to_string( r ) + " indices" );
    v[cell] = detail::parse_u64( entry.substr( eq + 1 ), "tensor value" );
  }
  return v;
}

void system_stats( Stats& st, EquationSystem const& s )
{
  st.set( "equations", s.size() );
  st.set( "variables", s.variables.size() );
  st.set( "nodes", s.total_nodes() );
  std::map<std::string, std::size_t> groups;
  for ( auto const& eq : s.equations )
    ++groups[eq.group];
  for ( auto const& [g, n] : groups )
    st.set( "group_" + g, n );
}


int run_gen( GenOptions const& o, Config const& cfg )
{
  PrimeField f( cfg.q );
  Stats st;
  st.set( "family", o.family );
  st.set( "q", cfg.q );
  std::string text;
  auto l_for = [&]( std::uint64_t r ) { return o.l ? *o.l : degree_bound( r, cfg.epsilon ); };
  if ( o.family == "diag-phi" )
  {
    DiagPhiParams p{ o.n, { o.s, o.delta, o.fanin }, l_for( o.n * o.n ), { o.t, o.delta2, o.fanin2 }, o.inner_cnf };
    auto d = gen_diag_phi( p, f );
    text = emit_dimacs( d.cnf );
    st = d.stats;
  }
  else
  {
    EquationSystem sys( f );
    if ( o.family == "vnp-vac0" )
    {
      auto l = l_for( o.n * o.n );
      sys = gen_vnp_eq_vac0( o.n, { o.s, o.delta, o.fanin }, l, f );
      st.set( "n", o.n );
      st.set( "l", l );
    }
    else if ( o.family == "ips-refute" )
    {
      if ( o.axioms.empty() )
        fail( ErrorKind::ParseError, "ips-refute needs --axioms" );
      auto ax = parse_system( read_file( o.axioms ) );
      if ( ax.field.modulus() != cfg.q )
        fail( ErrorKind::ParseError, "axioms file is over a different field" );
      auto l = l_for( ax.variables.size() );
      sys = gen_ips_refute( ax, { { o.t, o.delta2, o.fanin2 }, l, o.boolean, "v" } );
      st.set( "l", l );
    }
    else if ( o.family == "phi-star" )
    {
      auto l = l_for( o.n * o.n );
      sys = gen_phi_star( { o.n, { o.s, o.delta, o.fanin }, l }, f, &st );
    }
    else if ( o.family == "aub" )
    {
      if ( o.poly.empty() )
        fail( ErrorKind::ParseError, "aub needs --poly" );
      auto p = parse_poly( f, o.poly );
      auto l = l_for( p.variables().size() );
      sys = gen_aub( p, { o.s, o.delta, o.fanin }, l, o.general );
      st.set( "l", l );
    }
    else if ( o.family == "rankp" )
      sys = gen_rankp( o.m, o.n, matrix_arg( o.a, o.m ), f );
    else if ( o.family == "trankp" )
      sys = gen_trankp( o.m, o.n, o.r, tensor_arg( o.a, o.m, o.r ), f );
    else if ( o.family == "irankp" )
    {
      IRankPParams p;
      p.L = o.L;
      p.n = o.n;
      p.K = o.K;
      p.extension = o.extension;
      check_irankp_budget( p.L, p.n, p.K );
      if ( !o.a_by_pi.empty() )
        p.a = o.a_by_pi;
      else if ( o.a != "zero" )
        for ( auto const& pi : vectors_of_length( o.L, o.n ) )
          p.a[pi_name( pi )] = matrix_arg( o.a, o.L * o.K );
      sys = gen_irankp( p, f );
    }
    system_stats( st, sys );
    text = to_text( sys );
  }
  write_output( cfg.out, text );
  if ( !cfg.stats.empty() )
    write_output( cfg.stats, st.to_text() );
  else if ( !cfg.out.empty() && cfg.out != "-" )
    write_output( cfg.out + ".stats", st.to_text() );
  return exit_ok;
}

int run_check( std::string const& cert_path, std::string const& axioms_path, std::string const& method, std::size_t trials,
               unsigned ext, Config const& cfg )
{
  auto ax = parse_system( read_file( axioms_path ) );
  auto cf = parse_certificate( read_file( cert_path ) );
  auto cert = bind_certificate( cf, ax );
  PitOptions pit{ trials, cfg.seed, ext };
  auto r = check_ips( cert, method == "pit" ? CheckMethod::Pit : CheckMethod::Exact, pit, cfg.budget_terms );
  Stats st;
  st.set( "verdict", r.accepted ? "ACCEPT" : "REJECT" );
  st.set( "method", method );
  if ( !r.accepted )
    st.set( "reason", r.reason );
  st.set( "size", r.size );
  st.set( "depth", r.depth );
  st.set( "depth_with_axioms", r.depth_with_axioms );
  if ( method == "pit" )
  {
    st.set( "seed", r.seed );
    st.set( "trials", r.trials );
    st.set( "extension_degree", r.extension_degree );
    for ( std::size_t i = 0; i < r.residuals.size(); ++i )
      st.set( "residual_" + std::to_string( i ), r.residuals[i] );
  }
  write_output( cfg.out, st.to_text() );
  return r.accepted ? exit_ok : exit_reject;
}

int run_check_pc( std::string const& proof_path, std::string const& axioms_path, bool pcr, std::string const& to_ips, Config const& cfg )
{
  auto ax = parse_system( read_file( axioms_path ) );
  auto proof = parse_pc_proof( read_file( proof_path ), ax.field );
  if ( proof.field.modulus() != ax.field.modulus() )
    fail( ErrorKind::ParseError, "proof and axioms are over different fields" );
  std::vector<SparsePoly> polys;
  for ( auto const& eq : ax.equations )
    polys.push_back( expand( eq.circuit, cfg.budget_terms ) );
  auto r = check_pc( proof, polys, pcr );
  Stats st;
  st.set( "verdict", r.accepted ? "ACCEPT" : "REJECT" );
  if ( r.bad_line )
    st.set( "bad_line", *r.bad_line );
  if ( !r.accepted )
    st.set( "reason", r.reason );
  st.set( "degree", r.degree );
  st.set( "size", r.size );
  st.set( "lines", proof.lines.size() );
  write_output( cfg.out, st.to_text() );
  if ( r.accepted && !to_ips.empty() )
  {
    auto cert = pc_to_ips( proof, ax );
    CertificateFile cf{ cert.mode, std::nullopt, cert.circuit, {} };
    write_output( to_ips, to_text( cf ) );
  }
  return r.accepted ? exit_ok : exit_reject;
}

std::string assignment_text( Assignment const& a )
{
  std::string s;
  for ( auto const& [v, x] : a )
    s += v + "=" + std::to_string( x ) + "\n";
  return s;
}

int run_oracle( std::string const& kind, std::string const& path, std::string const& monomial, std::string const& xvars_arg,
                std::optional<std::uint64_t> q, Config const& cfg )
{
  auto text = read_file( path );
  std::string out;
  if ( kind == "sat" )
  {
    auto f = parse_dimacs( text );
    if ( f.names.size() > cfg.budget_vars )
      fail( ErrorKind::BudgetExceeded, std::to_string( f.names.size() ) + " variables exceed --budget-vars" );
    auto m = sat_bruteforce( f );
    if ( !m )
      out = "UNSAT\n";
    else
    {
      out = "SAT\nv";
      for ( std::size_t i = 0; i < m->size(); ++i )
        out += " " + std::string( ( *m )[i] ? "" : "-" ) + std::to_string( i + 1 );
      out += " 0\n";
    }
  }
  else if ( kind == "fieldsat" )
  {
    auto s = parse_system( text );
    if ( q && *q != s.field.modulus() )
      fail( ErrorKind::ParseError, "system is over F_" + std::to_string( s.field.modulus() ) );
    auto a = fieldsat_bruteforce( s );
    out = a ? "SAT\n" + assignment_text( *a ) : "UNSAT\n";
  }
  else
  {
    auto c = parse_circuit( text );
    if ( kind == "expand" )
      out = expand( c, cfg.budget_terms ).to_string() + "\n";
    else
    {
      if ( monomial.empty() )
        fail( ErrorKind::ParseError, "coeff needs --monomial" );
      auto m = parse_monomial( monomial );
      VarSet xvars;
      if ( xvars_arg.empty() )
        for ( auto const& v : c.variables() )
          xvars.insert( v );
      else
      {
        std::istringstream is( xvars_arg );
        std::string v;
        while ( std::getline( is, v, ',' ) )
          xvars.insert( v );
      }
      out = expand( coeff_extract_general( c, m, xvars ), cfg.budget_terms ).to_string() + "\n";
    }
  }
  write_output( cfg.out, out );
  return exit_ok;
}

int run_encode( std::string const& path, std::string const& as, bool equation, Config const& cfg )
{
  auto c = parse_circuit( read_file( path ) );
  std::string out;
  if ( as == "cnf" )
    out = emit_dimacs( equation ? cnf_encode_equation( c ) : cnf_encode_circuit( c ) );
  else if ( as == "bits" )
    out = emit_dimacs( equation ? cnf_encode_equation_bits( c ) : cnf_encode_circuit_bits( c ) );
  else if ( as == "ecnf" )
    out = to_text( ecnf_encode_equation( c ) );
  else if ( as == "scnf" )
    out = to_text( scnf_encode_equation( c ) );
  else if ( as == "bits-ecnf" )
    out = to_text( ecnf_encode_equation_bits( c ) );
  else
    out = to_slp( c, equation ).to_string();
  write_output( cfg.out, out );
  return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "ipsforge: algebraic circuits, CNF encodings, formula families and proof checking" };
  app.require_subcommand( 1 );
  Config cfg;
  std::optional<std::uint64_t> q_opt;
  app.add_option( "--q", q_opt, "field modulus" )->envname( "IPSFORGE_Q" );
  app.add_option( "--seed", cfg.seed, "seed for randomized methods" )->envname( "IPSFORGE_SEED" );
  app.add_option( "--budget-terms", cfg.budget_terms, "expansion term budget" )->envname( "IPSFORGE_BUDGET_TERMS" )->check( CLI::PositiveNumber );
  app.add_option( "--budget-vars", cfg.budget_vars, "brute-force variable budget" )->envname( "IPSFORGE_BUDGET_VARS" )->check( CLI::PositiveNumber );
  app.add_option( "--epsilon", cfg.epsilon, "exponent of the default degree bound" )->envname( "IPSFORGE_EPSILON" )->check( CLI::PositiveNumber );
  app.add_option( "--out", cfg.out, "output path (stdout when absent)" )->envname( "IPSFORGE_OUT" );
  app.add_option( "--stats", cfg.stats, "stats sidecar path" )->envname( "IPSFORGE_STATS" );
  app.fallthrough();

  GenOptions g;
  auto* gen = app.add_subcommand( "gen", "generate a formula family" );
  gen->add_option( "family", g.family )
      ->required()
      ->check( CLI::IsMember( { "vnp-vac0", "ips-refute", "diag-phi", "phi-star", "aub", "rankp", "trankp", "irankp" } ) );
  gen->add_option( "--params", cfg.params, "JSON file with parameter values" );
  gen->add_option( "--n", g.n );
  gen->add_option( "--m", g.m );
  gen->add_option( "--r", g.r );
  gen->add_option( "--s", g.s );
  gen->add_option( "--delta", g.delta );
  gen->add_option( "--fanin", g.fanin );
  gen->add_option( "--t", g.t );
  gen->add_option( "--delta2", g.delta2, "refutation depth" );
  gen->add_option( "--fanin2", g.fanin2, "refutation fan-in" );
  gen->add_option( "--L", g.L );
  gen->add_option( "--K", g.K );
  gen->add_option( "--l", g.l, "degree bound (default ceil(r^epsilon))" );
  gen->add_option( "--A", g.a, "id, zero, diag, dense comma list, or sparse i1.i2...=v;..." );
  gen->add_option( "--axioms", g.axioms, "axiom system file" );
  gen->add_option( "--poly", g.poly, "target polynomial" );
  gen->add_flag( "--boolean", g.boolean );
  gen->add_flag( "--general", g.general );
  gen->add_flag( "--extension", g.extension );
  gen->add_flag( "--inner-cnf", g.inner_cnf );

  std::string cert_path, axioms_path, method = "exact";
  std::size_t trials = 8;
  unsigned ext = 0;
  auto* check = app.add_subcommand( "check", "check an IPS certificate" );
  check->add_option( "certificate", cert_path )->required();
  check->add_option( "axioms", axioms_path )->required();
  check->add_option( "--method", method )->check( CLI::IsMember( { "exact", "pit" } ) );
  check->add_option( "--trials", trials )->check( CLI::PositiveNumber );
  check->add_option( "--extension-degree", ext );

  std::string proof_path, to_ips;
  bool pcr = false;
  auto* check_pc_cmd = app.add_subcommand( "check-pc", "check a PC or PCR proof" );
  check_pc_cmd->add_option( "proof", proof_path )->required();
  check_pc_cmd->add_option( "axioms", axioms_path )->required();
  check_pc_cmd->add_flag( "--pcr", pcr );
  check_pc_cmd->add_option( "--to-ips", to_ips, "write the converted IPS certificate" );

  std::string kind, input, monomial, xvars;
  auto* oracle = app.add_subcommand( "oracle", "brute-force ground truth" );
  oracle->add_option( "kind", kind )->required()->check( CLI::IsMember( { "sat", "fieldsat", "expand", "coeff" } ) );
  oracle->add_option( "input", input )->required();
  oracle->add_option( "--monomial", monomial );
  oracle->add_option( "--xvars", xvars, "comma-separated x variables (default all)" );

  std::string as = "cnf";
  bool equation = false;
  auto* encode = app.add_subcommand( "encode", "encode a circuit" );
  encode->add_option( "circuit", input )->required();
  encode->add_option( "--as", as )->check( CLI::IsMember( { "cnf", "ecnf", "scnf", "bits", "bits-ecnf", "slp" } ) );
  encode->add_flag( "--equation", equation, "encode C = 0 instead of the circuit relation" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_usage;
  }

  try
  {
    if ( gen->parsed() )
    {
      apply_params( *gen, cfg.params, g );
      if ( q_opt )
        cfg.q = *q_opt;
      return run_gen( g, cfg );
    }
    if ( check->parsed() )
      return run_check( cert_path, axioms_path, method, trials, ext, cfg );
    if ( check_pc_cmd->parsed() )
      return run_check_pc( proof_path, axioms_path, pcr, to_ips, cfg );
    if ( oracle->parsed() )
      return run_oracle( kind, input, monomial, xvars, q_opt, cfg );
    return run_encode( input, as, equation, cfg );
  }
  catch ( Error const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_budget() ? exit_budget : exit_usage;
  }
  catch ( CLI::Error const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
