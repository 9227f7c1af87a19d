#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"

namespace ipsforge
{

/* literal sentinels for constant bits */
inline constexpr int lit_true = INT_MAX;
inline constexpr int lit_false = -INT_MAX;

inline bool is_const_lit( int l ) noexcept { return l == lit_true || l == lit_false; }

/*! \brief Clause list over named variables; ids are 1-based in registration order. */
struct CnfFormula
{
  std::vector<std::string> names;
  std::vector<std::vector<int>> clauses;

  std::size_t num_vars() const noexcept { return names.size(); }
  std::size_t num_clauses() const noexcept { return clauses.size(); }
  bool operator==( CnfFormula const& o ) const { return names == o.names && clauses == o.clauses; }
};

/*! \brief Incremental CNF construction with name lookup and constant-literal folding. */
class CnfBuilder
{
public:
  int var( std::string const& name )
  {
    auto it = ids_.find( name );
    if ( it != ids_.end() )
      return it->second;
    f_.names.push_back( name );
    auto const id = static_cast<int>( f_.names.size() );
    ids_.emplace( name, id );
    return id;
  }

  bool has( std::string const& name ) const { return ids_.count( name ) > 0; }
  int id( std::string const& name ) const
  {
    auto it = ids_.find( name );
    if ( it == ids_.end() )
      fail( ErrorKind::MissingAssignment, "unknown CNF variable " + name );
    return it->second;
  }

  void clause( std::vector<int> lits )
  {
    std::vector<int> out;
    for ( auto l : lits )
    {
      if ( l == lit_true )
        return;
      if ( l == lit_false )
        continue;
      if ( std::find( out.begin(), out.end(), -l ) != out.end() )
        return;
      if ( std::find( out.begin(), out.end(), l ) == out.end() )
        out.push_back( l );
    }
    f_.clauses.push_back( std::move( out ) );
  }

  /*! \brief Clauses forcing out <-> fn(inputs), one per assignment of the non-constant inputs. */
  template<class Fn>
  void define( int out, std::vector<int> const& inputs, Fn&& fn )
  {
    std::vector<std::size_t> free;
    std::vector<bool> val( inputs.size(), false );
    for ( std::size_t k = 0; k < inputs.size(); ++k )
    {
      if ( is_const_lit( inputs[k] ) )
        val[k] = inputs[k] == lit_true;
      else
        free.push_back( k );
    }
    for ( std::uint64_t a = 0; a < ( std::uint64_t{ 1 } << free.size() ); ++a )
    {
      std::vector<int> cl;
      for ( std::size_t r = 0; r < free.size(); ++r )
      {
        bool const b = ( a >> r ) & 1u;
        val[free[r]] = b;
        cl.push_back( b ? -inputs[free[r]] : inputs[free[r]] );
      }
      cl.push_back( fn( val ) ? out : -out );
      clause( std::move( cl ) );
    }
  }

  void exactly_one( std::vector<int> const& group )
  {
    clause( group );
    for ( std::size_t a = 0; a < group.size(); ++a )
      for ( std::size_t b = a + 1; b < group.size(); ++b )
        clause( { -group[a], -group[b] } );
  }

  void equal( int a, int b )
  {
    clause( { -a, b } );
    clause( { a, -b } );
  }

  CnfFormula const& formula() const noexcept { return f_; }
  CnfFormula take() { return std::move( f_ ); }

private:
  CnfFormula f_;
  std::unordered_map<std::string, int> ids_;
};

/*! \brief A set of circuit equations c = 0 over a shared variable registry; each equation carries a group tag. */
struct EquationSystem
{
  struct Equation
  {
    Circuit circuit;
    std::string group;
  };

  PrimeField field;
  std::vector<std::string> variables;
  std::vector<Equation> equations;

  explicit EquationSystem( PrimeField f = PrimeField( 2 ) ) : field( f ) {}

  void register_var( std::string const& v )
  {
    if ( index_.insert( v ).second )
      variables.push_back( v );
  }

  void add( Circuit c, std::string group = "core" )
  {
    require_same_field( field, c.field() );
    for ( auto const& v : c.variables() )
      register_var( v );
    equations.push_back( { std::move( c ), std::move( group ) } );
  }

  void append( EquationSystem const& o )
  {
    for ( auto const& v : o.variables )
      register_var( v );
    for ( auto const& e : o.equations )
      add( e.circuit, e.group );
  }

  std::size_t size() const noexcept { return equations.size(); }

  std::size_t count_group( std::string const& g ) const
  {
    return static_cast<std::size_t>( std::count_if( equations.begin(), equations.end(), [&]( Equation const& e ) { return e.group == g; } ) );
  }

  std::size_t total_nodes() const
  {
    std::size_t n = 0;
    for ( auto const& e : equations )
      n += e.circuit.size();
    return n;
  }

private:
  std::set<std::string> index_;
};

inline std::string to_text( EquationSystem const& s )
{
  std::ostringstream os;
  os << "system q=" << s.field.modulus() << " neq=" << s.size() << "\n";
  os << "vars";
  for ( auto const& v : s.variables )
    os << " " << v;
  os << "\n";
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    os << "eq " << i << " " << ( s.equations[i].group.empty() ? "-" : s.equations[i].group ) << "\n";
    os << to_text( s.equations[i].circuit );
  }
  return os.str();
}

inline EquationSystem parse_system( std::istream& in )
{
  std::string line;
  if ( !detail::next_content_line( in, line ) )
    fail( ErrorKind::ParseError, "missing system header" );
  std::istringstream hs( line );
  std::string tag, qs, ns;
  hs >> tag >> qs >> ns;
  if ( tag != "system" || qs.rfind( "q=", 0 ) != 0 || ns.rfind( "neq=", 0 ) != 0 )
    fail( ErrorKind::ParseError, "bad system header '" + line + "'" );
  EquationSystem s( PrimeField( detail::parse_u64( qs.substr( 2 ), "modulus" ) ) );
  auto const neq = detail::parse_u64( ns.substr( 4 ), "equation count" );
  auto pos = in.tellg();
  if ( detail::next_content_line( in, line ) && line.rfind( "vars", 0 ) == 0 )
  {
    std::istringstream vs( line.substr( 4 ) );
    std::string v;
    while ( vs >> v )
      s.register_var( v );
  }
  else
  {
    in.clear();
    in.seekg( pos );
  }
  for ( std::uint64_t i = 0; i < neq; ++i )
  {
    if ( !detail::next_content_line( in, line ) )
      fail( ErrorKind::ParseError, "missing equation " + std::to_string( i ) );
    std::istringstream es( line );
    std::string eq, idx, group;
    es >> eq >> idx >> group;
    if ( eq != "eq" || detail::parse_u64( idx, "equation index" ) != i )
      fail( ErrorKind::ParseError, "bad equation line '" + line + "'" );
    auto c = parse_circuit( in );
    require_same_field( s.field, c.field() );
    s.add( std::move( c ), group == "-" ? std::string() : group );
  }
  return s;
}

inline EquationSystem parse_system( std::string const& text )
{
  std::istringstream is( text );
  return parse_system( is );
}

/* algebraic translation */

inline Circuit boolean_axiom( PrimeField const& f, std::string const& v )
{
  Circuit c( f );
  auto x = c.input( v );
  c.set_output( c.add( { Edge( c.mul( { Edge( x ), Edge( x ) } ) ), Edge( x, f.neg( 1 ) ) } ) );
  return c;
}

/*! \brief x^q - x for a variable over F_q. */
inline Circuit field_axiom( PrimeField const& f, std::string const& v )
{
  Circuit c( f );
  auto x = c.input( v );
  std::vector<Edge> xs( f.modulus(), Edge( x ) );
  c.set_output( c.add( { Edge( c.mul( std::move( xs ) ) ), Edge( x, f.neg( 1 ) ) } ) );
  return c;
}

/*! \brief Clause as the product of (1 - x) over positive and x over negative literals. */
inline Circuit algebraize_clause( std::vector<int> const& clause, std::vector<std::string> const& names, PrimeField const& f )
{
  Circuit c( f );
  std::vector<Edge> factors;
  for ( auto l : clause )
  {
    auto x = c.input( names.at( static_cast<std::size_t>( std::abs( l ) - 1 ) ) );
    if ( l > 0 )
      factors.emplace_back( c.add( { Edge( c.constant( 1 ) ), Edge( x, f.neg( 1 ) ) } ) );
    else
      factors.emplace_back( x );
  }
  c.set_output( c.mul( std::move( factors ) ) );
  return c;
}

inline EquationSystem algebraize_cnf( CnfFormula const& cnf, PrimeField const& f, std::string const& group = "clause" )
{
  EquationSystem s( f );
  for ( auto const& n : cnf.names )
    s.register_var( n );
  for ( auto const& cl : cnf.clauses )
    s.add( algebraize_clause( cl, cnf.names, f ), group );
  return s;
}

/*! \brief Field variable carrying the value of an encoded node. */
inline std::string extension_var_name( std::string const& node ) { return "xg_" + node; }

/* DIMACS */

inline std::string emit_dimacs( CnfFormula const& f )
{
  std::ostringstream os;
  for ( std::size_t i = 0; i < f.names.size(); ++i )
    os << "c var " << i + 1 << " = " << f.names[i] << "\n";
  os << "p cnf " << f.names.size() << " " << f.clauses.size() << "\n";
  for ( auto const& cl : f.clauses )
  {
    for ( auto l : cl )
      os << l << " ";
    os << "0\n";
  }
  return os.str();
}

inline CnfFormula parse_dimacs( std::istream& in )
{
  CnfFormula f;
  std::map<std::size_t, std::string> names;
  std::string line;
  long long nv = -1, nc = -1;
  std::vector<int> cur;
  while ( std::getline( in, line ) )
  {
    if ( line.empty() )
      continue;
    if ( line[0] == 'c' )
    {
      std::istringstream ls( line );
      std::string c, var, eq, name;
      std::size_t id = 0;
      if ( ls >> c >> var >> id >> eq >> name && var == "var" && eq == "=" )
        names[id] = name;
      continue;
    }
    if ( line[0] == 'p' )
    {
      std::istringstream ls( line );
      std::string p, cnf;
      ls >> p >> cnf >> nv >> nc;
      if ( cnf != "cnf" || nv < 0 || nc < 0 )
        fail( ErrorKind::ParseError, "bad DIMACS header" );
      continue;
    }
    std::istringstream ls( line );
    long long l;
    while ( ls >> l )
    {
      if ( l == 0 )
      {
        f.clauses.push_back( cur );
        cur.clear();
      }
      else
      {
        if ( nv < 0 || std::llabs( l ) > nv )
          fail( ErrorKind::ParseError, "literal out of range" );
        cur.push_back( static_cast<int>( l ) );
      }
    }
  }
  if ( nv < 0 || !cur.empty() || static_cast<long long>( f.clauses.size() ) != nc )
    fail( ErrorKind::ParseError, "malformed DIMACS body" );
  for ( long long i = 1; i <= nv; ++i )
  {
    auto it = names.find( static_cast<std::size_t>( i ) );
    f.names.push_back( it != names.end() ? it->second : "v" + std::to_string( i ) );
  }
  return f;
}

inline CnfFormula parse_dimacs( std::string const& text )
{
  std::istringstream is( text );
  return parse_dimacs( is );
}

} // namespace ipsforge
