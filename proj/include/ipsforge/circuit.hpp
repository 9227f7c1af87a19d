#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "ffield.hpp"
#include "poly.hpp"

namespace ipsforge
{

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t
{
  Input,
  Const,
  Add,
  Mul
};

/*! \brief Edge label: a field constant, optionally times one variable. */
struct Label
{
  std::uint64_t coeff = 1;
  std::string var;

  bool is_unit() const noexcept { return coeff == 1 && var.empty(); }
  bool has_var() const noexcept { return !var.empty(); }
  bool operator==( Label const& o ) const { return coeff == o.coeff && var == o.var; }
};

struct Edge
{
  NodeId child = 0;
  Label label{};

  Edge() = default;
  Edge( NodeId c ) : child( c ) {}
  Edge( NodeId c, std::uint64_t coeff ) : child( c ), label{ coeff, {} } {}
  Edge( NodeId c, Label l ) : child( c ), label( std::move( l ) ) {}
};

struct Node
{
  NodeKind kind = NodeKind::Const;
  std::string name;
  std::uint64_t value = 0;
  std::vector<Edge> children;

  bool is_leaf() const noexcept { return kind == NodeKind::Input || kind == NodeKind::Const; }
  bool is_gate() const noexcept { return !is_leaf(); }
};

/*! \brief DAG of unbounded fan-in +/x gates; children always precede parents. */
class Circuit
{
public:
  explicit Circuit( PrimeField field = PrimeField( 2 ) ) : field_( field ) {}

  PrimeField const& field() const noexcept { return field_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  Node const& node( NodeId id ) const { return nodes_.at( id ); }
  std::vector<Node> const& nodes() const noexcept { return nodes_; }
  NodeId output() const
  {
    if ( nodes_.empty() )
      fail( ErrorKind::ParseError, "empty circuit has no output" );
    return out_ ? *out_ : static_cast<NodeId>( nodes_.size() - 1 );
  }
  bool has_output() const noexcept { return !nodes_.empty(); }

  NodeId input( std::string const& name )
  {
    Node n;
    n.kind = NodeKind::Input;
    n.name = name;
    return push( std::move( n ) );
  }

  NodeId constant( std::uint64_t v )
  {
    Node n;
    n.kind = NodeKind::Const;
    n.value = field_.reduce( v );
    return push( std::move( n ) );
  }

  NodeId constant_signed( std::int64_t v ) { return constant( field_.from_signed( v ) ); }

  NodeId add( std::vector<Edge> children ) { return gate( NodeKind::Add, std::move( children ) ); }
  NodeId mul( std::vector<Edge> children ) { return gate( NodeKind::Mul, std::move( children ) ); }

  NodeId gate( NodeKind kind, std::vector<Edge> children )
  {
    Node n;
    n.kind = kind;
    n.children = std::move( children );
    return push( std::move( n ) );
  }

  NodeId push( Node n )
  {
    auto const id = static_cast<NodeId>( nodes_.size() );
    for ( auto& e : n.children )
    {
      if ( e.child >= id )
        fail( ErrorKind::ParseError, "forward reference to n" + std::to_string( e.child ) );
      e.label.coeff = field_.reduce( e.label.coeff );
    }
    nodes_.push_back( std::move( n ) );
    return id;
  }

  void set_output( NodeId id )
  {
    if ( id >= nodes_.size() )
      fail( ErrorKind::ParseError, "output id out of range" );
    out_ = id;
  }

  /*! \brief Copies the cone of `root` in `src` into this circuit; returns the new id. */
  NodeId import( Circuit const& src, NodeId root, std::unordered_map<NodeId, NodeId>* memo = nullptr )
  {
    require_same_field( field_, src.field_ );
    std::unordered_map<NodeId, NodeId> local;
    auto& map = memo ? *memo : local;
    std::vector<char> need( root + 1, 0 );
    need[root] = 1;
    for ( NodeId i = root + 1; i-- > 0; )
    {
      if ( !need[i] || map.count( i ) )
        continue;
      for ( auto const& e : src.nodes_[i].children )
        need[e.child] = 1;
    }
    for ( NodeId i = 0; i <= root; ++i )
    {
      if ( !need[i] || map.count( i ) )
        continue;
      Node n = src.nodes_[i];
      for ( auto& e : n.children )
        e.child = map.at( e.child );
      map[i] = push( std::move( n ) );
    }
    return map.at( root );
  }

  NodeId import( Circuit const& src ) { return import( src, src.output() ); }

  /*! \brief Variables (inputs and label variables) in order of first appearance. */
  std::vector<std::string> variables() const
  {
    std::vector<std::string> r;
    std::set<std::string> seen;
    for ( auto const& n : nodes_ )
    {
      if ( n.kind == NodeKind::Input && seen.insert( n.name ).second )
        r.push_back( n.name );
      for ( auto const& e : n.children )
        if ( e.label.has_var() && seen.insert( e.label.var ).second )
          r.push_back( e.label.var );
    }
    return r;
  }

  std::vector<std::string> input_variables() const
  {
    std::vector<std::string> r;
    std::set<std::string> seen;
    for ( auto const& n : nodes_ )
      if ( n.kind == NodeKind::Input && seen.insert( n.name ).second )
        r.push_back( n.name );
    return r;
  }

  /*! \brief Flags for nodes in the cone of the output. */
  std::vector<char> reachable() const
  {
    std::vector<char> r( nodes_.size(), 0 );
    if ( nodes_.empty() )
      return r;
    r[output()] = 1;
    for ( auto i = nodes_.size(); i-- > 0; )
      if ( r[i] )
        for ( auto const& e : nodes_[i].children )
          r[e.child] = 1;
    return r;
  }

  /*! \brief Drops nodes outside the output cone. */
  Circuit compacted() const
  {
    Circuit c( field_ );
    if ( nodes_.empty() )
      return c;
    c.set_output( c.import( *this, output() ) );
    return c;
  }

private:
  PrimeField field_;
  std::vector<Node> nodes_;
  std::optional<NodeId> out_;
};

/* measures */

/*! \brief Height of every node: longest path down to a leaf. */
inline std::vector<std::uint32_t> heights( Circuit const& c )
{
  std::vector<std::uint32_t> h( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
    for ( auto const& e : c.node( i ).children )
      h[i] = std::max( h[i], h[e.child] + 1 );
  return h;
}

inline std::uint32_t depth( Circuit const& c )
{
  return c.size() ? heights( c )[c.output()] : 0;
}

inline std::uint32_t product_depth( Circuit const& c )
{
  std::vector<std::uint32_t> h( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    for ( auto const& e : n.children )
      h[i] = std::max( h[i], h[e.child] );
    if ( n.kind == NodeKind::Mul )
      ++h[i];
  }
  return c.size() ? h[c.output()] : 0;
}

/*! \brief Syntactic degree; a variable edge label counts as one extra factor. */
inline std::uint32_t syntactic_degree( Circuit const& c )
{
  std::vector<std::uint32_t> d( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    if ( n.kind == NodeKind::Input )
      d[i] = 1;
    for ( auto const& e : n.children )
    {
      auto const v = d[e.child] + ( e.label.has_var() ? 1u : 0u );
      d[i] = n.kind == NodeKind::Add ? std::max( d[i], v ) : d[i] + v;
    }
  }
  return c.size() ? d[c.output()] : 0;
}

inline std::size_t max_mul_fanin( Circuit const& c )
{
  std::size_t m = 0;
  for ( auto const& n : c.nodes() )
    if ( n.kind == NodeKind::Mul )
      m = std::max( m, n.children.size() );
  return m;
}

/* evaluation */

inline std::uint64_t lookup( Assignment const& a, std::string const& v )
{
  auto it = a.find( v );
  if ( it == a.end() )
    fail( ErrorKind::MissingAssignment, "variable " + v );
  return it->second;
}

/*! \brief Values of all nodes under an assignment. */
inline std::vector<std::uint64_t> evaluate_all( Circuit const& c, Assignment const& a )
{
  auto const& f = c.field();
  std::vector<std::uint64_t> val( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    switch ( n.kind )
    {
    case NodeKind::Input: val[i] = f.reduce( lookup( a, n.name ) ); break;
    case NodeKind::Const: val[i] = n.value; break;
    case NodeKind::Add:
    case NodeKind::Mul:
    {
      std::uint64_t acc = n.kind == NodeKind::Add ? 0 : 1 % f.modulus();
      for ( auto const& e : n.children )
      {
        auto v = f.mul( val[e.child], e.label.coeff );
        if ( e.label.has_var() )
          v = f.mul( v, f.reduce( lookup( a, e.label.var ) ) );
        acc = n.kind == NodeKind::Add ? f.add( acc, v ) : f.mul( acc, v );
      }
      val[i] = acc;
      break;
    }
    }
  }
  return val;
}

inline std::uint64_t evaluate( Circuit const& c, Assignment const& a )
{
  return evaluate_all( c, a )[c.output()];
}

/*! \brief Evaluator with variables resolved to slots; used by the search oracles. */
class CompiledCircuit
{
public:
  CompiledCircuit( Circuit const& c, std::map<std::string, std::size_t> const& slots ) : field_( c.field() )
  {
    auto reach = c.reachable();
    std::unordered_map<NodeId, std::uint32_t> remap;
    for ( NodeId i = 0; i < c.size(); ++i )
    {
      if ( !reach[i] )
        continue;
      auto const& n = c.node( i );
      Op op;
      op.kind = n.kind;
      op.value = n.value;
      if ( n.kind == NodeKind::Input )
        op.slot = slot_of( slots, n.name );
      for ( auto const& e : n.children )
      {
        Arg a{ remap.at( e.child ), e.label.coeff, e.label.has_var() ? static_cast<std::int64_t>( slot_of( slots, e.label.var ) ) : -1 };
        op.args.push_back( a );
      }
      remap[i] = static_cast<std::uint32_t>( ops_.size() );
      ops_.push_back( std::move( op ) );
    }
    values_.resize( ops_.size() );
  }

  std::vector<std::size_t> const& slots_used() const noexcept { return used_; }

  std::uint64_t operator()( std::vector<std::uint64_t> const& x ) const
  {
    auto const& f = field_;
    for ( std::size_t i = 0; i < ops_.size(); ++i )
    {
      auto const& op = ops_[i];
      switch ( op.kind )
      {
      case NodeKind::Input: values_[i] = x[op.slot]; break;
      case NodeKind::Const: values_[i] = op.value; break;
      default:
      {
        std::uint64_t acc = op.kind == NodeKind::Add ? 0 : 1 % f.modulus();
        for ( auto const& a : op.args )
        {
          auto v = f.mul( values_[a.idx], a.coeff );
          if ( a.slot >= 0 )
            v = f.mul( v, x[static_cast<std::size_t>( a.slot )] );
          acc = op.kind == NodeKind::Add ? f.add( acc, v ) : f.mul( acc, v );
        }
        values_[i] = acc;
      }
      }
    }
    return values_.back();
  }

private:
  struct Arg
  {
    std::uint32_t idx;
    std::uint64_t coeff;
    std::int64_t slot;
  };
  struct Op
  {
    NodeKind kind;
    std::uint64_t value = 0;
    std::size_t slot = 0;
    std::vector<Arg> args;
  };

  std::size_t slot_of( std::map<std::string, std::size_t> const& slots, std::string const& v )
  {
    auto it = slots.find( v );
    if ( it == slots.end() )
      fail( ErrorKind::MissingAssignment, "variable " + v );
    if ( std::find( used_.begin(), used_.end(), it->second ) == used_.end() )
      used_.push_back( it->second );
    return it->second;
  }

  PrimeField field_;
  std::vector<Op> ops_;
  std::vector<std::size_t> used_;
  mutable std::vector<std::uint64_t> values_;
};

/* expansion oracle */

inline constexpr std::size_t default_expansion_budget = 1000000;

inline SparsePoly label_poly( PrimeField const& f, Label const& l )
{
  SparsePoly p( f );
  p.add_term( l.has_var() ? Monomial::var( l.var ) : Monomial(), l.coeff );
  return p;
}

/*! \brief Multiplies the circuit out into a sparse polynomial. */
inline SparsePoly expand( Circuit const& c, std::size_t budget = default_expansion_budget )
{
  auto const& f = c.field();
  if ( !c.has_output() )
    return SparsePoly( f );
  auto reach = c.reachable();
  std::vector<int> uses( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
    if ( reach[i] )
      for ( auto const& e : c.node( i ).children )
        ++uses[e.child];
  std::vector<SparsePoly> poly( c.size(), SparsePoly( f ) );
  auto check = [&]( std::size_t n ) {
    if ( n > budget )
      fail( ErrorKind::ExpansionBudgetExceeded, std::to_string( n ) + " terms exceed budget " + std::to_string( budget ) );
  };
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    if ( !reach[i] )
      continue;
    auto const& n = c.node( i );
    SparsePoly p( f );
    switch ( n.kind )
    {
    case NodeKind::Input: p = SparsePoly::variable( f, n.name ); break;
    case NodeKind::Const: p = SparsePoly::constant( f, n.value ); break;
    case NodeKind::Add:
      for ( auto const& e : n.children )
      {
        if ( e.label.is_unit() )
          p += poly[e.child];
        else
          p += poly[e.child] * label_poly( f, e.label );
        check( p.size() );
      }
      break;
    case NodeKind::Mul:
      p = SparsePoly::constant( f, 1 );
      for ( auto const& e : n.children )
      {
        check( p.size() * poly[e.child].size() );
        p = p * poly[e.child];
        if ( !e.label.is_unit() )
          p = p * label_poly( f, e.label );
      }
      break;
    }
    poly[i] = std::move( p );
    for ( auto const& e : n.children )
      if ( --uses[e.child] == 0 && e.child != c.output() )
        poly[e.child] = SparsePoly( f );
  }
  return poly[c.output()];
}

/* restriction */

using Substitute = std::variant<std::uint64_t, Circuit>;
using Substitution = std::map<std::string, Substitute>;

/*! \brief Simultaneous substitution of variables by constants or circuits. */
inline Circuit restrict( Circuit const& c, Substitution const& partial )
{
  auto const& f = c.field();
  Circuit r( f );
  std::map<std::string, NodeId> spliced;
  auto splice = [&]( std::string const& v, Circuit const& sub ) {
    auto it = spliced.find( v );
    if ( it != spliced.end() )
      return it->second;
    auto id = r.import( sub );
    spliced[v] = id;
    return id;
  };
  std::vector<NodeId> map( c.size(), 0 );
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    if ( n.kind == NodeKind::Input )
    {
      auto it = partial.find( n.name );
      if ( it == partial.end() )
        map[i] = r.input( n.name );
      else if ( auto const* v = std::get_if<std::uint64_t>( &it->second ) )
        map[i] = r.constant( *v );
      else
        map[i] = splice( n.name, std::get<Circuit>( it->second ) );
      continue;
    }
    if ( n.kind == NodeKind::Const )
    {
      map[i] = r.constant( n.value );
      continue;
    }
    std::vector<Edge> kids;
    for ( auto const& e : n.children )
    {
      Edge ne( map[e.child], e.label );
      if ( e.label.has_var() )
      {
        auto it = partial.find( e.label.var );
        if ( it != partial.end() )
        {
          if ( auto const* v = std::get_if<std::uint64_t>( &it->second ) )
            ne.label = Label{ f.mul( e.label.coeff, f.reduce( *v ) ), {} };
          else
          {
            auto sub = splice( e.label.var, std::get<Circuit>( it->second ) );
            ne = Edge( r.mul( { Edge( map[e.child] ), Edge( sub ) } ), e.label.coeff );
          }
        }
      }
      kids.push_back( std::move( ne ) );
    }
    map[i] = r.gate( n.kind, std::move( kids ) );
  }
  if ( c.has_output() )
    r.set_output( map[c.output()] );
  return r;
}

inline Circuit restrict_values( Circuit const& c, Assignment const& a )
{
  Substitution s;
  for ( auto const& [k, v] : a )
    s.emplace( k, v );
  return restrict( c, s );
}

/* text format */

inline std::string label_to_text( Label const& l )
{
  if ( !l.has_var() )
    return std::to_string( l.coeff );
  if ( l.coeff == 1 )
    return l.var;
  return std::to_string( l.coeff ) + "*" + l.var;
}

inline std::string to_text( Circuit const& c )
{
  std::ostringstream os;
  os << "circuit q=" << c.field().modulus() << " nvars=" << c.variables().size() << "\n";
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    auto const& n = c.node( i );
    os << "n" << i << " ";
    switch ( n.kind )
    {
    case NodeKind::Input: os << "in:" << n.name; break;
    case NodeKind::Const: os << "const:" << n.value; break;
    case NodeKind::Add: os << "add"; break;
    case NodeKind::Mul: os << "mul"; break;
    }
    for ( auto const& e : n.children )
      os << " n" << e.child << "@" << label_to_text( e.label );
    os << "\n";
  }
  if ( c.has_output() )
    os << "out n" << c.output() << "\n";
  return os.str();
}

namespace detail
{

inline std::uint64_t parse_u64( std::string const& s, std::string const& what )
{
  if ( s.empty() || !std::all_of( s.begin(), s.end(), []( char ch ) { return std::isdigit( static_cast<unsigned char>( ch ) ); } ) )
    fail( ErrorKind::ParseError, "bad " + what + " '" + s + "'" );
  return std::stoull( s );
}

inline NodeId parse_ref( std::string const& s )
{
  if ( s.size() < 2 || s[0] != 'n' )
    fail( ErrorKind::ParseError, "bad node reference '" + s + "'" );
  return static_cast<NodeId>( parse_u64( s.substr( 1 ), "node reference" ) );
}

inline Label parse_label( PrimeField const& f, std::string const& s )
{
  if ( s.empty() )
    fail( ErrorKind::ParseError, "empty label" );
  auto star = s.find( '*' );
  if ( star != std::string::npos )
    return Label{ f.reduce( parse_u64( s.substr( 0, star ), "label" ) ), s.substr( star + 1 ) };
  if ( std::isdigit( static_cast<unsigned char>( s[0] ) ) )
    return Label{ f.reduce( parse_u64( s, "label" ) ), {} };
  return Label{ 1, s };
}

inline bool next_content_line( std::istream& in, std::string& line )
{
  while ( std::getline( in, line ) )
  {
    auto p = line.find_first_not_of( " \t\r" );
    if ( p == std::string::npos || line[p] == '#' )
      continue;
    auto e = line.find_last_not_of( " \t\r" );
    line = line.substr( p, e - p + 1 );
    return true;
  }
  return false;
}

} // namespace detail

/*! \brief Reads one circuit block (header through `out`) from a stream. */
inline Circuit parse_circuit( std::istream& in )
{
  std::string line;
  if ( !detail::next_content_line( in, line ) )
    fail( ErrorKind::ParseError, "missing circuit header" );
  std::istringstream hs( line );
  std::string tag, qs, ns;
  hs >> tag >> qs >> ns;
  if ( tag != "circuit" || qs.rfind( "q=", 0 ) != 0 || ns.rfind( "nvars=", 0 ) != 0 )
    fail( ErrorKind::ParseError, "bad circuit header '" + line + "'" );
  PrimeField f( detail::parse_u64( qs.substr( 2 ), "modulus" ) );
  auto const nvars = detail::parse_u64( ns.substr( 6 ), "nvars" );
  Circuit c( f );
  while ( detail::next_content_line( in, line ) )
  {
    std::istringstream ls( line );
    std::string id, kind;
    ls >> id >> kind;
    if ( id == "out" )
    {
      c.set_output( detail::parse_ref( kind ) );
      if ( c.variables().size() != nvars )
        fail( ErrorKind::ParseError, "nvars mismatch" );
      return c;
    }
    if ( detail::parse_ref( id ) != c.size() )
      fail( ErrorKind::ParseError, "node ids must be consecutive: '" + id + "'" );
    Node n;
    if ( kind == "add" )
      n.kind = NodeKind::Add;
    else if ( kind == "mul" )
      n.kind = NodeKind::Mul;
    else if ( kind.rfind( "in:", 0 ) == 0 && kind.size() > 3 )
    {
      n.kind = NodeKind::Input;
      n.name = kind.substr( 3 );
    }
    else if ( kind.rfind( "const:", 0 ) == 0 )
    {
      n.kind = NodeKind::Const;
      n.value = f.reduce( detail::parse_u64( kind.substr( 6 ), "constant" ) );
    }
    else
      fail( ErrorKind::ParseError, "bad node kind '" + kind + "'" );
    std::string tok;
    while ( ls >> tok )
    {
      if ( n.is_leaf() )
        fail( ErrorKind::ParseError, "leaf with children" );
      auto at = tok.find( '@' );
      if ( at == std::string::npos )
        fail( ErrorKind::ParseError, "edge without label '" + tok + "'" );
      n.children.emplace_back( detail::parse_ref( tok.substr( 0, at ) ), detail::parse_label( f, tok.substr( at + 1 ) ) );
    }
    c.push( std::move( n ) );
  }
  fail( ErrorKind::ParseError, "missing out line" );
}

inline Circuit parse_circuit( std::string const& text )
{
  std::istringstream is( text );
  return parse_circuit( is );
}

/* small builders */

inline Circuit circuit_from_poly( SparsePoly const& p )
{
  Circuit c( p.field() );
  std::map<std::string, NodeId> vars;
  std::vector<Edge> terms;
  for ( auto const& [m, coeff] : p.terms() )
  {
    std::vector<Edge> factors;
    for ( auto const& [v, e] : m.powers() )
    {
      auto it = vars.find( v );
      if ( it == vars.end() )
        it = vars.emplace( v, c.input( v ) ).first;
      for ( std::uint32_t k = 0; k < e; ++k )
        factors.emplace_back( it->second );
    }
    terms.emplace_back( factors.empty() ? c.constant( 1 ) : c.mul( std::move( factors ) ), coeff );
  }
  c.set_output( c.add( std::move( terms ) ) );
  return c;
}

/*! \brief Circuit a - b as a new circuit (both imported). */
inline Circuit difference( Circuit const& a, Circuit const& b )
{
  Circuit c( a.field() );
  auto x = c.import( a );
  auto y = c.import( b );
  c.set_output( c.add( { Edge( x ), Edge( y, a.field().neg( 1 ) ) } ) );
  return c;
}

} // namespace ipsforge
