#include <gtest/gtest.h>

#include "support.hpp"

using namespace ipsforge;
using namespace ipsforge::testing;

namespace
{

/* independent check of the five normal-form clauses on the output cone */
struct Clauses
{
  bool leaves_feed_plus = true, output_plus = true, alternating = true, tree = true, uniform = true;
  bool all() const { return leaves_feed_plus && output_plus && alternating && tree && uniform; }
};

Clauses validate( Circuit const& c )
{
  Clauses r;
  std::vector<int> parents( c.size(), 0 );
  std::vector<std::set<std::uint32_t>> dist( c.size() );
  r.output_plus = c.node( c.output() ).kind == NodeKind::Add;
  std::vector<NodeId> stack{ c.output() };
  dist[c.output()].insert( 0 );
  /* children precede parents, so a reverse sweep visits parents first */
  std::vector<bool> live( c.size(), false );
  live[c.output()] = true;
  for ( auto i = c.size(); i-- > 0; )
  {
    if ( !live[i] )
      continue;
    auto const& n = c.node( i );
    for ( auto const& e : n.children )
    {
      auto const& ch = c.node( e.child );
      live[e.child] = true;
      ++parents[e.child];
      for ( auto d : dist[i] )
        dist[e.child].insert( d + 1 );
      if ( ch.is_leaf() && n.kind != NodeKind::Add )
        r.leaves_feed_plus = false;
      if ( !ch.is_leaf() && ch.kind == n.kind )
        r.alternating = false;
    }
  }
  std::set<std::uint32_t> leaf_depths;
  for ( NodeId i = 0; i < c.size(); ++i )
  {
    if ( !live[i] )
      continue;
    if ( parents[i] > 1 )
      r.tree = false;
    if ( c.node( i ).is_leaf() )
      leaf_depths.insert( dist[i].begin(), dist[i].end() );
  }
  r.uniform = leaf_depths.size() <= 1;
  return r;
}

Circuit text( std::string const& s ) { return parse_circuit( s ); }

} // namespace

TEST( Circuit, DepthExamples )
{
  auto x = text( "circuit q=2 nvars=1\nn0 in:x\nout n0\n" );
  EXPECT_EQ( depth( x ), 0u );
  auto xyz = text( "circuit q=3 nvars=3\nn0 in:x\nn1 in:y\nn2 in:z\nn3 mul n0@1 n1@1\nn4 add n3@1 n2@1\nout n4\n" );
  EXPECT_EQ( depth( xyz ), 2u );
  EXPECT_EQ( product_depth( xyz ), 1u );
  auto three = text( "circuit q=3 nvars=3\nn0 in:x\nn1 in:y\nn2 in:w\nn3 const:1\nn4 add n0@1 n1@1\nn5 add n0@1 n3@1\n"
                     "n6 mul n4@1 n5@1\nn7 mul n6@1 n2@1\nout n7\n" );
  EXPECT_EQ( depth( three ), 3u );
  EXPECT_EQ( product_depth( three ), 2u );
}

TEST( Circuit, SyntacticDegree )
{
  EXPECT_EQ( syntactic_degree( text( "circuit q=7 nvars=0\nn0 const:5\nout n0\n" ) ), 0u );
  EXPECT_EQ( syntactic_degree( text( "circuit q=7 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nout n2\n" ) ), 1u );
  auto c = text( "circuit q=7 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nn3 mul n0@1 n1@1\nn4 mul n2@1 n3@1\nout n4\n" );
  EXPECT_EQ( syntactic_degree( c ), 3u );
  EXPECT_EQ( expand( c ).degree(), 3u );
}

TEST( Circuit, EvaluateExamples )
{
  auto xy = text( "circuit q=2 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nout n2\n" );
  EXPECT_EQ( evaluate( xy, { { "x", 1 }, { "y", 1 } } ), 0u );
  EXPECT_EQ( evaluate( permanent_circuit( 2, PrimeField( 3 ) ), { { "x_1_1", 1 }, { "x_1_2", 1 }, { "x_2_1", 1 }, { "x_2_2", 1 } } ), 2u );
  auto lab = text( "circuit q=5 nvars=1\nn0 in:x\nn1 add n0@2\nout n1\n" );
  EXPECT_EQ( evaluate( lab, { { "x", 4 } } ), 3u );
  try
  {
    evaluate( xy, { { "x", 1 } } );
    FAIL();
  }
  catch ( Error const& e )
  {
    EXPECT_EQ( e.kind(), ErrorKind::MissingAssignment );
  }
}

TEST( Circuit, ExpandExamples )
{
  PrimeField f2( 2 );
  auto sq = text( "circuit q=2 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nn3 mul n2@1 n2@1\nout n3\n" );
  EXPECT_EQ( expand( sq ), parse_poly( f2, "x^2 + y^2" ) );
  auto zero = text( "circuit q=5 nvars=1\nn0 in:x\nn1 add n0@1 n0@4\nout n1\n" );
  EXPECT_TRUE( expand( zero ).is_zero() );
  EXPECT_TRUE( expand( zero ).terms().empty() );
  auto x3 = text( "circuit q=3 nvars=1\nn0 in:x\nout n0\n" );
  EXPECT_EQ( expand( ubit_circuit( 1, x3 ) ), parse_poly( PrimeField( 3 ), "2*x^2 + 2*x" ) );
}

TEST( Circuit, ExpandBudget )
{
  PrimeField f( 5 );
  Circuit c( f );
  std::vector<Edge> factors;
  for ( int i = 0; i < 12; ++i )
    factors.emplace_back( c.add( { Edge( c.input( "a" + std::to_string( i ) ) ), Edge( c.input( "b" + std::to_string( i ) ) ) } ) );
  c.set_output( c.mul( factors ) );
  try
  {
    expand( c, 1000 );
    FAIL();
  }
  catch ( Error const& e )
  {
    EXPECT_EQ( e.kind(), ErrorKind::ExpansionBudgetExceeded );
  }
  EXPECT_EQ( expand( c ).size(), 4096u );
}

TEST( Circuit, OracleCoherence )
{
  Rng rng( 1 );
  for ( int it = 0; it < 150; ++it )
  {
    PrimeField f( it % 3 == 0 ? 2 : it % 3 == 1 ? 3 : 5 );
    auto c = random_circuit( rng, f, { "x", "y", "z" }, 2 + it % 6 );
    auto p = expand( c );
    EXPECT_GE( syntactic_degree( c ), p.degree() );
    for ( int k = 0; k < 100; ++k )
    {
      Assignment a{ { "x", uniform( rng, 0, f.modulus() - 1 ) }, { "y", uniform( rng, 0, f.modulus() - 1 ) }, { "z", uniform( rng, 0, f.modulus() - 1 ) } };
      ASSERT_EQ( evaluate( c, a ), poly_value( p, a ) ) << to_text( c );
      ASSERT_EQ( p.evaluate( a ), poly_value( p, a ) );
    }
  }
}

TEST( Circuit, Restrict )
{
  PrimeField f( 3 );
  auto xy = text( "circuit q=3 nvars=2\nn0 in:x\nn1 in:y\nn2 mul n0@1 n1@1\nout n2\n" );
  EXPECT_TRUE( expand( restrict( xy, { { "x", std::uint64_t{ 0 } } } ) ).is_zero() );
  auto sum = text( "circuit q=3 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nout n2\n" );
  auto yx = restrict( sum, { { "y", text( "circuit q=3 nvars=1\nn0 in:x\nout n0\n" ) } } );
  EXPECT_EQ( expand( yx ), parse_poly( f, "2*x" ) );
  /* untouched variables survive; splicing composes semantics */
  Rng rng( 3 );
  for ( int it = 0; it < 30; ++it )
  {
    auto c = random_circuit( rng, f, { "x", "y", "z" }, 5 );
    auto g = random_circuit( rng, f, { "x", "z" }, 3 );
    auto r = restrict( c, { { "y", g } } );
    for_each_point( { "x", "z" }, 3, [&]( Assignment const& a ) {
      auto b = a;
      b["y"] = evaluate( g, a );
      ASSERT_EQ( evaluate( r, a ), evaluate( c, b ) );
    } );
  }
}

TEST( Circuit, TextRoundTripAndErrors )
{
  Rng rng( 5 );
  for ( int it = 0; it < 40; ++it )
  {
    auto c = random_circuit( rng, PrimeField( 7 ), { "x", "y" }, 6 );
    auto t = to_text( c );
    EXPECT_EQ( to_text( parse_circuit( t ) ), t );
  }
  EXPECT_THROW( parse_circuit( "circuit q=3 nvars=1\nn0 add n1@1\nn1 in:x\nout n0\n" ), Error );
  EXPECT_THROW( parse_circuit( "circuit q=4 nvars=1\nn0 in:x\nout n0\n" ), Error );
  EXPECT_THROW( parse_circuit( "circuit q=3 nvars=1\nn0 in:x\n" ), Error );
  EXPECT_THROW( parse_circuit( "circuit q=3 nvars=1\nn0 in:x\nn1 add n0\nout n1\n" ), Error );
}

TEST( Circuit, LabelsAndDesugaring )
{
  PrimeField f( 5 );
  auto c = text( "circuit q=5 nvars=2\nn0 in:x\nn1 in:w\nn2 add n0@3*w n1@2\nout n2\n" );
  EXPECT_EQ( expand( c ), parse_poly( f, "3*x*w + 2*w" ) );
  auto d = desugar_labels( c );
  for ( auto const& n : d.nodes() )
    for ( auto const& e : n.children )
      EXPECT_FALSE( e.label.has_var() );
  EXPECT_EQ( expand( d ), expand( c ) );
}

TEST( Slp, Examples )
{
  auto xy = text( "circuit q=3 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nout n2\n" );
  EXPECT_EQ( to_slp( xy ).to_string(), "g1 = x + y\n" );
  auto xyz = text( "circuit q=3 nvars=3\nn0 in:x\nn1 in:y\nn2 in:z\nn3 add n0@1 n1@1\nn4 mul n3@1 n2@1\nout n4\n" );
  EXPECT_EQ( to_slp( xyz, true ).to_string(), "g1 = x + y\ng2 = g1 * z\ng2 = 0\n" );
}

TEST( Slp, RoundTripSemantics )
{
  Rng rng( 7 );
  for ( int it = 0; it < 100; ++it )
  {
    PrimeField f( it % 2 ? 3 : 5 );
    auto c = random_circuit( rng, f, { "x", "y" }, 1 + it % 7 );
    auto s = to_slp( c );
    EXPECT_EQ( expand( slp_to_circuit( s ) ), expand( c ) );
    /* the valuation induced by the equations matches circuit evaluation */
    for_each_point( { "x", "y" }, f.modulus(), [&]( Assignment const& a ) {
      Assignment val = a;
      for ( auto const& eq : s.equations )
      {
        std::uint64_t acc = eq.op == NodeKind::Add ? 0 : 1;
        for ( auto const& o : eq.rhs )
        {
          auto v = o.is_const() ? o.value : val.at( o.var );
          acc = eq.op == NodeKind::Add ? f.add( acc, v ) : f.mul( acc, v );
        }
        val[eq.lhs] = acc;
      }
      if ( !s.equations.empty() && c.node( c.output() ).kind != NodeKind::Input && c.node( c.output() ).kind != NodeKind::Const )
      {
        ASSERT_EQ( val.at( s.equations.back().lhs ), evaluate( c, a ) );
      }
    } );
  }
}

TEST( NormalForm, Examples )
{
  PrimeField f( 3 );
  auto xy = text( "circuit q=3 nvars=2\nn0 in:x\nn1 in:y\nn2 add n0@1 n1@1\nout n2\n" );
  auto n1 = normalize_depth_form( xy );
  EXPECT_TRUE( validate( n1 ).all() );
  EXPECT_EQ( depth( n1 ), 1u );
  EXPECT_EQ( expand( n1 ), expand( xy ) );

  auto prod = text( "circuit q=3 nvars=2\nn0 in:x\nn1 in:y\nn2 mul n0@1 n1@1\nout n2\n" );
  auto n2 = normalize_depth_form( prod );
  EXPECT_TRUE( validate( n2 ).all() );
  EXPECT_EQ( n2.node( n2.output() ).kind, NodeKind::Add );
  EXPECT_EQ( n2.node( n2.output() ).children.size(), 1u );
  EXPECT_EQ( expand( n2 ), expand( prod ) );
}

TEST( NormalForm, RandomCircuitsKeepSemantics )
{
  Rng rng( 13 );
  int checked = 0;
  while ( checked < 100 )
  {
    auto c = random_circuit( rng, PrimeField( 3 ), { "x", "y", "z" }, 20, 3 ).compacted();
    if ( depth( c ) > 4 || depth( c ) < 2 )
      continue;
    ++checked;
    auto n = normalize_depth_form( c );
    auto v = validate( n );
    EXPECT_TRUE( v.leaves_feed_plus );
    EXPECT_TRUE( v.output_plus );
    EXPECT_TRUE( v.alternating );
    EXPECT_TRUE( v.tree );
    EXPECT_TRUE( v.uniform );
    EXPECT_TRUE( check_normal_form( n ).all() );
    EXPECT_EQ( expand( n ), expand( c ) );
  }
}

TEST( NormalForm, ValidatorAgreesOnRandomCircuits )
{
  Rng rng( 17 );
  for ( int it = 0; it < 200; ++it )
  {
    auto c = random_circuit( rng, PrimeField( 2 ), { "x", "y" }, 1 + it % 5, 2 ).compacted();
    auto ours = validate( c );
    auto lib = check_normal_form( c );
    EXPECT_EQ( ours.leaves_feed_plus, lib.leaves_feed_plus ) << to_text( c );
    EXPECT_EQ( ours.output_plus, lib.output_is_plus );
    EXPECT_EQ( ours.alternating, lib.alternating ) << to_text( c );
    EXPECT_EQ( ours.tree, lib.tree ) << to_text( c );
    EXPECT_EQ( ours.uniform, lib.uniform_leaf_depth ) << to_text( c );
  }
}

TEST( NormalForm, DepthBudget )
{
  Circuit c( PrimeField( 2 ) );
  auto n = c.input( "x" );
  for ( int i = 0; i < 14; ++i )
    n = i % 2 ? c.add( { Edge( n ), Edge( c.constant( 1 ) ) } ) : c.mul( { Edge( n ), Edge( n ) } );
  c.set_output( n );
  try
  {
    normalize_depth_form( c );
    FAIL();
  }
  catch ( Error const& e )
  {
    EXPECT_EQ( e.kind(), ErrorKind::DepthBudgetExceeded );
  }
}

TEST( Transforms, BoundMulFanin )
{
  auto wide = text( "circuit q=5 nvars=5\nn0 in:a\nn1 in:b\nn2 in:c\nn3 in:d\nn4 in:e\nn5 mul n0@1 n1@1 n2@1 n3@1 n4@1\nout n5\n" );
  auto b = bound_mul_fanin( wide, 2 );
  EXPECT_LE( max_mul_fanin( b ), 2u );
  EXPECT_EQ( expand( b ), expand( wide ) );
  EXPECT_LE( product_depth( b ), 3u );
  auto same = bound_mul_fanin( wide, 5 );
  EXPECT_EQ( to_text( same ), to_text( wide.compacted() ) );
  Rng rng( 19 );
  for ( int it = 0; it < 50; ++it )
  {
    auto c = random_circuit( rng, PrimeField( 3 ), { "x", "y" }, 6, 5 );
    auto r = bound_mul_fanin( c, 2 );
    EXPECT_LE( max_mul_fanin( r ), 2u );
    EXPECT_EQ( expand( r ), expand( c ) );
  }
}

TEST( Transforms, MakeAlternating )
{
  Rng rng( 23 );
  for ( int it = 0; it < 50; ++it )
  {
    auto c = random_circuit( rng, PrimeField( 3 ), { "x", "y" }, 6 );
    auto a = make_alternating( c );
    auto v = validate( a );
    EXPECT_TRUE( v.output_plus );
    EXPECT_TRUE( v.alternating );
    EXPECT_EQ( expand( a ), expand( c ) );
  }
}

TEST( Families, PermanentDeterminantImm )
{
  PrimeField f( 3 );
  EXPECT_EQ( permanent_poly( 2, f ), parse_poly( f, "x_1_1*x_2_2 + x_1_2*x_2_1" ) );
  EXPECT_EQ( determinant_poly( 2, f ), parse_poly( f, "x_1_1*x_2_2 + 2*x_1_2*x_2_1" ) );
  auto imm = imm_poly( 2, 2, f );
  EXPECT_EQ( imm.size(), 2u );
  EXPECT_EQ( imm, parse_poly( f, "X1_1_1*X2_1_1 + X1_1_2*X2_2_1" ) );
  EXPECT_EQ( permanent_poly( 4, PrimeField( 5 ) ).size(), 24u );
  /* permanent against a direct evaluation over all 0/1 matrices of size 3 */
  PrimeField f7( 7 );
  auto p3 = permanent_poly( 3, f7 );
  auto vars = matrix_vars( "x", 3, 3 );
  for_each_point( vars, 2, [&]( Assignment const& a ) {
    std::uint64_t perm = 0;
    std::vector<std::size_t> s{ 1, 2, 3 };
    do
    {
      std::uint64_t t = 1;
      for ( std::size_t i = 1; i <= 3; ++i )
        t *= a.at( matrix_var( "x", i, s[i - 1] ) );
      perm += t;
    } while ( std::next_permutation( s.begin(), s.end() ) );
    ASSERT_EQ( poly_value( p3, a ), perm % 7 );
  } );
}

TEST( Families, EnumerateMonomials )
{
  auto m = enumerate_monomials( indexed_vars( "x", 2 ), 2 );
  ASSERT_EQ( m.size(), 6u );
  std::vector<std::string> names;
  for ( auto const& x : m )
    names.push_back( x.to_string() );
  EXPECT_EQ( names, ( std::vector<std::string>{ "1", "x1", "x2", "x1^2", "x1*x2", "x2^2" } ) );
  auto m0 = enumerate_monomials( indexed_vars( "x", 3 ), 0 );
  ASSERT_EQ( m0.size(), 1u );
  EXPECT_EQ( m0[0].degree(), 0u );
  EXPECT_EQ( monomial_count( 4, 3 ), 35u );
  EXPECT_EQ( enumerate_monomials( indexed_vars( "x", 4 ), 3 ).size(), 35u );
}

TEST( Poly, ArithmeticMatchesPointwise )
{
  PrimeField f( 5 );
  auto a = parse_poly( f, "x^2 + 3*x*y + 4" );
  auto b = parse_poly( f, "2*y + x + 1" );
  for_each_point( { "x", "y" }, 5, [&]( Assignment const& pt ) {
    ASSERT_EQ( poly_value( a * b, pt ), f.mul( poly_value( a, pt ), poly_value( b, pt ) ) );
    ASSERT_EQ( poly_value( a - b, pt ), f.sub( poly_value( a, pt ), poly_value( b, pt ) ) );
    ASSERT_EQ( poly_value( a.pow( 3 ), pt ), f.pow( poly_value( a, pt ), 3 ) );
  } );
  EXPECT_EQ( parse_poly( f, a.to_string() ), a );
  EXPECT_EQ( a.to_string(), "x^2 + 3*x*y + 4" );
  EXPECT_TRUE( ( a - a ).is_zero() );
  EXPECT_EQ( circuit_from_poly( a ).field(), f );
  EXPECT_EQ( expand( circuit_from_poly( a ) ), a );
}
