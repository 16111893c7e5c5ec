#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pmod/duality.hpp"
#include "support.hpp"

using namespace pmod;
namespace ts = testing_support;

namespace {

ModulusOptions with_tol(double tol) {
  ModulusOptions o;
  o.tol = tol;
  return o;
}

DualityCertificate two_edge_certificate() {
  const auto g = ts::two_edge_path();
  return solve_modulus(g, ModulusProblem::constant(2.0, 1.0), with_tol(1e-10));
}

NodeFunction x_coordinate(const MetricGraph& g) {
  return sample(g, [](double x, double) { return x; });
}

bool horizontal(const MetricGraph& g, int e) { return g.node(g.edge(e).u).y == g.node(g.edge(e).v).y; }

}  // namespace

TEST(Verify, TwoEdgeCertificatePasses) {
  const auto g = ts::two_edge_path();
  const auto prob = ModulusProblem::constant(2.0, 1.0);
  const auto rep = verify_certificate(g, prob, two_edge_certificate(), 1e-8);
  EXPECT_TRUE(rep.pass()) << ::testing::PrintToString(rep.failed());
  std::vector<std::string> names;
  for (const auto& c : rep.checks) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"structure", "admissibility", "barycenter", "strong_duality",
                                             "complementary_slackness", "density_identity"}));
  EXPECT_NEAR(rep.at("barycenter").residual, 1.0, 1e-8);
}

TEST(Verify, ZeroCertificatePassesExactly) {
  const auto g = ts::triangle();
  const auto prob = ModulusProblem::constant(3.0, 0.0);
  const auto cert = solve_modulus(g, prob);
  const auto rep = verify_certificate(g, prob, cert, 1e-12);
  EXPECT_TRUE(rep.pass());
  for (const auto& c : rep.checks)
    if (c.name != "barycenter") EXPECT_EQ(c.residual, 0.0) << c.name;
}

TEST(Verify, HalvedDensityFailsWithWitness) {
  const auto g = ts::two_edge_path();
  const auto prob = ModulusProblem::constant(2.0, 1.0);
  auto cert = two_edge_certificate();
  cert.rho = DensityField(std::vector<double>{0.25, 0.25});
  const auto rep = verify_certificate(g, prob, cert, 1e-8);
  const auto& adm = rep.at("admissibility");
  EXPECT_FALSE(adm.pass);
  EXPECT_NEAR(adm.residual, 0.5, 1e-12);
  ASSERT_TRUE(adm.witness.has_value());
  EXPECT_EQ(adm.witness->edges().size(), 2u);
}

TEST(Verify, MalformedCertificateFailsStructure) {
  const auto g = ts::two_edge_path();
  const auto prob = ModulusProblem::constant(2.0, 1.0);
  auto cert = two_edge_certificate();
  cert.rho = DensityField(std::vector<double>{0.5, 0.5, 0.5});
  const auto rep = verify_certificate(g, prob, cert, 1e-8);
  EXPECT_FALSE(rep.pass());
  EXPECT_EQ(rep.failed(), std::vector<std::string>{"structure"});

  auto other = two_edge_certificate();
  other.p = 3.0;
  EXPECT_FALSE(verify_certificate(g, prob, other, 1e-8).at("structure").pass);
}

// Perturbing any part of a good certificate must trip at least one check.
class Mutation : public ::testing::TestWithParam<int> {};

TEST_P(Mutation, PerturbedCertificateIsRejected) {
  std::mt19937_64 rng(700 + GetParam());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto g = ts::random_graph(rng, 6 + GetParam() % 5, 4);
  std::vector<double> f(g.num_nodes());
  for (double& v : f) v = unit(rng);
  const double p = std::vector<double>{1.5, 2.0, 3.0}[GetParam() % 3];
  const auto prob = ModulusProblem::endpoint(p, NodeFunction(f));
  const auto cert = solve_modulus(g, prob, with_tol(1e-10));
  ASSERT_TRUE(cert.converged);
  const double tol = 1e-7;
  ASSERT_TRUE(verify_certificate(g, prob, cert, tol).pass());
  if (cert.eta.empty()) GTEST_SKIP() << "all bounds vanish";

  {  // one density entry moved
    auto bad = cert;
    std::vector<double> r(bad.rho.values().begin(), bad.rho.values().end());
    int e = static_cast<int>(rng() % r.size());
    for (int k = 0; k < static_cast<int>(r.size()) && r[e] == 0.0; ++k) e = (e + 1) % r.size();
    r[e] *= unit(rng) < 0.5 ? 0.9 : 1.1;
    if (r[e] == 0.0) r[e] = 0.1;
    bad.rho = DensityField(r);
    EXPECT_FALSE(verify_certificate(g, prob, bad, tol).pass());
  }
  {  // one path mass moved
    auto bad = cert;
    auto& wp = bad.eta[rng() % bad.eta.size()];
    wp.mass *= 1.05;
    EXPECT_FALSE(verify_certificate(g, prob, bad, tol).pass());
  }
  {  // whole plan rescaled
    auto bad = cert;
    for (auto& wp : bad.eta) wp.mass *= 0.98;
    const auto rep = verify_certificate(g, prob, bad, tol);
    EXPECT_FALSE(rep.at("strong_duality").pass);
    EXPECT_FALSE(rep.at("density_identity").pass);
  }
  {  // the stored value is not trusted
    auto bad = cert;
    bad.value *= 2.0;
    bad.dual_value *= 2.0;
    EXPECT_TRUE(verify_certificate(g, prob, bad, tol).pass());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, Mutation, ::testing::Range(0, 12));

TEST(GradientCurves, RectangleRows) {
  const double a = 2.0, b = 1.0, h = 0.125;
  for (double p : {2.0, 3.0}) {
    const auto g = build_domain(DomainSpec::rectangle(a, b, h));
    const auto f = x_coordinate(g);
    const auto cert = solve_modulus(g, ModulusProblem::endpoint(p, f), with_tol(1e-9));
    ASSERT_TRUE(cert.converged);
    const auto gc = extract_gradient_curves(g, cert, f, 1e-8);
    EXPECT_NEAR(gc.curve_mass, gc.support_mass, 1e-12);
    EXPECT_LE(gc.prefix_residual, 1e-8);
    const double row = h * std::pow(a * b, (1.0 - p) / p);
    for (const auto& wp : gc.curves) {
      const double y = g.node(wp.path.front()).y;
      for (int v : wp.path.nodes()) EXPECT_EQ(g.node(v).y, y);
      EXPECT_NEAR(std::abs(g.node(wp.path.front()).x - g.node(wp.path.back()).x), a, 1e-12);
      const bool edge_row = y == 0.0 || y == b;
      EXPECT_NEAR(wp.mass, edge_row ? row / 2 : row, 1e-7) << "p=" << p << " y=" << y;
    }
    EXPECT_EQ(gc.curves.size(), static_cast<std::size_t>(b / h) + 1);
    EXPECT_NEAR(gc.support_mass, std::pow(b, 1 / p) / std::pow(a, 1 - 1 / p), 1e-7);
  }
}

TEST(GradientCurves, ConstantPotentialHasNone) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const NodeFunction f(g.num_nodes(), 1.5);
  const auto cert = solve_modulus(g, ModulusProblem::endpoint(2.0, f));
  const auto gc = extract_gradient_curves(g, cert, f, 1e-9);
  EXPECT_TRUE(gc.curves.empty());
  EXPECT_EQ(gc.support_mass, 0.0);
}

TEST(GradientCurves, TwoEdgePathIsTight) {
  const auto g = ts::two_edge_path();
  const NodeFunction f(std::vector<double>{0, 0.5, 1});
  const auto cert = solve_modulus(g, ModulusProblem::endpoint(2.0, f), with_tol(1e-10));
  const auto gc = extract_gradient_curves(g, cert, f, 1e-9);
  ASSERT_EQ(gc.curves.size(), 1u);
  EXPECT_EQ(gc.curves[0].path.edges(), (std::vector<int>{0, 1}));
  EXPECT_NEAR(gc.curves[0].mass, std::sqrt(0.5), 1e-8);
}

TEST(GradientCurves, NonGradientSupportIsDropped) {
  // u rises and falls, so the only boundary path is not a gradient curve.
  const auto g = ts::two_edge_path();
  const auto cert = solve_modulus(g, ModulusProblem::constant(2.0, 1.0), with_tol(1e-10));
  const auto gc = extract_gradient_curves(g, cert, NodeFunction(std::vector<double>{0, 1, 0}), 1e-9);
  EXPECT_TRUE(gc.curves.empty());
  EXPECT_NEAR(gc.support_mass, std::sqrt(0.5), 1e-8);
  EXPECT_EQ(gc.curve_mass, 0.0);
}

TEST(Coverage, EmptySetIsZero) {
  const auto cert = two_edge_certificate();
  const auto c = coverage_identity(ts::two_edge_path(), cert, std::vector<int>{});
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.rhs, 0.0);
}

TEST(Coverage, LeftHalfOfUnitSquare) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.125));
  const auto cert = solve_modulus(g, ModulusProblem::endpoint(2.0, x_coordinate(g)), with_tol(1e-9));
  ASSERT_TRUE(cert.converged);
  std::vector<int> left;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double xm = 0.5 * (g.node(g.edge(e).u).x + g.node(g.edge(e).v).x);
    if (horizontal(g, e) && xm < 0.5) left.push_back(e);
  }
  const auto c = coverage_identity(g, cert, left);
  EXPECT_NEAR(c.lhs, 0.5, 1e-8);
  EXPECT_NEAR(c.rhs, 0.5, 1e-8);
}

TEST(Coverage, RandomSetsOnRandomGraphs) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = ts::random_graph(rng, 9, 5);
    std::vector<double> f(g.num_nodes());
    for (double& v : f) v = unit(rng);
    const auto cert = solve_modulus(g, ModulusProblem::endpoint(1.5 + trial % 3, NodeFunction(f)), with_tol(1e-10));
    ASSERT_TRUE(cert.converged);
    for (int s = 0; s < 20; ++s) {
      std::vector<double> w(g.num_edges());
      for (double& x : w) x = unit(rng) < 0.5 ? unit(rng) : 0.0;
      const auto c = coverage_identity(g, cert, w);
      EXPECT_NEAR(c.lhs, c.rhs, 1e-7 * (1 + c.rhs));
    }
  }
}

TEST(Coverage, RegionWeights) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto w = region_edge_weights(g, [](double x, double) { return x < 0.5; });
  for (int e = 0; e < g.num_edges(); ++e) {
    const double xm = 0.5 * (g.node(g.edge(e).u).x + g.node(g.edge(e).v).x);
    const double expect = horizontal(g, e) ? (xm < 0.5 ? 1.0 : 0.0) : (xm < 0.5 ? 1.0 : xm == 0.5 ? 0.5 : 0.0);
    EXPECT_DOUBLE_EQ(w[e], expect) << e;
  }
  EXPECT_THROW(region_edge_weights(ts::triangle(), [](double, double) { return true; }), std::invalid_argument);
}

TEST(Coverage, EverySupportedEdgeIsCovered) {
  const auto g = build_domain(DomainSpec::comb(1, 0.125));
  const auto cert = solve_modulus(g, ModulusProblem::endpoint(2.0, x_coordinate(g)), with_tol(1e-8));
  ASSERT_TRUE(cert.converged);
  EXPECT_TRUE(uncovered_edges(g, cert, 1e-8).empty());
  // Dropping every path through one supported edge exposes that edge.
  int e = 0;
  while (cert.rho[e] <= 1e-8) ++e;
  auto stripped = cert;
  std::erase_if(stripped.eta, [&](const WeightedPath& wp) {
    return std::find(wp.path.edges().begin(), wp.path.edges().end(), e) != wp.path.edges().end();
  });
  const auto miss = uncovered_edges(g, stripped, 1e-8);
  EXPECT_NE(std::find(miss.begin(), miss.end(), e), miss.end());
}

TEST(TheoremOne, RectangleSquareExponent) {
  const auto g = build_domain(DomainSpec::rectangle(2, 1, 1.0 / 32));
  const auto rep = theorem_one_report(g, x_coordinate(g), 2.0);
  EXPECT_TRUE(rep.pass()) << ::testing::PrintToString(rep.checks.failed());
  EXPECT_NEAR(rep.energy_norm, std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(rep.value, std::sqrt(2.0), 1e-5);
  EXPECT_NEAR(rep.pairing, rep.energy_norm, 1e-5);
  EXPECT_TRUE(rep.uncovered.empty());
}

TEST(TheoremOne, RectangleCubicExponent) {
  const auto g = build_domain(DomainSpec::rectangle(2, 1, 0.0625));
  const auto rep = theorem_one_report(g, x_coordinate(g), 3.0);
  EXPECT_TRUE(rep.pass()) << ::testing::PrintToString(rep.checks.failed());
  EXPECT_NEAR(rep.value, std::cbrt(2.0), 1e-5);
}

TEST(TheoremOne, ConstantDataIsTrivial) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto rep = theorem_one_report(g, NodeFunction(g.num_nodes(), 2.0), 2.0);
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.value, 0.0);
  EXPECT_EQ(rep.energy_norm, 0.0);
  EXPECT_TRUE(rep.certificate.eta.empty());
}

TEST(TheoremOne, CombWithOneBar) {
  const auto g = build_domain(DomainSpec::comb(1, 1.0 / 32));
  const auto rep = theorem_one_report(g, x_coordinate(g), 2.0);
  EXPECT_TRUE(rep.pass()) << ::testing::PrintToString(rep.checks.failed());
}
