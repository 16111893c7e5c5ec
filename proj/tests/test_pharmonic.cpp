#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pmod/modulus.hpp"
#include "pmod/pharmonic.hpp"
#include "support.hpp"

using namespace pmod;
namespace ts = testing_support;

namespace {

NodeFunction on_boundary(const MetricGraph& g, const std::function<double(double, double)>& fn) {
  std::vector<double> v(g.num_nodes(), 0.0);
  for (int i : g.boundary_nodes()) v[i] = fn(g.node(i).x, g.node(i).y);
  return NodeFunction(v);
}

}  // namespace

class ThreeNodePath : public ::testing::TestWithParam<double> {};

TEST_P(ThreeNodePath, MidpointIsHalf) {
  const auto g = ts::two_edge_path();
  const auto sol = solve_dirichlet(g, NodeFunction(std::vector<double>{0, 0, 1}), GetParam(), 1e-12);
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.u[1], 0.5, 1e-9);
  EXPECT_EQ(sol.u[0], 0.0);
  EXPECT_EQ(sol.u[2], 1.0);
}

INSTANTIATE_TEST_SUITE_P(Exponents, ThreeNodePath, ::testing::Values(1.2, 1.5, 2.0, 3.0, 5.0));

TEST(Dirichlet, LinearDataIsStationary) {
  const auto g = build_domain(DomainSpec::rectangle(2, 1, 0.125));
  for (double p : {1.5, 2.0, 3.0}) {
    const auto sol = solve_dirichlet(g, on_boundary(g, [](double x, double) { return x; }), p, 1e-10);
    ASSERT_TRUE(sol.converged) << p;
    for (int v = 0; v < g.num_nodes(); ++v) EXPECT_NEAR(sol.u[v], g.node(v).x, 1e-8) << p;
    EXPECT_NEAR(sol.energy, 2.0, 1e-8);
  }
}

TEST(Dirichlet, ConstantData) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto sol = solve_dirichlet(g, NodeFunction(g.num_nodes(), 0.7), 3.0, 1e-10);
  EXPECT_TRUE(sol.converged);
  for (double v : sol.u.values()) EXPECT_DOUBLE_EQ(v, 0.7);
  EXPECT_EQ(sol.energy, 0.0);
}

TEST(Dirichlet, RejectsBadInput) {
  const auto g = ts::two_edge_path();
  const NodeFunction f(std::vector<double>{0, 0, 1});
  EXPECT_THROW(solve_dirichlet(g, f, 1.0, 1e-8), std::invalid_argument);
  EXPECT_THROW(solve_dirichlet(g, f, 0.5, 1e-8), std::invalid_argument);
  EXPECT_THROW(solve_dirichlet(g, f, 2.0, 0.0), std::invalid_argument);
  EXPECT_THROW(solve_dirichlet(g, NodeFunction(2, 0.0), 2.0, 1e-8), std::invalid_argument);
  const MetricGraph closed({{0, 0, false}, {1, 0, false}}, {{0, 1, 1, 1}});
  EXPECT_THROW(solve_dirichlet(closed, NodeFunction(2, 0.0), 2.0, 1e-8), std::invalid_argument);
}

class DirichletRandom : public ::testing::TestWithParam<int> {};

// The minimizer beats random competitors with the same boundary values and
// respects the maximum principle.
TEST_P(DirichletRandom, BeatsCompetitorsAndMaximumPrinciple) {
  std::mt19937_64 rng(300 + GetParam());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double p = std::vector<double>{1.5, 2.0, 3.0, 4.0}[GetParam() % 4];
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.125));
  std::vector<double> f(g.num_nodes(), 0.0);
  for (int v : g.boundary_nodes()) f[v] = std::sin(3 * g.node(v).x) + g.node(v).y * unit(rng);
  const auto sol = solve_dirichlet(g, NodeFunction(f), p, 1e-11);
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.energy, p_energy(g, sol.u, p), 1e-12 * (1 + sol.energy));

  double lo = 1e300, hi = -1e300;
  for (int v : g.boundary_nodes()) lo = std::min(lo, f[v]), hi = std::max(hi, f[v]);
  for (double v : sol.u.values()) {
    EXPECT_GE(v, lo - 1e-12);
    EXPECT_LE(v, hi + 1e-12);
  }

  for (int k = 0; k < 100; ++k) {
    std::vector<double> w(sol.u.values().begin(), sol.u.values().end());
    const double scale = std::pow(10.0, -1.0 - 3.0 * (k % 4) / 3.0);
    for (int v = 0; v < g.num_nodes(); ++v)
      if (!g.is_boundary(v)) w[v] += scale * unit(rng);
    EXPECT_GE(p_energy(g, NodeFunction(w), p), sol.energy * (1 - 1e-12));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DirichletRandom, ::testing::Range(0, 8));

TEST(UpperGradient, LinearFunction) {
  const double h = 0.125;
  const auto g = build_domain(DomainSpec::rectangle(1, 1, h));
  const auto gu = minimal_upper_gradient(g, sample(g, [](double x, double) { return x; }));
  for (int e = 0; e < g.num_edges(); ++e) {
    const bool horizontal = g.node(g.edge(e).u).y == g.node(g.edge(e).v).y;
    EXPECT_NEAR(gu[e], horizontal ? 1.0 : 0.0, 1e-12);
  }
}

TEST(UpperGradient, ConstantAndSingleEdge) {
  const auto g = ts::triangle();
  for (double v : minimal_upper_gradient(g, NodeFunction(3, 2.5))) EXPECT_EQ(v, 0.0);
  const MetricGraph one({{0, 0, true}, {2, 0, true}}, {{0, 1, 2, 1}});
  EXPECT_DOUBLE_EQ(minimal_upper_gradient(one, NodeFunction(std::vector<double>{0, 1}))[0], 0.5);
}

TEST(Potential, TwoEdgePath) {
  const auto g = ts::two_edge_path();
  const auto v = potential_from_density(g, DensityField(2, 0.5), NodeFunction(std::vector<double>{0, 0, 1}));
  EXPECT_DOUBLE_EQ(v[1], 0.5);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  EXPECT_DOUBLE_EQ(v[2], 1.0);
}

TEST(Potential, ZeroDensityGivesMinimum) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto f = on_boundary(g, [](double x, double y) { return x + 2 * y + 1; });
  const auto v = potential_from_density(g, DensityField(g.num_edges(), 0.0), f);
  for (double x : v.values()) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(Potential, HugeDensityClamps) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto f = on_boundary(g, [](double x, double y) { return x * y; });
  const auto v = potential_from_density(g, DensityField(g.num_edges(), 1e6), f);
  for (int i = 0; i < g.num_nodes(); ++i) EXPECT_DOUBLE_EQ(v[i], g.is_boundary(i) ? f[i] : 1.0);
}

TEST(Potential, DensityIsUpperGradient) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = ts::random_graph(rng, 10, 6);
    std::vector<double> r(g.num_edges()), f(g.num_nodes());
    for (auto& x : r) x = unit(rng) * 2;
    for (auto& x : f) x = unit(rng);
    const auto v = potential_from_density(g, DensityField(r), NodeFunction(f));
    for (int e = 0; e < g.num_edges(); ++e) {
      const Edge& ed = g.edge(e);
      EXPECT_LE(std::abs(v[ed.u] - v[ed.v]), r[e] * ed.length + 1e-12);
    }
  }
}

TEST(Potential, AdmissibleDensityKeepsBoundaryValues) {
  const auto g = build_domain(DomainSpec::rectangle(1, 1, 0.25));
  const auto f = on_boundary(g, [](double x, double y) { return x * x + 0.5 * y; });
  const auto rho = DensityField(g.num_edges(), 2.0);  // Lipschitz bound of f in l1
  const auto v = potential_from_density(g, rho, f);
  for (int b : g.boundary_nodes()) EXPECT_NEAR(v[b], f[b], 1e-12);
}

// On grids the minimal upper gradient of the p-harmonic extension coincides
// with the optimal density of the endpoint modulus problem.
class Equivalence : public ::testing::TestWithParam<std::tuple<double, int>> {};

TEST_P(Equivalence, UpperGradientMatchesOptimalDensity) {
  const auto [p, which] = GetParam();
  const DomainSpec spec = which == 0   ? DomainSpec::rectangle(1, 1, 0.125)
                          : which == 1 ? DomainSpec::rectangle(2, 1, 0.125)
                                       : DomainSpec::rectangle(1.5, 1, 0.125);
  const auto g = build_domain(spec);
  std::function<double(double, double)> fn = [](double x, double y) { return x * x + y; };
  if (which == 1) fn = [](double x, double y) { return std::sin(2 * x) + 0.3 * y * y; };
  if (which == 2) fn = [](double x, double y) { return x * y + std::cos(x); };
  const auto f = on_boundary(g, fn);
  const auto sol = solve_dirichlet(g, f, p, 1e-12);
  ASSERT_TRUE(sol.converged);
  const auto gu = minimal_upper_gradient(g, sol.u);
  ModulusOptions opt;
  opt.tol = 1e-9;
  const auto cert = solve_modulus(g, ModulusProblem::endpoint(p, f), opt);
  ASSERT_TRUE(cert.converged);
  std::vector<double> diff(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) diff[e] = gu[e] - cert.rho[e];
  const double norm = lp_norm(g, gu.values(), p);
  EXPECT_LE(lp_norm(g, diff, p) / norm, 1e-5);
  EXPECT_NEAR(cert.value, norm, 1e-7 * norm);
}

INSTANTIATE_TEST_SUITE_P(Grids, Equivalence,
                         ::testing::Combine(::testing::Values(1.5, 2.0, 3.0), ::testing::Values(0, 1, 2)));
