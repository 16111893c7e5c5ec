#pragma once

// Small graphs and independent reference computations shared by the tests.
// Nothing here calls the solvers under test.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "pmod/space.hpp"

namespace testing_support {

using pmod::Edge;
using pmod::MetricGraph;
using pmod::Node;

// 0 - 1 - 2 with both ends on the boundary.
inline MetricGraph two_edge_path(double len = 1.0, double mu = 1.0) {
  return MetricGraph({{0, 0, true}, {1, 0, false}, {2, 0, true}},
                     {{0, 1, len, mu}, {1, 2, len, mu}});
}

inline MetricGraph parallel_edges() {
  return MetricGraph({{0, 0, true}, {1, 0, true}}, {{0, 1, 1, 1}, {0, 1, 1, 1}});
}

inline MetricGraph triangle() {
  return MetricGraph({{0, 0, true}, {1, 0, true}, {0.5, 0.8, true}},
                     {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}});
}

// Connected random graph: a random spanning tree plus extra edges, random
// lengths and measures, at least two boundary nodes.
inline MetricGraph random_graph(std::mt19937_64& rng, int n, int extra, bool parallel = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Node> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = {unit(rng), unit(rng), unit(rng) < 0.45};
  nodes[0].boundary = true;
  nodes[n - 1].boundary = true;
  std::vector<Edge> edges;
  auto add = [&](int a, int b) { edges.push_back({a, b, 0.5 + unit(rng), 0.5 + unit(rng)}); };
  for (int i = 1; i < n; ++i) add(static_cast<int>(rng() % i), i);
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng() % n);
    const int b = static_cast<int>(rng() % n);
    if (a == b) continue;
    const bool exists = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
      return (e.u == a && e.v == b) || (e.u == b && e.v == a);
    });
    if (exists && !parallel) continue;
    add(a, b);
  }
  return MetricGraph(std::move(nodes), std::move(edges));
}

// All simple paths between distinct boundary nodes, as edge lists, each
// unordered pair visited from the smaller id.
struct RawPath {
  int s = -1;
  int t = -1;
  std::vector<int> edges;
};

inline std::vector<RawPath> all_boundary_paths(const MetricGraph& g) {
  std::vector<RawPath> out;
  std::vector<char> used(g.num_nodes(), 0);
  std::vector<int> stack;
  std::function<void(int, int)> go = [&](int s, int at) {
    for (int e = 0; e < g.num_edges(); ++e) {
      const Edge& ed = g.edge(e);
      if (ed.u != at && ed.v != at) continue;
      const int nxt = ed.u == at ? ed.v : ed.u;
      if (used[nxt]) continue;
      used[nxt] = 1;
      stack.push_back(e);
      if (g.node(nxt).boundary && nxt > s) out.push_back({s, nxt, stack});
      go(s, nxt);
      stack.pop_back();
      used[nxt] = 0;
    }
  };
  for (int s = 0; s < g.num_nodes(); ++s) {
    if (!g.node(s).boundary) continue;
    used[s] = 1;
    go(s, s);
    used[s] = 0;
  }
  return out;
}

struct PrimalSolution {
  std::vector<double> rho;
  double mod = 0.0;  // sum mu rho^p
};

// Log-barrier Newton method for
//   minimize sum mu |rho|^p  subject to  sum_{e in path} rho ell >= b(path)
// over the given rows. The |rho|^p objective makes sign constraints
// unnecessary: the minimizer is nonnegative because A >= 0 and b >= 0.
inline PrimalSolution barrier_primal(const MetricGraph& g, const std::vector<std::vector<int>>& rows,
                                     const std::vector<double>& bounds, double p) {
  const int m = g.num_edges();
  const int k = static_cast<int>(rows.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, m);
  Eigen::VectorXd b(k);
  double bmax = 0.0;
  double lmin = std::numeric_limits<double>::infinity();
  for (int e = 0; e < m; ++e) lmin = std::min(lmin, g.edge(e).length);
  for (int r = 0; r < k; ++r) {
    for (int e : rows[r]) A(r, e) += g.edge(e).length;
    b(r) = bounds[r];
    bmax = std::max(bmax, bounds[r]);
  }
  Eigen::VectorXd mu(m);
  for (int e = 0; e < m; ++e) mu(e) = g.edge(e).measure;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 2.0 * bmax / lmin + 1.0);
  auto phi = [&](const Eigen::VectorXd& y, double t, bool& ok) {
    const Eigen::VectorXd s = A * y - b;
    ok = (s.array() > 0.0).all();
    if (!ok) return std::numeric_limits<double>::infinity();
    double f = 0.0;
    for (int e = 0; e < m; ++e) f += mu(e) * std::pow(std::abs(y(e)), p);
    return t * f - s.array().log().sum();
  };

  double t = 1.0;
  const double target_gap = 1e-13;
  while (true) {
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd s = A * x - b;
      Eigen::VectorXd grad(m);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
      for (int e = 0; e < m; ++e) {
        const double a = std::abs(x(e));
        grad(e) = t * mu(e) * p * std::pow(a, p - 1.0) * (x(e) < 0 ? -1.0 : 1.0);
        H(e, e) = t * mu(e) * p * (p - 1.0) * std::min(std::pow(std::max(a, 1e-300), p - 2.0), 1e12);
      }
      const Eigen::VectorXd inv = s.cwiseInverse();
      grad -= A.transpose() * inv;
      H += A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
      H.diagonal().array() += 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      const Eigen::VectorXd dx = -H.ldlt().solve(grad);
      const double decrement = -grad.dot(dx);
      if (decrement < 1e-20) break;
      bool ok = false;
      const double f0 = phi(x, t, ok);
      double step = 1.0;
      while (step > 1e-20) {
        const double f1 = phi(x + step * dx, t, ok);
        if (ok && f1 <= f0 - 0.25 * step * decrement) break;
        step *= 0.5;
      }
      x += step * dx;
      if (step * decrement < 1e-22 * (1.0 + std::abs(f0))) break;
    }
    double f = 0.0;
    for (int e = 0; e < m; ++e) f += mu(e) * std::pow(std::abs(x(e)), p);
    if (k / t <= target_gap * std::max(f, 1e-300)) break;
    t *= 8.0;
    if (t > 1e30) break;
  }
  PrimalSolution sol;
  sol.rho.resize(m);
  for (int e = 0; e < m; ++e) {
    sol.rho[e] = std::abs(x(e));
    sol.mod += mu(e) * std::pow(sol.rho[e], p);
  }
  return sol;
}

}  // namespace testing_support
