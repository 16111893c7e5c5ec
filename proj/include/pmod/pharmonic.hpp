#pragma once

// Graph p-Dirichlet problem, minimal upper gradients and potentials
// reconstructed from densities.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pmod/space.hpp"

namespace pmod {

// Real value per node (potential units).
class NodeFunction {
 public:
  NodeFunction() = default;
  explicit NodeFunction(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("node function values must be finite");
  }
  NodeFunction(std::size_t n, double value) : values_(n, value) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t v) const { return values_[v]; }
  double at(std::size_t v) const { return values_.at(v); }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const NodeFunction&, const NodeFunction&) = default;

 private:
  std::vector<double> values_;
};

// Evaluates fn(x, y) at every node.
template <class Fn>
NodeFunction sample(const MetricGraph& g, Fn&& fn) {
  std::vector<double> v(g.num_nodes());
  for (int i = 0; i < g.num_nodes(); ++i) v[i] = fn(g.node(i).x, g.node(i).y);
  return NodeFunction(std::move(v));
}

inline void require_node_size(const MetricGraph& g, std::size_t n) {
  if (n != static_cast<std::size_t>(g.num_nodes()))
    throw std::invalid_argument(
        detail::concat("node function has ", n, " entries, graph has ", g.num_nodes(), " nodes"));
}

// sum over edges of measure * (|u(x) - u(y)| / length)^p
inline double p_energy(const MetricGraph& g, const NodeFunction& u, double p) {
  require_node_size(g, u.size());
  double s = 0.0;
  for (const Edge& e : g.edges()) s += e.measure * std::pow(std::abs(u[e.u] - u[e.v]) / e.length, p);
  return s;
}

// Weighted L^p norm of an edge density: (sum measure * rho^p)^(1/p).
inline double lp_norm(const MetricGraph& g, std::span<const double> rho, double p) {
  require_field_size(g, rho.size());
  double s = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) s += g.edge(e).measure * std::pow(std::abs(rho[e]), p);
  return std::pow(s, 1.0 / p);
}

// g(e) = |u(x) - u(y)| / length(e): the least density that is an upper
// gradient of u along every edge, hence along every path.
inline DensityField minimal_upper_gradient(const MetricGraph& g, const NodeFunction& u) {
  require_node_size(g, u.size());
  std::vector<double> grad(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    grad[e] = std::abs(u[ed.u] - u[ed.v]) / ed.length;
  }
  return DensityField(std::move(grad));
}

struct DirichletSolution {
  NodeFunction u;
  double energy = 0.0;
  double stationarity = 0.0;  // max |dE/du| over interior nodes
  int iterations = 0;
  bool converged = false;
};

namespace detail {

class DirichletSystem {
 public:
  DirichletSystem(const MetricGraph& g, double p) : g_(g), p_(p), index_(g.num_nodes(), -1) {
    for (int v = 0; v < g.num_nodes(); ++v)
      if (!g.is_boundary(v)) index_[v] = static_cast<int>(interior_.size()), interior_.push_back(v);
  }

  int size() const { return static_cast<int>(interior_.size()); }
  const std::vector<int>& interior() const { return interior_; }
  int index(int v) const { return index_[v]; }

  double energy(const std::vector<double>& u) const {
    double s = 0.0;
    for (const Edge& e : g_.edges()) s += e.measure * std::pow(std::abs(u[e.u] - u[e.v]) / e.length, p_);
    return s;
  }

  // Derivative of one edge term with respect to d = u(x) - u(y).
  double edge_slope(const Edge& e, double d) const {
    if (d == 0.0) return 0.0;
    const double a = std::abs(d);
    return std::copysign(p_ * e.measure * std::pow(a, p_ - 1.0) / std::pow(e.length, p_), d);
  }

  std::vector<double> gradient(const std::vector<double>& u) const {
    std::vector<double> grad(size(), 0.0);
    for (const Edge& e : g_.edges()) {
      const double s = edge_slope(e, u[e.u] - u[e.v]);
      if (index_[e.u] >= 0) grad[index_[e.u]] += s;
      if (index_[e.v] >= 0) grad[index_[e.v]] -= s;
    }
    return grad;
  }

  // Edge curvature with |d| floored at delta (p < 2) and a small ridge
  // (p > 2) so the Newton matrix stays positive definite.
  Eigen::SparseMatrix<double> hessian(const std::vector<double>& u, double delta) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * g_.num_edges());
    for (const Edge& e : g_.edges()) {
      const double a = std::max(std::abs(u[e.u] - u[e.v]), delta);
      double w = p_ * (p_ - 1.0) * e.measure * std::pow(a, p_ - 2.0) / std::pow(e.length, p_);
      w += 1e-12 * e.measure / (e.length * e.length);
      const int i = index_[e.u];
      const int j = index_[e.v];
      if (i >= 0) trip.emplace_back(i, i, w);
      if (j >= 0) trip.emplace_back(j, j, w);
      if (i >= 0 && j >= 0) {
        trip.emplace_back(i, j, -w);
        trip.emplace_back(j, i, -w);
      }
    }
    Eigen::SparseMatrix<double> h(size(), size());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

  // d/dt E(u + t dir), with dir given on interior nodes.
  double directional(const std::vector<double>& u, const std::vector<double>& dir_full,
                     double t) const {
    double s = 0.0;
    for (const Edge& e : g_.edges()) {
      const double dd = dir_full[e.u] - dir_full[e.v];
      if (dd == 0.0) continue;
      s += edge_slope(e, (u[e.u] + t * dir_full[e.u]) - (u[e.v] + t * dir_full[e.v])) * dd;
    }
    return s;
  }

  // Exact minimization of the convex one-dimensional restriction.
  double line_search(const std::vector<double>& u, const std::vector<double>& dir_full) const {
    if (directional(u, dir_full, 0.0) >= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 60 && directional(u, dir_full, hi) < 0.0; ++k) lo = hi, hi *= 2.0;
    for (int k = 0; k < 100 && hi - lo > 1e-15 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      (directional(u, dir_full, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // One Gauss-Seidel sweep in node-id order; each node value minimizes the
  // energy with neighbours frozen (bisection between neighbour extremes).
  void sweep(std::vector<double>& u) const {
    for (int v : interior_) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Incidence& inc : g_.incident(v)) {
        lo = std::min(lo, u[inc.other]);
        hi = std::max(hi, u[inc.other]);
      }
      auto slope = [&](double x) {
        double s = 0.0;
        for (const Incidence& inc : g_.incident(v)) s += edge_slope(g_.edge(inc.edge), x - u[inc.other]);
        return s;
      };
      for (int k = 0; k < 80 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++k) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      // For p < 2 the slope is only Hoelder near zero differences; rounding
      // leaves residuals of order eps^(p-1) unless the value snaps exactly.
      double best = 0.5 * (lo + hi);
      double best_slope = std::abs(slope(best));
      for (const Incidence& inc : g_.incident(v)) {
        const double s = std::abs(slope(u[inc.other]));
        if (s < best_slope) best = u[inc.other], best_slope = s;
      }
      u[v] = best;
    }
  }

 private:
  const MetricGraph& g_;
  double p_;
  std::vector<int> index_;
  std::vector<int> interior_;
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

// Minimizes sum measure * (|du| / length)^p with u = f on boundary nodes.
// Newton steps on the interior unknowns with exact line search; Gauss-Seidel
// sweeps take over if Newton stalls. Stops at max |dE/du| <= tol (1 + E).
inline DirichletSolution solve_dirichlet(const MetricGraph& g, const NodeFunction& f, double p,
                                         double tol, int max_iter = 200) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (g.boundary_nodes().empty()) throw std::invalid_argument("graph has no boundary nodes");
  require_node_size(g, f.size());

  detail::DirichletSystem sys(g, p);
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (int v : g.boundary_nodes()) fmin = std::min(fmin, f[v]), fmax = std::max(fmax, f[v]);

  std::vector<double> u(f.values().begin(), f.values().end());
  DirichletSolution out;
  if (sys.size() == 0) {
    out.energy = sys.energy(u);
    out.u = NodeFunction(std::move(u));
    out.converged = true;
    return out;
  }

  // Start from the linear (p = 2) solution.
  {
    detail::DirichletSystem lin(g, 2.0);
    std::vector<double> zero = u;
    for (int v : lin.interior()) zero[v] = 0.5 * (fmin + fmax);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(lin.hessian(zero, 1.0));
    std::vector<double> gr = lin.gradient(zero);
    Eigen::VectorXd rhs = -Eigen::Map<Eigen::VectorXd>(gr.data(), gr.size());
    if (chol.info() == Eigen::Success) {
      Eigen::VectorXd step = chol.solve(rhs);
      for (int k = 0; k < lin.size(); ++k)
        u[lin.interior()[k]] = std::clamp(zero[lin.interior()[k]] + step[k], fmin, fmax);
    }
  }

  const double delta = 1e-9 * std::max(fmax - fmin, 1e-300);
  auto stationary = [&](double& stat, double& energy) {
    energy = sys.energy(u);
    stat = detail::max_abs(sys.gradient(u));
    return stat <= tol * (1.0 + energy);
  };

  double stat = 0.0;
  double energy = 0.0;
  int it = 0;
  bool done = stationary(stat, energy);
  std::vector<double> dir_full(g.num_nodes(), 0.0);
  int stalls = 0;
  for (; !done && it < max_iter; ++it) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(sys.hessian(u, delta));
    std::vector<double> gr = sys.gradient(u);
    Eigen::VectorXd step = chol.solve(-Eigen::Map<Eigen::VectorXd>(gr.data(), gr.size()));
    if (chol.info() != Eigen::Success || !step.allFinite()) break;
    for (int k = 0; k < sys.size(); ++k) dir_full[sys.interior()[k]] = step[k];
    const double t = sys.line_search(u, dir_full);
    for (int v : sys.interior()) u[v] += t * dir_full[v];
    const double before = energy;
    done = stationary(stat, energy);
    if (!(energy < before)) ++stalls;
    if (stalls > 3) break;
  }
  for (int sweeps = 0; !done && sweeps < 20 * max_iter; ++sweeps, ++it) {
    sys.sweep(u);
    done = stationary(stat, energy);
  }

  out.u = NodeFunction(std::move(u));
  out.energy = energy;
  out.stationarity = stat;
  out.iterations = it;
  out.converged = done;
  return out;
}

// w(x) = min over boundary y of f(y) + rho-distance(y, x), clamped above by
// max f on the boundary. rho is an upper gradient of the result.
inline NodeFunction potential_from_density(const MetricGraph& g, const DensityField& rho,
                                           const NodeFunction& f) {
  require_field_size(g, rho.size());
  require_node_size(g, f.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> w(g.num_nodes(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  double fmax = -inf;
  for (int v : g.boundary_nodes()) {
    w[v] = f[v];
    fmax = std::max(fmax, f[v]);
    heap.push({w[v], v});
  }
  if (heap.empty()) throw std::invalid_argument("graph has no boundary nodes");
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > w[v]) continue;
    for (const Incidence& inc : g.incident(v)) {
      const double nd = d + rho[inc.edge] * g.edge(inc.edge).length;
      if (nd < w[inc.other]) {
        w[inc.other] = nd;
        heap.push({nd, inc.other});
      }
    }
  }
  for (double& x : w) {
    if (!std::isfinite(x)) throw std::invalid_argument("node unreachable from the boundary");
    x = std::min(x, fmax);
  }
  return NodeFunction(std::move(w));
}

}  // namespace pmod
