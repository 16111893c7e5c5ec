#pragma once

// Anisotropic energy max(|D_x v|, |D_y v|)^p on grid cells over [-1, 1]^2 and
// the two-rectangle example where a minimizer on each rectangle fails to be
// one on their union.

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmod/space.hpp"

namespace pmod {

enum class Region { Omega1, Omega2, Union };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Omega1: return "omega1";
    case Region::Omega2: return "omega2";
    case Region::Union: return "union";
  }
  return "";
}

// Node lattice over [-1, 1]^2 with spacing h. Node (i, j) sits at
// (-1 + i h, -1 + j h); cell (i, j) has node (i, j) as its lower-left corner.
class CellGrid {
 public:
  explicit CellGrid(double h) : h_(h), cells_per_side_(detail::grid_count(2.0, h, "side") ) {
    detail::grid_count(1.0, h, "half side");
    n_ = cells_per_side_ + 1;
    const int m = cells_per_side_;
    omega1_.assign(static_cast<std::size_t>(m) * m, false);
    omega2_.assign(omega1_.size(), false);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double cx = x(i) + 0.5 * h_;
        const double cy = y(j) + 0.5 * h_;
        omega1_[cell(i, j)] = cx > -1.0 && cx < 1.0 && cy > 0.0 && cy < 1.0;
        omega2_[cell(i, j)] = cx > 0.0 && cx < 1.0 && cy > -1.0 && cy < 1.0;
      }
    union_.resize(omega1_.size());
    for (std::size_t c = 0; c < union_.size(); ++c) union_[c] = omega1_[c] || omega2_[c];
  }

  double h() const { return h_; }
  int nodes_per_side() const { return n_; }
  int cells_per_side() const { return cells_per_side_; }
  std::size_t num_nodes() const { return static_cast<std::size_t>(n_) * n_; }
  double x(int i) const { return i * h_ - 1.0; }
  double y(int j) const { return j * h_ - 1.0; }
  std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * cells_per_side_ + i; }

  const std::vector<bool>& mask(Region r) const {
    switch (r) {
      case Region::Omega1: return omega1_;
      case Region::Omega2: return omega2_;
      case Region::Union: return union_;
    }
    throw std::invalid_argument("unknown region");
  }

  double area(const std::vector<bool>& mask) const {
    return static_cast<double>(std::count(mask.begin(), mask.end(), true)) * h_ * h_;
  }

  // Values of fn at every node in the closure of the union, 0 elsewhere.
  template <class Fn>
  std::vector<double> sample(Fn&& fn) const {
    std::vector<double> v(num_nodes(), 0.0);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i)
        if (x(i) >= 0.0 || y(j) >= 0.0) v[node(i, j)] = fn(x(i), y(j));
    return v;
  }

 private:
  double h_;
  int cells_per_side_;
  int n_ = 0;
  std::vector<bool> omega1_, omega2_, union_;
};

struct CounterexampleValue {
  double u = 0.0;
  double phi = 0.0;
  int phi_case = 5;  // 1..5 for cases I..V
};

// u and the perturbation phi. phi takes the first matching case in order
// I, II, III, IV, with V (phi = 0) as the fallback. Each case is tested on its
// closure, so grid nodes on a case boundary see the continuous extension.
inline CounterexampleValue eval_counterexample(double x, double y) {
  const bool in1 = x >= -1.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
  const bool in2 = x >= 0.0 && x <= 1.0 && y >= -1.0 && y <= 1.0;
  if (!std::isfinite(x) || !std::isfinite(y) || !(in1 || in2))
    throw std::invalid_argument(detail::concat("point (", x, ", ", y, ") is outside the domain"));
  CounterexampleValue r;
  r.u = x < 0.0 ? y : (y < 0.0 ? x : x + y);
  const double s = x + y;
  if (s >= 0.5 && s <= 1.0 && x >= 0.0 && y >= 0.0) {
    r.phi = 1.0 - s, r.phi_case = 1;
  } else if (x <= 0.0 && y >= 0.5 && y - x <= 1.0) {
    r.phi = 1.0 + x - y, r.phi_case = 2;
  } else if (y <= 0.0 && x >= 0.5 && x - y <= 1.0) {
    r.phi = 1.0 - x + y, r.phi_case = 3;
  } else if (s >= 0.0 && s <= 0.5 && x <= 0.5 && y <= 0.5) {
    r.phi = s, r.phi_case = 4;
  } else {
    r.phi = 0.0, r.phi_case = 5;
  }
  return r;
}

// u + eps phi on the grid.
inline std::vector<double> perturbed_u(const CellGrid& grid, double eps) {
  return grid.sample([eps](double x, double y) {
    const auto v = eval_counterexample(x, y);
    return v.u + eps * v.phi;
  });
}

// Sum over masked cells of max(|D_x v|, |D_y v|)^p h^2, forward differences
// taken at each cell's lower-left corner.
inline double linfty_energy(const CellGrid& grid, const std::vector<double>& v,
                            const std::vector<bool>& mask, double p) {
  if (v.size() != grid.num_nodes()) throw std::invalid_argument("node values do not match the grid");
  if (mask.size() != static_cast<std::size_t>(grid.cells_per_side()) * grid.cells_per_side())
    throw std::invalid_argument("mask does not match the grid");
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
  const double h = grid.h();
  const int m = grid.cells_per_side();
  double total = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      if (!mask[grid.cell(i, j)]) continue;
      const double c = v[grid.node(i, j)];
      const double g = std::max(std::abs(v[grid.node(i + 1, j)] - c), std::abs(v[grid.node(i, j + 1)] - c)) / h;
      total += std::pow(g, p);
    }
  return total * h * h;
}

inline double closed_form_energy(double eps, double p) {
  if (!(std::abs(eps) < 0.5)) throw std::invalid_argument("eps must satisfy |eps| < 1/2");
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
  return 2.0 + 0.375 * std::pow(1.0 + eps, p) + 0.625 * std::pow(1.0 - eps, p);
}

// Minimizer of the closed form: (1 + eps) / (1 - eps) = (5/3)^(1/(p-1)).
inline double stationary_eps(double p) {
  const double r = std::pow(5.0 / 3.0, 1.0 / (p - 1.0));
  return (r - 1.0) / (r + 1.0);
}

struct MinimizeOptions {
  std::vector<double> smoothing = {8.0, 32.0, 128.0};
  double stationarity = 1e-6;  // bound on |dE/dv| / h at free nodes per smoothed stage
  double stall = 1e-10;        // a stage also ends when the relative energy change drops below this
  int max_stage_iterations = 20000;
  int polish_steps = 500;
};

struct MinimizeResult {
  std::vector<double> v;
  double energy = 0.0;
  double start_energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Masked cells and the free nodes (all four surrounding cells masked).
struct MaskedProblem {
  const CellGrid& grid;
  std::vector<bool> mask;
  double p;
  std::vector<std::array<std::size_t, 3>> cells;  // lower-left, right, up
  std::vector<std::size_t> free;
  std::vector<int> slot;                           // node -> free index or -1

  MaskedProblem(const CellGrid& g, const std::vector<bool>& m, double exponent)
      : grid(g), mask(m), p(exponent), slot(g.num_nodes(), -1) {
    const int c = g.cells_per_side();
    auto masked = [&](int i, int j) { return i >= 0 && j >= 0 && i < c && j < c && mask[g.cell(i, j)]; };
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < c; ++i)
        if (masked(i, j)) cells.push_back({g.node(i, j), g.node(i + 1, j), g.node(i, j + 1)});
    for (int j = 0; j < g.nodes_per_side(); ++j)
      for (int i = 0; i < g.nodes_per_side(); ++i)
        if (masked(i, j) && masked(i - 1, j) && masked(i, j - 1) && masked(i - 1, j - 1)) {
          slot[g.node(i, j)] = static_cast<int>(free.size());
          free.push_back(g.node(i, j));
        }
  }

  // Energy with max(a, b) replaced by (a^s + b^s)^(1/s) when s > 0; the true
  // energy and a subgradient when s == 0.
  double evaluate(const std::vector<double>& v, double s, std::vector<double>* grad) const {
    const double h = grid.h();
    const double w = h * h;
    double total = 0.0;
    if (grad) grad->assign(free.size(), 0.0);
    for (const auto& [o, r, u] : cells) {
      const double a = (v[r] - v[o]) / h;
      const double b = (v[u] - v[o]) / h;
      const double aa = std::abs(a);
      const double ab = std::abs(b);
      const double big = std::max(aa, ab);
      if (big == 0.0) continue;
      // f = big^p (1 + t^s)^(p/s) with t = small / big; logs keep it to a
      // few transcendental calls per cell.
      const double fbig = p == 2.0 ? big * big : std::exp(p * std::log(big));
      double f = fbig;
      double dbig = p * fbig / big;
      double dsmall = 0.0;
      if (s > 0.0) {
        const double t = std::min(aa, ab) / big;
        const double ts = t > 0.0 ? std::exp(s * std::log(t)) : 0.0;
        if (ts > 1e-18) {
          const double scale = std::exp((p / s) * std::log1p(ts));
          f = fbig * scale;
          dbig = p * f / (big * (1.0 + ts));
          dsmall = dbig * ts / t;
        }
      }
      double da = (aa >= ab ? dbig : dsmall) * (a < 0.0 ? -1.0 : 1.0);
      double db = (aa >= ab ? dsmall : dbig) * (b < 0.0 ? -1.0 : 1.0);
      total += w * f;
      if (grad) {
        // d/dv of a is 1/h at r and -1/h at o; likewise b at u and o.
        auto add = [&](std::size_t node, double val) {
          if (slot[node] >= 0) (*grad)[slot[node]] += w * val / h;
        };
        add(r, da);
        add(u, db);
        add(o, -da - db);
      }
    }
    return total;
  }
};

class SmoothedEnergy final : public ceres::FirstOrderFunction {
 public:
  SmoothedEnergy(const MaskedProblem& prob, std::vector<double> base, double s)
      : prob_(prob), v_(std::move(base)), s_(s) {}

  bool Evaluate(const double* params, double* cost, double* gradient) const override {
    for (std::size_t k = 0; k < prob_.free.size(); ++k) v_[prob_.free[k]] = params[k];
    *cost = prob_.evaluate(v_, s_, gradient ? &grad_ : nullptr);
    if (gradient) std::copy(grad_.begin(), grad_.end(), gradient);
    return std::isfinite(*cost);
  }

  int NumParameters() const override { return static_cast<int>(prob_.free.size()); }

 private:
  const MaskedProblem& prob_;
  mutable std::vector<double> v_;
  mutable std::vector<double> grad_;
  double s_;
};

}  // namespace detail

// Minimizes linfty_energy over the free nodes of the masked region, all other
// values held at start. Smoothed stages run L-BFGS; subgradient steps on the
// true energy follow. Returns the best iterate seen, start included.
inline MinimizeResult minimize_linfty_energy(const CellGrid& grid, const std::vector<bool>& mask,
                                             const std::vector<double>& start, double p,
                                             const MinimizeOptions& opt = {}) {
  if (start.size() != grid.num_nodes()) throw std::invalid_argument("node values do not match the grid");
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
  const detail::MaskedProblem prob(grid, mask, p);
  MinimizeResult res;
  res.v = start;
  res.start_energy = prob.evaluate(start, 0.0, nullptr);
  res.energy = res.start_energy;
  res.converged = true;
  if (prob.free.empty()) return res;

  std::vector<double> x(prob.free.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = start[prob.free[k]];
  std::vector<double> v = start;
  auto consider = [&](const std::vector<double>& params) {
    for (std::size_t k = 0; k < params.size(); ++k) v[prob.free[k]] = params[k];
    const double e = prob.evaluate(v, 0.0, nullptr);
    if (e < res.energy) res.energy = e, res.v = v;
  };

  for (double s : opt.smoothing) {
    ceres::GradientProblemSolver::Options so;
    so.line_search_direction_type = ceres::LBFGS;
    so.max_num_iterations = opt.max_stage_iterations;
    so.gradient_tolerance = opt.stationarity * grid.h();
    so.function_tolerance = opt.stall;
    so.parameter_tolerance = 1e-15;
    so.logging_type = ceres::SILENT;
    ceres::GradientProblemSolver::Summary summary;
    ceres::GradientProblem problem(new detail::SmoothedEnergy(prob, start, s));
    ceres::Solve(so, problem, x.data(), &summary);
    res.iterations += static_cast<int>(summary.iterations.size());
    if (summary.termination_type == ceres::NO_CONVERGENCE || summary.termination_type == ceres::FAILURE)
      res.converged = false;
    consider(x);
  }

  // Subgradient polish on the true energy, step length shrinking like 1/sqrt(k).
  std::vector<double> grad;
  for (std::size_t k = 0; k < x.size(); ++k) v[prob.free[k]] = x[k];
  for (int step = 0; step < opt.polish_steps; ++step) {
    prob.evaluate(v, 0.0, &grad);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax == 0.0) break;
    const double len = 0.01 * grid.h() / std::sqrt(1.0 + step);
    for (std::size_t k = 0; k < grad.size(); ++k) x[k] -= len * grad[k] / gmax;
    consider(x);
  }
  return res;
}

struct DerivativeCheck {
  double p;
  double slope;  // (E(delta) - E(0)) / delta
  double exact;  // (3p - 5p) / 8
};

struct RegionResult {
  Region region;
  double energy_u = 0.0;
  MinimizeResult minimized;
};

struct SheafReport {
  double p = 2.0;
  double h = 0.0;
  double eps = 0.0;
  double energy_u_eps = 0.0;   // numerical energy of u + eps phi on the union
  double closed_form = 0.0;
  std::vector<RegionResult> regions;  // omega1, omega2, union
  std::vector<DerivativeCheck> derivatives;
  double margin = 0.05;     // union minimization must beat u by this much
  double tolerance = 0.02;  // discretization allowance on each rectangle
  bool sheaf_fails = false;

  const RegionResult& region(Region r) const {
    for (const auto& rr : regions)
      if (rr.region == r) return rr;
    throw std::out_of_range("region not in report");
  }
};

inline SheafReport sheaf_demo(double p, double h, double eps, const MinimizeOptions& opt = {}) {
  SheafReport rep;
  rep.p = p;
  rep.h = h;
  rep.eps = eps;
  const CellGrid grid(h);
  const auto u = perturbed_u(grid, 0.0);
  const auto ue = perturbed_u(grid, eps);
  rep.energy_u_eps = linfty_energy(grid, ue, grid.mask(Region::Union), p);
  rep.closed_form = closed_form_energy(eps, p);
  for (Region r : {Region::Omega1, Region::Omega2, Region::Union}) {
    RegionResult rr{r};
    rr.energy_u = linfty_energy(grid, u, grid.mask(r), p);
    rr.minimized = minimize_linfty_energy(grid, grid.mask(r), u, p, opt);
    rep.regions.push_back(std::move(rr));
  }
  const double delta = 1e-4;
  for (double q : {1.5, 2.0, 3.0, 5.0})
    rep.derivatives.push_back(
        {q, (closed_form_energy(delta, q) - closed_form_energy(0.0, q)) / delta, (3.0 * q - 5.0 * q) / 8.0});

  const auto& un = rep.region(Region::Union);
  bool rectangles_hold = true;
  for (Region r : {Region::Omega1, Region::Omega2}) {
    const auto& rr = rep.region(r);
    rectangles_hold = rectangles_hold && rr.minimized.energy >= rr.energy_u - rep.tolerance;
  }
  rep.sheaf_fails = rectangles_hold && un.minimized.energy < un.energy_u - rep.margin;
  return rep;
}

}  // namespace pmod
