#pragma once

// Generalized p-modulus of boundary-to-boundary path families: cutting planes
// over a dual coordinate ascent, an exhaustive oracle, and duality
// certificates whose residuals are always recomputed from (rho*, eta*).

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmod/pharmonic.hpp"
#include "pmod/space.hpp"

namespace pmod {

struct BoundedPath {
  Path path;
  double bound = 0.0;
};

class ModulusProblem {
 public:
  enum class Mode { Constant, Endpoint, Explicit };

  static ModulusProblem constant(double p, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("bound must be >= 0");
    ModulusProblem m(p, Mode::Constant);
    m.constant_ = c;
    return m;
  }

  // b(x, y) = |f(x) - f(y)| for boundary nodes x, y.
  static ModulusProblem endpoint(double p, NodeFunction f) {
    ModulusProblem m(p, Mode::Endpoint);
    m.f_ = std::move(f);
    return m;
  }

  static ModulusProblem explicit_family(double p, std::vector<BoundedPath> family) {
    ModulusProblem m(p, Mode::Explicit);
    for (auto& bp : family) {
      if (!(bp.bound >= 0.0) || !std::isfinite(bp.bound))
        throw std::invalid_argument("bounds must be finite and >= 0");
      bp.path = bp.path.canonical();
      m.lookup_[bp.path.edges()] = bp.bound;
    }
    m.family_ = std::move(family);
    return m;
  }

  double p() const { return p_; }
  double q() const { return p_ / (p_ - 1.0); }
  Mode mode() const { return mode_; }
  double constant_bound() const { return constant_; }
  const NodeFunction& boundary_function() const { return f_; }
  const std::vector<BoundedPath>& family() const { return family_; }

  // Pair function for the constant and endpoint modes.
  PairBound pair_bound() const {
    switch (mode_) {
      case Mode::Constant: {
        const double c = constant_;
        return [c](int x, int y) { return x == y ? 0.0 : c; };
      }
      case Mode::Endpoint: {
        const NodeFunction* f = &f_;
        return [f](int x, int y) { return std::abs((*f)[x] - (*f)[y]); };
      }
      case Mode::Explicit: break;
    }
    throw std::logic_error("explicit families have no pair bound");
  }

  // b(gamma); zero for paths outside an explicit family.
  double bound(const Path& path) const {
    switch (mode_) {
      case Mode::Constant: return path.front() == path.back() ? 0.0 : constant_;
      case Mode::Endpoint: return std::abs(f_.at(path.front()) - f_.at(path.back()));
      case Mode::Explicit: {
        auto it = lookup_.find(path.canonical().edges());
        return it == lookup_.end() ? 0.0 : it->second;
      }
    }
    return 0.0;
  }

  bool in_family(const Path& path) const {
    if (mode_ != Mode::Explicit) return true;
    return lookup_.count(path.canonical().edges()) > 0;
  }

  double max_bound(const MetricGraph& g) const {
    double m = 0.0;
    for_each_positive(g, [&](double b) { m = std::max(m, b); });
    return m;
  }

  // Smallest positive bound; +inf when there is none.
  double min_positive_bound(const MetricGraph& g) const {
    double m = std::numeric_limits<double>::infinity();
    for_each_positive(g, [&](double b) { m = std::min(m, b); });
    return m;
  }

  void validate(const MetricGraph& g) const {
    if (mode_ == Mode::Endpoint) require_node_size(g, f_.size());
    if (mode_ == Mode::Explicit)
      for (const auto& bp : family_)
        for (int e : bp.path.edges())
          if (e >= g.num_edges()) throw std::invalid_argument("family path does not live on graph");
  }

 private:
  ModulusProblem(double p, Mode mode) : p_(p), mode_(mode) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be > 1");
  }

  template <class Fn>
  void for_each_positive(const MetricGraph& g, Fn&& fn) const {
    if (mode_ == Mode::Explicit) {
      for (const auto& bp : family_)
        if (bp.bound > 0.0) fn(bp.bound);
      return;
    }
    if (g.boundary_nodes().size() < 2) return;
    if (mode_ == Mode::Constant) {
      if (constant_ > 0.0) fn(constant_);
      return;
    }
    const auto& bd = g.boundary_nodes();
    for (std::size_t i = 0; i < bd.size(); ++i)
      for (std::size_t j = i + 1; j < bd.size(); ++j) {
        const double b = std::abs(f_[bd[i]] - f_[bd[j]]);
        if (b > 0.0) fn(b);
      }
  }

  double p_;
  Mode mode_;
  double constant_ = 0.0;
  NodeFunction f_;
  std::vector<BoundedPath> family_;
  std::map<std::vector<int>, double> lookup_;
};

struct Residuals {
  double gap = 0.0;                // |V - D|
  double violation = 0.0;          // max(0, -min slack) over the family
  double slackness = 0.0;          // max over support |A rho - b| / (1 + b)
  double density = 0.0;            // max_e |l sum eta / mu - (rho / V)^(p-1)|
  double barycenter_q_norm = 0.0;  // || d(A^T eta) / d mu ||_q
};

struct DualityCertificate {
  double p = 2.0;
  DensityField rho;
  CurveMeasure eta;
  double value = 0.0;       // V = ||rho||_p
  double dual_value = 0.0;  // D = sum eta(gamma) b(gamma)
  double mod = 0.0;         // V^p
  double mass_bound = 0.0;  // M = V / min positive b
  Residuals residuals;
  int iterations = 0;
  int oracle_calls = 0;
  bool converged = false;
};

struct AdmissibilityReport {
  double worst_slack = std::numeric_limits<double>::infinity();
  std::optional<Path> witness;
  bool pass = true;
};

// Worst constraint of the family under rho (oracle for pair modes, scan for
// explicit families).
inline AdmissibilityReport check_admissibility(const MetricGraph& g, const DensityField& rho,
                                               const ModulusProblem& prob, double tol) {
  prob.validate(g);
  require_field_size(g, rho.size());
  AdmissibilityReport rep;
  if (prob.mode() == ModulusProblem::Mode::Explicit) {
    for (const auto& bp : prob.family()) {
      if (bp.bound <= 0.0) continue;
      const double slack = curve_integral(g, rho, bp.path) - bp.bound;
      if (slack < rep.worst_slack) rep.worst_slack = slack, rep.witness = bp.path;
    }
  } else if (auto v = most_violated(g, rho, prob.pair_bound())) {
    rep.worst_slack = v->slack;
    rep.witness = v->path;
  }
  rep.pass = rep.worst_slack >= -tol;
  return rep;
}

// Recomputes V, D, M and all residuals from rho and eta alone.
inline void recompute(const MetricGraph& g, const ModulusProblem& prob, DualityCertificate& cert) {
  const double p = prob.p();
  const double q = prob.q();
  cert.p = p;
  require_field_size(g, cert.rho.size());
  cert.value = lp_norm(g, cert.rho.values(), p);
  cert.mod = std::pow(cert.value, p);
  cert.dual_value = 0.0;
  for (const auto& wp : cert.eta) cert.dual_value += wp.mass * prob.bound(wp.path);

  Residuals r;
  r.gap = std::abs(cert.value - cert.dual_value);
  const auto adm = check_admissibility(g, cert.rho, prob, 0.0);
  r.violation = std::isfinite(adm.worst_slack) ? std::max(0.0, -adm.worst_slack) : 0.0;
  for (const auto& wp : cert.eta) {
    if (!(wp.mass > 0.0)) continue;
    const double b = prob.bound(wp.path);
    r.slackness = std::max(r.slackness, std::abs(curve_integral(g, cert.rho, wp.path) - b) / (1.0 + b));
  }
  const EdgeMeasure at = transpose_measure(g, cert.eta);
  double qsum = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const double mu = g.edge(e).measure;
    const double dens = at[e] / mu;
    qsum += mu * std::pow(dens, q);
    const double target = cert.value > 0.0 ? std::pow(cert.rho[e] / cert.value, p - 1.0) : 0.0;
    r.density = std::max(r.density, std::abs(dens - target));
  }
  r.barycenter_q_norm = std::pow(qsum, 1.0 / q);
  cert.residuals = r;
  const double bmin = prob.min_positive_bound(g);
  cert.mass_bound = std::isfinite(bmin) ? cert.value / bmin : 0.0;
}

namespace detail {

// Dual coordinate ascent over an active path set. rho is recovered from the
// multipliers by rho(e) = (l(e) sum_{gamma ∋ e} lambda_gamma / (p mu(e)))^(1/(p-1)).
class DualAscent {
 public:
  static constexpr int kMaxNewtonPaths = 1500;

  struct Active {
    Path path;
    double bound;
    double lambda = 0.0;
    int idle_rounds = 0;
  };

  DualAscent(const MetricGraph& g, double p)
      : g_(g), p_(p), r_(1.0 / (p - 1.0)), load_(g.num_edges(), 0.0), coef_(g.num_edges()) {
    for (int e = 0; e < g.num_edges(); ++e)
      coef_[e] = g.edge(e).length / (p * g.edge(e).measure);
  }

  bool add(const Path& path, double bound) {
    Path c = path.canonical();
    if (!keys_.insert(c.edges()).second) return false;
    active_.push_back({std::move(c), bound});
    return true;
  }

  bool contains(const Path& path) const { return keys_.count(path.canonical().edges()) > 0; }
  const std::vector<Active>& active() const { return active_; }

  double rho_at(int e) const { return load_[e] > 0.0 ? std::pow(coef_[e] * load_[e], r_) : 0.0; }

  DensityField rho() const {
    std::vector<double> v(g_.num_edges());
    for (int e = 0; e < g_.num_edges(); ++e) v[e] = rho_at(e);
    return DensityField(std::move(v));
  }

  double integral(const Active& a) const {
    double s = 0.0;
    for (int e : a.path.edges()) s += g_.edge(e).length * rho_at(e);
    return s;
  }

  // Exact maximization in lambda_k: solve integral = bound, or lambda_k = 0
  // if the path is satisfied without it. Returns |change|.
  double update(std::size_t k) {
    Active& a = active_[k];
    const auto& edges = a.path.edges();
    base_.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
      base_[i] = std::max(0.0, load_[edges[i]] - a.lambda);

    auto phi = [&](double t, double* slope) {
      double s = 0.0;
      double ds = 0.0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const int e = edges[i];
        const double x = coef_[e] * (base_[i] + t);
        if (x <= 0.0) continue;
        const double v = std::pow(x, r_);
        s += g_.edge(e).length * v;
        if (slope) ds += g_.edge(e).length * r_ * v / (base_[i] + t);
      }
      if (slope) *slope = ds;
      return s;
    };

    const double b = a.bound;
    double next = 0.0;
    if (phi(0.0, nullptr) < b) {
      double lo = 0.0;
      double hi = std::max(a.lambda, 1e-300);
      // Grow the bracket until it overshoots.
      while (phi(hi, nullptr) < b) {
        lo = hi;
        hi = hi < 1e-200 ? 1e-12 : 2.0 * hi;
        if (!std::isfinite(hi)) throw std::runtime_error("multiplier bracket diverged");
      }
      // Bisection safeguarded by Newton steps.
      double t = a.lambda > lo && a.lambda < hi ? a.lambda : 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        double slope = 0.0;
        const double val = phi(t, &slope);
        const double res = val - b;
        if (std::abs(res) <= 1e-12 * (1.0 + b)) break;
        (res < 0.0 ? lo : hi) = t;
        if (hi - lo <= 1e-14 || hi - lo <= 1e-15 * hi) break;
        double nt = slope > 0.0 ? t - res / slope : 0.5 * (lo + hi);
        if (!(nt > lo && nt < hi)) nt = 0.5 * (lo + hi);
        t = nt;
      }
      next = t;
    }
    const double delta = next - a.lambda;
    if (delta != 0.0)
      for (std::size_t i = 0; i < edges.size(); ++i) load_[edges[i]] = base_[i] + next;
    a.lambda = next;
    return std::abs(delta);
  }

  void sweep() {
    for (std::size_t k = 0; k < active_.size(); ++k) update(k);
  }

  // Dual objective sum lambda b - (p - 1) sum mu rho^p, concave in lambda.
  double objective() const {
    double s = 0.0;
    for (const auto& a : active_) s += a.lambda * a.bound;
    for (int e = 0; e < g_.num_edges(); ++e)
      if (load_[e] > 0.0) s -= (p_ - 1.0) * g_.edge(e).measure * std::pow(rho_at(e), p_);
    return s;
  }

  // Projected Newton step over the positive multipliers. The dual Hessian is
  // -A W A^T with W(e) = l r rho / S, S the edge load. Coordinate sweeps
  // decide which paths enter; this step removes the slow linear tail they
  // have when paths overlap. Returns whether a step was taken.
  bool newton_step() {
    std::vector<int> free;
    for (std::size_t k = 0; k < active_.size(); ++k)
      if (active_[k].lambda > 0.0) free.push_back(static_cast<int>(k));
    const int n = static_cast<int>(free.size());
    if (n < 2) return false;

    if (n > kMaxNewtonPaths) return false;

    Eigen::VectorXd grad(n);
    users_.resize(g_.num_edges());
    touched_.clear();
    for (int i = 0; i < n; ++i) {
      const Active& a = active_[free[i]];
      grad[i] = a.bound - integral(a);
      for (int e : a.path.edges()) {
        if (users_[e].empty()) touched_.push_back(e);
        users_[e].push_back(i);
      }
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int e : touched_) {
      const double w = g_.edge(e).length * r_ * rho_at(e) / load_[e];
      for (int j : users_[e])
        for (int i : users_[e]) trip.emplace_back(i, j, w);
      users_[e].clear();
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, m.coeff(i, i));
    // Path sets on grids are often linearly dependent, so M is singular and
    // the objective is linear along its null space; a plain ridge solve would
    // amplify those components by 1 / ridge. The filtered step
    // (M + d I)^-1 M (M + d I)^-1 grad is Newton on the range of M and zero on
    // its null space, which the coordinate sweeps handle.
    Eigen::SparseMatrix<double> shifted = m;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-10 * scale;
    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd half = ldlt.solve(grad);
    const Eigen::VectorXd d = ldlt.solve(m * half);
    if (!d.allFinite()) return false;

    std::vector<double> start(n);
    for (int i = 0; i < n; ++i) start[i] = active_[free[i]].lambda;
    const double f0 = objective();
    const double k0 = kkt_residual();
    const double noise = 1e-13 * (1.0 + std::abs(f0));
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      for (int i = 0; i < n; ++i) active_[free[i]].lambda = std::max(0.0, start[i] + t * d[i]);
      rebuild_load();
      const double f1 = objective();
      if (f1 > f0 + noise || (f1 >= f0 - noise && kkt_residual() < k0)) return true;
    }
    for (int i = 0; i < n; ++i) active_[free[i]].lambda = start[i];
    rebuild_load();
    return false;
  }

  void rebuild_load() {
    std::fill(load_.begin(), load_.end(), 0.0);
    for (const auto& a : active_)
      if (a.lambda > 0.0)
        for (int e : a.path.edges()) load_[e] += a.lambda;
  }

  // Max relative KKT residual over the active set.
  double kkt_residual() const {
    double m = 0.0;
    for (const auto& a : active_) {
      const double gap = a.bound - integral(a);
      const double res = a.lambda > 0.0 ? std::abs(gap) : std::max(0.0, gap);
      m = std::max(m, res / (1.0 + a.bound));
    }
    return m;
  }

  double value() const { return lp_norm(g_, rho().values(), p_); }

  // sum lambda b / (p V^(p-1)).
  double dual_value(double v) const {
    if (v <= 0.0) return 0.0;
    double s = 0.0;
    for (const auto& a : active_) s += a.lambda * a.bound;
    return s / (p_ * std::pow(v, p_ - 1.0));
  }

  void prune(double threshold, int rounds, const Path* keep) {
    std::vector<Active> kept;
    for (auto& a : active_) {
      a.idle_rounds = a.lambda < threshold ? a.idle_rounds + 1 : 0;
      if (a.idle_rounds >= rounds && !(keep && a.path.edges() == keep->canonical().edges())) {
        keys_.erase(a.path.edges());
        for (int e : a.path.edges()) load_[e] = std::max(0.0, load_[e] - a.lambda);
        continue;
      }
      kept.push_back(std::move(a));
    }
    active_ = std::move(kept);
  }

  CurveMeasure measure(double v) const {
    CurveMeasure eta;
    if (v <= 0.0) return eta;
    const double scale = 1.0 / (p_ * std::pow(v, p_ - 1.0));
    for (const auto& a : active_)
      if (a.lambda > 0.0) eta.push_back({a.path, a.lambda * scale});
    return eta;
  }

 private:
  const MetricGraph& g_;
  double p_;
  double r_;
  std::vector<double> load_;
  std::vector<double> coef_;
  std::vector<Active> active_;
  std::set<std::vector<int>> keys_;
  std::vector<double> base_;
  std::vector<std::vector<int>> users_;  // newton_step scratch: edge -> free positions
  std::vector<int> touched_;
};

inline DualityCertificate zero_certificate(const MetricGraph& g, const ModulusProblem& prob) {
  DualityCertificate cert;
  cert.rho = DensityField(g.num_edges(), 0.0);
  cert.converged = true;
  recompute(g, prob, cert);
  return cert;
}

// Runs sweeps until the active-set KKT residual and the gap meet target.
inline int inner_solve(DualAscent& asc, double target, int max_sweeps) {
  int sweeps = 0;
  while (sweeps < max_sweeps) {
    asc.sweep();
    ++sweeps;
    if (asc.kkt_residual() > target) asc.newton_step();
    if (asc.kkt_residual() <= target) {
      const double v = asc.value();
      if (std::abs(v - asc.dual_value(v)) <= target * (1.0 + v)) break;
    }
  }
  return sweeps;
}

}  // namespace detail

struct ModulusOptions {
  double tol = 1e-8;
  int max_iter = 10000;       // outer cutting-plane rounds
  int max_inner_sweeps = 20000;
  unsigned threads = 0;       // separation fan-out; 0 = hardware
  bool batch_cuts = true;     // false: one cut per round
  // Called after each separation with (round, active paths, inner sweeps, min slack).
  std::function<void(int, std::size_t, int, double)> observer;
};

// Cutting planes over the dual ascent. Each round every boundary source
// proposes its most violated path; proposals are taken in order of slack and
// kept when edge-disjoint from those already taken this round (the most
// violated path always enters). Stops when min slack >= -tol (1 + max b) and
// the gap <= tol (1 + V). eta* = lambda / (p V^(p-1)).
inline DualityCertificate solve_modulus(const MetricGraph& g, const ModulusProblem& prob,
                                        const ModulusOptions& opt = {}) {
  prob.validate(g);
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double bmax = prob.max_bound(g);
  if (bmax <= 0.0) return detail::zero_certificate(g, prob);
  const double cut_level = -opt.tol * (1.0 + bmax);

  const bool expl = prob.mode() == ModulusProblem::Mode::Explicit;
  const PairBound pb = expl ? PairBound{} : prob.pair_bound();

  // Violated constraints under rho, most violated first.
  auto separate = [&](const DensityField& rho, double& min_slack) {
    std::vector<Violation> out;
    min_slack = std::numeric_limits<double>::infinity();
    if (expl) {
      std::optional<Violation> best;
      for (const auto& bp : prob.family()) {
        if (bp.bound <= 0.0) continue;
        const double slack = curve_integral(g, rho, bp.path) - bp.bound;
        if (!best || slack < best->slack) best = Violation{bp.path, slack, bp.bound};
      }
      if (best) {
        min_slack = best->slack;
        if (best->slack < cut_level) out.push_back(std::move(*best));
      }
      return out;
    }
    const BoundarySearch search(g, edge_weights(g, rho), opt.threads);
    auto cuts = search.cuts(pb);
    std::sort(cuts.begin(), cuts.end(), cut_before);
    if (!cuts.empty()) min_slack = cuts.front().slack;
    for (const auto& c : cuts) {
      if (c.slack >= cut_level) break;
      out.push_back(search.realize(c));
      if (!opt.batch_cuts) break;
    }
    return out;
  };

  detail::DualAscent asc(g, prob.p());
  DualityCertificate cert;
  double inner_target = 0.1 * opt.tol;
  bool converged = false;
  int round = 0;
  std::vector<char> taken(g.num_edges(), 0);
  for (; round < opt.max_iter; ++round) {
    const int sweeps = detail::inner_solve(asc, inner_target, opt.max_inner_sweeps);
    const DensityField rho = asc.rho();
    double min_slack = 0.0;
    const auto cuts = separate(rho, min_slack);
    ++cert.oracle_calls;
    if (opt.observer) opt.observer(round, asc.active().size(), sweeps, min_slack);
    const double v = asc.value();
    const bool feasible = cuts.empty();
    const bool tight = std::abs(v - asc.dual_value(v)) <= opt.tol * (1.0 + v);
    if (feasible && tight) {
      converged = true;
      break;
    }
    bool added = false;
    std::fill(taken.begin(), taken.end(), 0);
    for (const auto& cut : cuts) {
      const auto& edges = cut.path.edges();
      if (std::any_of(edges.begin(), edges.end(), [&](int e) { return taken[e] != 0; })) continue;
      if (asc.contains(cut.path)) continue;
      asc.add(cut.path, cut.bound);
      added = true;
      for (int e : edges) taken[e] = 1;
    }
    if (!feasible && !added) {
      // Every proposal is already active: the inner solve was too loose.
      inner_target = std::max(inner_target * 0.1, 1e-15);
    }
    asc.prune(1e-12, 3, feasible ? nullptr : &cuts.front().path);
  }

  cert.rho = asc.rho();
  cert.eta = asc.measure(lp_norm(g, cert.rho.values(), prob.p()));
  cert.iterations = round;
  cert.converged = converged;
  recompute(g, prob, cert);
  return cert;
}

inline constexpr int kBruteForceNodeLimit = 14;

// Ground truth on tiny graphs: every simple boundary path (or the explicit
// family) enters the ascent at once; gap driven to 1e-10 (1 + V).
inline DualityCertificate solve_modulus_bruteforce(const MetricGraph& g, const ModulusProblem& prob,
                                                   int max_sweeps = 1'000'000) {
  prob.validate(g);
  if (g.num_nodes() > kBruteForceNodeLimit)
    throw std::invalid_argument(detail::concat("brute force limited to ", kBruteForceNodeLimit,
                                               " nodes, graph has ", g.num_nodes()));
  std::vector<BoundedPath> family;
  if (prob.mode() == ModulusProblem::Mode::Explicit) {
    family = prob.family();
  } else {
    for (Path& path : enumerate_boundary_paths(g, prob.pair_bound())) {
      const double b = prob.bound(path);
      family.push_back({std::move(path), b});
    }
  }
  detail::DualAscent asc(g, prob.p());
  for (const auto& bp : family)
    if (bp.bound > 0.0) asc.add(bp.path, bp.bound);
  if (asc.active().empty()) return detail::zero_certificate(g, prob);

  const double target = 1e-10;
  int sweeps = 0;
  bool converged = false;
  while (sweeps < max_sweeps) {
    asc.sweep();
    ++sweeps;
    if (asc.kkt_residual() <= 0.1 * target) {
      const double v = asc.value();
      if (std::abs(v - asc.dual_value(v)) <= target * (1.0 + v)) {
        converged = true;
        break;
      }
    }
  }
  DualityCertificate cert;
  cert.rho = asc.rho();
  cert.eta = asc.measure(lp_norm(g, cert.rho.values(), prob.p()));
  cert.iterations = sweeps;
  cert.oracle_calls = 0;
  cert.converged = converged;
  recompute(g, prob, cert);
  return cert;
}

}  // namespace pmod
