#pragma once

// Checks on duality certificates, gradient curves of a potential, and the
// coverage identity between eta* and (rho* / V)^(p-1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pmod/modulus.hpp"
#include "pmod/pharmonic.hpp"
#include "pmod/space.hpp"

namespace pmod {

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::optional<Path> witness;
  std::optional<int> witness_edge;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  const CheckResult& at(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("no check named " + name);
  }

  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

// Recomputes every quantity from (rho*, eta*) and the problem. Failures are
// reported, never thrown; malformed certificates (wrong sizes, paths off the
// graph) fail a "structure" check.
inline VerificationReport verify_certificate(const MetricGraph& g, const ModulusProblem& prob,
                                             const DualityCertificate& cert, double tol) {
  VerificationReport rep;
  const double p = prob.p();
  const double q = prob.q();

  CheckResult structure{"structure", true, 0.0, 0.0};
  try {
    prob.validate(g);
    require_field_size(g, cert.rho.size());
    validate(cert.eta);
    for (const auto& wp : cert.eta) require_on_graph(g, wp.path);
    if (std::abs(cert.p - p) > 0.0) throw std::invalid_argument("certificate exponent differs from problem");
  } catch (const std::exception&) {
    structure.pass = false;
    structure.residual = 1.0;
  }
  rep.checks.push_back(structure);
  if (!structure.pass) return rep;

  const double v = lp_norm(g, cert.rho.values(), p);

  CheckResult adm{"admissibility", true, 0.0, tol};
  const auto worst = check_admissibility(g, cert.rho, prob, tol);
  if (std::isfinite(worst.worst_slack)) adm.residual = std::max(0.0, -worst.worst_slack);
  adm.pass = worst.pass;
  if (!adm.pass) adm.witness = worst.witness;
  rep.checks.push_back(adm);

  const EdgeMeasure at = transpose_measure(g, cert.eta);
  double qsum = 0.0;
  CheckResult dens{"density_identity", true, 0.0, tol};
  for (int e = 0; e < g.num_edges(); ++e) {
    const double mu = g.edge(e).measure;
    const double d = at[e] / mu;
    qsum += mu * std::pow(d, q);
    const double target = v > 0.0 ? std::pow(cert.rho[e] / v, p - 1.0) : 0.0;
    const double r = std::abs(d - target);
    if (r > dens.residual) dens.residual = r, dens.witness_edge = e;
  }
  dens.pass = dens.residual <= tol;
  if (dens.pass) dens.witness_edge.reset();

  CheckResult bary{"barycenter", true, std::pow(qsum, 1.0 / q), 1.0 + tol};
  bary.pass = bary.residual <= bary.tolerance;
  rep.checks.push_back(bary);

  double dual = 0.0;
  for (const auto& wp : cert.eta) dual += wp.mass * prob.bound(wp.path);
  CheckResult gap{"strong_duality", true, std::abs(v - dual), tol * (1.0 + v)};
  gap.pass = gap.residual <= gap.tolerance;
  rep.checks.push_back(gap);

  // Normalized by (1 + b) so that one tolerance covers every path.
  CheckResult slack{"complementary_slackness", true, 0.0, tol};
  for (const auto& wp : cert.eta) {
    if (!(wp.mass > 0.0)) continue;
    const double b = prob.bound(wp.path);
    const double r = std::abs(curve_integral(g, cert.rho, wp.path) - b) / (1.0 + b);
    if (r > slack.residual) slack.residual = r, slack.witness = wp.path;
  }
  slack.pass = slack.residual <= tol;
  if (slack.pass) slack.witness.reset();
  rep.checks.push_back(slack);
  rep.checks.push_back(dens);
  return rep;
}

// Largest |(u(start) - u(end)) - integral of g_u| over the prefixes of a path,
// measured against the total drop: on a gradient curve every prefix is tight.
inline double prefix_residual(const MetricGraph& g, const NodeFunction& u, const DensityField& gu,
                              const Path& path) {
  const auto& nodes = path.nodes();
  const auto& edges = path.edges();
  double integral = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    integral += gu[edges[i]] * g.edge(edges[i]).length;
    worst = std::max(worst, integral - std::abs(u[nodes[i + 1]] - u[nodes[0]]));
  }
  return worst;
}

struct GradientCurves {
  CurveMeasure curves;          // support paths that are gradient curves of u
  double support_mass = 0.0;    // total mass of eta*
  double curve_mass = 0.0;      // mass kept
  double prefix_residual = 0.0; // worst prefix defect among kept curves
};

// Support of eta* filtered to paths with |u(start) - u(end)| >= integral of
// g_u - tol, each kept path also checked prefix by prefix.
inline GradientCurves extract_gradient_curves(const MetricGraph& g, const DualityCertificate& cert,
                                              const NodeFunction& u, double tol) {
  require_node_size(g, u.size());
  const DensityField gu = minimal_upper_gradient(g, u);
  GradientCurves out;
  for (const auto& wp : cert.eta) {
    if (!(wp.mass > 0.0)) continue;
    out.support_mass += wp.mass;
    const double drop = std::abs(u[wp.path.front()] - u[wp.path.back()]);
    if (drop < curve_integral(g, gu, wp.path) - tol) continue;
    out.curve_mass += wp.mass;
    out.prefix_residual = std::max(out.prefix_residual, prefix_residual(g, u, gu, wp.path));
    out.curves.push_back(wp);
  }
  return out;
}

struct Coverage {
  double lhs = 0.0;  // sum over paths of eta * (weighted length inside E)
  double rhs = 0.0;  // sum over E of weight * (rho / V)^(p-1) * measure
};

// Weighted form: weight[e] in [0, 1] is the share of edge e that lies in E.
inline Coverage coverage_identity(const MetricGraph& g, const DualityCertificate& cert,
                                  std::span<const double> weight) {
  require_field_size(g, weight.size());
  require_field_size(g, cert.rho.size());
  const double v = lp_norm(g, cert.rho.values(), cert.p);
  Coverage c;
  for (const auto& wp : cert.eta) {
    double len = 0.0;
    for (int e : wp.path.edges()) len += weight[e] * g.edge(e).length;
    c.lhs += wp.mass * len;
  }
  if (v > 0.0)
    for (int e = 0; e < g.num_edges(); ++e)
      if (weight[e] > 0.0)
        c.rhs += weight[e] * std::pow(cert.rho[e] / v, cert.p - 1.0) * g.edge(e).measure;
  return c;
}

inline Coverage coverage_identity(const MetricGraph& g, const DualityCertificate& cert,
                                  const std::vector<int>& edge_set) {
  std::vector<double> w(g.num_edges(), 0.0);
  for (int e : edge_set) w.at(e) = 1.0;
  return coverage_identity(g, cert, w);
}

// Share of each edge's measure carried by the cells selected by in_region,
// judged at the cell centre. Edge measures split evenly over adjacent cells.
inline std::vector<double> region_edge_weights(const MetricGraph& g,
                                               const std::function<bool(double, double)>& in_region) {
  if (g.cells().empty()) throw std::invalid_argument("graph carries no cells");
  std::vector<double> inside(g.num_edges(), 0.0);
  std::vector<double> total(g.num_edges(), 0.0);
  for (const Cell& c : g.cells()) {
    double cx = 0.0;
    double cy = 0.0;
    for (int v : c) cx += g.node(v).x / 4.0, cy += g.node(v).y / 4.0;
    const bool in = in_region(cx, cy);
    for (int k = 0; k < 4; ++k) {
      const auto e = g.edge_between(c[k], c[(k + 1) % 4]);
      if (!e) throw std::logic_error("cell side is not an edge");
      total[*e] += 1.0;
      if (in) inside[*e] += 1.0;
    }
  }
  for (int e = 0; e < g.num_edges(); ++e) inside[e] = total[e] > 0.0 ? inside[e] / total[e] : 0.0;
  return inside;
}

// Edges with rho*(e) > tol that no support path of eta* traverses.
inline std::vector<int> uncovered_edges(const MetricGraph& g, const DualityCertificate& cert,
                                        double tol) {
  std::vector<char> covered(g.num_edges(), 0);
  for (const auto& wp : cert.eta)
    if (wp.mass > 0.0)
      for (int e : wp.path.edges()) covered[e] = 1;
  std::vector<int> out;
  for (int e = 0; e < g.num_edges(); ++e)
    if (cert.rho[e] > tol && !covered[e]) out.push_back(e);
  return out;
}

struct TheoremOneOptions {
  double tol = 1e-6;
  // Relative tolerance for the continuum-facing identities (g_u vs rho*,
  // energy = pairing, support on gradient curves, coverage).
  double identity_tol = 1e-4;
  int coverage_sets = 100;
  std::uint64_t seed = 1;
  ModulusOptions modulus;
};

struct TheoremOneReport {
  double p = 2.0;
  double energy_norm = 0.0;     // ||g_u||_p
  double value = 0.0;           // V = ||rho*||_p
  double dual_value = 0.0;      // sum eta* b
  double pairing = 0.0;         // sum eta* |u(start) - u(end)|
  double relative_error = 0.0;  // ||g_u - rho*||_p / ||g_u||_p
  double support_mass = 0.0;
  double gradient_mass = 0.0;
  double coverage_residual = 0.0;  // worst |lhs - rhs| / (1 + rhs) over the random sets
  std::vector<int> uncovered;
  bool dirichlet_converged = false;
  bool modulus_converged = false;
  DirichletSolution dirichlet;
  DualityCertificate certificate;
  VerificationReport checks;

  bool pass() const { return dirichlet_converged && modulus_converged && checks.pass(); }
};

// End-to-end: Dirichlet solve, minimal upper gradient, modulus with endpoint
// bounds from f, certificate verification, and the identities tying them.
inline TheoremOneReport theorem_one_report(const MetricGraph& g, const NodeFunction& f, double p,
                                           const TheoremOneOptions& opt = {}) {
  TheoremOneReport rep;
  rep.p = p;
  rep.dirichlet = solve_dirichlet(g, f, p, std::min(1e-10, 0.01 * opt.tol));
  rep.dirichlet_converged = rep.dirichlet.converged;
  const NodeFunction& u = rep.dirichlet.u;
  const DensityField gu = minimal_upper_gradient(g, u);
  rep.energy_norm = lp_norm(g, gu.values(), p);

  const auto prob = ModulusProblem::endpoint(p, f);
  ModulusOptions mopt = opt.modulus;
  mopt.tol = opt.tol;
  rep.certificate = solve_modulus(g, prob, mopt);
  rep.modulus_converged = rep.certificate.converged;
  const auto& cert = rep.certificate;
  rep.value = cert.value;
  rep.dual_value = cert.dual_value;

  rep.checks = verify_certificate(g, prob, cert, 10.0 * opt.tol);

  std::vector<double> diff(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) diff[e] = gu[e] - cert.rho[e];
  const double dn = lp_norm(g, diff, p);
  rep.relative_error = rep.energy_norm > 0.0 ? dn / rep.energy_norm : dn;
  rep.checks.checks.push_back({"upper_gradient_equivalence", rep.relative_error <= opt.identity_tol,
                               rep.relative_error, opt.identity_tol});

  for (const auto& wp : cert.eta) rep.pairing += wp.mass * std::abs(u[wp.path.front()] - u[wp.path.back()]);
  const double energy_res = std::abs(rep.energy_norm - rep.pairing);
  const double energy_tol = opt.identity_tol * (1.0 + rep.energy_norm);
  rep.checks.checks.push_back({"energy_identity", energy_res <= energy_tol, energy_res, energy_tol});

  // A support path counts as a gradient curve when its drop in u matches the
  // g_u integral to identity_tol relative to the drop.
  CheckResult grad{"support_on_gradient_curves", true, 0.0, opt.identity_tol};
  {
    double kept = 0.0;
    double total = 0.0;
    double prefix = 0.0;
    for (const auto& wp : cert.eta) {
      if (!(wp.mass > 0.0)) continue;
      total += wp.mass;
      const double drop = std::abs(u[wp.path.front()] - u[wp.path.back()]);
      const double slack = opt.identity_tol * (1.0 + drop);
      if (drop < curve_integral(g, gu, wp.path) - slack) {
        if (!grad.witness) grad.witness = wp.path;
        continue;
      }
      kept += wp.mass;
      prefix = std::max(prefix, prefix_residual(g, u, gu, wp.path) / (1.0 + drop));
    }
    rep.support_mass = total;
    rep.gradient_mass = kept;
    grad.residual = std::max(total > 0.0 ? (total - kept) / total : 0.0, prefix);
    grad.pass = grad.residual <= grad.tolerance;
  }
  rep.checks.checks.push_back(grad);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CheckResult cov{"coverage_identity", true, 0.0, opt.identity_tol};
  for (int s = 0; s < opt.coverage_sets; ++s) {
    const double density = unit(rng);
    std::vector<double> w(g.num_edges(), 0.0);
    for (double& x : w) x = unit(rng) < density ? 1.0 : 0.0;
    const Coverage c = coverage_identity(g, cert, w);
    cov.residual = std::max(cov.residual, std::abs(c.lhs - c.rhs) / (1.0 + c.rhs));
  }
  rep.coverage_residual = cov.residual;
  cov.pass = cov.residual <= cov.tolerance;
  rep.checks.checks.push_back(cov);

  rep.uncovered = uncovered_edges(g, cert, opt.tol);
  CheckResult covered{"edge_coverage", rep.uncovered.empty(), static_cast<double>(rep.uncovered.size()), 0.0};
  if (!rep.uncovered.empty()) covered.witness_edge = rep.uncovered.front();
  rep.checks.checks.push_back(covered);
  return rep;
}

}  // namespace pmod
