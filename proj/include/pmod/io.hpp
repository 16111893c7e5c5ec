#pragma once

// JSON interchange for graphs, node functions, certificates and reports;
// CSV export for node functions and grid fields.

#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pmod/duality.hpp"
#include "pmod/modulus.hpp"
#include "pmod/pharmonic.hpp"
#include "pmod/sheaf.hpp"
#include "pmod/space.hpp"

namespace pmod::io {

using json = nlohmann::ordered_json;

// Two-space indentation and shortest round-trip decimals, so save -> load ->
// save reproduces the bytes.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

namespace detail {

template <class T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph

inline json to_json(const MetricGraph& g) {
  json nodes = json::array();
  for (int i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    nodes.push_back({{"id", i}, {"x", n.x}, {"y", n.y}, {"boundary", n.boundary}});
  }
  json edges = json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}, {"measure", e.measure}});
  json meta = {{"domain", g.domain()}, {"h", g.spacing()}};
  json j = {{"nodes", nodes}, {"edges", edges}, {"meta", meta}};
  if (!g.cells().empty()) {
    j["cells"] = g.cells();
    if (!g.regions().empty()) {
      json regions = json::object();
      for (const auto& [name, mask] : g.regions()) {
        std::vector<int> ids;
        for (std::size_t c = 0; c < mask.size(); ++c)
          if (mask[c]) ids.push_back(static_cast<int>(c));
        regions[name] = ids;
      }
      j["regions"] = regions;
    }
  }
  return j;
}

inline MetricGraph graph_from_json(const json& j) {
  const auto jn = detail::get<json>(j, "nodes");
  const auto je = detail::get<json>(j, "edges");
  if (!jn.is_array() || !je.is_array()) throw std::invalid_argument("\"nodes\" and \"edges\" must be arrays");
  std::vector<Node> nodes(jn.size());
  std::vector<char> seen(jn.size(), 0);
  for (const auto& n : jn) {
    const int id = detail::get<int>(n, "id");
    if (id < 0 || id >= static_cast<int>(nodes.size()) || seen[id])
      throw std::invalid_argument("node ids must be dense and unique");
    seen[id] = 1;
    nodes[id] = {detail::get<double>(n, "x"), detail::get<double>(n, "y"), detail::get<bool>(n, "boundary")};
  }
  std::vector<Edge> edges;
  for (const auto& e : je)
    edges.push_back({detail::get<int>(e, "u"), detail::get<int>(e, "v"), detail::get<double>(e, "length"),
                     detail::get<double>(e, "measure")});
  std::string domain;
  double h = 0.0;
  if (j.contains("meta")) {
    const auto& meta = j["meta"];
    if (meta.contains("domain")) domain = detail::get<std::string>(meta, "domain");
    if (meta.contains("h")) h = detail::get<double>(meta, "h");
  }
  std::vector<Cell> cells;
  if (j.contains("cells")) cells = detail::get<std::vector<Cell>>(j, "cells");
  std::map<std::string, std::vector<bool>> regions;
  if (j.contains("regions"))
    for (const auto& [name, ids] : j["regions"].items()) {
      std::vector<bool> mask(cells.size(), false);
      for (int c : ids.get<std::vector<int>>()) mask.at(c) = true;
      regions[name] = std::move(mask);
    }
  return MetricGraph(std::move(nodes), std::move(edges), std::move(domain), h, std::move(cells),
                     std::move(regions));
}

// ---------------------------------------------------------------------------
// Node functions

inline json to_json(const NodeFunction& f) {
  json j = json::object();
  for (std::size_t i = 0; i < f.size(); ++i) j[std::to_string(i)] = f[i];
  return j;
}

inline NodeFunction node_function_from_json(const json& j, std::size_t n) {
  if (!j.is_object()) throw std::invalid_argument("node function must be an object of id -> value");
  std::vector<double> v(n, 0.0);
  std::vector<char> seen(n, 0);
  for (const auto& [key, val] : j.items()) {
    std::size_t pos = 0;
    int id = -1;
    try {
      id = std::stoi(key, &pos);
    } catch (const std::exception&) {
    }
    if (pos != key.size() || id < 0 || static_cast<std::size_t>(id) >= n)
      throw std::invalid_argument("bad node id \"" + key + "\"");
    if (!val.is_number()) throw std::invalid_argument("node values must be numbers");
    v[id] = val.get<double>();
    seen[id] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) throw std::invalid_argument("node function misses node " + std::to_string(i));
  return NodeFunction(std::move(v));
}

inline std::string to_csv(const MetricGraph& g, const NodeFunction& f) {
  require_node_size(g, f.size());
  std::ostringstream os;
  os.precision(17);
  os << "id,x,y,value\n";
  for (int i = 0; i < g.num_nodes(); ++i)
    os << i << ',' << g.node(i).x << ',' << g.node(i).y << ',' << f[i] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Paths, problems, certificates

inline json to_json(const Path& p) { return {{"nodes", p.nodes()}, {"edges", p.edges()}}; }

inline Path path_from_json(const MetricGraph& g, const json& j) {
  const auto nodes = detail::get<std::vector<int>>(j, "nodes");
  if (j.contains("edges")) {
    if (nodes.empty()) throw std::invalid_argument("path needs nodes");
    Path p = Path::from_edges(g, nodes.front(), detail::get<std::vector<int>>(j, "edges"));
    if (p.nodes() != nodes) throw std::invalid_argument("path nodes and edges disagree");
    return p;
  }
  return Path::from_nodes(g, nodes);
}

inline json to_json(const ModulusProblem& prob) {
  json j = {{"p", prob.p()}};
  switch (prob.mode()) {
    case ModulusProblem::Mode::Constant:
      j["mode"] = "constant";
      j["c"] = prob.constant_bound();
      break;
    case ModulusProblem::Mode::Endpoint:
      j["mode"] = "endpoint";
      j["f"] = to_json(prob.boundary_function());
      break;
    case ModulusProblem::Mode::Explicit: {
      j["mode"] = "explicit";
      json fam = json::array();
      for (const auto& bp : prob.family()) {
        json e = to_json(bp.path);
        e["bound"] = bp.bound;
        fam.push_back(e);
      }
      j["family"] = fam;
      break;
    }
  }
  return j;
}

inline ModulusProblem problem_from_json(const MetricGraph& g, const json& j) {
  const double p = detail::get<double>(j, "p");
  const auto mode = detail::get<std::string>(j, "mode");
  if (mode == "constant") return ModulusProblem::constant(p, detail::get<double>(j, "c"));
  if (mode == "endpoint")
    return ModulusProblem::endpoint(p, node_function_from_json(detail::get<json>(j, "f"), g.num_nodes()));
  if (mode == "explicit") {
    std::vector<BoundedPath> fam;
    for (const auto& e : detail::get<json>(j, "family"))
      fam.push_back({path_from_json(g, e), detail::get<double>(e, "bound")});
    return ModulusProblem::explicit_family(p, std::move(fam));
  }
  throw std::invalid_argument("unknown problem mode \"" + mode + "\"");
}

inline json to_json(const Residuals& r) {
  return {{"gap", r.gap},
          {"violation", r.violation},
          {"slackness", r.slackness},
          {"density", r.density},
          {"barycenter_q_norm", r.barycenter_q_norm}};
}

inline json to_json(const DualityCertificate& c, const ModulusProblem* prob = nullptr) {
  json rho = json::object();
  for (std::size_t e = 0; e < c.rho.size(); ++e) rho[std::to_string(e)] = c.rho[e];
  json eta = json::array();
  for (const auto& wp : c.eta) {
    json e = to_json(wp.path);
    e["mass"] = wp.mass;
    eta.push_back(e);
  }
  json j = {{"p", c.p},
            {"value", c.value},
            {"dual_value", c.dual_value},
            {"mod", c.mod},
            {"mass_bound", c.mass_bound},
            {"rho", rho},
            {"eta", eta},
            {"residuals", to_json(c.residuals)},
            {"converged", c.converged},
            {"iterations", c.iterations},
            {"oracle_calls", c.oracle_calls}};
  if (prob) j["problem"] = to_json(*prob);
  return j;
}

// Reads rho, eta and the reported numbers verbatim; verification recomputes
// everything, so nothing here is trusted.
inline DualityCertificate certificate_from_json(const MetricGraph& g, const json& j) {
  DualityCertificate c;
  c.p = detail::get<double>(j, "p");
  const auto jr = detail::get<json>(j, "rho");
  if (!jr.is_object()) throw std::invalid_argument("\"rho\" must be an object of edge id -> value");
  std::vector<double> rho(g.num_edges(), 0.0);
  for (const auto& [key, val] : jr.items()) {
    const int e = std::stoi(key);
    if (e < 0 || e >= g.num_edges()) throw std::invalid_argument("rho names a missing edge " + key);
    rho[e] = val.get<double>();
  }
  c.rho = DensityField(std::move(rho));
  for (const auto& e : detail::get<json>(j, "eta"))
    c.eta.push_back({path_from_json(g, e), detail::get<double>(e, "mass")});
  validate(c.eta);
  c.value = j.value("value", 0.0);
  c.dual_value = j.value("dual_value", 0.0);
  c.mod = j.value("mod", 0.0);
  c.mass_bound = j.value("mass_bound", 0.0);
  if (j.contains("residuals")) {
    const auto& r = j["residuals"];
    c.residuals = {r.value("gap", 0.0), r.value("violation", 0.0), r.value("slackness", 0.0),
                   r.value("density", 0.0), r.value("barycenter_q_norm", 0.0)};
  }
  c.converged = j.value("converged", false);
  c.iterations = j.value("iterations", 0);
  c.oracle_calls = j.value("oracle_calls", 0);
  return c;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const VerificationReport& rep) {
  json j = json::object();
  for (const auto& c : rep.checks) {
    json e = {{"pass", c.pass}, {"residual", c.residual}, {"tolerance", c.tolerance}};
    if (c.witness) e["witness"] = to_json(*c.witness);
    if (c.witness_edge) e["witness_edge"] = *c.witness_edge;
    j[c.name] = e;
  }
  return j;
}

inline std::string to_text(const VerificationReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual " << c.residual << "  tolerance "
       << c.tolerance;
    if (c.witness) {
      os << "  witness";
      for (int v : c.witness->nodes()) os << ' ' << v;
    }
    if (c.witness_edge) os << "  edge " << *c.witness_edge;
    os << '\n';
  }
  return os.str();
}

inline json to_json(const TheoremOneReport& r) {
  return {{"p", r.p},
          {"energy_norm", r.energy_norm},
          {"value", r.value},
          {"dual_value", r.dual_value},
          {"pairing", r.pairing},
          {"relative_error", r.relative_error},
          {"support_mass", r.support_mass},
          {"gradient_mass", r.gradient_mass},
          {"coverage_residual", r.coverage_residual},
          {"uncovered_edges", r.uncovered},
          {"dirichlet_converged", r.dirichlet_converged},
          {"modulus_converged", r.modulus_converged},
          {"iterations", r.certificate.iterations},
          {"checks", to_json(r.checks)},
          {"pass", r.pass()}};
}

inline std::string to_text(const TheoremOneReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "p                 " << r.p << '\n'
     << "||g_u||_p         " << r.energy_norm << '\n'
     << "V = ||rho*||_p    " << r.value << '\n'
     << "dual value        " << r.dual_value << '\n'
     << "pairing with |du| " << r.pairing << '\n'
     << "g_u vs rho*       " << r.relative_error << " (relative p-norm)\n"
     << "eta* mass         " << r.support_mass << '\n'
     << "converged         " << (r.dirichlet_converged && r.modulus_converged ? "yes" : "no") << '\n'
     << to_text(r.checks) << (r.pass() ? "all checks pass\n" : "some checks fail\n");
  return os.str();
}

inline json to_json(const SheafReport& r) {
  json regions = json::object();
  for (const auto& rr : r.regions)
    regions[region_name(rr.region)] = {{"energy_u", rr.energy_u},
                                       {"minimized", rr.minimized.energy},
                                       {"iterations", rr.minimized.iterations},
                                       {"converged", rr.minimized.converged}};
  json derivs = json::array();
  for (const auto& d : r.derivatives) derivs.push_back({{"p", d.p}, {"slope", d.slope}, {"exact", d.exact}});
  return {{"p", r.p},
          {"h", r.h},
          {"eps", r.eps},
          {"energy_u_eps", r.energy_u_eps},
          {"closed_form", r.closed_form},
          {"regions", regions},
          {"derivatives", derivs},
          {"margin", r.margin},
          {"tolerance", r.tolerance},
          {"sheaf_fails", r.sheaf_fails}};
}

inline std::string to_text(const SheafReport& r) {
  std::ostringstream os;
  os.precision(8);
  os << "p = " << r.p << ", h = " << r.h << ", eps = " << r.eps << '\n'
     << "E(u + eps phi) on union: numerical " << r.energy_u_eps << ", closed form " << r.closed_form << '\n';
  for (const auto& rr : r.regions)
    os << region_name(rr.region) << ": E(u) = " << rr.energy_u << ", minimized " << rr.minimized.energy << '\n';
  for (const auto& d : r.derivatives)
    os << "dE/deps at 0, p = " << d.p << ": " << d.slope << " (exact " << d.exact << ")\n";
  os << (r.sheaf_fails ? "u minimizes on each rectangle but not on their union\n"
                       : "no sheaf failure detected at this resolution\n");
  return os.str();
}

// x, y, value rows for the nodes in the closure of the union.
inline std::string grid_csv(const CellGrid& grid, const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,value\n";
  for (int j = 0; j < grid.nodes_per_side(); ++j)
    for (int i = 0; i < grid.nodes_per_side(); ++i)
      if (grid.x(i) >= 0.0 || grid.y(j) >= 0.0)
        os << grid.x(i) << ',' << grid.y(j) << ',' << v[grid.node(i, j)] << '\n';
  return os.str();
}

}  // namespace pmod::io
