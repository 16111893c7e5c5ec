#pragma once

// Command-line front end. JSON is the interchange format between
// subcommands; CSV and SVG are export only.
//
//   pmod domain --domain rectangle --a 2 --b 1 --grid-h 0.03125 > g.json
//   pmod modulus --graph g.json --bf x > cert.json
//   pmod verify --graph g.json --cert cert.json

#include <cmath>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pmod/duality.hpp"
#include "pmod/io.hpp"
#include "pmod/modulus.hpp"
#include "pmod/pharmonic.hpp"
#include "pmod/sheaf.hpp"
#include "pmod/space.hpp"
#include "pmod/svg.hpp"

namespace pmod::cli {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  // global
  double p = 2.0;
  std::optional<double> tol;
  int max_iter = 10000;
  std::optional<double> grid_h;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  // graph source
  std::string graph;
  std::string domain = "rectangle";
  double a = 1.0;
  double b = 1.0;
  int k = 1;
  // boundary data
  std::string bf = "x";
  std::string f_file;
  std::optional<double> constant;
  // verify / render / sheaf
  std::string cert;
  std::optional<double> eps;
  int width = 800;
  int height = 800;
  std::string colormap = "tworamp";
};

namespace detail {

inline std::string slurp(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return io::read_file(path);
}

inline bool grid_graph_source(const Settings& s, const MetricGraph& g) {
  return s.graph.empty() || !g.domain().empty();
}

inline MetricGraph load_graph(const Settings& s, std::istream& in) {
  if (!s.graph.empty()) return io::graph_from_json(io::parse(slurp(s.graph, in)));
  const double h = s.grid_h.value_or(s.domain == "lshape" ? 0.25 : 0.125);
  if (s.domain == "rectangle") return build_domain(DomainSpec::rectangle(s.a, s.b, h));
  if (s.domain == "comb") return build_domain(DomainSpec::comb(s.k, h));
  if (s.domain == "lshape") return build_domain(DomainSpec::lshape(h));
  throw UsageError("unknown domain \"" + s.domain + "\" (rectangle, comb, lshape)");
}

inline NodeFunction boundary_function(const Settings& s, const MetricGraph& g, std::istream& in) {
  if (!s.f_file.empty()) return io::node_function_from_json(io::parse(slurp(s.f_file, in)), g.num_nodes());
  if (s.bf == "x") return sample(g, [](double x, double) { return x; });
  if (s.bf == "y") return sample(g, [](double, double y) { return y; });
  if (s.bf == "x+y") return sample(g, [](double x, double y) { return x + y; });
  if (s.bf == "x-y") return sample(g, [](double x, double y) { return x - y; });
  if (s.bf == "u") return sample(g, [](double x, double y) { return eval_counterexample(x, y).u; });
  throw UsageError("unknown boundary function \"" + s.bf + "\" (x, y, x+y, x-y, u)");
}

inline ModulusProblem problem(const Settings& s, const MetricGraph& g, std::istream& in) {
  if (s.constant) return ModulusProblem::constant(s.p, *s.constant);
  return ModulusProblem::endpoint(s.p, boundary_function(s, g, in));
}

inline double tolerance(const Settings& s, bool grid) { return s.tol.value_or(grid ? 1e-6 : 1e-8); }

inline void require_format(const Settings& s, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (s.format == f) return;
  throw UsageError("format \"" + s.format + "\" is not available for this subcommand");
}

inline std::string certificate_text(const DualityCertificate& c) {
  std::ostringstream os;
  os.precision(12);
  os << "value       " << c.value << '\n'
     << "dual value  " << c.dual_value << '\n'
     << "mod         " << c.mod << '\n'
     << "eta mass    " << total_mass(c.eta) << " over " << c.eta.size() << " paths\n"
     << "mass bound  " << c.mass_bound << '\n'
     << "gap " << c.residuals.gap << ", violation " << c.residuals.violation << ", slackness "
     << c.residuals.slackness << ", density " << c.residuals.density << ", barycenter "
     << c.residuals.barycenter_q_norm << '\n'
     << "rounds " << c.iterations << ", converged " << (c.converged ? "yes" : "no") << '\n';
  return os.str();
}

}  // namespace detail

// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"p-modulus of boundary curve families, duality certificates and the l1-plane sheaf example", "pmod"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--p", s.p, "exponent p > 1")->capture_default_str();
  app.add_option("--tol", s.tol, "tolerance (default 1e-8 on plain graphs, 1e-6 on grids)");
  app.add_option("--max-iter", s.max_iter, "iteration limit")->capture_default_str();
  app.add_option("--grid-h", s.grid_h, "grid spacing");
  app.add_option("--out", s.out, "output file (default standard output)");
  app.add_option("--format", s.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();
  app.add_option("--seed", s.seed, "seed for randomized checks")->capture_default_str();

  auto graph_opts = [&](CLI::App* sub) {
    sub->add_option("--graph", s.graph, "graph JSON file ('-' for standard input)");
    sub->add_option("--domain", s.domain, "rectangle, comb or lshape")->capture_default_str();
    sub->add_option("--a", s.a, "rectangle width")->capture_default_str();
    sub->add_option("--b", s.b, "rectangle height")->capture_default_str();
    sub->add_option("--k", s.k, "comb bars")->capture_default_str();
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--bf", s.bf, "boundary function: x, y, x+y, x-y, u")->capture_default_str();
    sub->add_option("--f", s.f_file, "boundary function JSON file (node id -> value)");
  };

  auto* domain = app.add_subcommand("domain", "emit a grid domain as graph JSON");
  graph_opts(domain);
  auto* dirichlet = app.add_subcommand("dirichlet", "solve the p-Dirichlet problem");
  graph_opts(dirichlet);
  data_opts(dirichlet);
  auto* modulus = app.add_subcommand("modulus", "solve the modulus problem and emit a certificate");
  graph_opts(modulus);
  data_opts(modulus);
  modulus->add_option("--const", s.constant, "constant bound instead of endpoint differences");
  auto* verify = app.add_subcommand("verify", "recheck a certificate");
  graph_opts(verify);
  data_opts(verify);
  verify->add_option("--cert", s.cert, "certificate JSON file ('-' for standard input)")->required();
  verify->add_option("--const", s.constant, "constant bound when the certificate names no problem");
  auto* theorem = app.add_subcommand("theorem1", "Dirichlet solve, modulus, certificate and identities end to end");
  graph_opts(theorem);
  data_opts(theorem);
  auto* sheaf = app.add_subcommand("sheaf", "two-rectangle example in the l1 plane");
  sheaf->add_option("--eps", s.eps, "perturbation size (default: stationary value for p)");
  auto* render = app.add_subcommand("render", "SVG of a graph, its density and curves");
  graph_opts(render);
  render->add_option("--cert", s.cert, "certificate whose rho and eta are drawn");
  render->add_option("--width", s.width, "pixels")->capture_default_str();
  render->add_option("--height", s.height, "pixels")->capture_default_str();
  render->add_option("--colormap", s.colormap, "tworamp, gray or heat")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::string text;
  int status = kOk;
  try {
    if (!(s.p > 1.0)) throw UsageError("--p must be > 1");
    if (s.tol && !(*s.tol > 0.0)) throw UsageError("--tol must be positive");
    if (s.max_iter < 1) throw UsageError("--max-iter must be positive");

    if (*domain) {
      detail::require_format(s, {"json"});
      text = io::dump(io::to_json(detail::load_graph(s, in)));
    } else if (*dirichlet) {
      const auto g = detail::load_graph(s, in);
      const auto f = detail::boundary_function(s, g, in);
      const auto sol = solve_dirichlet(g, f, s.p, std::min(1e-10, detail::tolerance(s, detail::grid_graph_source(s, g))), s.max_iter);
      if (s.format == "csv") {
        text = io::to_csv(g, sol.u);
      } else if (s.format == "text") {
        std::ostringstream os;
        os.precision(12);
        os << "energy " << sol.energy << "\nstationarity " << sol.stationarity << "\niterations "
           << sol.iterations << "\nconverged " << (sol.converged ? "yes" : "no") << '\n';
        text = os.str();
      } else {
        text = io::dump(io::to_json(sol.u));
      }
      if (!sol.converged) status = kCheckFailed;
    } else if (*modulus) {
      const auto g = detail::load_graph(s, in);
      const auto prob = detail::problem(s, g, in);
      ModulusOptions opt;
      opt.tol = detail::tolerance(s, detail::grid_graph_source(s, g));
      opt.max_iter = s.max_iter;
      const auto cert = solve_modulus(g, prob, opt);
      if (s.format == "text") {
        text = detail::certificate_text(cert);
      } else if (s.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "edge,u,v,rho\n";
        for (int e = 0; e < g.num_edges(); ++e)
          os << e << ',' << g.edge(e).u << ',' << g.edge(e).v << ',' << cert.rho[e] << '\n';
        text = os.str();
      } else {
        text = io::dump(io::to_json(cert, &prob));
      }
      if (!cert.converged) status = kCheckFailed;
    } else if (*verify) {
      detail::require_format(s, {"json", "text"});
      const auto g = detail::load_graph(s, in);
      const auto jc = io::parse(detail::slurp(s.cert, in));
      const auto cert = io::certificate_from_json(g, jc);
      Settings ps = s;
      ps.p = cert.p;
      const auto prob = jc.contains("problem") ? io::problem_from_json(g, jc["problem"]) : detail::problem(ps, g, in);
      const double tol = s.tol.value_or(10.0 * detail::tolerance(s, detail::grid_graph_source(s, g)));
      const auto rep = verify_certificate(g, prob, cert, tol);
      text = s.format == "text" ? io::to_text(rep) : io::dump(io::to_json(rep));
      if (!rep.pass()) {
        for (const auto& name : rep.failed()) err << "check failed: " << name << '\n';
        status = kCheckFailed;
      }
    } else if (*theorem) {
      detail::require_format(s, {"json", "text"});
      const auto g = detail::load_graph(s, in);
      const auto f = detail::boundary_function(s, g, in);
      TheoremOneOptions opt;
      opt.tol = detail::tolerance(s, detail::grid_graph_source(s, g));
      opt.identity_tol = std::max(10.0 * opt.tol, 1e-4);
      opt.seed = s.seed;
      opt.modulus.max_iter = s.max_iter;
      const auto rep = theorem_one_report(g, f, s.p, opt);
      text = s.format == "text" ? io::to_text(rep) : io::dump(io::to_json(rep));
      if (!rep.pass()) status = kCheckFailed;
    } else if (*sheaf) {
      const double h = s.grid_h.value_or(1.0 / 64);
      const double eps = s.eps.value_or(stationary_eps(s.p));
      const auto rep = sheaf_demo(s.p, h, eps);
      if (s.format == "csv") {
        text = io::grid_csv(CellGrid(h), rep.region(Region::Union).minimized.v);
      } else {
        text = s.format == "text" ? io::to_text(rep) : io::dump(io::to_json(rep));
      }
      if (!rep.sheaf_fails) status = kCheckFailed;
    } else if (*render) {
      detail::require_format(s, {"json"});
      const auto g = detail::load_graph(s, in);
      SvgStyle style;
      style.width = s.width;
      style.height = s.height;
      style.colormap = s.colormap;
      if (!s.cert.empty()) {
        const auto cert = io::certificate_from_json(g, io::parse(detail::slurp(s.cert, in)));
        text = render_svg(g, cert.rho, cert.eta, style);
      } else {
        text = render_svg(g, std::nullopt, {}, style);
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (s.out.empty()) {
    out << text;
    return status;
  }
  try {
    io::write_file(s.out, text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return status;
}

inline int run(int argc, const char* const* argv) { return run(argc, argv, std::cin, std::cout, std::cerr); }

}  // namespace pmod::cli
