#pragma once

// Discrete metric measure spaces: grid-built domains as weighted graphs,
// simple boundary-to-boundary paths, path integration (A) and its transpose.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace pmod {

struct Node {
  double x = 0.0;
  double y = 0.0;
  bool boundary = false;
};

struct Edge {
  int u = 0;
  int v = 0;
  double length = 1.0;
  double measure = 1.0;

  int other(int node) const { return node == u ? v : u; }
};

// Grid cell given by its corner node ids: lower-left, lower-right,
// upper-right, upper-left.
using Cell = std::array<int, 4>;

struct Incidence {
  int edge;
  int other;
};

namespace detail {

inline bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Args>
std::string concat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace detail

// Immutable after construction. Node ids are dense 0..n-1 and edge ids
// dense 0..m-1; parallel edges are allowed.
class MetricGraph {
 public:
  MetricGraph(std::vector<Node> nodes, std::vector<Edge> edges,
              std::string domain = "", double spacing = 0.0,
              std::vector<Cell> cells = {},
              std::map<std::string, std::vector<bool>> regions = {})
      : nodes_(std::move(nodes)),
        edges_(std::move(edges)),
        domain_(std::move(domain)),
        spacing_(spacing),
        cells_(std::move(cells)),
        regions_(std::move(regions)) {
    if (nodes_.empty()) throw std::invalid_argument("graph has no nodes");
    adjacency_.resize(nodes_.size());
    const int n = num_nodes();
    for (int id = 0; id < num_edges(); ++id) {
      const Edge& e = edges_[id];
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw std::invalid_argument(detail::concat("edge ", id, " references a missing node"));
      if (e.u == e.v)
        throw std::invalid_argument(detail::concat("edge ", id, " is a self loop"));
      if (!detail::finite_positive(e.length) || !detail::finite_positive(e.measure))
        throw std::invalid_argument(
            detail::concat("edge ", id, " needs finite positive length and measure"));
      adjacency_[e.u].push_back({id, e.v});
      adjacency_[e.v].push_back({id, e.u});
    }
    for (auto& adj : adjacency_)
      std::sort(adj.begin(), adj.end(), [](const Incidence& a, const Incidence& b) {
        return a.other != b.other ? a.other < b.other : a.edge < b.edge;
      });
    for (const Node& v : nodes_)
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw std::invalid_argument("node coordinates must be finite");
    for (const Cell& c : cells_)
      for (int corner : c)
        if (corner < 0 || corner >= n) throw std::invalid_argument("cell references a missing node");
    for (const auto& [name, mask] : regions_)
      if (mask.size() != cells_.size())
        throw std::invalid_argument("region mask '" + name + "' does not match the cell count");
    if (!connected()) throw std::invalid_argument("graph is not connected");
    for (int v = 0; v < n; ++v)
      if (nodes_[v].boundary) boundary_.push_back(v);
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Node& node(int id) const { return nodes_.at(id); }
  const Edge& edge(int id) const { return edges_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Incidence> incident(int node) const { return adjacency_.at(node); }
  const std::vector<int>& boundary_nodes() const { return boundary_; }
  bool is_boundary(int node) const { return nodes_.at(node).boundary; }

  const std::string& domain() const { return domain_; }
  double spacing() const { return spacing_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::map<std::string, std::vector<bool>>& regions() const { return regions_; }

  // Smallest-id edge joining a and b, if any.
  std::optional<int> edge_between(int a, int b) const {
    for (const Incidence& inc : incident(a))
      if (inc.other == b) return inc.edge;
    return std::nullopt;
  }

  double total_measure() const {
    double s = 0.0;
    for (const Edge& e : edges_) s += e.measure;
    return s;
  }

 private:
  bool connected() const {
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Incidence& inc : adjacency_[v])
        if (!seen[inc.other]) {
          seen[inc.other] = 1;
          ++count;
          stack.push_back(inc.other);
        }
    }
    return count == nodes_.size();
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<int> boundary_;
  std::string domain_;
  double spacing_;
  std::vector<Cell> cells_;
  std::map<std::string, std::vector<bool>> regions_;
};

// Nonnegative finite value per edge. Tag distinguishes densities (1/length)
// from edge measures (length x mass).
template <class Tag>
class EdgeValues {
 public:
  EdgeValues() = default;
  explicit EdgeValues(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("edge values must be finite and nonnegative");
  }
  EdgeValues(std::size_t n, double value) : EdgeValues(std::vector<double>(n, value)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t e) const { return values_[e]; }
  double at(std::size_t e) const { return values_.at(e); }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const EdgeValues&, const EdgeValues&) = default;

 private:
  std::vector<double> values_;
};

using DensityField = EdgeValues<struct DensityTag>;
using EdgeMeasure = EdgeValues<struct EdgeMeasureTag>;

// Simple edge chain. Stores both node and edge sequences so parallel edges
// stay distinguishable.
class Path {
 public:
  static Path from_edges(const MetricGraph& g, int start, std::vector<int> edges) {
    if (edges.empty()) throw std::invalid_argument("path needs at least one edge");
    std::vector<int> nodes{start};
    for (int e : edges) {
      if (e < 0 || e >= g.num_edges()) throw std::invalid_argument("path uses a missing edge");
      const Edge& ed = g.edge(e);
      if (ed.u != nodes.back() && ed.v != nodes.back())
        throw std::invalid_argument("path edges are not consecutive");
      nodes.push_back(ed.other(nodes.back()));
    }
    return Path(g, std::move(nodes), std::move(edges));
  }

  // Resolves each hop to the smallest-id edge between the two nodes.
  static Path from_nodes(const MetricGraph& g, std::vector<int> nodes) {
    if (nodes.size() < 2) throw std::invalid_argument("path needs at least two nodes");
    std::vector<int> edges;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (nodes[i] < 0 || nodes[i] >= g.num_nodes())
        throw std::invalid_argument("path uses a missing node");
      auto e = g.edge_between(nodes[i], nodes[i + 1]);
      if (!e)
        throw std::invalid_argument(
            detail::concat("nodes ", nodes[i], " and ", nodes[i + 1], " are not adjacent"));
      edges.push_back(*e);
    }
    return Path(g, std::move(nodes), std::move(edges));
  }

  const std::vector<int>& nodes() const { return nodes_; }
  const std::vector<int>& edges() const { return edges_; }
  int front() const { return nodes_.front(); }
  int back() const { return nodes_.back(); }
  double length() const { return length_; }

  Path reversed() const {
    Path r = *this;
    std::reverse(r.nodes_.begin(), r.nodes_.end());
    std::reverse(r.edges_.begin(), r.edges_.end());
    return r;
  }

  // Orientation with the smaller endpoint id first; ties by edge sequence.
  Path canonical() const {
    if (front() < back()) return *this;
    if (front() > back()) return reversed();
    Path r = reversed();
    return r.edges_ < edges_ ? r : *this;
  }

  friend bool operator==(const Path& a, const Path& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }
  friend bool operator<(const Path& a, const Path& b) {
    return a.nodes_ != b.nodes_ ? a.nodes_ < b.nodes_ : a.edges_ < b.edges_;
  }

 private:
  Path(const MetricGraph& g, std::vector<int> nodes, std::vector<int> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::vector<int> sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("path is not simple");
    for (int e : edges_) length_ += g.edge(e).length;
  }

  std::vector<int> nodes_;
  std::vector<int> edges_;
  double length_ = 0.0;
};

struct WeightedPath {
  Path path;
  double mass = 0.0;
};

// Finitely supported nonnegative measure on paths.
using CurveMeasure = std::vector<WeightedPath>;

inline void validate(const CurveMeasure& eta) {
  for (const auto& wp : eta)
    if (!std::isfinite(wp.mass) || wp.mass < 0.0)
      throw std::invalid_argument("curve measure masses must be finite and nonnegative");
}

inline double total_mass(const CurveMeasure& eta) {
  double s = 0.0;
  for (const auto& wp : eta) s += wp.mass;
  return s;
}

inline void require_field_size(const MetricGraph& g, std::size_t n) {
  if (n != static_cast<std::size_t>(g.num_edges()))
    throw std::invalid_argument(detail::concat("edge field has ", n, " entries, graph has ",
                                               g.num_edges(), " edges"));
}

inline void require_on_graph(const MetricGraph& g, const Path& path) {
  for (int e : path.edges())
    if (e < 0 || e >= g.num_edges()) throw std::invalid_argument("path does not live on graph");
}

// (A rho)(gamma): sum of rho(e) * length(e) along the path.
inline double curve_integral(const MetricGraph& g, const DensityField& rho, const Path& path) {
  require_field_size(g, rho.size());
  require_on_graph(g, path);
  double s = 0.0;
  for (int e : path.edges()) s += rho[e] * g.edge(e).length;
  return s;
}

// Same sum with an arbitrary edge weight vector.
inline double weighted_length(const MetricGraph& g, std::span<const double> weight,
                              const Path& path) {
  double s = 0.0;
  for (int e : path.edges()) s += weight[e] * g.edge(e).length;
  return s;
}

// (A^T eta)(e) = length(e) * sum of masses of the paths through e.
inline EdgeMeasure transpose_measure(const MetricGraph& g, const CurveMeasure& eta) {
  validate(eta);
  std::vector<double> load(g.num_edges(), 0.0);
  for (const auto& wp : eta) {
    require_on_graph(g, wp.path);
    for (int e : wp.path.edges()) load[e] += wp.mass;
  }
  for (int e = 0; e < g.num_edges(); ++e) load[e] *= g.edge(e).length;
  return EdgeMeasure(std::move(load));
}

// ---------------------------------------------------------------------------
// Domain construction

struct DomainSpec {
  enum class Kind { Rectangle, Comb, LShape };
  Kind kind = Kind::Rectangle;
  double a = 1.0;  // rectangle width
  double b = 1.0;  // rectangle height
  int bars = 1;    // comb truncation k
  double h = 0.5;

  static DomainSpec rectangle(double a, double b, double h) {
    return {Kind::Rectangle, a, b, 1, h};
  }
  static DomainSpec comb(int bars, double h) { return {Kind::Comb, 1.0, 1.0, bars, h}; }
  static DomainSpec lshape(double h) { return {Kind::LShape, 2.0, 2.0, 1, h}; }

  std::string name() const {
    switch (kind) {
      case Kind::Rectangle: return "rectangle";
      case Kind::Comb: return "comb";
      case Kind::LShape: return "lshape";
    }
    return "";
  }
};

// Removed bar n of the comb: [2^-n - 2^-(n+2), 2^-n] x [0, 1/2].
inline std::pair<double, double> comb_bar(int n) {
  const double right = std::ldexp(1.0, -n);
  return {right - std::ldexp(1.0, -(n + 2)), right};
}

namespace detail {

inline int grid_count(double extent, double h, const char* what) {
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw std::invalid_argument(concat("domain dimension ", what, " must be positive"));
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing must be positive");
  const double ratio = extent / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(
        concat("grid spacing ", h, " does not divide ", what, " = ", extent));
  return static_cast<int>(n);
}

// Builds the graph of a union of h-cells inside [x0, x0 + nx h] x [y0, y0 + ny h].
// in_domain(cx, cy) decides membership from a cell centre.
template <class Pred>
MetricGraph grid_graph(double x0, double y0, int nx, int ny, double h, Pred in_domain,
                       std::string name,
                       const std::map<std::string, std::function<bool(double, double)>>& region_preds) {
  auto cell_in = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
    return static_cast<bool>(in_domain(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h));
  };
  const int px = nx + 1;
  const int py = ny + 1;
  std::vector<int> id(static_cast<std::size_t>(px) * py, -1);
  std::vector<Node> nodes;
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      const int around = cell_in(i, j) + cell_in(i - 1, j) + cell_in(i, j - 1) + cell_in(i - 1, j - 1);
      if (around == 0) continue;
      id[j * px + i] = static_cast<int>(nodes.size());
      nodes.push_back({x0 + i * h, y0 + j * h, around < 4});
    }
  std::vector<Edge> edges;
  const double area = h * h;
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      const int a = id[j * px + i];
      if (a < 0) continue;
      if (i + 1 < px) {
        const int cells = cell_in(i, j) + cell_in(i, j - 1);
        if (cells > 0) edges.push_back({a, id[j * px + i + 1], h, area * cells / 2.0});
      }
      if (j + 1 < py) {
        const int cells = cell_in(i, j) + cell_in(i - 1, j);
        if (cells > 0) edges.push_back({a, id[(j + 1) * px + i], h, area * cells / 2.0});
      }
    }
  std::vector<Cell> cells;
  std::map<std::string, std::vector<bool>> regions;
  for (const auto& [rname, pred] : region_preds) regions[rname];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!cell_in(i, j)) continue;
      cells.push_back({id[j * px + i], id[j * px + i + 1], id[(j + 1) * px + i + 1],
                       id[(j + 1) * px + i]});
      for (const auto& [rname, pred] : region_preds)
        regions[rname].push_back(pred(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h));
    }
  return MetricGraph(std::move(nodes), std::move(edges), std::move(name), h, std::move(cells),
                     std::move(regions));
}

}  // namespace detail

// Grid graph over the closed domain. Edges have length h and measure
// h^2 * (adjacent domain cells) / 2, so the edge measures of either
// orientation sum to the domain area.
inline MetricGraph build_domain(const DomainSpec& spec) {
  using detail::grid_count;
  const double h = spec.h;
  switch (spec.kind) {
    case DomainSpec::Kind::Rectangle: {
      const int nx = grid_count(spec.a, h, "a");
      const int ny = grid_count(spec.b, h, "b");
      return detail::grid_graph(0.0, 0.0, nx, ny, h, [](double, double) { return true; },
                                "rectangle", {});
    }
    case DomainSpec::Kind::Comb: {
      if (spec.bars < 1) throw std::invalid_argument("comb needs at least one bar");
      const int n = grid_count(1.0, h, "side");
      grid_count(0.5, h, "bar height");
      grid_count(std::ldexp(1.0, -(spec.bars + 2)), h, "narrowest bar width");
      const int k = spec.bars;
      auto in_comb = [k](double x, double y) {
        if (y > 0.5) return true;
        for (int bar = 1; bar <= k; ++bar) {
          auto [lo, hi] = comb_bar(bar);
          if (x > lo && x < hi) return false;
        }
        return true;
      };
      return detail::grid_graph(0.0, 0.0, n, n, h, in_comb, "comb", {});
    }
    case DomainSpec::Kind::LShape: {
      const int n = grid_count(2.0, h, "side");
      grid_count(1.0, h, "half side");
      auto omega1 = [](double x, double y) { return x > -1 && x < 1 && y > 0 && y < 1; };
      auto omega2 = [](double x, double y) { return x > 0 && x < 1 && y > -1 && y < 1; };
      return detail::grid_graph(
          -1.0, -1.0, n, n, h, [&](double x, double y) { return omega1(x, y) || omega2(x, y); },
          "lshape", {{"omega1", omega1}, {"omega2", omega2}});
    }
  }
  throw std::invalid_argument("unknown domain kind");
}

// ---------------------------------------------------------------------------
// Separation

// Lower bound b(x, y) on the integral of paths joining boundary nodes x, y.
using PairBound = std::function<double(int, int)>;

struct Violation {
  Path path;
  double slack = 0.0;  // curve_integral - bound
  double bound = 0.0;
};

namespace detail {

// Shortest paths under the lexicographic key (cost, hop count), so among
// equal-cost paths the one with fewest edges wins.
struct Distances {
  std::vector<double> cost;
  std::vector<int> hops;
  std::vector<int> pred;  // edge into each node on the search tree, -1 at root
};

inline bool key_less(double ca, int ha, double cb, int hb) {
  return ca < cb || (ca == cb && ha < hb);
}

inline Distances dijkstra(const MetricGraph& g, std::span<const double> weight, int source) {
  const double inf = std::numeric_limits<double>::infinity();
  const int n = g.num_nodes();
  Distances d{std::vector<double>(n, inf), std::vector<int>(n, std::numeric_limits<int>::max()),
              std::vector<int>(n, -1)};
  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  d.cost[source] = 0.0;
  d.hops[source] = 0;
  heap.push({0.0, 0, source});
  while (!heap.empty()) {
    auto [c, h, v] = heap.top();
    heap.pop();
    if (c != d.cost[v] || h != d.hops[v]) continue;
    for (const Incidence& inc : g.incident(v)) {
      const double nc = c + weight[inc.edge];
      if (key_less(nc, h + 1, d.cost[inc.other], d.hops[inc.other])) {
        d.cost[inc.other] = nc;
        d.hops[inc.other] = h + 1;
        d.pred[inc.other] = inc.edge;
        heap.push({nc, h + 1, inc.other});
      }
    }
  }
  return d;
}

// Lexicographically smallest node sequence among the optimal s-t paths;
// falls back to the search tree path if rounding breaks the greedy walk.
inline Path shortest_path(const MetricGraph& g, std::span<const double> weight, int s, int t,
                          const Distances& from_s, const Distances& to_t) {
  const double total = from_s.cost[t];
  const int total_hops = from_s.hops[t];
  const double slop = 1e-12 * (1.0 + total);
  std::vector<int> edges;
  int at = s;
  while (at != t) {
    int next_edge = -1;
    for (const Incidence& inc : g.incident(at)) {
      const int y = inc.other;
      if (from_s.hops[at] + 1 != from_s.hops[y] || from_s.hops[y] + to_t.hops[y] != total_hops)
        continue;
      if (std::abs(from_s.cost[at] + weight[inc.edge] + to_t.cost[y] - total) <= slop &&
          std::abs(from_s.cost[at] + weight[inc.edge] - from_s.cost[y]) <= slop) {
        next_edge = inc.edge;
        break;
      }
    }
    if (next_edge < 0) break;
    edges.push_back(next_edge);
    at = g.edge(next_edge).other(at);
  }
  if (at == t) return Path::from_edges(g, s, std::move(edges));

  edges.clear();
  for (at = t; at != s; at = g.edge(edges.back()).other(at)) {
    if (from_s.pred[at] < 0) throw std::logic_error("shortest path reconstruction failed");
    edges.push_back(from_s.pred[at]);
  }
  std::reverse(edges.begin(), edges.end());
  return Path::from_edges(g, s, std::move(edges));
}

struct SourceBest {
  int target = -1;
  double slack = std::numeric_limits<double>::infinity();
  int hops = 0;
  double bound = 0.0;

  bool better_than(const SourceBest& o) const {
    if (o.target < 0) return target >= 0;
    return slack < o.slack || (slack == o.slack && hops < o.hops);
  }
};

inline SourceBest best_target(const MetricGraph& g, const Distances& dist, int s,
                              const PairBound& b) {
  SourceBest best;
  for (int t : g.boundary_nodes()) {
    if (t == s) continue;
    const double bound = b(s, t);
    if (bound < 0.0 || !std::isfinite(bound))
      throw std::invalid_argument(concat("bound b(", s, ", ", t, ") must be finite and >= 0"));
    if (bound == 0.0) continue;
    SourceBest cand{t, dist.cost[t] - bound, dist.hops[t], bound};
    if (cand.better_than(best)) best = cand;
  }
  return best;
}

}  // namespace detail

inline unsigned default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

// Best (minimum-slack) target for one boundary source.
struct SourceCut {
  int source = -1;
  int target = -1;
  double slack = 0.0;
  int hops = 0;
  double bound = 0.0;
};

// Orders cuts by slack, then fewer edges, then (source, target).
inline bool cut_before(const SourceCut& a, const SourceCut& b) {
  if (a.slack != b.slack) return a.slack < b.slack;
  if (a.hops != b.hops) return a.hops < b.hops;
  return a.source != b.source ? a.source < b.source : a.target < b.target;
}

inline std::vector<double> edge_weights(const MetricGraph& g, const DensityField& rho) {
  require_field_size(g, rho.size());
  std::vector<double> weight(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) weight[e] = rho[e] * g.edge(e).length;
  return weight;
}

// Search trees from every boundary node under one weighting, kept so that cut
// paths can be rebuilt without searching again.
class BoundarySearch {
 public:
  BoundarySearch(const MetricGraph& g, std::vector<double> weight, unsigned threads = 0)
      : g_(&g), weight_(std::move(weight)), index_(g.num_nodes(), -1) {
    const auto& sources = g.boundary_nodes();
    for (std::size_t i = 0; i < sources.size(); ++i) index_[sources[i]] = static_cast<int>(i);
    dist_.resize(sources.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) dist_[i] = detail::dijkstra(g, weight_, sources[i]);
    };
    if (threads == 0) threads = default_threads();
    threads = std::min<unsigned>(threads, std::max<std::size_t>(1, sources.size() / 8));
    if (threads <= 1) {
      work(0, sources.size());
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (sources.size() + threads - 1) / threads;
      for (unsigned k = 0; k < threads; ++k) {
        const std::size_t lo = k * chunk;
        const std::size_t hi = std::min(sources.size(), lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
      }
    }
  }

  const detail::Distances& from(int boundary_node) const {
    const int i = index_.at(boundary_node);
    if (i < 0) throw std::invalid_argument(detail::concat("node ", boundary_node, " is not on the boundary"));
    return dist_[i];
  }

  // Per-source minimum-slack targets over pairs with b > 0, in source-id order.
  std::vector<SourceCut> cuts(const PairBound& b) const {
    std::vector<SourceCut> out;
    const auto& sources = g_->boundary_nodes();
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto best = detail::best_target(*g_, dist_[i], sources[i], b);
      if (best.target >= 0) out.push_back({sources[i], best.target, best.slack, best.hops, best.bound});
    }
    return out;
  }

  Violation realize(const SourceCut& cut) const {
    Path path = detail::shortest_path(*g_, weight_, cut.source, cut.target, from(cut.source),
                                      from(cut.target));
    return Violation{std::move(path), cut.slack, cut.bound};
  }

 private:
  const MetricGraph* g_;
  std::vector<double> weight_;
  std::vector<int> index_;
  std::vector<detail::Distances> dist_;
};

// Minimum-slack boundary-to-boundary path over all pairs with b > 0, whatever
// its sign; absent only when every pair has b = 0. Exact slack ties go to
// fewer edges, then smaller (source, target), then the lexicographically
// smallest node sequence.
inline std::optional<Violation> most_violated(const MetricGraph& g, const DensityField& rho,
                                              const PairBound& b, unsigned threads = 0) {
  const BoundarySearch search(g, edge_weights(g, rho), threads);
  const auto cuts = search.cuts(b);
  if (cuts.empty()) return std::nullopt;
  return search.realize(*std::min_element(cuts.begin(), cuts.end(), cut_before));
}

// Most violated constraint of "integral along gamma >= b(endpoints)", or
// nothing when every boundary-to-boundary path satisfies it.
inline std::optional<Violation> separation_oracle(const MetricGraph& g, const DensityField& rho,
                                                  const PairBound& b, unsigned threads = 0) {
  auto v = most_violated(g, rho, b, threads);
  if (v && v->slack < 0.0) return v;
  return std::nullopt;
}

// Every simple path between boundary nodes s < t with b(s, t) > 0, each listed
// once from s to t. Interior nodes may lie on the boundary.
inline std::vector<Path> enumerate_boundary_paths(const MetricGraph& g, const PairBound& b,
                                                  std::size_t limit = 2'000'000) {
  std::vector<Path> out;
  std::vector<char> on_path(g.num_nodes(), 0);
  std::vector<int> edges;
  const int n = g.num_nodes();
  std::vector<std::vector<double>> bound(n, std::vector<double>(n, 0.0));
  for (int s : g.boundary_nodes())
    for (int t : g.boundary_nodes()) {
      if (s == t) continue;
      const double v = b(s, t);
      if (v < 0.0 || !std::isfinite(v))
        throw std::invalid_argument(detail::concat("bound b(", s, ", ", t, ") must be >= 0"));
      bound[s][t] = v;
    }
  std::function<void(int, int)> dfs = [&](int s, int at) {
    for (const Incidence& inc : g.incident(at)) {
      if (on_path[inc.other]) continue;
      edges.push_back(inc.edge);
      on_path[inc.other] = 1;
      if (g.is_boundary(inc.other) && inc.other > s && bound[s][inc.other] > 0.0) {
        out.push_back(Path::from_edges(g, s, edges));
        if (out.size() > limit) throw std::invalid_argument("too many simple paths to enumerate");
      }
      dfs(s, inc.other);
      on_path[inc.other] = 0;
      edges.pop_back();
    }
  };
  for (int s : g.boundary_nodes()) {
    on_path[s] = 1;
    dfs(s, s);
    on_path[s] = 0;
  }
  return out;
}

}  // namespace pmod
