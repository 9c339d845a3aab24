#include "plap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "plap/errors.hpp"

namespace plap {

namespace {

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << ": length " << got << " does not match " << want;
    throw DimensionError(msg.str());
  }
}

}  // namespace

DegreeSequence::DegreeSequence(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  if (degrees_.empty()) return;
  const auto [lo, hi] = std::minmax_element(degrees_.begin(), degrees_.end());
  min_ = *lo;
  max_ = *hi;
  if (min_ < 0) throw ParameterError("degree sequence entries must be non-negative");
  sum_ = std::accumulate(degrees_.begin(), degrees_.end(), 0LL);
}

double DegreeSequence::ratio() const {
  if (min_ <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(max_) / static_cast<double>(min_);
}

Multigraph::Multigraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count < 1) throw ParameterError("a multigraph needs at least one vertex");
  const auto n = static_cast<std::size_t>(vertex_count);
  std::vector<int> val(n, 0);
  loops_.assign(n, 0);
  std::vector<std::size_t> non_loop(n, 0);
  for (const Edge& e : edges_) {
    if (e.tail < 0 || e.tail >= vertex_count || e.head < 0 || e.head >= vertex_count) {
      std::ostringstream msg;
      msg << "edge (" << e.tail << "," << e.head << ") has an endpoint outside [0, "
          << vertex_count << ")";
      throw InputError(msg.str());
    }
    ++val[static_cast<std::size_t>(e.tail)];
    ++val[static_cast<std::size_t>(e.head)];
    if (e.tail == e.head) {
      ++loops_[static_cast<std::size_t>(e.tail)];
    } else {
      ++non_loop[static_cast<std::size_t>(e.tail)];
      ++non_loop[static_cast<std::size_t>(e.head)];
    }
  }
  adjacency_offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) adjacency_offsets_[u + 1] = adjacency_offsets_[u] + non_loop[u];
  adjacency_.assign(adjacency_offsets_[n], 0);
  std::vector<std::size_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const Edge& e : edges_) {
    if (e.tail == e.head) continue;
    adjacency_[fill[static_cast<std::size_t>(e.tail)]++] = e.head;
    adjacency_[fill[static_cast<std::size_t>(e.head)]++] = e.tail;
  }
  degrees_ = DegreeSequence(std::move(val));
}

bool Multigraph::has_isolated_vertex() const { return degrees_.min() == 0; }

std::vector<int> connected_components(const Multigraph& g) {
  const int n = g.vertex_count();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<int> stack;
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.neighbours(u)) {
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

int component_count(const Multigraph& g) {
  const auto label = connected_components(g);
  return label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
}

bool is_connected(const Multigraph& g) { return component_count(g) == 1; }

bool is_simple(const Multigraph& g) {
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : g.edges()) {
    if (e.tail == e.head) return false;
    if (!seen.emplace(std::min(e.tail, e.head), std::max(e.tail, e.head)).second) return false;
  }
  return true;
}

double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) {
    const double s = a * a;
    return s * s;
  }
  if (p == 1.0) return a;
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

double signed_pow(double x, double exponent) {
  if (x == 0.0) return 0.0;
  const double m = abs_pow(x, exponent);
  return x > 0.0 ? m : -m;
}

EdgeFunction total_derivative(const Multigraph& g, std::span<const double> x) {
  check_length(x.size(), static_cast<std::size_t>(g.vertex_count()), "total_derivative");
  EdgeFunction dx;
  dx.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    dx.push_back(x[static_cast<std::size_t>(e.head)] - x[static_cast<std::size_t>(e.tail)]);
  }
  return dx;
}

double weighted_p_norm(std::span<const double> x, const DegreeSequence& d, double p) {
  check_length(x.size(), d.size(), "weighted_p_norm");
  if (p < 1.0) throw ParameterError("weighted_p_norm requires p >= 1");
  double s = 0.0;
  for (std::size_t u = 0; u < x.size(); ++u) s += abs_pow(x[u], p) * d[u];
  return s;
}

CenteredFunction center_to_zero_p_mean(std::span<const double> x, const DegreeSequence& d,
                                       double p) {
  check_length(x.size(), d.size(), "center_to_zero_p_mean");
  if (!(p > 1.0)) throw ParameterError("center_to_zero_p_mean requires p > 1");
  CenteredFunction out;
  if (x.empty()) return out;

  double c = 0.0;
  if (p == 2.0) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t u = 0; u < x.size(); ++u) {
      num += x[u] * d[u];
      den += d[u];
    }
    c = den > 0.0 ? num / den : 0.0;
  } else {
    // c -> Sum {x_u - c}^{p-1} d_u is strictly decreasing on [min x, max x].
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    double lo = *lo_it;
    double hi = *hi_it;
    const double scale = std::max(std::fabs(lo), std::fabs(hi));
    const double tol = 1e-12 * (scale + 1.0);
    auto f = [&](double t) {
      double s = 0.0;
      for (std::size_t u = 0; u < x.size(); ++u) s += signed_pow(x[u] - t, p - 1.0) * d[u];
      return s;
    };
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    c = 0.5 * (lo + hi);
  }
  out.shift = c;
  out.values.resize(x.size());
  for (std::size_t u = 0; u < x.size(); ++u) out.values[u] = x[u] - c;
  return out;
}

VertexFunction normalize_to_sphere(std::span<const double> x, const DegreeSequence& d,
                                   double p) {
  const double norm_p = weighted_p_norm(x, d, p);
  if (!(norm_p > 0.0)) throw DegenerateInputError("normalize_to_sphere: zero weighted norm");
  const double s = std::pow(norm_p, 1.0 / p);
  VertexFunction out(x.begin(), x.end());
  for (double& v : out) v /= s;
  return out;
}

double edge_energy(const Multigraph& g, std::span<const double> x, double p) {
  check_length(x.size(), static_cast<std::size_t>(g.vertex_count()), "edge_energy");
  double s = 0.0;
  for (const Edge& e : g.edges()) {
    s += abs_pow(x[static_cast<std::size_t>(e.head)] - x[static_cast<std::size_t>(e.tail)], p);
  }
  return s;
}

double rayleigh_quotient(const Multigraph& g, std::span<const double> x, double p) {
  check_length(x.size(), static_cast<std::size_t>(g.vertex_count()), "rayleigh_quotient");
  if (!(p > 1.0)) throw ParameterError("rayleigh_quotient requires p > 1");
  const auto centered = center_to_zero_p_mean(x, g.degrees(), p);
  const double den = weighted_p_norm(centered.values, g.degrees(), p);
  if (!(den > 0.0)) {
    throw DegenerateInputError("rayleigh_quotient: function is constant on every vertex of positive valency");
  }
  return edge_energy(g, x, p) / den;
}

Multigraph complete_graph(int m) {
  std::vector<Edge> edges;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) edges.push_back({u, v});
  return Multigraph(m, std::move(edges));
}

Multigraph complete_multipartite(int k, int part_size) {
  if (k < 1 || part_size < 1) throw ParameterError("complete_multipartite needs k, M >= 1");
  const int m = k * part_size;
  std::vector<Edge> edges;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v)
      if (u / part_size != v / part_size) edges.push_back({u, v});
  return Multigraph(m, std::move(edges));
}

Multigraph cycle_graph(int m) {
  if (m < 3) throw ParameterError("cycle_graph needs m >= 3");
  std::vector<Edge> edges;
  for (int u = 0; u < m; ++u) edges.push_back({u, (u + 1) % m});
  return Multigraph(m, std::move(edges));
}

Multigraph path_graph(int m) {
  std::vector<Edge> edges;
  for (int u = 0; u + 1 < m; ++u) edges.push_back({u, u + 1});
  return Multigraph(m, std::move(edges));
}

Multigraph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return Multigraph(leaves + 1, std::move(edges));
}

Multigraph disjoint_union(const Multigraph& a, const Multigraph& b) {
  std::vector<Edge> edges(a.edges().begin(), a.edges().end());
  const int shift = a.vertex_count();
  for (const Edge& e : b.edges()) edges.push_back({e.tail + shift, e.head + shift});
  return Multigraph(a.vertex_count() + b.vertex_count(), std::move(edges));
}

Multigraph edge_union(std::span<const Multigraph> parts) {
  if (parts.empty()) throw ParameterError("edge_union needs at least one graph");
  std::vector<Edge> edges;
  for (const Multigraph& g : parts) {
    if (g.vertex_count() != parts.front().vertex_count()) {
      throw DimensionError("edge_union: vertex counts differ");
    }
    edges.insert(edges.end(), g.edges().begin(), g.edges().end());
  }
  return Multigraph(parts.front().vertex_count(), std::move(edges));
}

Multigraph read_graph(std::istream& in) {
  std::string line;
  int m = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (m < 0) {
      if (first != "m" || !(ls >> m) || m < 1) {
        throw InputError("graph file: expected header 'm <count>' at line " + std::to_string(line_no));
      }
      continue;
    }
    Edge e;
    try {
      std::size_t used = 0;
      e.tail = std::stoi(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw InputError("graph file: bad vertex token '" + first + "' at line " + std::to_string(line_no));
    }
    if (!(ls >> e.head)) {
      throw InputError("graph file: expected 'u v' at line " + std::to_string(line_no));
    }
    std::string extra;
    if (ls >> extra) throw InputError("graph file: trailing token at line " + std::to_string(line_no));
    edges.push_back(e);
  }
  if (m < 0) throw InputError("graph file: missing 'm <count>' header");
  return Multigraph(m, std::move(edges));
}

Multigraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Multigraph& g) {
  out << "m " << g.vertex_count() << '\n';
  for (const Edge& e : g.edges()) out << e.tail << ' ' << e.head << '\n';
}

void write_graph_file(const std::string& path, const Multigraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write graph file " + path);
  write_graph(out, g);
}

}  // namespace plap
