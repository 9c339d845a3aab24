#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plap {

using VertexFunction = std::vector<double>;
using EdgeFunction = std::vector<double>;

/// Oriented edge; `tail` is e_-, `head` is e_+. Loops have tail == head.
struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class DegreeSequence {
 public:
  DegreeSequence() = default;
  explicit DegreeSequence(std::vector<int> degrees);

  std::size_t size() const { return degrees_.size(); }
  int operator[](std::size_t u) const { return degrees_[u]; }
  std::span<const int> values() const { return degrees_; }
  int max() const { return max_; }
  int min() const { return min_; }
  long long sum() const { return sum_; }
  /// d_max / d_min; infinite when some entry is zero.
  double ratio() const;

 private:
  std::vector<int> degrees_;
  int max_ = 0;
  int min_ = 0;
  long long sum_ = 0;
};

/// Undirected multigraph with a fixed orientation per edge. Loops and
/// parallel edges are allowed. Immutable after construction.
class Multigraph {
 public:
  Multigraph() = default;
  Multigraph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  /// Incidence count at u; a loop contributes 2.
  int valency(int u) const { return degrees_[static_cast<std::size_t>(u)]; }
  const DegreeSequence& degrees() const { return degrees_; }

  /// Non-loop neighbours of u, one entry per parallel edge.
  std::span<const int> neighbours(int u) const {
    const auto b = adjacency_offsets_[static_cast<std::size_t>(u)];
    const auto e = adjacency_offsets_[static_cast<std::size_t>(u) + 1];
    return {adjacency_.data() + b, e - b};
  }

  int loop_count(int u) const { return loops_[static_cast<std::size_t>(u)]; }
  bool has_isolated_vertex() const;

 private:
  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  DegreeSequence degrees_;
  std::vector<int> loops_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<int> adjacency_;
};

/// Component label per vertex, labels numbered from 0 in vertex order.
std::vector<int> connected_components(const Multigraph& g);
int component_count(const Multigraph& g);
bool is_connected(const Multigraph& g);

/// True when the graph has no loops and no parallel edges.
bool is_simple(const Multigraph& g);

/// {x}^{e} = sign(x)|x|^e with {0}^e = 0.
double signed_pow(double x, double exponent);
/// |x|^p with multiplication fast paths for small integer p.
double abs_pow(double x, double p);

EdgeFunction total_derivative(const Multigraph& g, std::span<const double> x);

/// Sum_u |x_u|^p d_u (the p-th power of the weighted norm, not its root).
double weighted_p_norm(std::span<const double> x, const DegreeSequence& d, double p);

struct CenteredFunction {
  VertexFunction values;
  double shift = 0.0;  // the constant c that was subtracted
};

/// Subtracts the unique c with Sum_u {x_u - c}^{p-1} d_u = 0.
CenteredFunction center_to_zero_p_mean(std::span<const double> x, const DegreeSequence& d,
                                       double p);

VertexFunction normalize_to_sphere(std::span<const double> x, const DegreeSequence& d,
                                   double p);

/// ||dx||_p^p, loops contributing zero.
double edge_energy(const Multigraph& g, std::span<const double> x, double p);

/// ||dx||_p^p / inf_c Sum_u |x_u - c|^p val(u).
double rayleigh_quotient(const Multigraph& g, std::span<const double> x, double p);

// Standard families.
Multigraph complete_graph(int m);
/// K_{k x M}: k parts of M vertices, part of u is u / M.
Multigraph complete_multipartite(int k, int part_size);
Multigraph cycle_graph(int m);
Multigraph path_graph(int m);
/// Vertex 0 is the centre.
Multigraph star_graph(int leaves);
/// Disjoint union, vertices of b shifted by a.vertex_count().
Multigraph disjoint_union(const Multigraph& a, const Multigraph& b);
/// Same vertex set, concatenated edge lists.
Multigraph edge_union(std::span<const Multigraph> parts);

// Text format: "m <count>" header, one "u v" pair per line, '#' comments.
Multigraph read_graph(std::istream& in);
Multigraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Multigraph& g);
void write_graph_file(const std::string& path, const Multigraph& g);

}  // namespace plap
