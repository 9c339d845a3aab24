#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plap/graph.hpp"
#include "plap/rng.hpp"

namespace plap {

/// Simple graph on m vertices, each of the C(m,2) pairs kept independently
/// with probability rho (pairs visited in lexicographic order).
Multigraph sample_er(int m, double rho, RngSeed seed);

/// Half-edge points (vertex, slot) in vertex order and a fixed-point-free
/// involution `pairing` on their indices.
struct HalfEdgeMatching {
  std::vector<std::pair<int, int>> points;
  std::vector<int> pairing;
};

struct ConfigurationSample {
  HalfEdgeMatching matching;
  /// One edge per matched pair; loops and parallel edges are kept.
  Multigraph graph;
};

/// Uniform perfect matching of half-edges (Fisher-Yates), projected to a multigraph.
ConfigurationSample sample_configuration(const DegreeSequence& d, RngSeed seed);

/// K_{k x M} with every edge kept independently with probability rho.
Multigraph sample_multipartite_er(int k, int part_size, double rho, RngSeed seed);

/// Per-vertex per-part degree table d_{u,i} for the k-partite model; the
/// part of vertex u is u / M.
class DegreeMatrix {
 public:
  DegreeMatrix(int k, int part_size, std::vector<std::vector<int>> entries);
  /// Every vertex sends `per_part` half-edges to every other part.
  static DegreeMatrix uniform(int k, int part_size, int per_part);

  int parts() const { return k_; }
  int part_size() const { return part_size_; }
  int vertex_count() const { return k_ * part_size_; }
  int part_of(int u) const { return u / part_size_; }
  int at(int u, int i) const { return entries_[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)]; }
  /// Delta_{i,j} = Sum_{u in V_i} d_{u,j}.
  long long delta(int i, int j) const;
  bool admissible() const;

 private:
  int k_;
  int part_size_;
  std::vector<std::vector<int>> entries_;
};

/// For each part pair (i,j), a uniform matching between the half-edges of V_i
/// pointing to j and those of V_j pointing to i.
Multigraph sample_multipartite_matching(const DegreeMatrix& d, RngSeed seed);

struct DegreeConcentration {
  bool ok = true;
  /// max_u |val(u) - expected| / expected
  double worst_deviation = 0.0;
  int worst_vertex = -1;
};

DegreeConcentration degree_concentration_check(const Multigraph& g, double expected, double delta);

enum class DensityMode { exact, sampled };

struct DensityWitness {
  std::vector<int> a;
  std::vector<int> b;
  /// Sum over a in A, b in B of the edge multiplicity between a and b
  /// (an edge inside A cap B is seen from both ends, a loop twice).
  long long edges = 0;
  double mu = 0.0;
  /// Alternative (a): edges <= C mu.
  bool holds_a = true;
  /// Alternative (b): edges log(edges/mu) <= C max(|A|,|B|) log(m / max(|A|,|B|)).
  bool holds_b = true;
  double lhs_b = 0.0;
  double rhs_b = 0.0;
  /// min(edges / (C mu), lhs_b / rhs_b); above 1 means both alternatives fail.
  double score = 0.0;
};

struct EdgeDensityReport {
  bool controlled = true;
  /// True when every subset pair was examined (exact mode).
  bool exhaustive = false;
  /// theta >= d_max / d_min, the standing hypothesis of the definition.
  bool theta_admissible = true;
  long long pairs_checked = 0;
  /// Pair with the highest score; a violation when !controlled.
  DensityWitness worst;
};

/// (theta, C)-controlled edge density with mu(A,B) = theta |A||B| d_max / m.
/// Exact mode enumerates every pair of nonempty subsets (m <= 14); sampled
/// mode draws `samples` pairs with sizes log-uniform in [1, m/2].
EdgeDensityReport edge_density_check(const Multigraph& g, double theta, double C, DensityMode mode,
                                     long long samples = 100000, RngSeed seed = {});

}  // namespace plap
