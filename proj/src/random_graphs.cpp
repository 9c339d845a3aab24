#include "plap/random_graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "plap/errors.hpp"

namespace plap {

namespace {

void check_probability(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    std::ostringstream msg;
    msg << what << ": rho = " << rho << " is outside [0, 1]";
    throw ParameterError(msg.str());
  }
}

template <typename T>
void fisher_yates(std::vector<T>& items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Fills the verdict fields of `w` for a pair with the given sizes and edge count.
void score_pair(DensityWitness& w, long long edges, int size_a, int size_b, double theta, double C,
                double d, int m) {
  w.edges = edges;
  w.mu = theta * size_a * size_b * d / m;
  const double e = static_cast<double>(edges);
  const double s = std::max(size_a, size_b);
  w.holds_a = e <= C * w.mu;
  w.lhs_b = edges == 0 ? 0.0 : e * std::log(e / w.mu);
  w.rhs_b = C * s * std::log(static_cast<double>(m) / s);
  w.holds_b = w.lhs_b <= w.rhs_b;
  const double score_a = w.mu > 0.0 ? e / (C * w.mu) : (edges > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  double score_b = 0.0;
  if (w.lhs_b > 0.0) score_b = w.rhs_b > 0.0 ? w.lhs_b / w.rhs_b : std::numeric_limits<double>::infinity();
  w.score = std::min(score_a, score_b);
}

std::vector<int> members(std::uint32_t mask, int m) {
  std::vector<int> out;
  for (int v = 0; v < m; ++v)
    if (mask & (1u << v)) out.push_back(v);
  return out;
}

}  // namespace

Multigraph sample_er(int m, double rho, RngSeed seed) {
  if (m < 1) throw ParameterError("sample_er needs m >= 1");
  check_probability(rho, "sample_er");
  CounterRng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v)
      if (rng.bernoulli(rho)) edges.push_back({u, v});
  return Multigraph(m, std::move(edges));
}

ConfigurationSample sample_configuration(const DegreeSequence& d, RngSeed seed) {
  if (d.size() == 0) throw ParameterError("sample_configuration needs at least one vertex");
  if (d.sum() % 2 != 0) throw ParameterError("sample_configuration: degree sum is odd");
  ConfigurationSample out;
  auto& points = out.matching.points;
  for (std::size_t u = 0; u < d.size(); ++u)
    for (int s = 0; s < d[u]; ++s) points.emplace_back(static_cast<int>(u), s);

  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  fisher_yates(order, rng);

  out.matching.pairing.assign(points.size(), -1);
  std::vector<Edge> edges;
  edges.reserve(points.size() / 2);
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
    const int a = order[i];
    const int b = order[i + 1];
    out.matching.pairing[static_cast<std::size_t>(a)] = b;
    out.matching.pairing[static_cast<std::size_t>(b)] = a;
    edges.push_back({points[static_cast<std::size_t>(a)].first, points[static_cast<std::size_t>(b)].first});
  }
  out.graph = Multigraph(static_cast<int>(d.size()), std::move(edges));
  return out;
}

Multigraph sample_multipartite_er(int k, int part_size, double rho, RngSeed seed) {
  if (k < 2 || part_size < 1) throw ParameterError("sample_multipartite_er needs k >= 2, M >= 1");
  check_probability(rho, "sample_multipartite_er");
  const int m = k * part_size;
  CounterRng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v)
      if (u / part_size != v / part_size && rng.bernoulli(rho)) edges.push_back({u, v});
  return Multigraph(m, std::move(edges));
}

DegreeMatrix::DegreeMatrix(int k, int part_size, std::vector<std::vector<int>> entries)
    : k_(k), part_size_(part_size), entries_(std::move(entries)) {
  if (k < 2 || part_size < 1) throw ParameterError("DegreeMatrix needs k >= 2, M >= 1");
  if (entries_.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(part_size)) {
    throw DimensionError("DegreeMatrix: expected one row per vertex");
  }
  for (int u = 0; u < vertex_count(); ++u) {
    const auto& row = entries_[static_cast<std::size_t>(u)];
    if (row.size() != static_cast<std::size_t>(k)) throw DimensionError("DegreeMatrix: expected k entries per row");
    for (int i = 0; i < k; ++i) {
      if (row[static_cast<std::size_t>(i)] < 0) throw ParameterError("DegreeMatrix: negative entry");
      if (i == part_of(u) && row[static_cast<std::size_t>(i)] != 0) {
        throw ParameterError("DegreeMatrix: d_{u,i} must vanish when u lies in V_i");
      }
    }
  }
}

DegreeMatrix DegreeMatrix::uniform(int k, int part_size, int per_part) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(k) * static_cast<std::size_t>(part_size),
                                     std::vector<int>(static_cast<std::size_t>(k), per_part));
  for (std::size_t u = 0; u < rows.size(); ++u) rows[u][u / static_cast<std::size_t>(part_size)] = 0;
  return DegreeMatrix(k, part_size, std::move(rows));
}

long long DegreeMatrix::delta(int i, int j) const {
  long long s = 0;
  for (int u = i * part_size_; u < (i + 1) * part_size_; ++u) s += at(u, j);
  return s;
}

bool DegreeMatrix::admissible() const {
  for (int i = 0; i < k_; ++i)
    for (int j = i + 1; j < k_; ++j)
      if (delta(i, j) != delta(j, i)) return false;
  return true;
}

Multigraph sample_multipartite_matching(const DegreeMatrix& d, RngSeed seed) {
  if (!d.admissible()) throw ParameterError("sample_multipartite_matching: degree matrix is not admissible");
  CounterRng rng(seed);
  const int M = d.part_size();
  std::vector<Edge> edges;
  for (int i = 0; i < d.parts(); ++i) {
    for (int j = i + 1; j < d.parts(); ++j) {
      std::vector<int> from_i;
      std::vector<int> from_j;
      for (int u = i * M; u < (i + 1) * M; ++u) from_i.insert(from_i.end(), static_cast<std::size_t>(d.at(u, j)), u);
      for (int v = j * M; v < (j + 1) * M; ++v) from_j.insert(from_j.end(), static_cast<std::size_t>(d.at(v, i)), v);
      fisher_yates(from_j, rng);
      for (std::size_t t = 0; t < from_i.size(); ++t) edges.push_back({from_i[t], from_j[t]});
    }
  }
  return Multigraph(d.vertex_count(), std::move(edges));
}

DegreeConcentration degree_concentration_check(const Multigraph& g, double expected, double delta) {
  if (!(expected > 0.0)) throw ParameterError("degree_concentration_check needs expected > 0");
  DegreeConcentration out;
  for (int u = 0; u < g.vertex_count(); ++u) {
    const double dev = std::fabs(g.valency(u) - expected) / expected;
    if (dev > out.worst_deviation || out.worst_vertex < 0) {
      out.worst_deviation = dev;
      out.worst_vertex = u;
    }
  }
  out.ok = out.worst_deviation <= delta;
  return out;
}

EdgeDensityReport edge_density_check(const Multigraph& g, double theta, double C, DensityMode mode,
                                     long long samples, RngSeed seed) {
  if (!(theta >= 1.0)) throw ParameterError("edge_density_check needs theta >= 1");
  if (!(C >= std::exp(1.0))) throw ParameterError("edge_density_check needs C >= e");
  const int m = g.vertex_count();
  const double d = g.degrees().max();
  EdgeDensityReport report;
  report.theta_admissible = theta * g.degrees().min() >= d;
  report.worst.score = -1.0;

  if (mode == DensityMode::exact) {
    if (m > 14) throw SizeError("edge_density_check: exact mode enumerates subset pairs only up to m = 14");
    const auto n = static_cast<std::size_t>(m);
    // mult[a][b]: ordered incidences between a and b; a loop counts twice at its vertex.
    std::vector<long long> mult(n * n, 0);
    for (const Edge& e : g.edges()) {
      const auto u = static_cast<std::size_t>(e.tail);
      const auto v = static_cast<std::size_t>(e.head);
      if (u == v) {
        mult[u * n + u] += 2;
      } else {
        ++mult[u * n + v];
        ++mult[v * n + u];
      }
    }
    const std::uint32_t full = 1u << m;
    std::vector<long long> w(n, 0);  // w[b] = Sum_{a in A} mult[a][b]
    std::uint32_t a_mask = 0;
    int size_a = 0;
    std::uint32_t best_a = 0;
    std::uint32_t best_b = 0;
    double best = -1.0;
    DensityWitness scratch;
    // Gray code over A, and for each A a Gray code over B.
    for (std::uint32_t ia = 1; ia < full; ++ia) {
      const int flip_a = __builtin_ctz(ia);
      a_mask ^= 1u << flip_a;
      const long long sign_a = (a_mask >> flip_a) & 1u ? 1 : -1;
      size_a += static_cast<int>(sign_a);
      for (std::size_t b = 0; b < n; ++b) w[b] += sign_a * mult[static_cast<std::size_t>(flip_a) * n + b];

      std::uint32_t b_mask = 0;
      int size_b = 0;
      long long edges = 0;
      for (std::uint32_t ib = 1; ib < full; ++ib) {
        const int flip_b = __builtin_ctz(ib);
        b_mask ^= 1u << flip_b;
        if ((b_mask >> flip_b) & 1u) {
          ++size_b;
          edges += w[static_cast<std::size_t>(flip_b)];
        } else {
          --size_b;
          edges -= w[static_cast<std::size_t>(flip_b)];
        }
        ++report.pairs_checked;
        // Cheap pre-test: the score never exceeds edges / (C mu).
        const double mu = theta * size_a * size_b * d / m;
        if (static_cast<double>(edges) <= best * C * mu) continue;
        score_pair(scratch, edges, size_a, size_b, theta, C, d, m);
        if (scratch.score > best) {
          best = scratch.score;
          best_a = a_mask;
          best_b = b_mask;
        }
      }
    }
    report.exhaustive = true;
    const auto a_set = members(best_a, m);
    const auto b_set = members(best_b, m);
    long long edges = 0;
    for (int a : a_set)
      for (int b : b_set) edges += mult[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
    score_pair(report.worst, edges, static_cast<int>(a_set.size()), static_cast<int>(b_set.size()), theta, C, d, m);
    report.worst.a = a_set;
    report.worst.b = b_set;
  } else {
    if (samples < 1) throw ParameterError("edge_density_check: sampled mode needs samples >= 1");
    CounterRng rng(seed);
    const double top = std::max(1.0, m / 2.0);
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::vector<char> in_b(static_cast<std::size_t>(m), 0);
    auto draw = [&](int size) {
      // Partial Fisher-Yates: the first `size` entries form a uniform subset.
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = 0; i < size; ++i) {
        const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
      }
      std::vector<int> s(perm.begin(), perm.begin() + size);
      std::sort(s.begin(), s.end());
      return s;
    };
    auto draw_size = [&]() {
      const int s = static_cast<int>(std::floor(std::exp(rng.uniform() * std::log(top + 1.0))));
      return std::clamp(s, 1, std::max(1, m / 2));
    };
    DensityWitness scratch;
    for (long long t = 0; t < samples; ++t) {
      auto a_set = draw(draw_size());
      auto b_set = draw(draw_size());
      for (int b : b_set) in_b[static_cast<std::size_t>(b)] = 1;
      long long edges = 0;
      for (int a : a_set) {
        for (int v : g.neighbours(a)) edges += in_b[static_cast<std::size_t>(v)];
        if (in_b[static_cast<std::size_t>(a)]) edges += 2LL * g.loop_count(a);
      }
      for (int b : b_set) in_b[static_cast<std::size_t>(b)] = 0;
      ++report.pairs_checked;
      score_pair(scratch, edges, static_cast<int>(a_set.size()), static_cast<int>(b_set.size()), theta, C, d, m);
      if (scratch.score > report.worst.score) {
        scratch.a = std::move(a_set);
        scratch.b = std::move(b_set);
        report.worst = scratch;
      }
    }
  }
  report.controlled = report.worst.holds_a || report.worst.holds_b;
  return report;
}

}  // namespace plap
