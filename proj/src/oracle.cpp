// Brute-force reference for lambda_{1,p} on very small graphs. Deliberately
// independent of the solver: its own energy, its own centering (golden
// section) and a derivative-free search.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plap/errors.hpp"
#include "plap/solver.hpp"

namespace plap {

namespace {

class TinyQuotient {
 public:
  TinyQuotient(const Multigraph& g, double p) : p_(p), n_(g.vertex_count()) {
    for (const Edge& e : g.edges()) {
      if (e.tail != e.head) pairs_.push_back(e);
    }
    weight_.resize(static_cast<std::size_t>(n_), 0.0);
    for (const Edge& e : g.edges()) {
      weight_[static_cast<std::size_t>(e.tail)] += 1.0;
      weight_[static_cast<std::size_t>(e.head)] += 1.0;
    }
  }

  int free_dims() const { return n_ - 1; }

  // y holds the first n-1 coordinates; the last coordinate is pinned at 0.
  double operator()(const std::vector<double>& y, int golden_iters = 200) const {
    auto coord = [&](int u) { return u == n_ - 1 ? 0.0 : y[static_cast<std::size_t>(u)]; };
    double num = 0.0;
    for (const Edge& e : pairs_) num += std::pow(std::fabs(coord(e.tail) - coord(e.head)), p_);
    double lo = 0.0;
    double hi = 0.0;
    for (int u = 0; u < n_; ++u) {
      lo = std::min(lo, coord(u));
      hi = std::max(hi, coord(u));
    }
    auto spread = [&](double c) {
      double s = 0.0;
      for (int u = 0; u < n_; ++u) s += weight_[static_cast<std::size_t>(u)] * std::pow(std::fabs(coord(u) - c), p_);
      return s;
    };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c1 = b - phi * (b - a);
    double c2 = a + phi * (b - a);
    double f1 = spread(c1);
    double f2 = spread(c2);
    for (int i = 0; i < golden_iters && b - a > 1e-15 * (1.0 + std::fabs(a)); ++i) {
      if (f1 <= f2) {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - phi * (b - a);
        f1 = spread(c1);
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + phi * (b - a);
        f2 = spread(c2);
      }
    }
    const double den = std::min({f1, f2, spread(0.5 * (a + b))});
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return num / den;
  }

 private:
  double p_;
  int n_;
  std::vector<Edge> pairs_;
  std::vector<double> weight_;
};

double grid_step(int vertices) {
  if (vertices <= 4) return 0.05;
  if (vertices == 5) return 0.1;
  return 0.2;
}

struct Candidate {
  double value;
  std::vector<double> point;
  bool operator<(const Candidate& o) const { return value < o.value; }
};

// Minimises R(y) + (|y|^2 - 1)^2; the penalty only fixes the scale, which R
// ignores.
double nelder_mead(const TinyQuotient& quotient, std::vector<double> start, double size) {
  const auto dim = start.size();
  auto objective = [&](const std::vector<double>& y) {
    double norm2 = 0.0;
    for (double v : y) norm2 += v * v;
    return quotient(y, 80) + (norm2 - 1.0) * (norm2 - 1.0);
  };
  double best = quotient(start);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<double>> simplex(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += size;
    std::vector<double> f(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) f[i] = objective(simplex[i]);
    for (int iter = 0; iter < 20000; ++iter) {
      std::vector<std::size_t> order(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[dim - 1 + (dim == 0 ? 1 : 0)];
      double diameter = 0.0;
      for (std::size_t i = 0; i <= dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) diameter = std::max(diameter, std::fabs(simplex[i][j] - simplex[lo][j]));
      if (diameter < 1e-13) break;
      std::vector<double> centroid(dim, 0.0);
      for (std::size_t i = 0; i <= dim; ++i) {
        if (i == hi) continue;
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / static_cast<double>(dim);
      }
      auto along = [&](double t) {
        std::vector<double> y(dim);
        for (std::size_t j = 0; j < dim; ++j) y[j] = centroid[j] + t * (simplex[hi][j] - centroid[j]);
        return y;
      };
      auto reflected = along(-1.0);
      const double fr = objective(reflected);
      if (fr < f[lo]) {
        auto expanded = along(-2.0);
        const double fe = objective(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          f[hi] = fe;
        } else {
          simplex[hi] = reflected;
          f[hi] = fr;
        }
      } else if (fr < f[second]) {
        simplex[hi] = reflected;
        f[hi] = fr;
      } else {
        auto contracted = fr < f[hi] ? along(-0.5) : along(0.5);
        const double fc = objective(contracted);
        if (fc < std::min(fr, f[hi])) {
          simplex[hi] = contracted;
          f[hi] = fc;
        } else {
          for (std::size_t i = 0; i <= dim; ++i) {
            if (i == lo) continue;
            for (std::size_t j = 0; j < dim; ++j) simplex[i][j] = simplex[lo][j] + 0.5 * (simplex[i][j] - simplex[lo][j]);
            f[i] = objective(simplex[i]);
          }
        }
      }
    }
    const auto lo = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    const double value = quotient(simplex[lo]);
    const bool improved = value < best - 1e-15 * (1.0 + best);
    if (value < best) {
      best = value;
      start = simplex[lo];
    }
    if (!improved && round > 0) break;
    size = std::max(size * 0.5, 1e-4);
  }
  return best;
}

}  // namespace

double oracle_tiny(const Multigraph& g, double p) {
  const int n = g.vertex_count();
  if (n > 6) throw SizeError("oracle_tiny handles at most six vertices");
  if (n < 2) throw DegenerateInputError("oracle_tiny needs at least two vertices");
  if (!(p > 1.0)) throw ParameterError("oracle_tiny requires p > 1");
  if (g.has_isolated_vertex()) throw DegenerateInputError("oracle_tiny: graph has an isolated vertex");
  if (!is_connected(g)) throw PreconditionError("oracle_tiny requires a connected graph");

  const TinyQuotient quotient(g, p);
  const int dim = quotient.free_dims();
  const double h = grid_step(n);
  const int steps = static_cast<int>(std::lround(1.0 / h));

  // Evaluate the quotient on the boundary of [-1, 1]^{n-1}. Nelder-Mead then
  // starts from the 20 best grid points and from every discrete local
  // minimum, so each basin the grid resolves gets its own start.
  const int side = 2 * steps + 1;
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(side);
  std::vector<double> value(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> idx(static_cast<std::size_t>(dim), -steps);
  std::vector<double> y(static_cast<std::size_t>(dim));
  auto point_of = [&](std::size_t flat) {
    std::vector<double> pt(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      pt[static_cast<std::size_t>(j)] = (static_cast<int>(flat % static_cast<std::size_t>(side)) - steps) * h;
      flat /= static_cast<std::size_t>(side);
    }
    return pt;
  };
  for (std::size_t flat = 0;; ++flat) {
    bool on_boundary = false;
    for (int j = 0; j < dim; ++j) {
      y[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j)] * h;
      on_boundary = on_boundary || std::abs(idx[static_cast<std::size_t>(j)]) == steps;
    }
    if (on_boundary) value[flat] = quotient(y, 60);
    int j = 0;
    while (j < dim && idx[static_cast<std::size_t>(j)] == steps) idx[static_cast<std::size_t>(j++)] = -steps;
    if (j == dim) break;
    ++idx[static_cast<std::size_t>(j)];
  }

  std::vector<Candidate> starts;
  std::vector<Candidate> all;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (std::isnan(value[flat])) continue;
    all.push_back({value[flat], {static_cast<double>(flat)}});
    bool local_min = true;
    std::size_t stride = 1;
    for (int j = 0; j < dim && local_min; ++j) {
      const auto coord = static_cast<int>((flat / stride) % static_cast<std::size_t>(side));
      for (int delta : {-1, 1}) {
        if (coord + delta < 0 || coord + delta >= side) continue;
        const std::size_t nb = delta < 0 ? flat - stride : flat + stride;
        if (!std::isnan(value[nb]) && value[nb] < value[flat]) local_min = false;
      }
      stride *= static_cast<std::size_t>(side);
    }
    if (local_min) starts.push_back(all.back());
  }
  std::sort(all.begin(), all.end());
  std::sort(starts.begin(), starts.end());
  constexpr std::size_t kBest = 20;
  constexpr std::size_t kLocal = 200;
  if (starts.size() > kLocal) starts.resize(kLocal);
  for (std::size_t i = 0; i < std::min(kBest, all.size()); ++i) starts.push_back(all[i]);

  double best = std::numeric_limits<double>::infinity();
  for (const Candidate& c : starts) {
    best = std::min(best, nelder_mead(quotient, point_of(static_cast<std::size_t>(c.point[0])), h));
  }
  return best;
}

}  // namespace plap
