#include "plap/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <utility>

#include "plap/errors.hpp"
#include "plap/rng.hpp"

namespace plap {

namespace {

void require_no_isolated(const Multigraph& g, const char* what) {
  if (g.has_isolated_vertex()) {
    throw DegenerateInputError(std::string(what) + ": graph has an isolated vertex (val(u) = 0)");
  }
}

// r_u = (Delta_p x)(u) - lambda {x_u}^{p-1}
void eigen_defect(const Multigraph& g, std::span<const double> x, double p, double lambda,
                  std::vector<double>& r) {
  const int n = g.vertex_count();
  r.resize(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const double xu = x[static_cast<std::size_t>(u)];
    double s = 0.0;
    for (int v : g.neighbours(u)) s += signed_pow(xu - x[static_cast<std::size_t>(v)], p - 1.0);
    r[static_cast<std::size_t>(u)] = s / g.valency(u) - lambda * signed_pow(xu, p - 1.0);
  }
}

VertexFunction project_to_sphere(const Multigraph& g, std::span<const double> y, double p) {
  auto centered = center_to_zero_p_mean(y, g.degrees(), p);
  return normalize_to_sphere(centered.values, g.degrees(), p);
}

struct RunResult {
  VertexFunction x;
  double energy = std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

double gradient_max_norm(const Multigraph& g, std::span<const double> r, double p) {
  double m = 0.0;
  for (std::size_t u = 0; u < r.size(); ++u) {
    m = std::max(m, std::fabs(p * g.valency(static_cast<int>(u)) * r[u]));
  }
  return m;
}

// Projected gradient on S_{p,d}. The search direction is the gradient of the
// Rayleigh quotient in the d-weighted metric, -p r; Barzilai-Borwein trial
// steps in the same metric with Armijo backtracking on the projected point.
RunResult projected_gradient(const Multigraph& g, double p, std::span<const double> start,
                             const SolverOptions& opts) {
  constexpr double kArmijo = 1e-4;
  constexpr double kRoundoff = 8.0 * std::numeric_limits<double>::epsilon();
  const auto n = static_cast<std::size_t>(g.vertex_count());
  RunResult out;
  VertexFunction x = project_to_sphere(g, start, p);
  double energy = edge_energy(g, x, p);
  std::vector<double> r;
  eigen_defect(g, x, p, energy, r);
  double gnorm = gradient_max_norm(g, r, p);

  double step = 1.0 / (p * std::pow(2.0, p - 1.0));
  VertexFunction trial(n);
  VertexFunction prev_x;
  std::vector<double> prev_r;
  double best_gradient = gnorm;
  int stall = 0;
  int it = 0;
  for (; it < opts.max_iters && !(gnorm < opts.grad_tol); ++it) {
    if (!prev_x.empty()) {
      // BB1 in the weighted metric: <s, D s> / <s, D (p r - p r_prev)>.
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        const double w = g.valency(static_cast<int>(u));
        const double s = x[u] - prev_x[u];
        ss += w * s * s;
        sy += w * s * p * (r[u] - prev_r[u]);
      }
      if (sy > 0.0 && ss > 0.0) {
        step = std::clamp(ss / sy, 1e-20, 1e20);
      } else {
        step = std::min(step * 2.0, 1e20);
      }
    }
    double decrease = 0.0;
    for (std::size_t u = 0; u < n; ++u) decrease += g.valency(static_cast<int>(u)) * r[u] * r[u];
    decrease *= p * p;

    bool accepted = false;
    VertexFunction candidate;
    double cand_energy = 0.0;
    for (int ls = 0; ls < 200; ++ls) {
      for (std::size_t u = 0; u < n; ++u) trial[u] = x[u] - step * p * r[u];
      try {
        candidate = project_to_sphere(g, trial, p);
      } catch (const DegenerateInputError&) {
        step *= opts.step_shrink;
        continue;
      }
      cand_energy = edge_energy(g, candidate, p);
      // Near a minimizer the Armijo decrease drops below the resolution of
      // E itself; a roundoff-sized slack lets the gradient keep shrinking.
      if (cand_energy <= energy - kArmijo * step * decrease + kRoundoff * energy) {
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
      if (step < 1e-30) break;
    }
    if (!accepted) break;

    prev_x = std::move(x);
    prev_r = r;
    x = std::move(candidate);
    energy = cand_energy;
    eigen_defect(g, x, p, energy, r);
    gnorm = gradient_max_norm(g, r, p);

    if (gnorm < 0.5 * best_gradient) {
      best_gradient = gnorm;
      stall = 0;
    } else if (++stall > 2000) {
      ++it;
      break;
    }
  }
  out.x = std::move(x);
  out.energy = energy;
  out.gradient_norm = gnorm;
  out.converged = gnorm < opts.grad_tol;
  out.iterations = it;
  return out;
}

void validate(const Multigraph& g, double p, const SolverOptions& opts) {
  if (!(p >= 1.5)) throw ParameterError("the iterative solver requires p >= 1.5");
  if (opts.restarts < 1) throw ParameterError("SolverOptions.restarts must be >= 1");
  if (opts.max_iters < 1) throw ParameterError("SolverOptions.max_iters must be >= 1");
  if (!(opts.grad_tol > 0.0)) throw ParameterError("SolverOptions.grad_tol must be > 0");
  if (!(opts.step_shrink > 0.0 && opts.step_shrink < 1.0)) {
    throw ParameterError("SolverOptions.step_shrink must lie in (0, 1)");
  }
  require_no_isolated(g, "lambda_estimate");
  if (g.vertex_count() < 2) throw DegenerateInputError("lambda_estimate needs at least two vertices");
}

EigenEstimate finish(const Multigraph& g, double p, RunResult run, int restarts) {
  EigenEstimate est;
  est.lambda = rayleigh_quotient(g, run.x, p);
  std::vector<double> r;
  eigen_defect(g, run.x, p, est.lambda, r);
  double res = 0.0;
  for (double v : r) res = std::max(res, std::fabs(v));
  est.residual = res;
  est.gradient_norm = run.gradient_norm;
  est.converged = run.converged;
  est.iterations = run.iterations;
  est.restarts_used = restarts;
  est.minimizer = std::move(run.x);
  return est;
}

VertexFunction restart_start(const Multigraph& g, int index, int restarts, std::uint64_t seed) {
  const int m = g.vertex_count();
  const int coordinate_starts = std::min(m, std::max(1, restarts / 2));
  VertexFunction x(static_cast<std::size_t>(m), 0.0);
  if (index < coordinate_starts) {
    const auto u = static_cast<std::size_t>(
        (static_cast<long long>(index) * m) / coordinate_starts);
    x[u] = 1.0;
    return x;
  }
  CounterRng rng({seed, static_cast<std::uint64_t>(index)});
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

VertexFunction apply_p_laplacian(const Multigraph& g, std::span<const double> x, double p) {
  if (x.size() != static_cast<std::size_t>(g.vertex_count())) {
    throw DimensionError("apply_p_laplacian: function length does not match vertex count");
  }
  if (!(p > 1.0)) throw ParameterError("apply_p_laplacian requires p > 1");
  require_no_isolated(g, "apply_p_laplacian");
  std::vector<double> out;
  eigen_defect(g, x, p, 0.0, out);
  return out;
}

std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n, double off_tol) {
  if (n < 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DimensionError("jacobi_eigenvalues: matrix is not n x n");
  }
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  };
  double fro = 0.0;
  for (double v : a) fro += v * v;
  const double target = off_tol * std::max(1.0, std::sqrt(fro));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (std::sqrt(off) <= target) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = at(p, k) = c * akp - s * akq;
          at(k, q) = at(q, k) = s * akp + c * akq;
        }
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::vector<double> normalized_adjacency(const Multigraph& g) {
  require_no_isolated(g, "normalized_adjacency");
  const int n = g.vertex_count();
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> w(nn * nn, 0.0);
  std::vector<double> inv_sqrt(nn);
  for (std::size_t u = 0; u < nn; ++u) inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(g.valency(static_cast<int>(u))));
  for (const Edge& e : g.edges()) {
    const auto u = static_cast<std::size_t>(e.tail);
    const auto v = static_cast<std::size_t>(e.head);
    if (u == v) {
      w[u * nn + u] += 2.0 * inv_sqrt[u] * inv_sqrt[u];
    } else {
      const double val = inv_sqrt[u] * inv_sqrt[v];
      w[u * nn + v] += val;
      w[v * nn + u] += val;
    }
  }
  return w;
}

double lambda_exact_p2(const Multigraph& g, EigenMethod method) {
  require_no_isolated(g, "lambda_exact_p2");
  const int n = g.vertex_count();
  if (n < 2) throw DegenerateInputError("lambda_exact_p2 needs at least two vertices");
  auto w = normalized_adjacency(g);
  if (method == EigenMethod::automatic) method = n <= 200 ? EigenMethod::jacobi : EigenMethod::tridiagonal_qr;
  double mu2 = 0.0;
  if (method == EigenMethod::jacobi) {
    const auto eig = jacobi_eigenvalues(std::move(w), n);
    mu2 = eig[static_cast<std::size_t>(n) - 2];
  } else {
    Eigen::Map<const Eigen::MatrixXd> mat(w.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
    mu2 = solver.eigenvalues()[n - 2];
  }
  return std::max(0.0, 1.0 - mu2);
}

EigenEstimate lambda_refine(const Multigraph& g, double p, std::span<const double> start,
                            const SolverOptions& opts) {
  validate(g, p, opts);
  if (start.size() != static_cast<std::size_t>(g.vertex_count())) {
    throw DimensionError("lambda_refine: start length does not match vertex count");
  }
  return finish(g, p, projected_gradient(g, p, start, opts), 1);
}

EigenEstimate lambda_estimate(const Multigraph& g, double p, const SolverOptions& opts) {
  validate(g, p, opts);
  const auto labels = connected_components(g);
  if (*std::max_element(labels.begin(), labels.end()) > 0) {
    VertexFunction indicator(labels.size());
    for (std::size_t u = 0; u < labels.size(); ++u) indicator[u] = labels[u] == 0 ? 1.0 : 0.0;
    RunResult run;
    run.x = project_to_sphere(g, indicator, p);
    run.gradient_norm = 0.0;
    run.converged = true;
    EigenEstimate est = finish(g, p, std::move(run), 0);
    est.lambda = 0.0;
    est.disconnected = true;
    return est;
  }

  std::vector<RunResult> runs(static_cast<std::size_t>(opts.restarts));
  auto work = [&](int first, int stride) {
    for (int i = first; i < opts.restarts; i += stride) {
      const auto start = restart_start(g, i, opts.restarts, opts.seed);
      runs[static_cast<std::size_t>(i)] = projected_gradient(g, p, start, opts);
    }
  };
  const int threads = std::clamp(opts.threads, 1, opts.restarts);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].energy < runs[best].energy) best = i;
  }
  return finish(g, p, std::move(runs[best]), opts.restarts);
}

EigenpairCheck verify_eigenpair(const Multigraph& g, std::span<const double> x, double lambda,
                                double p, double tol) {
  if (x.size() != static_cast<std::size_t>(g.vertex_count())) {
    throw DimensionError("verify_eigenpair: function length does not match vertex count");
  }
  require_no_isolated(g, "verify_eigenpair");
  std::vector<double> r;
  eigen_defect(g, x, p, lambda, r);
  double res = 0.0;
  double xmax = 0.0;
  for (std::size_t u = 0; u < r.size(); ++u) {
    res = std::max(res, std::fabs(r[u]));
    xmax = std::max(xmax, std::fabs(x[u]));
  }
  EigenpairCheck check;
  check.residual = res;
  check.ok = res <= tol * (1.0 + std::fabs(lambda)) * std::pow(xmax, p - 1.0);
  return check;
}

Bounds closed_form_bounds(ClosedFormKind kind, const ClosedFormParams& params, double p) {
  if (!(p >= 2.0)) throw ParameterError("closed-form bounds are stated for p >= 2");
  const double two_pm1 = std::pow(2.0, p - 1.0);
  switch (kind) {
    case ClosedFormKind::complete: {
      if (params.m < 2) throw ParameterError("complete graph needs m >= 2");
      const double m = params.m;
      const double v = (m - 2.0 + two_pm1) / (m - 1.0);
      return {v, v, false};
    }
    case ClosedFormKind::multipartite: {
      if (params.k < 2 || params.part_size < 2) throw ParameterError("multipartite bounds need k, M >= 2");
      if (p == 2.0) return {1.0, 1.0, false};
      const double k = params.k;
      const double m = k * params.part_size;
      const double lower = (m - 2.0 + two_pm1) * k / (m * (k - 1.0 + std::pow(2.0, p + 2.0)));
      return {lower, 1.0, false};
    }
    case ClosedFormKind::bipartite_envelope: {
      if (!(p > 2.0)) throw ParameterError("bipartite envelope is stated for p > 2");
      return {0.5 * std::pow(2.0, -p), std::pow(2.0 / std::sqrt(5.0), p), true};
    }
  }
  throw ParameterError("unknown closed-form kind");
}

double semicontinuity_bound(double lambda_pprime, long long edge_count, double p, double pprime) {
  if (!(pprime >= 2.0 && p >= pprime)) throw ParameterError("semicontinuity_bound needs p >= p' >= 2");
  if (edge_count < 1) throw ParameterError("semicontinuity_bound needs E >= 1");
  if (!(lambda_pprime >= 0.0)) throw ParameterError("semicontinuity_bound needs lambda >= 0");
  const double ratio = p / pprime;
  return std::pow(static_cast<double>(edge_count), 1.0 - ratio) * std::pow(lambda_pprime, ratio);
}

double split_three_bound(std::span<const double, 3> lambdas, double iota) {
  if (!(iota >= 0.0 && iota < 1.0)) throw ParameterError("split_three_bound needs iota in [0, 1)");
  return (1.0 - iota) / (1.0 + iota) * (lambdas[0] + lambdas[1] + lambdas[2]) / 3.0;
}

double add_few_edges_bound(double lambda_g, double iota) {
  if (!(iota >= 0.0) || !std::isfinite(iota)) throw ParameterError("add_few_edges_bound needs finite iota >= 0");
  return lambda_g / (1.0 + iota);
}

double regularity_iota(std::span<const Multigraph> parts) {
  if (parts.empty()) throw ParameterError("regularity_iota needs at least one graph");
  int lo = std::numeric_limits<int>::max();
  int hi = 0;
  for (const auto& g : parts) {
    lo = std::min(lo, g.degrees().min());
    hi = std::max(hi, g.degrees().max());
  }
  if (hi == 0) throw DegenerateInputError("regularity_iota: all graphs are edgeless");
  return static_cast<double>(hi - lo) / static_cast<double>(hi + lo);
}

double domination_iota(const Multigraph& g, const Multigraph& h) {
  if (g.vertex_count() != h.vertex_count()) throw DimensionError("domination_iota: vertex counts differ");
  double iota = 0.0;
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (h.valency(u) == 0) continue;
    if (g.valency(u) == 0) return std::numeric_limits<double>::infinity();
    iota = std::max(iota, static_cast<double>(h.valency(u)) / g.valency(u));
  }
  return iota;
}

const char* to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::automatic: return "automatic";
    case EigenMethod::jacobi: return "jacobi";
    case EigenMethod::tridiagonal_qr: return "tridiagonal-qr";
  }
  return "unknown";
}

}  // namespace plap
