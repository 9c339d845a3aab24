#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plap/graph.hpp"

namespace plap {

/// (Delta_p x)(u) = 1/val(u) Sum_{v ~ u} {x_u - x_v}^{p-1}, parallel edges
/// counted with multiplicity, loops contributing zero.
VertexFunction apply_p_laplacian(const Multigraph& g, std::span<const double> x, double p);

enum class EigenMethod { automatic, jacobi, tridiagonal_qr };

/// All eigenvalues of a dense symmetric matrix (row-major, n x n) by cyclic
/// Jacobi rotations, sorted ascending.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n, double off_tol = 1e-13);

/// The symmetric matrix D^{-1/2} (A + 2L) D^{-1/2}; L is the diagonal of loop counts.
std::vector<double> normalized_adjacency(const Multigraph& g);

/// lambda_{1,2} as 1 - mu_2 of normalized_adjacency(g). `automatic` uses
/// Jacobi up to 200 vertices and Householder tridiagonalisation + QL above.
double lambda_exact_p2(const Multigraph& g, EigenMethod method = EigenMethod::automatic);

struct SolverOptions {
  int restarts = 32;
  int max_iters = 100000;
  double grad_tol = 1e-10;
  double step_shrink = 0.5;
  std::uint64_t seed = 0;
  /// Worker threads for independent restarts; results do not depend on it.
  int threads = 1;
};

struct EigenEstimate {
  double lambda = 0.0;
  VertexFunction minimizer;
  int restarts_used = 0;
  bool converged = false;
  /// max_u |(Delta_p x)(u) - lambda {x_u}^{p-1}| at the minimizer.
  double residual = 0.0;
  /// max-norm of the gradient of the Rayleigh quotient at the minimizer.
  double gradient_norm = 0.0;
  int iterations = 0;
  /// Set when the graph was disconnected and `minimizer` is a component indicator.
  bool disconnected = false;
};

/// Upper bound on lambda_{1,p}: best of `restarts` projected-gradient runs
/// on S_{p,d}. Requires p >= 1.5 and no isolated vertices.
EigenEstimate lambda_estimate(const Multigraph& g, double p, const SolverOptions& opts = {});

/// One projected-gradient run from a caller-supplied start.
EigenEstimate lambda_refine(const Multigraph& g, double p, std::span<const double> start,
                            const SolverOptions& opts = {});

struct EigenpairCheck {
  bool ok = false;
  double residual = 0.0;
};

/// ok iff max_u |(Delta_p x)(u) - lambda {x_u}^{p-1}| <= tol (1+|lambda|) max_u |x_u|^{p-1}.
EigenpairCheck verify_eigenpair(const Multigraph& g, std::span<const double> x, double lambda,
                                double p, double tol);

/// Brute-force lambda_{1,p} for connected graphs with at most six vertices:
/// grid search on the boundary of the unit cube followed by Nelder-Mead.
/// Shares no code with lambda_estimate.
double oracle_tiny(const Multigraph& g, double p);

enum class ClosedFormKind { complete, multipartite, bipartite_envelope };

struct ClosedFormParams {
  int m = 0;          // complete: vertex count
  int k = 0;          // multipartite: part count
  int part_size = 0;  // multipartite / bipartite: M
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  /// The bounds only hold up to o(1) terms as the graph grows.
  bool asymptotic = false;
};

Bounds closed_form_bounds(ClosedFormKind kind, const ClosedFormParams& params, double p);

/// E^{1 - p/p'} lambda_{p'}^{p/p'}, a lower bound for lambda_{1,p}.
double semicontinuity_bound(double lambda_pprime, long long edge_count, double p, double pprime);

/// ((1-iota)/(1+iota)) * mean of the three class eigenvalues.
double split_three_bound(std::span<const double, 3> lambdas, double iota);
/// lambda(G) / (1 + iota) when val_H <= iota * val_G pointwise.
double add_few_edges_bound(double lambda_g, double iota);

/// Smallest iota with every degree of every part in [(1-iota)d, (1+iota)d]
/// for a common d.
double regularity_iota(std::span<const Multigraph> parts);

/// Smallest iota with val_H(u) <= iota val_G(u) for all u.
double domination_iota(const Multigraph& g, const Multigraph& h);

const char* to_string(EigenMethod m);

}  // namespace plap
