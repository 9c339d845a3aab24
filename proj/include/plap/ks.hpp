#pragma once

#include <span>
#include <vector>

#include "plap/graph.hpp"
#include "plap/rng.hpp"

namespace plap {

/// r = |a|^p + |b|^p - |a-b|^p, r_tilde = {a}^{p-1} b + a {b}^{p-1},
/// r_bar = max(|a|^{p-1}|b|, |a||b|^{p-1}).
struct RemainderTriple {
  double r = 0.0;
  double r_tilde = 0.0;
  double r_bar = 0.0;
};

RemainderTriple remainders(double a, double b, double p);

struct InequalityReport {
  long long samples = 0;
  /// Samples with p >= 3, where r <= p r_tilde is also checked.
  long long samples_p3 = 0;
  long long violations_bar_le_abs = 0;     // r_bar <= |r|
  long long violations_abs_le_bar = 0;     // |r| <= (1 + p 2^{p-1}) r_bar
  long long violations_tilde_le_abs = 0;   // r_tilde <= |r_tilde|
  long long violations_abs_tilde = 0;      // |r_tilde| <= 2 r_bar
  long long violations_r_le_p_tilde = 0;   // r <= p r_tilde, p >= 3
  /// Tightest observed ratios (1 means an inequality is attained).
  double min_abs_over_bar = 0.0;           // min |r| / r_bar
  double max_abs_over_upper = 0.0;         // max |r| / ((1 + p 2^{p-1}) r_bar)
  double max_tilde_over_bar = 0.0;         // max |r_tilde| / (2 r_bar)
  double max_r_over_p_tilde = 0.0;         // max over r_tilde > 0 of r / (p r_tilde)

  long long violations() const {
    return violations_bar_le_abs + violations_abs_le_bar + violations_tilde_le_abs +
           violations_abs_tilde + violations_r_le_p_tilde;
  }
};

/// Draws (a, b) uniform in [-ab_range, ab_range]^2 and p uniform in
/// [p_lo, p_hi]; comparisons allow a roundoff slack of 1e-12 (|a|+|b|)^p.
InequalityReport remainder_inequality_suite(long long samples, double p_lo, double p_hi, RngSeed seed,
                                            double ab_range = 10.0);

struct Decomposition {
  std::vector<int> light_edges;
  std::vector<int> heavy_edges;
  double beta = 0.0;
  /// d^beta / (d m); heavy means r_bar strictly above it.
  double threshold = 0.0;
  double X = 0.0;  // Sum of r over all edges, = X_l + X_h
  double X_l = 0.0;
  double X_h = 0.0;
  double X_tilde = 0.0;
  double X_tilde_l = 0.0;
  double X_tilde_h = 0.0;
  double X_bar = 0.0;
  double X_bar_h = 0.0;
  /// Z = ||dx||_p^p and ||x||_{p,d}^p.
  double Z = 0.0;
  double norm_p = 0.0;
  /// |Z - (||x||^p - X)|; on S_{p,d} this is the identity Z = 1 - X.
  double identity_defect = 0.0;
};

Decomposition decompose_light_heavy(const Multigraph& g, std::span<const double> x, double p, int d_max);

/// Parameters of the net T_{p,d,R}.
class NetParams {
 public:
  /// R defaults to (1 + eps theta^{1/p})^q when `radius` <= 0.
  NetParams(double p, double epsilon, double theta, DegreeSequence d, double radius = 0.0);

  double p() const { return p_; }
  double q() const { return p_ / (p_ - 1.0); }
  double epsilon() const { return epsilon_; }
  double theta() const { return theta_; }
  double R() const { return radius_; }
  /// (1 - eps theta^{1/p})^q
  double R_minus() const;
  const DegreeSequence& degrees() const { return d_; }
  int size() const { return static_cast<int>(d_.size()); }
  /// eps d^{1/p} / m^{1/q}: the grid step of {x_i}^{p-1} d_i.
  double unit() const;
  /// eps d^{1/p} / (d_i m^{1/q}): the grid step of {x_i}^{p-1}.
  double unit(int i) const { return unit() / d_[static_cast<std::size_t>(i)]; }

 private:
  double p_;
  double epsilon_;
  double theta_;
  DegreeSequence d_;
  double radius_;
};

struct NetRounding {
  VertexFunction x_prime;
  /// {x'_i}^{p-1} = k_i * unit(i), with Sum k_i = 0.
  std::vector<long long> k;
  /// Number of leading coordinates that were incremented.
  long long shift_r = 0;
};

/// Floors {x_i}^{p-1} to the vertex grid and increments the first r
/// coordinates so the grid integers sum to zero. Requires x on S_{p,d}
/// within 1e-8.
NetRounding net_round(std::span<const double> x, const NetParams& params);

/// Bound on |Z_x - Z_{x'}| for a rounded point when Z_x <= 1:
/// 2p (eps theta)^{1/(p-1)} (1 + 2 (eps theta)^{1/(p-1)})^{p-1}.
double net_rounding_z_bound(double p, double epsilon, double theta);

struct NetEnumeration {
  std::vector<std::vector<long long>> k;
  std::vector<VertexFunction> points;
  long long count = 0;
  /// (4 e R / eps)^m
  double size_bound = 0.0;
};

/// Every point of T_{p,d,R} for m <= 4, refusing grids above 1e7 candidates.
NetEnumeration net_enumerate_tiny(const NetParams& params);

/// 2 exp(-T^2 / (2 N c^2)) clamped to [0, 2].
double azuma_tail(double T, long long N, double c);

/// p / (2 + 2p)
double light_heavy_beta(double p);

struct LightBound {
  /// Upper bound on X^l for every net point.
  double value = 0.0;
  /// Failure probability 2 exp(-K^2 m / c + m log(16e/eps)), clamped to 2,
  /// with c = 128 (p >= 3) or 6000 (p in [2,3)).
  double failure_probability = 0.0;
  double exponent_constant = 0.0;
  /// The o(m^{2/3}) correction in the exponent is not modelled.
  bool has_unmodeled_term = true;
};

LightBound light_bound(double p, double theta, double K, double d, long long m, double epsilon, double R);

/// 8 theta^3 R^2 / d^{beta/p}: bound on the expected light sum of r_tilde.
double expectation_light_bound(double p, double theta, double R, double d);

/// Sum of r_bar(x_i, x_j) over ordered pairs (i, j) with r_bar >= gamma/(d m).
double gamma_pair_sum(std::span<const double> x, double p, double gamma, double d);
/// 2 m theta^2 A^2 / (gamma^{1/p} d)
double gamma_pair_bound(long long m, double theta, double A, double gamma, double d, double p);

/// Exact configuration-model expectation of the light sum of r_tilde:
/// off-diagonal pairs weighted d_i d_j / (2E-1), loops (d_i (d_i-1)/2)/(2E-1).
double configuration_light_expectation(std::span<const double> x, const DegreeSequence& d, double p);

}  // namespace plap
