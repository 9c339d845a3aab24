#include "plap/ks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plap/errors.hpp"

namespace plap {

namespace {

constexpr double kE = 2.718281828459045;

void check_p(double p, const char* what) {
  if (!(p >= 2.0)) throw ParameterError(std::string(what) + " requires p >= 2");
}

}  // namespace

RemainderTriple remainders(double a, double b, double p) {
  check_p(p, "remainders");
  RemainderTriple t;
  t.r = abs_pow(a, p) + abs_pow(b, p) - abs_pow(a - b, p);
  t.r_tilde = signed_pow(a, p - 1.0) * b + a * signed_pow(b, p - 1.0);
  t.r_bar = std::max(abs_pow(a, p - 1.0) * std::fabs(b), std::fabs(a) * abs_pow(b, p - 1.0));
  return t;
}

InequalityReport remainder_inequality_suite(long long samples, double p_lo, double p_hi, RngSeed seed,
                                            double ab_range) {
  check_p(p_lo, "remainder_inequality_suite");
  if (!(p_hi >= p_lo)) throw ParameterError("remainder_inequality_suite: empty p range");
  if (samples < 0) throw ParameterError("remainder_inequality_suite: negative sample count");
  InequalityReport rep;
  rep.min_abs_over_bar = std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  for (long long s = 0; s < samples; ++s) {
    const double a = rng.uniform(-ab_range, ab_range);
    const double b = rng.uniform(-ab_range, ab_range);
    const double p = rng.uniform(p_lo, p_hi);
    const auto t = remainders(a, b, p);
    const double slack = 1e-12 * std::pow(std::fabs(a) + std::fabs(b), p);
    const double upper = (1.0 + p * std::pow(2.0, p - 1.0)) * t.r_bar;
    ++rep.samples;
    if (t.r_bar > std::fabs(t.r) + slack) ++rep.violations_bar_le_abs;
    if (std::fabs(t.r) > upper + slack) ++rep.violations_abs_le_bar;
    if (t.r_tilde > std::fabs(t.r_tilde) + slack) ++rep.violations_tilde_le_abs;
    if (std::fabs(t.r_tilde) > 2.0 * t.r_bar + slack) ++rep.violations_abs_tilde;
    if (t.r_bar > 0.0) {
      rep.min_abs_over_bar = std::min(rep.min_abs_over_bar, std::fabs(t.r) / t.r_bar);
      rep.max_abs_over_upper = std::max(rep.max_abs_over_upper, std::fabs(t.r) / upper);
      rep.max_tilde_over_bar = std::max(rep.max_tilde_over_bar, std::fabs(t.r_tilde) / (2.0 * t.r_bar));
    }
    if (p >= 3.0) {
      ++rep.samples_p3;
      if (t.r > p * t.r_tilde + slack) ++rep.violations_r_le_p_tilde;
      if (t.r_tilde > 0.0) rep.max_r_over_p_tilde = std::max(rep.max_r_over_p_tilde, t.r / (p * t.r_tilde));
    }
  }
  return rep;
}

double light_heavy_beta(double p) { return p / (2.0 + 2.0 * p); }

Decomposition decompose_light_heavy(const Multigraph& g, std::span<const double> x, double p, int d_max) {
  if (x.size() != static_cast<std::size_t>(g.vertex_count())) {
    throw DimensionError("decompose_light_heavy: function length does not match vertex count");
  }
  if (d_max < 1) throw ParameterError("decompose_light_heavy needs d_max >= 1");
  check_p(p, "decompose_light_heavy");
  Decomposition out;
  const double d = d_max;
  out.beta = light_heavy_beta(p);
  out.threshold = std::pow(d, out.beta) / (d * g.vertex_count());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto t = remainders(x[static_cast<std::size_t>(edges[i].tail)], x[static_cast<std::size_t>(edges[i].head)], p);
    out.X_bar += t.r_bar;
    if (t.r_bar > out.threshold) {
      out.heavy_edges.push_back(static_cast<int>(i));
      out.X_h += t.r;
      out.X_tilde_h += t.r_tilde;
      out.X_bar_h += t.r_bar;
    } else {
      out.light_edges.push_back(static_cast<int>(i));
      out.X_l += t.r;
      out.X_tilde_l += t.r_tilde;
    }
  }
  out.X = out.X_l + out.X_h;
  out.X_tilde = out.X_tilde_l + out.X_tilde_h;
  out.Z = edge_energy(g, x, p);
  out.norm_p = weighted_p_norm(x, g.degrees(), p);
  out.identity_defect = std::fabs(out.Z - (out.norm_p - out.X));
  return out;
}

NetParams::NetParams(double p, double epsilon, double theta, DegreeSequence d, double radius)
    : p_(p), epsilon_(epsilon), theta_(theta), d_(std::move(d)), radius_(radius) {
  check_p(p, "NetParams");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ParameterError("NetParams: epsilon must lie in (0, 1]");
  if (!(theta >= 1.0)) throw ParameterError("NetParams: theta must be >= 1");
  if (epsilon * theta > 1.0) throw ParameterError("NetParams: epsilon * theta must be <= 1");
  if (d_.size() == 0 || d_.min() < 1) throw ParameterError("NetParams: degrees must be positive");
  if (theta * d_.min() < d_.max()) throw ParameterError("NetParams: every degree must be >= d_max / theta");
  if (radius_ <= 0.0) radius_ = std::pow(1.0 + epsilon * std::pow(theta, 1.0 / p), q());
  if (!(radius_ >= 1.0)) throw ParameterError("NetParams: R must be >= 1");
}

double NetParams::R_minus() const { return std::pow(1.0 - epsilon_ * std::pow(theta_, 1.0 / p_), q()); }

double NetParams::unit() const {
  return epsilon_ * std::pow(static_cast<double>(d_.max()), 1.0 / p_) /
         std::pow(static_cast<double>(d_.size()), 1.0 / q());
}

NetRounding net_round(std::span<const double> x, const NetParams& params) {
  const int m = params.size();
  if (x.size() != static_cast<std::size_t>(m)) throw DimensionError("net_round: function length does not match degrees");
  const double p = params.p();
  const auto& d = params.degrees();
  double mean = 0.0;
  double scale = 0.0;
  for (int i = 0; i < m; ++i) {
    const double s = signed_pow(x[static_cast<std::size_t>(i)], p - 1.0) * d[static_cast<std::size_t>(i)];
    mean += s;
    scale += std::fabs(s);
  }
  const double norm = weighted_p_norm(x, d, p);
  if (std::fabs(norm - 1.0) > 1e-8 || std::fabs(mean) > 1e-8 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "net_round: x is not on S_{p,d} (norm^p = " << norm << ", p-mean = " << mean << ")";
    throw PreconditionError(msg.str());
  }
  NetRounding out;
  out.k.resize(static_cast<std::size_t>(m));
  long long total = 0;
  for (int i = 0; i < m; ++i) {
    const double y = signed_pow(x[static_cast<std::size_t>(i)], p - 1.0);
    out.k[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(y / params.unit(i)));
    total += out.k[static_cast<std::size_t>(i)];
  }
  // The remainders r_i d_i sum to r units with 0 <= r < m; roundoff can push r to m.
  out.shift_r = -total;
  if (out.shift_r < 0 || out.shift_r > m) {
    throw PreconditionError("net_round: grid remainder outside [0, m]; x is too far from zero p-mean");
  }
  for (long long i = 0; i < out.shift_r; ++i) ++out.k[static_cast<std::size_t>(i)];
  out.x_prime.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double y = static_cast<double>(out.k[static_cast<std::size_t>(i)]) * params.unit(i);
    out.x_prime[static_cast<std::size_t>(i)] = signed_pow(y, 1.0 / (p - 1.0));
  }
  return out;
}

double net_rounding_z_bound(double p, double epsilon, double theta) {
  const double s = std::pow(epsilon * theta, 1.0 / (p - 1.0));
  return 2.0 * p * s * std::pow(1.0 + 2.0 * s, p - 1.0);
}

NetEnumeration net_enumerate_tiny(const NetParams& params) {
  const int m = params.size();
  if (m > 4) throw SizeError("net_enumerate_tiny handles at most four vertices");
  const double q = params.q();
  const double R = params.R();
  const auto& d = params.degrees();
  std::vector<long long> bound(static_cast<std::size_t>(m));
  double candidates = 1.0;
  for (int i = 0; i < m; ++i) {
    // |k_i unit_i|^q d_i <= R
    bound[static_cast<std::size_t>(i)] =
        static_cast<long long>(std::floor(std::pow(R / d[static_cast<std::size_t>(i)], 1.0 / q) / params.unit(i) + 1e-9));
    if (i + 1 < m) candidates *= 2.0 * static_cast<double>(bound[static_cast<std::size_t>(i)]) + 1.0;
  }
  if (candidates > 1e7) throw SizeError("net_enumerate_tiny: grid exceeds 1e7 candidates");

  NetEnumeration out;
  out.size_bound = std::pow(4.0 * kE * R / params.epsilon(), m);
  auto weight = [&](int i, long long k) {
    return std::pow(std::fabs(static_cast<double>(k) * params.unit(i)), q) * d[static_cast<std::size_t>(i)];
  };
  std::vector<long long> k(static_cast<std::size_t>(m), 0);
  for (int i = 0; i + 1 < m; ++i) k[static_cast<std::size_t>(i)] = -bound[static_cast<std::size_t>(i)];
  for (;;) {
    long long sum = 0;
    double norm = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      sum += k[static_cast<std::size_t>(i)];
      norm += weight(i, k[static_cast<std::size_t>(i)]);
    }
    k[static_cast<std::size_t>(m - 1)] = -sum;
    norm += weight(m - 1, -sum);
    if (norm <= R * (1.0 + 1e-12)) {
      out.k.push_back(k);
      VertexFunction x(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        x[static_cast<std::size_t>(i)] =
            signed_pow(static_cast<double>(k[static_cast<std::size_t>(i)]) * params.unit(i), 1.0 / (params.p() - 1.0));
      }
      out.points.push_back(std::move(x));
    }
    int i = 0;
    while (i + 1 < m && k[static_cast<std::size_t>(i)] == bound[static_cast<std::size_t>(i)]) {
      k[static_cast<std::size_t>(i)] = -bound[static_cast<std::size_t>(i)];
      ++i;
    }
    if (i + 1 >= m) break;
    ++k[static_cast<std::size_t>(i)];
  }
  out.count = static_cast<long long>(out.k.size());
  return out;
}

double azuma_tail(double T, long long N, double c) {
  if (N < 1) throw ParameterError("azuma_tail needs N >= 1");
  if (!(c > 0.0)) throw ParameterError("azuma_tail needs c > 0");
  const double v = 2.0 * std::exp(-T * T / (2.0 * static_cast<double>(N) * c * c));
  return std::clamp(v, 0.0, 2.0);
}

LightBound light_bound(double p, double theta, double K, double d, long long m, double epsilon, double R) {
  check_p(p, "light_bound");
  if (!(theta >= 1.0 && K > 0.0 && d >= 1.0 && m >= 1 && epsilon > 0.0 && R >= 1.0)) {
    throw ParameterError("light_bound: parameters out of range");
  }
  const double scale = std::pow(d, light_heavy_beta(p) / p);
  LightBound out;
  if (p >= 3.0) {
    out.value = p * (128.0 * std::pow(theta, 3) + K) / scale;
    out.exponent_constant = 128.0;
  } else {
    out.value = R * (1.0 - 1.0 / (theta * theta)) + (1200.0 * std::pow(theta, 3) + K) / scale;
    out.exponent_constant = 6000.0;
  }
  const double md = static_cast<double>(m);
  const double exponent = -K * K * md / out.exponent_constant + md * std::log(16.0 * kE / epsilon);
  out.failure_probability = std::min(2.0, 2.0 * std::exp(exponent));
  return out;
}

double expectation_light_bound(double p, double theta, double R, double d) {
  check_p(p, "expectation_light_bound");
  return 8.0 * std::pow(theta, 3) * R * R / std::pow(d, light_heavy_beta(p) / p);
}

double gamma_pair_sum(std::span<const double> x, double p, double gamma, double d) {
  const double cut = gamma / (d * static_cast<double>(x.size()));
  double s = 0.0;
  for (double xi : x) {
    for (double xj : x) {
      const double rb = remainders(xi, xj, p).r_bar;
      if (rb >= cut) s += rb;
    }
  }
  return s;
}

double gamma_pair_bound(long long m, double theta, double A, double gamma, double d, double p) {
  return 2.0 * static_cast<double>(m) * theta * theta * A * A / (std::pow(gamma, 1.0 / p) * d);
}

double configuration_light_expectation(std::span<const double> x, const DegreeSequence& d, double p) {
  if (x.size() != d.size()) throw DimensionError("configuration_light_expectation: length mismatch");
  check_p(p, "configuration_light_expectation");
  const double two_e_minus_1 = static_cast<double>(d.sum()) - 1.0;
  if (!(two_e_minus_1 > 0.0)) throw DegenerateInputError("configuration_light_expectation: no half-edges");
  const double dmax = d.max();
  const double threshold = std::pow(dmax, light_heavy_beta(p)) / (dmax * static_cast<double>(x.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i; j < x.size(); ++j) {
      const auto t = remainders(x[i], x[j], p);
      if (t.r_bar > threshold) continue;
      const double weight = i == j ? 0.5 * d[i] * (d[i] - 1.0) : static_cast<double>(d[i]) * d[j];
      s += weight / two_e_minus_1 * t.r_tilde;
    }
  }
  return s;
}

}  // namespace plap
