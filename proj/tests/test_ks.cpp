#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "plap/errors.hpp"
#include "plap/ks.hpp"
#include "plap/random_graphs.hpp"

using namespace plap;

namespace {

// A random point of S_{p,d}: centred to zero p-mean, then scaled.
VertexFunction random_sphere_point(CounterRng& rng, const DegreeSequence& d, double p) {
  VertexFunction x(d.size());
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  auto centred = center_to_zero_p_mean(x, d, p).values;
  return normalize_to_sphere(centred, d, p);
}

}  // namespace

TEST(Remainders, Examples) {
  auto t = remainders(1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(t.r, 2.0);
  EXPECT_DOUBLE_EQ(t.r_tilde, 2.0);
  EXPECT_DOUBLE_EQ(t.r_bar, 1.0);

  t = remainders(3.0, 0.0, 4.5);
  EXPECT_DOUBLE_EQ(t.r, 0.0);
  EXPECT_DOUBLE_EQ(t.r_bar, 0.0);
  EXPECT_DOUBLE_EQ(t.r_tilde, 0.0);

  t = remainders(1.0, -0.5, 3.0);
  EXPECT_NEAR(t.r, -9.0 / 4.0, 1e-15);
  EXPECT_NEAR(t.r_tilde, -0.5 - 0.25, 1e-15);
  EXPECT_NEAR(t.r_bar, 0.5, 1e-15);

  EXPECT_THROW(remainders(1.0, 1.0, 1.5), ParameterError);
}

TEST(Remainders, QuadraticCaseIsTwiceTheProduct) {
  CounterRng rng({11, 0});
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-5, 5);
    const double b = rng.uniform(-5, 5);
    const auto t = remainders(a, b, 2.0);
    EXPECT_NEAR(t.r, 2 * a * b, 1e-11);
    EXPECT_NEAR(t.r_tilde, 2 * a * b, 1e-11);
  }
}

TEST(Remainders, SmallCasesOfTheInequalities) {
  auto t = remainders(1.0, 1.0, 2.0);
  EXPECT_LE(t.r_bar, std::fabs(t.r));
  EXPECT_LE(std::fabs(t.r), 5.0 * t.r_bar);
  t = remainders(1.0, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(t.r, 2.0);
  EXPECT_LE(t.r, 3.0 * t.r_tilde);
}

TEST(Remainders, InequalitySuiteHasNoViolations) {
  auto rep = remainder_inequality_suite(100000, 2.0, 6.0, {2024, 0});
  EXPECT_EQ(rep.samples, 100000);
  EXPECT_GT(rep.samples_p3, 70000);
  EXPECT_EQ(rep.violations(), 0);
  // The lower bound r_bar <= |r| is attained asymptotically; the ratios stay in range.
  EXPECT_GE(rep.min_abs_over_bar, 1.0 - 1e-9);
  EXPECT_LE(rep.max_abs_over_upper, 1.0);
  EXPECT_LE(rep.max_tilde_over_bar, 1.0 + 1e-12);
  EXPECT_LE(rep.max_r_over_p_tilde, 1.0 + 1e-12);

  auto rep3 = remainder_inequality_suite(100000, 3.0, 6.0, {2025, 0});
  EXPECT_EQ(rep3.samples_p3, 100000);
  EXPECT_EQ(rep3.violations(), 0);
}

TEST(Decomposition, ZeroFunctionIsAllLight) {
  const auto g = complete_graph(5);
  const VertexFunction x(5, 0.0);
  const auto dec = decompose_light_heavy(g, x, 3.0, 4);
  EXPECT_EQ(dec.light_edges.size(), g.edge_count());
  EXPECT_TRUE(dec.heavy_edges.empty());
  EXPECT_EQ(dec.X, 0.0);
  EXPECT_EQ(dec.X_l, 0.0);
  EXPECT_EQ(dec.X_h, 0.0);
}

TEST(Decomposition, ThresholdAtPTwo) {
  EXPECT_DOUBLE_EQ(light_heavy_beta(2.0), 1.0 / 3.0);
  const auto g = complete_graph(6);
  const VertexFunction x(6, 0.0);
  const auto dec = decompose_light_heavy(g, x, 2.0, 5);
  EXPECT_NEAR(dec.threshold, std::cbrt(5.0) / (5.0 * 6.0), 1e-15);
}

TEST(Decomposition, IdentityOnTheSphere) {
  const auto g = complete_graph(4);
  const VertexFunction raw{1.0, -1.0, 0.0, 0.0};
  const auto x = normalize_to_sphere(raw, g.degrees(), 2.0);
  const auto dec = decompose_light_heavy(g, x, 2.0, 3);
  EXPECT_NEAR(dec.norm_p, 1.0, 1e-14);
  EXPECT_NEAR(dec.X, dec.norm_p - dec.Z, 1e-12);
  EXPECT_LE(dec.identity_defect, 1e-12);
}

TEST(Decomposition, PartitionAndIdentityOnRandomGraphs) {
  CounterRng rng({77, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const double p = rng.uniform(2.0, 6.0);
    const auto g = sample_configuration(DegreeSequence(std::vector<int>(30, 4)), {static_cast<std::uint64_t>(trial), 1}).graph;
    const auto x = random_sphere_point(rng, g.degrees(), p);
    const auto dec = decompose_light_heavy(g, x, p, g.degrees().max());
    EXPECT_EQ(dec.light_edges.size() + dec.heavy_edges.size(), g.edge_count());
    EXPECT_EQ(dec.X, dec.X_l + dec.X_h);
    EXPECT_LE(dec.identity_defect, 1e-10);
    for (int e : dec.heavy_edges) {
      const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
      EXPECT_GT(remainders(x[static_cast<std::size_t>(ed.tail)], x[static_cast<std::size_t>(ed.head)], p).r_bar, dec.threshold);
    }
    for (int e : dec.light_edges) {
      const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
      EXPECT_LE(remainders(x[static_cast<std::size_t>(ed.tail)], x[static_cast<std::size_t>(ed.head)], p).r_bar, dec.threshold);
    }
  }
}

TEST(Decomposition, RejectsBadInput) {
  const auto g = complete_graph(3);
  EXPECT_THROW(decompose_light_heavy(g, VertexFunction(2, 0.0), 2.0, 2), DimensionError);
  EXPECT_THROW(decompose_light_heavy(g, VertexFunction(3, 0.0), 2.0, 0), ParameterError);
}

TEST(NetParams, DefaultsAndValidation) {
  const NetParams params(2.0, 0.5, 1.0, DegreeSequence({2, 2, 2}));
  EXPECT_DOUBLE_EQ(params.q(), 2.0);
  EXPECT_DOUBLE_EQ(params.R(), 2.25);
  EXPECT_DOUBLE_EQ(params.R_minus(), 0.25);
  EXPECT_NEAR(params.unit(1), 0.5 * std::sqrt(2.0) / (2.0 * std::sqrt(3.0)), 1e-15);

  EXPECT_THROW(NetParams(1.9, 0.5, 1.0, DegreeSequence({2, 2})), ParameterError);
  EXPECT_THROW(NetParams(2.0, 0.0, 1.0, DegreeSequence({2, 2})), ParameterError);
  EXPECT_THROW(NetParams(2.0, 1.5, 1.0, DegreeSequence({2, 2})), ParameterError);
  EXPECT_THROW(NetParams(2.0, 0.5, 0.5, DegreeSequence({2, 2})), ParameterError);
  EXPECT_THROW(NetParams(2.0, 0.6, 2.0, DegreeSequence({2, 2})), ParameterError);
  EXPECT_THROW(NetParams(2.0, 0.5, 1.5, DegreeSequence({4, 2})), ParameterError);
  EXPECT_NO_THROW(NetParams(2.0, 0.5, 2.0, DegreeSequence({4, 2})));
}

TEST(NetRound, GridAlignedPointIsFixed) {
  // With d = (2, 2), p = 2 and eps = 1/2 the grid unit is 1/4, and
  // (1/2, -1/2) lies on the sphere, has zero p-mean and sits on the grid.
  const NetParams params(2.0, 0.5, 1.0, DegreeSequence({2, 2}));
  ASSERT_DOUBLE_EQ(params.unit(0), 0.25);
  const VertexFunction half{0.5, -0.5};
  const auto out = net_round(half, params);
  EXPECT_EQ(out.shift_r, 0);
  EXPECT_EQ(out.k, (std::vector<long long>{2, -2}));
  EXPECT_EQ(out.x_prime, half);
}

TEST(NetRound, GridGapAndNormRange) {
  CounterRng rng({5150, 0});
  for (int m : {2, 3}) {
    for (double eps : {0.5, 1.0}) {
      for (double p : {2.0, 3.0, 4.5}) {
        std::vector<int> degrees(static_cast<std::size_t>(m));
        for (int& v : degrees) v = 3 + static_cast<int>(rng.below(2));
        const DegreeSequence d(degrees);
        const double theta = static_cast<double>(d.max()) / d.min();
        if (eps * theta > 1.0) continue;
        const NetParams params(p, eps, theta, d);
        for (int trial = 0; trial < 1000; ++trial) {
          const auto x = random_sphere_point(rng, d, p);
          const auto out = net_round(x, params);
          long long sum = 0;
          for (long long k : out.k) sum += k;
          EXPECT_EQ(sum, 0);
          EXPECT_GE(out.shift_r, 0);
          EXPECT_LE(out.shift_r, m);
          for (int i = 0; i < m; ++i) {
            const double gap = std::fabs(signed_pow(x[static_cast<std::size_t>(i)], p - 1) -
                                         signed_pow(out.x_prime[static_cast<std::size_t>(i)], p - 1));
            EXPECT_LE(gap, params.unit(i) * (1 + 1e-12));
          }
          const double norm = weighted_p_norm(out.x_prime, d, p);
          EXPECT_GE(norm, params.R_minus() - 1e-12);
          EXPECT_LE(norm, params.R() + 1e-12);
        }
      }
    }
  }
}

TEST(NetRound, EnergyChangeWithinBound) {
  // Degrees (2, 2, 2) with a double edge and a loop; the triangle itself
  // has Z_x >= 3/2 on the sphere, so the bound's hypothesis Z_x <= 1 never holds there.
  const Multigraph g(3, {{0, 1}, {0, 1}, {2, 2}});
  const NetParams params(2.0, 0.5, 1.0, g.degrees());
  const double bound = net_rounding_z_bound(2.0, 0.5, 1.0);
  EXPECT_NEAR(bound, 4.0 * 0.5 * 2.0, 1e-15);
  CounterRng rng({31, 0});
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_sphere_point(rng, g.degrees(), 2.0);
    const double z = edge_energy(g, x, 2.0);
    if (z > 1.0) continue;
    ++checked;
    const auto out = net_round(x, params);
    EXPECT_LE(std::fabs(z - edge_energy(g, out.x_prime, 2.0)), bound);
  }
  EXPECT_GT(checked, 0);
  for (double p : {3.0, 4.0}) {
    const NetParams pp(p, 0.25, 2.0, DegreeSequence({4, 2, 2, 2, 2}));
    const Multigraph h(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {3, 4}});
    ASSERT_EQ(h.degrees().values()[0], 4);
    for (int trial = 0; trial < 500; ++trial) {
      const auto x = random_sphere_point(rng, h.degrees(), p);
      const double z = edge_energy(h, x, p);
      if (z > 1.0) continue;
      const auto out = net_round(x, pp);
      EXPECT_LE(std::fabs(z - edge_energy(h, out.x_prime, p)), net_rounding_z_bound(p, 0.25, 2.0));
    }
  }
}

TEST(NetRound, RejectsPointsOffTheSphere) {
  const NetParams params(2.0, 0.5, 1.0, DegreeSequence({2, 2}));
  EXPECT_THROW(net_round(VertexFunction{1.0, -1.0}, params), PreconditionError);
  EXPECT_THROW(net_round(VertexFunction{0.5, 0.5}, params), PreconditionError);
  EXPECT_THROW(net_round(VertexFunction{0.5}, params), DimensionError);
}

TEST(NetEnumerate, MatchesDoubleLoopScan) {
  const NetParams params(2.0, 1.0, 1.0, DegreeSequence({1, 1}));
  const auto net = net_enumerate_tiny(params);
  // Independent scan: every pair (k0, k1) in a generous box, checked directly.
  const double u = 1.0 / std::sqrt(2.0);
  std::set<std::vector<long long>> expected;
  for (long long a = -20; a <= 20; ++a) {
    for (long long b = -20; b <= 20; ++b) {
      if (a + b != 0) continue;
      if ((a * u) * (a * u) + (b * u) * (b * u) <= 4.0 + 1e-12) expected.insert({a, b});
    }
  }
  const std::set<std::vector<long long>> got(net.k.begin(), net.k.end());
  EXPECT_EQ(got, expected);
  EXPECT_EQ(net.count, 5);
  EXPECT_EQ(net.count, static_cast<long long>(net.points.size()));
}

TEST(NetEnumerate, ThreeVertexScanAndSizeBound) {
  for (double eps : {0.5, 1.0}) {
    for (double p : {2.0, 3.0}) {
      if (eps * 1.5 > 1.0) continue;
      const DegreeSequence d({2, 3, 3});
      const NetParams params(p, eps, 1.5, d);
      const auto net = net_enumerate_tiny(params);
      const double q = params.q();
      std::set<std::vector<long long>> expected;
      for (long long a = -60; a <= 60; ++a) {
        for (long long b = -60; b <= 60; ++b) {
          const long long c = -a - b;
          const double norm = std::pow(std::fabs(a * params.unit(0)), q) * 2 +
                              std::pow(std::fabs(b * params.unit(1)), q) * 3 +
                              std::pow(std::fabs(c * params.unit(2)), q) * 3;
          if (norm <= params.R() * (1 + 1e-12)) expected.insert({a, b, c});
        }
      }
      const std::set<std::vector<long long>> got(net.k.begin(), net.k.end());
      EXPECT_EQ(got, expected);
      EXPECT_LE(static_cast<double>(net.count), net.size_bound);
    }
  }
}

TEST(NetEnumerate, SizeBoundAcrossSmallCases) {
  for (int m : {2, 3}) {
    for (double eps : {0.5, 1.0}) {
      const NetParams params(3.0, eps, 1.0, DegreeSequence(std::vector<int>(static_cast<std::size_t>(m), 2)));
      const auto net = net_enumerate_tiny(params);
      EXPECT_NEAR(net.size_bound, std::pow(4 * std::numbers::e * params.R() / eps, m), 1e-9 * net.size_bound);
      EXPECT_LE(static_cast<double>(net.count), net.size_bound);
      for (const auto& k : net.k) {
        long long sum = 0;
        for (long long v : k) sum += v;
        EXPECT_EQ(sum, 0);
      }
    }
  }
}

TEST(NetEnumerate, Guards) {
  EXPECT_THROW(net_enumerate_tiny(NetParams(2.0, 0.5, 1.0, DegreeSequence({1, 1, 1, 1, 1}))), SizeError);
  EXPECT_THROW(net_enumerate_tiny(NetParams(2.0, 0.01, 1.0, DegreeSequence({1, 1, 1, 1}), 1e4)), SizeError);
}

TEST(Azuma, Examples) {
  EXPECT_DOUBLE_EQ(azuma_tail(0.0, 10, 1.0), 2.0);
  EXPECT_NEAR(azuma_tail(std::sqrt(2.0 * 10 * 0.3 * 0.3), 10, 0.3), 2.0 / std::numbers::e, 1e-15);
  EXPECT_THROW(azuma_tail(1.0, 0, 1.0), ParameterError);
  EXPECT_THROW(azuma_tail(1.0, 3, 0.0), ParameterError);
}

TEST(Azuma, LightTermExponent) {
  // N = d m, c = 8 d^beta / (d m), T = K / d^alpha with alpha = beta / p.
  for (double p : {2.0, 3.0, 5.0}) {
    const double beta = light_heavy_beta(p);
    const double alpha = beta / p;
    ASSERT_LE(2 * alpha + 2 * beta, 1.0 + 1e-15);
    for (double d : {4.0, 50.0}) {
      for (long long m : {20LL, 200LL}) {
        const double K = 3.0;
        const double dm = d * static_cast<double>(m);
        const double tail = azuma_tail(K / std::pow(d, alpha), static_cast<long long>(dm), 8 * std::pow(d, beta) / dm);
        EXPECT_LE(tail, 2 * std::exp(-K * K * static_cast<double>(m) / 128) * (1 + 1e-12));
      }
    }
  }
}

TEST(LightBound, Branches) {
  const auto hi = light_bound(3.0, 1.0, 10.0, 64.0, 100, 0.5, 2.0);
  EXPECT_EQ(hi.exponent_constant, 128.0);
  EXPECT_NEAR(hi.value, 3.0 * 138.0 / std::pow(64.0, light_heavy_beta(3.0) / 3.0), 1e-12);
  EXPECT_TRUE(hi.has_unmodeled_term);
  const auto lo = light_bound(2.5, 2.0, 10.0, 64.0, 100, 0.5, 2.0);
  EXPECT_EQ(lo.exponent_constant, 6000.0);
  EXPECT_NEAR(lo.value, 2.0 * 0.75 + (1200.0 * 8 + 10) / std::pow(64.0, light_heavy_beta(2.5) / 2.5), 1e-9);
  // Small K: the union bound over the net is vacuous and clamps to 2.
  EXPECT_EQ(light_bound(3.0, 1.0, 1.0, 64.0, 100, 0.5, 2.0).failure_probability, 2.0);
  EXPECT_LT(light_bound(3.0, 1.0, 100.0, 64.0, 100, 0.5, 2.0).failure_probability, 1e-100);
}

TEST(GammaPairs, SumBelowBound) {
  CounterRng rng({404, 0});
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 20;
    const double p = rng.uniform(2.0, 5.0);
    const DegreeSequence d(std::vector<int>(m, 6));
    const auto x = random_sphere_point(rng, d, p);
    // A bounds ||x||_p^p d_i^{-1} ... here ||x||^p = 1 with equal degrees, so A = 1.
    const double gamma = rng.uniform(0.5, 4.0);
    const double s = gamma_pair_sum(x, p, gamma, 6.0);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, gamma_pair_bound(m, 1.0, 1.0, gamma, 6.0, p));
  }
}

TEST(ConfigurationExpectation, MatchesMonteCarloAndBound) {
  const int m = 40;
  const int deg = 6;
  const DegreeSequence d(std::vector<int>(m, deg));
  const double p = 3.0;
  const double theta = 1.0;
  const NetParams params(p, 0.5, theta, d);
  CounterRng rng({9, 9});
  const auto x = net_round(random_sphere_point(rng, d, p), params).x_prime;
  const double exact = configuration_light_expectation(x, d, p);

  const int samples = 4000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto g = sample_configuration(d, {static_cast<std::uint64_t>(s), 3}).graph;
    const double v = decompose_light_heavy(g, x, p, deg).X_tilde_l;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt(std::max(0.0, sum2 / samples - mean * mean) / samples);
  EXPECT_NEAR(mean, exact, 5 * se + 1e-12);
  EXPECT_LE(mean, expectation_light_bound(p, theta, params.R(), deg) + 5 * se);
}
