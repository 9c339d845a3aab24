#include <gtest/gtest.h>

#include <cmath>

#include "plap/certificates.hpp"
#include "plap/errors.hpp"

using namespace plap;

TEST(FlpCertificate, IssuesWithBourdonConstant) {
  const auto c = flp_certificate({{"L", 0.9, kMethodExact}}, 2.0, 0.2, 12);
  EXPECT_TRUE(c.issued);
  ASSERT_TRUE(c.lipschitz.has_value());
  EXPECT_EQ(*c.lipschitz, std::pow(1.6, 0.25));
  EXPECT_EQ(c.rigor, Rigor::exact_p2);
  EXPECT_EQ(c.parameters.at("m"), 12.0);
  EXPECT_EQ(c.parameters.at("dimension"), 13.0);
}

TEST(FlpCertificate, RefusesAtOrBelowThreshold) {
  EXPECT_FALSE(flp_certificate({{"L", 0.4, kMethodExact}}, 2.0, 0.2, 4).issued);
  EXPECT_FALSE(flp_certificate({{"L", 0.8, kMethodExact}}, 2.0, 0.2, 4).issued);
  // One weak link is enough to refuse.
  EXPECT_FALSE(flp_certificate({{"a", 0.95, kMethodExact}, {"b", 0.7, kMethodExact}}, 2.0, 0.2, 4).issued);
}

TEST(FlpCertificate, RigorFollowsMethod) {
  const auto c = flp_certificate({{"L", 0.95, kMethodIterative}}, 3.0, 0.2, 4);
  EXPECT_TRUE(c.issued);
  EXPECT_EQ(c.rigor, Rigor::iterative_upper_bound);
  const auto d = flp_certificate({{"L", 0.95, kMethodIterative}}, 2.0, 0.2, 4);
  EXPECT_EQ(d.rigor, Rigor::iterative_upper_bound);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(FlpCertificate, Preconditions) {
  EXPECT_THROW(flp_certificate({{"L", 0.9}}, 2.0, 0.5, 4), ParameterError);
  EXPECT_THROW(flp_certificate({{"L", 0.9}}, 2.0, 0.0, 4), ParameterError);
  EXPECT_THROW(flp_certificate({{"L", 0.9}}, 1.5, 0.2, 4), ParameterError);
  EXPECT_THROW(flp_certificate({}, 2.0, 0.2, 4), ParameterError);
  EXPECT_THROW(flp_certificate({{"L", std::nan("")}}, 2.0, 0.2, 4), ParameterError);
}

TEST(FlpCertificate, MonotoneInLambda) {
  for (double lambda = 0.5; lambda <= 1.0; lambda += 0.01) {
    const bool before = flp_certificate({{"L", lambda}}, 3.0, 0.25, 5).issued;
    const bool after = flp_certificate({{"L", lambda + 0.05}}, 3.0, 0.25, 5).issued;
    EXPECT_TRUE(!before || after);
  }
}

TEST(FlpCertificate, LipschitzShape) {
  for (double p : {2.0, 3.0, 7.5}) {
    double prev = flp_lipschitz(p, 0.01);
    for (double eps = 0.02; eps < 0.5; eps += 0.01) {
      const double now = flp_lipschitz(p, eps);
      EXPECT_LT(now, prev);
      EXPECT_GT(now, 1.0);
      prev = now;
    }
    EXPECT_NEAR(flp_lipschitz(p, 0.5 - 1e-12), 1.0, 1e-11);
  }
}

TEST(KazhdanCertificate, StrictThreshold) {
  EXPECT_TRUE(kazhdan_certificate({{"L", 0.51}}).issued);
  EXPECT_FALSE(kazhdan_certificate({{"L", 0.5}}).issued);
  EXPECT_EQ(kazhdan_certificate({{"L", 0.51}}).rigor, Rigor::exact_p2);
  EXPECT_FALSE(kazhdan_certificate({{"L", 0.51}}).lipschitz.has_value());
  const auto c = kazhdan_certificate({{"L", 0.7, kMethodIterative}});
  EXPECT_TRUE(c.issued);
  EXPECT_EQ(c.rigor, Rigor::iterative_upper_bound);
  EXPECT_EQ(c.warnings.size(), 1u);
}

TEST(FlpRange, Examples) {
  const auto degenerate = flp_range(100, 16.0, 1e6);
  EXPECT_EQ(degenerate.lo, 2.0);
  EXPECT_EQ(degenerate.hi, 2.0);

  const double f = std::pow(1e6, 0.3);
  const auto r = flp_range(1000000, f, 1.0);
  const double lf = std::log(std::pow(10.0, 1.8));
  EXPECT_NEAR(r.hi, std::max(2.0, std::sqrt(lf / std::log(lf))), 1e-14);

  // Doubling C halves the raw bound; unclamped values scale exactly.
  const double big_f = 1e300;
  const auto r1 = flp_range(10, big_f, 0.1);
  const auto r2 = flp_range(10, big_f, 0.2);
  EXPECT_NEAR(r2.hi, r1.hi / 2, 1e-12 * r1.hi);
  EXPECT_GE(r1.hi, r2.hi);
  EXPECT_THROW(flp_range(10, 15.9, 1.0), ParameterError);
  EXPECT_THROW(flp_range(10, 100.0, 0.0), ParameterError);
}

TEST(CertifiedRange, SupremumOverIssued) {
  std::vector<Certificate> certs{flp_certificate({{"L", 0.9}}, 2.0, 0.2, 4),
                                 flp_certificate({{"L", 0.9}}, 3.5, 0.2, 4),
                                 flp_certificate({{"L", 0.5}}, 5.0, 0.2, 4)};
  EXPECT_EQ(certified_p_sup(certs), 3.5);
  EXPECT_FALSE(certified_p_sup({}).has_value());
}

TEST(Confdim, Formulas) {
  const auto r = hyperbolicity_and_confdim(50, 0.4, std::nullopt);
  EXPECT_NEAR(r.delta, 25.0, 1e-12);
  EXPECT_NEAR(r.confdim_upper, 150.0 * std::log(99.0), 1e-10);
  EXPECT_NEAR(r.isoperimetric_coefficient, 3 * (0.2 - 0.01), 1e-14);
  EXPECT_FALSE(r.confdim_lower.has_value());

  const auto s = hyperbolicity_and_confdim(100, 0.45, 2.5);
  EXPECT_NEAR(s.confdim_upper, 300 * std::log(199.0), 1e-9);
  EXPECT_EQ(s.confdim_lower, 2.5);
  EXPECT_TRUE(s.sandwich_holds);
  EXPECT_LE(*s.confdim_lower, s.confdim_upper);

  EXPECT_THROW(hyperbolicity_and_confdim(10, 0.5, std::nullopt), ParameterError);
  EXPECT_THROW(hyperbolicity_and_confdim(10, 0.7, std::nullopt), ParameterError);
}

TEST(MonotoneTransfer, Directions) {
  const auto inc = monotone_transfer(true, Monotonicity::increasing, "triangular");
  EXPECT_TRUE(inc.permitted);
  EXPECT_EQ(inc.direction, "binomial -> density");
  const auto dec = monotone_transfer(true, Monotonicity::decreasing, "gromov");
  EXPECT_TRUE(dec.permitted);
  EXPECT_EQ(dec.direction, "density -> binomial");
  EXPECT_FALSE(monotone_transfer(true, Monotonicity::unflagged, "triangular").permitted);
  EXPECT_FALSE(monotone_transfer(false, Monotonicity::increasing, "triangular").permitted);
  EXPECT_THROW(monotone_transfer(true, Monotonicity::increasing, "square"), ParameterError);
}

TEST(CertificateJson, RoundTrip) {
  auto c = flp_certificate({{"L1", 0.91234567890123456, kMethodIterative}, {"L2", 0.97, kMethodIterative}}, 3.0, 0.2, 600);
  c.warnings.push_back("note");
  const auto back = certificate_from_json(to_json(c));
  EXPECT_EQ(back, c);
  const auto k = kazhdan_certificate({{"L", 0.6}});
  EXPECT_EQ(certificate_from_json(to_json(k, -1)), k);
  EXPECT_THROW(certificate_from_json("{\"property\": 3}"), InputError);
  EXPECT_THROW(certificate_from_json("not json"), InputError);
}
