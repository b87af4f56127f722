#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "orbitforge/divdiff.hpp"
#include "orbitforge/errors.hpp"

using namespace orbitforge;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no orbitforge::Error thrown";
  return Errc::param;
}

// Independent interpolation oracle in Lagrange form.
double lagrange_eval(const std::vector<double>& x, const std::vector<double>& y, double t) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double l = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i != j) l *= (t - x[i]) / (x[j] - x[i]);
    }
    s += y[j] * l;
  }
  return s;
}

struct Instance {
  std::vector<double> x;
  std::vector<double> y;
};

Instance random_instance(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> gap(1e-3, 1.0);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  Instance in;
  double cur = val(rng) / 10.0;
  for (int i = 0; i <= k; ++i) {
    in.x.push_back(cur);
    cur += gap(rng);
    in.y.push_back(val(rng));
  }
  return in;
}

}  // namespace

TEST(Grid, RejectsBadNodes) {
  EXPECT_EQ(code_of([] { Grid({0.0, 0.0}); }), Errc::not_increasing);
  EXPECT_EQ(code_of([] { Grid({1.0, 0.5}); }), Errc::not_increasing);
  EXPECT_EQ(code_of([] { Grid({0.0, NAN}); }), Errc::not_increasing);
  EXPECT_EQ(code_of([] { Grid(std::vector<double>{}); }), Errc::param);
}

TEST(DDRecursive, Examples) {
  EXPECT_DOUBLE_EQ(dd_recursive(Grid({0, 1, 2}), std::vector<double>{0, 1, 4}).leading(), 1.0);
  EXPECT_DOUBLE_EQ(dd_recursive(Grid({0, 1}), std::vector<double>{3, 5}).leading(), 2.0);
  const DDTable t = dd_recursive(Grid({0, 1, 2, 3}), std::vector<double>{0, 1, 8, 27});
  EXPECT_DOUBLE_EQ(t.leading(), 1.0);
  EXPECT_DOUBLE_EQ(t.at(0, 2), 3.0);
}

TEST(DDRecursive, LengthMismatch) {
  EXPECT_EQ(code_of([] { dd_recursive(Grid({0, 1, 2}), std::vector<double>{1, 2}); }), Errc::length_mismatch);
}

TEST(DDWeights, Examples) {
  const auto w = dd_weights(Grid({0, 1, 2}));
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[1], -1.0);
  EXPECT_DOUBLE_EQ(w[2], 0.5);
  const auto s = dd_weights(Grid({0, 1}));
  EXPECT_DOUBLE_EQ(s[0], -1.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(DDWeights, AnnihilateConstantsAndReproduceLeadingCoefficient) {
  std::mt19937_64 rng(3);
  for (int k = 1; k <= 8; ++k) {
    const auto in = random_instance(rng, k);
    const auto u = dd_weights(Grid(in.x));
    double sum = 0.0, scale = 0.0, lead = 0.0, lscale = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double xj = in.x[static_cast<std::size_t>(j)];
      sum += u[static_cast<std::size_t>(j)];
      scale += std::abs(u[static_cast<std::size_t>(j)]);
      lead += u[static_cast<std::size_t>(j)] * std::pow(xj, k);
      lscale += std::abs(u[static_cast<std::size_t>(j)] * std::pow(xj, k));
    }
    EXPECT_LE(std::abs(sum), 1e-12 * scale) << k;
    EXPECT_NEAR(lead, 1.0, 1e-10 * lscale) << k;
  }
}

TEST(DDVandermonde, ExampleAndGuard) {
  EXPECT_NEAR(dd_vandermonde(Grid({0, 1, 2}), std::vector<double>{0, 1, 4}), 1.0, 1e-14);
  EXPECT_EQ(code_of([] { dd_vandermonde(Grid({0.0, 1e-13, 1.0}), std::vector<double>{0, 1, 2}); }),
            Errc::conditioning);
  EXPECT_EQ(code_of([] { dd_recursive(Grid({0.0, 1e-13, 1.0}), std::vector<double>{0, 1, 2}); }), Errc::conditioning);
}

TEST(DDRoutes, AgreeOnRandomInstances) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + trial % 8;
    const auto in = random_instance(rng, k);
    const Grid g(in.x);
    const auto u = dd_weights(g);
    double scale = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) scale += std::abs(u[j] * in.y[j]);
    const double a = dd_recursive(g, in.y).leading();
    const double b = dd_weighted(g, in.y);
    const double c = dd_vandermonde(g, in.y);
    EXPECT_LE(std::abs(a - b), 1e-9 * scale);
    EXPECT_LE(std::abs(a - c), 1e-9 * scale);
    EXPECT_LE(std::abs(b - c), 1e-9 * scale);
  }
}

TEST(NewtonEval, InterpolatesAndExtrapolatesQuadratic) {
  const DDTable t = dd_recursive(Grid({0, 1, 2}), std::vector<double>{0, 1, 4});
  EXPECT_DOUBLE_EQ(newton_eval(t, 3.0), 9.0);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(newton_eval(t, i), i * i);
}

TEST(NewtonEval, MatchesLagrangeOracleDegreeSix) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(rng, 6);
    const DDTable t = dd_recursive(Grid(in.x), in.y);
    for (std::size_t i = 0; i < in.x.size(); ++i) EXPECT_NEAR(newton_eval(t, in.x[i]), in.y[i], 1e-9);
    for (int s = 0; s < 10; ++s) {
      const double z = in.x.front() + (in.x.back() - in.x.front()) * (s + 0.5) / 10.0;
      const double want = lagrange_eval(in.x, in.y, z);
      EXPECT_NEAR(newton_eval(t, z), want, 1e-9 * (1.0 + std::abs(want)));
    }
  }
}

TEST(QuasiAP, Examples) {
  EXPECT_TRUE(is_quasi_ap(Grid({0, 0.1, 0.2, 0.3}), 0.1));
  EXPECT_TRUE(is_quasi_ap(Grid({0, 0.1, 0.2, 0.3}), 0.24));
  EXPECT_FALSE(is_quasi_ap(Grid({0, 1, 2.3}), 0.2));
  EXPECT_EQ(code_of([] { is_quasi_ap(Grid({0, 1, 2}), 0.25); }), Errc::param);
  EXPECT_EQ(code_of([] { is_quasi_ap(Grid({0, 1, 2}), 0.0); }), Errc::param);
}

TEST(QuasiAP, NearlyLinearIterates) {
  // f(z) = z + 0.01 + 0.0001 z: gaps grow by the factor 1.0001.
  std::vector<double> x{0.0};
  for (int j = 0; j < 6; ++j) x.push_back(x.back() + 0.01 + 0.0001 * x.back());
  EXPECT_TRUE(is_quasi_ap(Grid(x), 0.01));
}

TEST(LagrangeBound, FormulaAndLimit) {
  EXPECT_NEAR(lagrange_bound(Grid({0, 1, 2}), 1.0 / 3.0), 16.0, 1e-12);
  EXPECT_NEAR(lagrange_bound(Grid({0, 1}), 1e-12), 2.0, 1e-9);
  EXPECT_EQ(code_of([] { lagrange_bound(Grid({0, 1, 3}), 0.2); }), Errc::not_quasi_ap);
}

TEST(LagrangeBound, ChebyshevLikeExtremalPolynomial) {
  // Alternating +-1 data on an AP grid has the largest interior excursion.
  const Grid g({0, 1, 2, 3, 4});
  const std::vector<double> y{1, -1, 1, -1, 1};
  const DDTable t = dd_recursive(g, y);
  double sup = 0.0;
  for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(newton_eval(t, 4.0 * i / 4000.0)));
  EXPECT_LE(sup, lagrange_bound(g, 0.1));
  const auto chk = check_lagrange_bound(g, 0.1, 99, 100);
  EXPECT_TRUE(chk.satisfied);
  EXPECT_EQ(chk.trials, 100);
}

TEST(LagrangeBound, SeededCheckIsDeterministic) {
  const Grid g({0, 1.05, 2, 3.02});
  const auto a = check_lagrange_bound(g, 0.2, 1234, 64);
  const auto b = check_lagrange_bound(g, 0.2, 1234, 64);
  EXPECT_EQ(a.worst_ratio, b.worst_ratio);
}
