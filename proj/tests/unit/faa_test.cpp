#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "orbitforge/errors.hpp"
#include "orbitforge/faa.hpp"

using namespace orbitforge;

namespace {

using Blocks = std::vector<std::vector<int>>;

// Brute force: insert element r into every block of every partition of
// {1..r-1}, or into a new block.
std::vector<Blocks> brute_partitions(int r) {
  if (r == 0) return {Blocks{}};
  std::vector<Blocks> out;
  for (const auto& p : brute_partitions(r - 1)) {
    for (std::size_t b = 0; b < p.size(); ++b) {
      Blocks q = p;
      q[b].push_back(r);
      out.push_back(q);
    }
    Blocks q = p;
    q.push_back({r});
    out.push_back(q);
  }
  return out;
}

Blocks canonical(Blocks b) {
  for (auto& blk : b) std::sort(blk.begin(), blk.end());
  std::sort(b.begin(), b.end());
  return b;
}

}  // namespace

TEST(SetPartitions, MatchesBruteForceEnumeration) {
  for (int r = 1; r <= 7; ++r) {
    std::set<Blocks> want;
    for (const auto& p : brute_partitions(r)) want.insert(canonical(p));
    std::set<Blocks> got;
    for (const auto& p : set_partitions(r)) got.insert(canonical(p.blocks));
    EXPECT_EQ(got, want) << r;
    EXPECT_EQ(set_partitions(r).size(), want.size());
  }
}

TEST(SetPartitions, BellNumbers) {
  const std::uint64_t bells[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147};
  for (int r = 1; r <= 9; ++r) {
    std::uint64_t count = 0;
    for_each_partition(r, [&](const std::vector<int>&, int) { ++count; });
    EXPECT_EQ(count, bells[r]) << r;
    EXPECT_EQ(bell(r), bells[r]);
  }
  EXPECT_EQ(bell(0), 1u);
  EXPECT_EQ(set_partitions(1).size(), 1u);
  EXPECT_EQ(set_partitions(3).size(), 5u);
  EXPECT_EQ(set_partitions(6).size(), 203u);
}

TEST(SetPartitions, BlocksAreOrdered) {
  for (const auto& p : set_partitions(5)) {
    for (std::size_t b = 1; b < p.blocks.size(); ++b) EXPECT_LT(p.blocks[b - 1].front(), p.blocks[b].front());
    for (const auto& blk : p.blocks) EXPECT_TRUE(std::is_sorted(blk.begin(), blk.end()));
  }
}

TEST(Stirling, ExamplesAndEnumeration) {
  EXPECT_EQ(stirling2(4, 2), 7u);
  EXPECT_EQ(stirling2(5, 2), 15u);
  EXPECT_LE(stirling2(5, 2), binomial(5, 2) * 8u);
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(stirling2(n, n), 1u);
  for (int r = 1; r <= 7; ++r) {
    std::vector<std::uint64_t> by_blocks(static_cast<std::size_t>(r) + 1, 0);
    for (const auto& p : set_partitions(r)) ++by_blocks[p.blocks.size()];
    for (int m = 1; m <= r; ++m) EXPECT_EQ(by_blocks[static_cast<std::size_t>(m)], stirling2(r, m));
  }
}

TEST(FaaDiBruno, LowOrderChainRule) {
  const double F[] = {2.0, 3.0, 5.0};
  const double G[] = {7.0, 11.0, 13.0};
  EXPECT_DOUBLE_EQ(faa_di_bruno(F, G, 1), 2.0 * 7.0);
  EXPECT_DOUBLE_EQ(faa_di_bruno(F, G, 2), 3.0 * 49.0 + 2.0 * 11.0);
}

TEST(FaaDiBruno, ExpOfSineMatchesJetComposition) {
  const double x = 0.3;
  const int r = 6;
  const Jet inner = ScalarFamily::parse("sin(z)").jet(x, r);
  const Jet outer = ScalarFamily::parse("exp(z)").jet(inner.value(), r);
  const Jet comp = jet_compose(outer, inner);
  std::vector<double> F, G;
  for (int i = 1; i <= r; ++i) {
    F.push_back(outer.derivative(i));
    G.push_back(inner.derivative(i));
  }
  for (int m = 1; m <= r; ++m) {
    EXPECT_NEAR(faa_di_bruno(F, G, m), comp.derivative(m), 1e-12 * std::abs(comp.derivative(m)) + 1e-14) << m;
  }
}

TEST(FaaDiBruno, RandomSmoothPairs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Params p{{"a", u(rng)}, {"b", u(rng)}, {"c", u(rng)}};
    const auto g = ScalarFamily::parse("a*sin(z) + b*z^2", p);
    const auto f = ScalarFamily::parse("exp(c*z) + cos(z)", p);
    const double x = u(rng);
    const int r = 8;
    const Jet inner = g.jet(x, r);
    const Jet outer = f.jet(inner.value(), r);
    const Jet comp = jet_compose(outer, inner);
    std::vector<double> F, G;
    for (int i = 1; i <= r; ++i) {
      F.push_back(outer.derivative(i));
      G.push_back(inner.derivative(i));
    }
    for (int m = 1; m <= r; ++m) {
      const double want = comp.derivative(m);
      EXPECT_NEAR(faa_di_bruno(F, G, m), want, 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(IterateJets, IdentityAndTranslation) {
  const auto id = ScalarFamily::identity();
  for (int j : {-3, 0, 2, 5}) {
    const Jet jt = iterate_map_jets(id, j, 0.2, 3);
    EXPECT_NEAR(jt[0], 0.2, 1e-15);
    EXPECT_NEAR(jt[1], 1.0, 1e-15);
    EXPECT_NEAR(jt[2], 0.0, 1e-15);
  }
  const auto tr = ScalarFamily::parse("z + c", {{"c", 0.01}});
  const Jet j3 = iterate_map_jets(tr, 3, 0.1, 3);
  EXPECT_NEAR(j3[0], 0.13, 1e-15);
  EXPECT_NEAR(j3[1], 1.0, 1e-15);
  const Jet jm = iterate_map_jets(tr, -2, 0.1, 3);
  EXPECT_NEAR(jm[0], 0.08, 1e-14);
}

TEST(IterateJets, FourFoldQuadraticMatchesSymbolicComposition) {
  // Symbolic f^4 for f = z + 0.01 + 0.001 z^2 via polynomial composition.
  using Poly = std::vector<double>;
  auto mul = [](const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t k = 0; k < b.size(); ++k) r[i + k] += a[i] * b[k];
    return r;
  };
  const Poly f{0.01, 1.0, 0.001};
  Poly it{0.0, 1.0};
  for (int n = 0; n < 4; ++n) {
    // f(it) = 0.01 + it + 0.001 it^2
    Poly sq = mul(it, it);
    Poly next(std::max(it.size(), sq.size()), 0.0);
    for (std::size_t i = 0; i < it.size(); ++i) next[i] += it[i];
    for (std::size_t i = 0; i < sq.size(); ++i) next[i] += 0.001 * sq[i];
    next[0] += 0.01;
    it = next;
  }
  const Jet got = iterate_map_jets(ScalarFamily::parse("z + 0.01 + 0.001*z^2"), 4, 0.0, 3);
  for (int i = 0; i <= 3; ++i) EXPECT_NEAR(got[i], it[static_cast<std::size_t>(i)], 1e-14) << i;
}

TEST(IterateJets, InverseRoundTrip) {
  const auto f = ScalarFamily::parse("z + 0.05*sin(z) + 0.02");
  const Jet fwd = iterate_map_jets(f, 3, 0.1, 4);
  const Jet back = iterate_map_jets(f, -3, fwd.value(), 4);
  const Jet id = jet_compose(back, fwd);
  EXPECT_NEAR(id[0], 0.1, 1e-13);
  EXPECT_NEAR(id[1], 1.0, 1e-13);
  for (int i = 2; i <= 4; ++i) EXPECT_NEAR(id[i], 0.0, 1e-12);
}

TEST(IterateJets, EscapeReported) {
  const auto f = ScalarFamily::parse("z + 0.3", {}, 0.5);
  try {
    iterate_map_jets(f, 3, 0.0, 2);
    FAIL();
  } catch (const DomainEscape& e) {
    EXPECT_EQ(e.code(), Errc::domain_escape);
  }
}

TEST(InverseMapJet, Examples) {
  const Jet a = inverse_map_jet(ScalarFamily::parse("z + 0.1"), 0.2, 3);
  EXPECT_NEAR(a.base_point(), 0.3, 1e-15);
  EXPECT_NEAR(a[0], 0.2, 1e-15);
  EXPECT_NEAR(a[1], 1.0, 1e-15);
  const Jet b = inverse_map_jet(ScalarFamily::parse("2*z"), 0.0, 3);
  EXPECT_NEAR(b[1], 0.5, 1e-15);
  EXPECT_NEAR(b[2], 0.0, 1e-15);
  EXPECT_NEAR(solve_preimage(ScalarFamily::parse("z^3 + z"), 2.0, 0.5), 1.0, 1e-14);
}

TEST(TildehjConstants, Arithmetic) {
  EXPECT_DOUBLE_EQ(tildehj_constant(2, 1.0), 160.0);
  EXPECT_DOUBLE_EQ(tildehj_eta_limit(2), 1.0 / 96.0);
}

TEST(TildehjCheck, TrivialAndPolynomialInstances) {
  const auto h0 = ScalarFamily::parse("z^2/2 + z/5");
  const auto r0 = tildehj_check(h0, h0, ScalarFamily::identity(), 2, 3, 1e-3, 1.0);
  EXPECT_EQ(r0.measured_norm, 0.0);
  EXPECT_TRUE(r0.satisfied);

  const int k = 3;
  const double eta = 0.5 * tildehj_eta_limit(k);
  const Params p{{"e", eta}};
  const auto c0 = ScalarFamily::parse("z^3/6");
  const auto c = ScalarFamily::parse("z^3/6 + 0.5*e*z", p);
  const auto f = ScalarFamily::parse("z + 0.5*e", p);
  BoundCheckOptions opts;
  opts.interval = {-0.3, 0.3};
  const auto r = tildehj_check(c0, c, f, k, 2, eta, 1.0, opts);
  EXPECT_TRUE(r.satisfied);
  EXPECT_LT(r.measured_norm, 0.1 * r.bound_value);
}

TEST(TildehjCheck, ViolatedHypothesisIsNamed) {
  const auto h0 = ScalarFamily::parse("z^2/2");
  const auto f = ScalarFamily::parse("z + 0.1");  // ||f - id|| = 0.1 > eta
  try {
    tildehj_check(h0, h0, f, 2, 1, 1e-3, 1.0);
    FAIL();
  } catch (const HypothesisViolation& e) {
    EXPECT_NE(e.hypothesis().find("f"), std::string::npos);
    EXPECT_GT(e.measured(), e.limit());
  }
}

TEST(IterateBound, ForwardAndBackward) {
  const auto f = ScalarFamily::parse("z + 0.001 + 0.0005*sin(z)");
  for (int j : {-4, -1, 1, 4}) {
    const auto r = iterate_bound_check(f, 2, j, 0.002);
    EXPECT_TRUE(r.satisfied) << j;
    EXPECT_LT(r.measured_norm, r.bound_value);
  }
}

TEST(PowerInequality, HoldsForSmallAndFailsForLarge) {
  for (int m = 1; m <= 10; ++m) EXPECT_TRUE(power_inequality_holds(1e-4, m));
  EXPECT_TRUE(power_inequality_holds(1e-12, 50));
  EXPECT_FALSE(power_inequality_holds(0.5, 5));
}
