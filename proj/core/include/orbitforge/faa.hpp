#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "orbitforge/jet.hpp"
#include "orbitforge/scalar_family.hpp"

namespace orbitforge {

/// Partition of {1, ..., r} into nonempty disjoint blocks. Blocks are listed
/// by their smallest element; elements within a block are increasing.
struct SetPartition {
  std::vector<std::vector<int>> blocks;
};

inline constexpr int kMaxPartitionSize = 12;

/// All partitions of {1..r}, 1 <= r <= 12, in restricted-growth-string order.
std::vector<SetPartition> set_partitions(int r);

/// Calls visit(blocks_of, block_count) for every partition of {1..r}, where
/// blocks_of[i] is the block index of element i+1. No allocation per
/// partition; this is what the counting and summing routines use.
template <class Visit>
void for_each_partition(int r, Visit&& visit);

/// Number of partitions of an n-set into m nonempty blocks, 0 <= m <= n <= 20.
std::uint64_t stirling2(int n, int m);
/// Bell number B_n = sum_m S(n, m), 0 <= n <= 20.
std::uint64_t bell(int n);
std::uint64_t binomial(int n, int m);

inline constexpr int kMaxFaaOrder = 10;

/// (F o G)^(r)(x) as a sum over set partitions of {1..r}.
/// outer_derivs[i] = F^(i+1)(G(x)), inner_derivs[i] = G^(i+1)(x), each of
/// length at least r. 1 <= r <= 10.
double faa_di_bruno(std::span<const double> outer_derivs, std::span<const double> inner_derivs, int r);

/// Jet at z0 of the j-fold iterate f^j (f^0 = identity; negative j iterates
/// the local inverse, found by Newton's method and series reversion at each
/// step). Throws DomainEscape if an iterate leaves the domain of f and
/// NonInvertible if f' vanishes where the inverse is needed.
Jet iterate_map_jets(const ScalarFamily& f, int j, double z0, int order);

/// Jet of f^{-1} at f(z0), by series reversion of the jet of f at z0.
Jet inverse_map_jet(const ScalarFamily& f, double z0, int order);

/// Solves f(x) = y near `guess` by Newton's method.
double solve_preimage(const ScalarFamily& f, double y, double guess);

/// ((2^{k+3}(k+3) - 2k) B_{k+1} + 4), the constant multiplying eta in the
/// composition bound.
double tildehj_constant(int k, double B_k1);

/// Largest admissible eta, 1 / ((k+1) 2^{k+3}).
double tildehj_eta_limit(int k);

struct CompositionBoundReport {
  int k = 0;
  int j = 0;
  double eta = 0.0;
  double bound_constant = 0.0;
  double measured_norm = 0.0;  // || h o f^j - h0 ||_{C^k}, grid estimate
  double bound_value = 0.0;    // bound_constant * eta
  bool satisfied = false;      // measured_norm < bound_value
};

struct BoundCheckOptions {
  /// Where norms are measured. Must leave room for 2k iterates of f.
  Interval interval{-0.5, 0.5};
  CkNormOptions norm{};
};

/// Verifies the composition bound for h o f^j after checking every
/// hypothesis on the same interval; a measurably false hypothesis raises
/// HypothesisViolation naming it.
CompositionBoundReport tildehj_check(const ScalarFamily& h0, const ScalarFamily& h, const ScalarFamily& f, int k,
                                     int j, double eta, double B_k1, BoundCheckOptions options = {});

struct IterateBoundReport {
  int j = 0;
  double measured_norm = 0.0;  // || f^j - id ||_{C^k}
  double bound_value = 0.0;
  bool satisfied = false;
};

/// Companion check for iterates: given ||f - id||_{C^k} < eta, measures
/// ||f^j - id||_{C^k} against 2|j| eta for j > 0, and against
/// 2|j| (1 + 1/(2k)) eta for j < 0 (the inverse is only (1 + 1/(2k)) eta
/// close to the identity).
IterateBoundReport iterate_bound_check(const ScalarFamily& f, int k, int j, double eta,
                                       BoundCheckOptions options = {});

/// (1+a)^m < (1-a)^{-m} < 1 + (m+1)a, evaluated without cancellation.
bool power_inequality_holds(double a, int m);

// ---------------------------------------------------------------------------

template <class Visit>
void for_each_partition(int r, Visit&& visit) {
  // Restricted growth strings a[0..r-1]: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(static_cast<std::size_t>(r), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(r), 0);
  for (;;) {
    visit(static_cast<const std::vector<int>&>(a), prefix_max[static_cast<std::size_t>(r - 1)] + 1);
    int i = r - 1;
    while (i > 0 && a[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
    if (i == 0) return;
    ++a[static_cast<std::size_t>(i)];
    prefix_max[static_cast<std::size_t>(i)] =
        std::max(prefix_max[static_cast<std::size_t>(i - 1)], a[static_cast<std::size_t>(i)]);
    for (int t = i + 1; t < r; ++t) {
      a[static_cast<std::size_t>(t)] = 0;
      prefix_max[static_cast<std::size_t>(t)] = prefix_max[static_cast<std::size_t>(t - 1)];
    }
  }
}

}  // namespace orbitforge
