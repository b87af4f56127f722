#pragma once

#include <functional>
#include <vector>

namespace orbitforge {

using State = std::vector<double>;
using OdeRhs = std::function<void(const State& x, State& dxdt, double t)>;
/// Returns false when the state has left the region where the right-hand
/// side is valid.
using OdeInside = std::function<bool(const State& x)>;

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double initial_step = 1e-3;
  long max_steps = 1'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) with step-size control from t0 to t1 (either
/// direction), landing exactly on t1. After every accepted step the state is
/// tested with `inside`; a failure raises DomainEscape with the time and
/// first state component. Deterministic for identical inputs.
State integrate(const OdeRhs& rhs, State x0, double t0, double t1, const OdeOptions& options = {},
                const OdeInside& inside = {}, OdeStats* stats = nullptr);

}  // namespace orbitforge
