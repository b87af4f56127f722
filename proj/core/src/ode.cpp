#include "orbitforge/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "orbitforge/errors.hpp"

namespace orbitforge {

namespace odeint = boost::numeric::odeint;

State integrate(const OdeRhs& rhs, State x0, double t0, double t1, const OdeOptions& options,
                const OdeInside& inside, OdeStats* stats) {
  if (inside && !inside(x0)) throw DomainEscape("initial state outside the domain", t0, x0.empty() ? 0.0 : x0[0]);
  if (t0 == t1) return x0;
  using Stepper = odeint::runge_kutta_dopri5<State>;
  auto stepper = odeint::make_controlled<Stepper>(options.abs_tol, options.rel_tol);
  auto system = [&rhs](const State& x, State& dxdt, double t) { rhs(x, dxdt, t); };

  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double dt = dir * std::min(std::abs(options.initial_step), std::abs(t1 - t0));
  State x = std::move(x0);
  OdeStats local;
  while (dir * (t1 - t) > 0.0) {
    if (local.accepted + local.rejected >= options.max_steps) {
      throw Error(Errc::tolerance_unreachable, "ODE step budget exhausted");
    }
    // Clip the step so the final one lands on t1.
    if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
    const double t_before = t;
    const odeint::controlled_step_result res = stepper.try_step(system, x, t, dt);
    if (res == odeint::success) {
      ++local.accepted;
      if (inside && !inside(x)) throw DomainEscape("trajectory left the domain", t, x.empty() ? 0.0 : x[0]);
      // try_step advanced t by the step actually taken; snap to t1 when the
      // clipped step reached it up to rounding.
      if (std::abs(t - t1) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1))) t = t1;
    } else {
      ++local.rejected;
      if (t != t_before) t = t_before;
    }
    if (!std::isfinite(dt) || dt == 0.0) throw Error(Errc::tolerance_unreachable, "ODE step size underflow");
  }
  if (stats != nullptr) *stats = local;
  return x;
}

}  // namespace orbitforge
