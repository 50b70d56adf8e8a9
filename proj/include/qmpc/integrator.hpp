#pragma once

#include <functional>

#include "qmpc/types.hpp"

namespace qmpc {

enum class Scheme { ExplicitEuler, ImplicitEuler, Rk4 };

struct IntegratorConfig {
  Scheme scheme = Scheme::ImplicitEuler;
  double step = 0.04;  // s
  double newton_tol = 1e-10;
  int newton_max_iter = 20;
  // When true, linearize_discrete uses central finite differences instead of
  // the analytic chain rule (kept as the correctness oracle).
  bool finite_difference_jacobians = false;
  double fd_step = 1e-6;
};

// Test hook: generic dynamics on a 12-vector. The SRBD entry points wrap
// srbd_derivative / srbd_jacobians into this shape.
struct Dynamics {
  std::function<Vec12(const Vec12&, const Vec12&)> f;
  std::function<void(const Vec12&, const Vec12&, Mat12&, Mat12&)> jac;
};

Dynamics srbd_dynamics(const StageParams& a, const RobotModel& model);

Vec12 integrate(const Dynamics& dyn, const Vec12& x, const Vec12& u,
                const IntegratorConfig& cfg);

// One discrete step x_{k+1} = f(x_k, u_k, a_k).
State step(const State& x, const Control& u, const StageParams& a,
           const RobotModel& model, const IntegratorConfig& cfg);

// Discrete sensitivities A = d step/dx, B = d step/du evaluated at the guess
// point, plus the one-step prediction step(xL, uL). The integration defect
// r = step(xL,uL) - x_next_guess is formed by the caller, which owns the
// next guess point.
void linearize_discrete(const Dynamics& dyn, const Vec12& xL, const Vec12& uL,
                        const IntegratorConfig& cfg, Mat12& A, Mat12& B,
                        Vec12& x_next);

void linearize_discrete(const State& xL, const Control& uL,
                        const StageParams& a, const RobotModel& model,
                        const IntegratorConfig& cfg, Mat12& A, Mat12& B,
                        Vec12& x_next);

}  // namespace qmpc
