#include "qmpc/integrator.hpp"

#include "qmpc/srbd.hpp"

namespace qmpc {

Dynamics srbd_dynamics(const StageParams& a, const RobotModel& model) {
  Dynamics d;
  d.f = [a, model](const Vec12& xv, const Vec12& uv) {
    return srbd_derivative(State::from_vec(xv), Control::from_vec(uv), a,
                           model);
  };
  d.jac = [a, model](const Vec12& xv, const Vec12& uv, Mat12& Gx, Mat12& Gu) {
    srbd_jacobians(State::from_vec(xv), Control::from_vec(uv), a, model, Gx,
                   Gu);
  };
  return d;
}

namespace {

Vec12 implicit_euler(const Dynamics& dyn, const Vec12& x, const Vec12& u,
                     const IntegratorConfig& cfg) {
  const double h = cfg.step;
  Vec12 y = x + h * dyn.f(x, u);  // explicit predictor
  Mat12 Gx, Gu;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    const Vec12 F = y - x - h * dyn.f(y, u);
    if (F.lpNorm<Eigen::Infinity>() <= cfg.newton_tol) return y;
    dyn.jac(y, u, Gx, Gu);
    const Mat12 J = Mat12::Identity() - h * Gx;
    y -= J.partialPivLu().solve(F);
  }
  const Vec12 F = y - x - h * dyn.f(y, u);
  if (F.lpNorm<Eigen::Infinity>() <= cfg.newton_tol) return y;
  throw NewtonDivergence("residual " + std::to_string(F.norm()));
}

}  // namespace

Vec12 integrate(const Dynamics& dyn, const Vec12& x, const Vec12& u,
                const IntegratorConfig& cfg) {
  const double h = cfg.step;
  switch (cfg.scheme) {
    case Scheme::ExplicitEuler:
      return x + h * dyn.f(x, u);
    case Scheme::ImplicitEuler:
      return implicit_euler(dyn, x, u, cfg);
    case Scheme::Rk4: {
      const Vec12 k1 = dyn.f(x, u);
      const Vec12 k2 = dyn.f(x + 0.5 * h * k1, u);
      const Vec12 k3 = dyn.f(x + 0.5 * h * k2, u);
      const Vec12 k4 = dyn.f(x + h * k3, u);
      return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  throw std::logic_error("unknown scheme");
}

State step(const State& x, const Control& u, const StageParams& a,
           const RobotModel& model, const IntegratorConfig& cfg) {
  return State::from_vec(integrate(srbd_dynamics(a, model), x.vec(), u.vec(),
                                   cfg));
}

void linearize_discrete(const Dynamics& dyn, const Vec12& xL, const Vec12& uL,
                        const IntegratorConfig& cfg, Mat12& A, Mat12& B,
                        Vec12& x_next) {
  const double h = cfg.step;
  x_next = integrate(dyn, xL, uL, cfg);
  if (cfg.finite_difference_jacobians) {
    const double e = cfg.fd_step;
    for (int j = 0; j < 12; ++j) {
      Vec12 xp = xL, xm = xL;
      xp[j] += e;
      xm[j] -= e;
      A.col(j) = (integrate(dyn, xp, uL, cfg) - integrate(dyn, xm, uL, cfg)) /
                 (2 * e);
      Vec12 up = uL, um = uL;
      up[j] += e;
      um[j] -= e;
      B.col(j) = (integrate(dyn, xL, up, cfg) - integrate(dyn, xL, um, cfg)) /
                 (2 * e);
    }
    return;
  }
  Mat12 Gx, Gu;
  switch (cfg.scheme) {
    case Scheme::ExplicitEuler:
      dyn.jac(xL, uL, Gx, Gu);
      A = Mat12::Identity() + h * Gx;
      B = h * Gu;
      return;
    case Scheme::ImplicitEuler: {
      dyn.jac(x_next, uL, Gx, Gu);
      const auto lu = (Mat12::Identity() - h * Gx).eval().partialPivLu();
      A = lu.solve(Mat12::Identity());
      B = lu.solve((h * Gu).eval());
      return;
    }
    case Scheme::Rk4: {
      Mat12 Gx1, Gu1, Gx2, Gu2, Gx3, Gu3, Gx4, Gu4;
      const Vec12 k1 = dyn.f(xL, uL);
      const Vec12 x2 = xL + 0.5 * h * k1;
      const Vec12 k2 = dyn.f(x2, uL);
      const Vec12 x3 = xL + 0.5 * h * k2;
      const Vec12 k3 = dyn.f(x3, uL);
      const Vec12 x4 = xL + h * k3;
      dyn.jac(xL, uL, Gx1, Gu1);
      dyn.jac(x2, uL, Gx2, Gu2);
      dyn.jac(x3, uL, Gx3, Gu3);
      dyn.jac(x4, uL, Gx4, Gu4);
      const Mat12 dk1x = Gx1;
      const Mat12 dk2x = Gx2 * (Mat12::Identity() + 0.5 * h * dk1x);
      const Mat12 dk3x = Gx3 * (Mat12::Identity() + 0.5 * h * dk2x);
      const Mat12 dk4x = Gx4 * (Mat12::Identity() + h * dk3x);
      A = Mat12::Identity() + (h / 6.0) * (dk1x + 2 * dk2x + 2 * dk3x + dk4x);
      const Mat12 dk1u = Gu1;
      const Mat12 dk2u = Gx2 * (0.5 * h * dk1u) + Gu2;
      const Mat12 dk3u = Gx3 * (0.5 * h * dk2u) + Gu3;
      const Mat12 dk4u = Gx4 * (h * dk3u) + Gu4;
      B = (h / 6.0) * (dk1u + 2 * dk2u + 2 * dk3u + dk4u);
      return;
    }
  }
  throw std::logic_error("unknown scheme");
}

void linearize_discrete(const State& xL, const Control& uL,
                        const StageParams& a, const RobotModel& model,
                        const IntegratorConfig& cfg, Mat12& A, Mat12& B,
                        Vec12& x_next) {
  linearize_discrete(srbd_dynamics(a, model), xL.vec(), uL.vec(), cfg, A, B,
                     x_next);
}

}  // namespace qmpc
