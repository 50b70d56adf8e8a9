#include "qmpc/ocp.hpp"

#include <cmath>

#include "qmpc/srbd.hpp"

namespace qmpc {

std::array<Vec3, kNumLegs> hip_to_foot_com_frame(
    const State& x, const std::array<Vec3, kNumLegs>& foot_pos,
    const RobotModel& model) {
  if (std::abs(std::cos(x.Phi.y())) <= kOrientationSingularityTol)
    throw SingularOrientation("hip_to_foot_com_frame");
  const Mat3 Rt = rotation_matrix(x.Phi).transpose();
  std::array<Vec3, kNumLegs> out;
  for (int i = 0; i < kNumLegs; ++i)
    out[i] = Rt * (foot_pos[i] - x.p_c) - (model.com_to_base +
                                           model.hip_offsets[i]);
  return out;
}

Mat3 contact_frame(const Vec3& normal) {
  if (normal.norm() < 1e-8) throw DegenerateNormal("zero normal");
  const Vec3 z = normal.normalized();
  Vec3 seed = Vec3::UnitX();
  Vec3 xt = seed - seed.dot(z) * z;
  if (xt.norm() < 1e-8) {
    seed = Vec3::UnitY();
    xt = seed - seed.dot(z) * z;
  }
  const Vec3 x = xt.normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return R;
}

namespace {

// d p_hf_i / d x (3x12): depends on p_c (cols 0-2) and Phi (cols 6-8).
Eigen::Matrix<double, 3, 12> hip_to_foot_jacobian(const State& x,
                                                  const Vec3& foot_pos) {
  Eigen::Matrix<double, 3, 12> J = Eigen::Matrix<double, 3, 12>::Zero();
  const Mat3 Rt = rotation_matrix(x.Phi).transpose();
  const auto dR = rotation_matrix_derivatives(x.Phi);
  J.block<3, 3>(0, 0) = -Rt;
  const Vec3 d = foot_pos - x.p_c;
  for (int j = 0; j < 3; ++j) J.block<3, 1>(0, 6 + j) = dR[j].transpose() * d;
  return J;
}

}  // namespace

double stage_cost(const State& x, const Control& u, const StageParams& a,
                  const State& x_ref, const Control& u_ref,
                  const std::array<Vec3, kNumLegs>& p_hf_ref,
                  const OcpConfig& cfg, const RobotModel& model) {
  const Vec12 ex = x.vec() - x_ref.vec();
  const Vec12 eu = u.vec() - u_ref.vec();
  double cost = ex.dot(cfg.Q.asDiagonal() * ex) +
                eu.dot(cfg.R.asDiagonal() * eu);
  const auto p_hf = hip_to_foot_com_frame(x, a.foot_pos, model);
  for (int i = 0; i < kNumLegs; ++i) {
    if (!a.delta[i]) continue;
    const Vec3 em = p_hf[i] - p_hf_ref[i];
    cost += em.dot(cfg.M.segment<3>(3 * i).asDiagonal() * em);
    const Vec3 fK = contact_frame(a.normals[i]).transpose() * u.forces[i];
    cost += cfg.rho * fK.dot(cfg.P.segment<3>(3 * i).asDiagonal() * fK);
  }
  return cost;
}

void friction_pyramid_rows(const StageParams& a, const OcpConfig& cfg,
                           MatX& L, VecX& h0) {
  const int per_leg = cfg.cone_faces ? 6 : 2;
  const int m = per_leg * a.num_stance();
  L.setZero(m, 12);
  h0.setZero(m);
  int row = 0;
  for (int i = 0; i < kNumLegs; ++i) {
    if (!a.delta[i]) continue;
    const Mat3 T = contact_frame(a.normals[i]).transpose();
    const auto tx = T.row(0), ty = T.row(1), tz = T.row(2);
    if (cfg.cone_faces) {
      L.block<1, 3>(row + 0, 3 * i) = cfg.mu * tz - tx;
      L.block<1, 3>(row + 1, 3 * i) = cfg.mu * tz + tx;
      L.block<1, 3>(row + 2, 3 * i) = cfg.mu * tz - ty;
      L.block<1, 3>(row + 3, 3 * i) = cfg.mu * tz + ty;
      row += 4;
    }
    L.block<1, 3>(row + 0, 3 * i) = tz;
    h0(row + 0) = -cfg.fz_min;
    L.block<1, 3>(row + 1, 3 * i) = -tz;
    h0(row + 1) = cfg.fz_max;
    row += 2;
  }
}

double nlp_objective(const Trajectory& traj, const ReferenceTrajectory& refs,
                     const OcpConfig& cfg, const RobotModel& model) {
  const int N = cfg.N;
  double total = 0;
  for (int k = 0; k < N; ++k)
    total += stage_cost(traj.x[k], traj.u[k], refs.params[k], refs.x_ref[k],
                        refs.u_ref[k], refs.p_hf_ref, cfg, model);
  const Vec12 eN = traj.x[N].vec() - refs.x_ref[N].vec();
  total += eN.dot(cfg.QN.asDiagonal() * eN);
  return 0.5 * total;
}

std::vector<int> stance_slots(const StageParams& a) {
  std::vector<int> slots;
  for (int i = 0; i < kNumLegs; ++i)
    if (a.delta[i]) slots.push_back(i);
  return slots;
}

QpSubproblem build_qp(const Trajectory& guess, const ReferenceTrajectory& refs,
                      const State& x0_hat, const OcpConfig& cfg,
                      const RobotModel& model, const IntegratorConfig& icfg) {
  const int N = cfg.N;
  QpSubproblem qp;
  qp.stages.resize(N);
  for (int k = 0; k < N; ++k) {
    const StageParams& a = refs.params[k];
    const auto slots = stance_slots(a);
    const int nu = 3 * (int)slots.size();
    QpStage& st = qp.stages[k];
    st.nx = 12;
    st.nu = nu;

    Mat12 A, Bfull;
    Vec12 x_next;
    linearize_discrete(guess.x[k], guess.u[k], a, model, icfg, A, Bfull,
                       x_next);
    st.A = A;
    st.B.resize(12, nu);
    for (size_t j = 0; j < slots.size(); ++j)
      st.B.middleCols(3 * j, 3) = Bfull.middleCols(3 * slots[j], 3);
    st.r = x_next - guess.x[k + 1].vec();

    // Gauss-Newton Hessian and gradient (1/2-scaled convention).
    st.H.setZero(12 + nu, 12 + nu);
    st.g.setZero(12 + nu);
    st.H.topLeftCorner(12, 12) = cfg.Q.asDiagonal();
    const Vec12 ex = guess.x[k].vec() - refs.x_ref[k].vec();
    st.g.head(12) = cfg.Q.asDiagonal() * ex;
    const auto p_hf = hip_to_foot_com_frame(guess.x[k], a.foot_pos, model);
    for (size_t j = 0; j < slots.size(); ++j) {
      const int i = slots[j];
      const auto Jm = hip_to_foot_jacobian(guess.x[k], a.foot_pos[i]);
      const Mat3 Mw = cfg.M.segment<3>(3 * i).asDiagonal();
      st.H.topLeftCorner(12, 12) += Jm.transpose() * Mw * Jm;
      st.g.head(12) += Jm.transpose() * Mw * (p_hf[i] - refs.p_hf_ref[i]);

      const Mat3 RK = contact_frame(a.normals[i]);
      const Mat3 Rw =
          Vec3(cfg.R.segment<3>(3 * i)).asDiagonal().toDenseMatrix() +
          cfg.rho * RK * cfg.P.segment<3>(3 * i).asDiagonal() * RK.transpose();
      st.H.block(12 + 3 * j, 12 + 3 * j, 3, 3) = Rw;
      const Vec3 ef = guess.u[k].forces[i] - refs.u_ref[k].forces[i];
      st.g.segment(12 + 3 * j, 3) =
          Vec3(cfg.R.segment<3>(3 * i)).asDiagonal() * ef +
          cfg.rho * RK * cfg.P.segment<3>(3 * i).asDiagonal() *
              (RK.transpose() * guess.u[k].forces[i]);
    }

    MatX L;
    VecX h0;
    friction_pyramid_rows(a, cfg, L, h0);
    const int m = (int)h0.size();
    st.C.setZero(m, 12);
    st.D.resize(m, nu);
    for (size_t j = 0; j < slots.size(); ++j)
      st.D.middleCols(3 * j, 3) = L.middleCols(3 * slots[j], 3);
    st.h = L * guess.u[k].vec() + h0;
  }
  qp.nxN = 12;
  qp.HN = cfg.QN.asDiagonal();
  qp.gN = cfg.QN.asDiagonal() * (guess.x[N].vec() - refs.x_ref[N].vec());
  qp.CN.resize(0, 12);
  qp.hN.resize(0);
  qp.dx0 = x0_hat.vec() - guess.x[0].vec();
  return qp;
}

Trajectory apply_step(const Trajectory& guess, const ReferenceTrajectory& refs,
                      const QpSolution& sol) {
  Trajectory out = guess;
  const int N = (int)guess.u.size();
  for (int k = 0; k <= N; ++k)
    out.x[k] = State::from_vec(guess.x[k].vec() + sol.delta_x[k]);
  for (int k = 0; k < N; ++k) {
    const auto slots = stance_slots(refs.params[k]);
    for (size_t j = 0; j < slots.size(); ++j)
      out.u[k].forces[slots[j]] += sol.delta_u[k].segment<3>(3 * j);
  }
  return out;
}

}  // namespace qmpc
