#include "qmpc/wbc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmpc/srbd.hpp"

namespace qmpc {

State interpolate_state(const State& x_k, const State& x_k1, int i, int f_r) {
  if (i < 0 || i > f_r || f_r <= 0) {
    throw InvalidSpec("interpolate_state substep out of range");
  }
  const double t = static_cast<double>(i) / f_r;
  return State::from_vec(x_k.vec() + t * (x_k1.vec() - x_k.vec()));
}

std::pair<Vec3, Vec3> swing_position(const SwingSpec& spec, double t_sw) {
  if (spec.duration <= 0) throw InvalidSpec("swing duration must be positive");
  const double t = std::clamp(t_sw, 0.0, spec.duration);
  const double w = M_PI / spec.duration;
  const Vec3 chord = spec.touchdown - spec.liftoff;
  const double s = 0.5 * (1.0 - std::cos(w * t));
  Vec3 pos = spec.liftoff + s * chord;
  pos.z() += spec.apex_height * std::sin(w * t);
  Vec3 vel = 0.5 * w * std::sin(w * t) * chord;
  vel.z() += spec.apex_height * w * std::cos(w * t);
  return {pos, vel};
}

Vec6 feedforward_wrench(const Control& u_d,
                        const std::array<Vec3, kNumLegs>& p_cf,
                        const std::array<bool, kNumLegs>& delta) {
  Vec6 w = Vec6::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    if (!delta[i]) continue;
    w.head<3>() += u_d.forces[i];
    w.tail<3>() += p_cf[i].cross(u_d.forces[i]);
  }
  return w;
}

Vec3 rotation_log(const Mat3& R) {
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double angle = std::acos(c);
  if (angle > M_PI - 1e-6) {
    throw LogSingularity("relative rotation too close to pi");
  }
  Vec3 axis(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (angle < 1e-12) return 0.5 * axis;
  return (angle / (2.0 * std::sin(angle))) * axis;
}

Vec6 feedback_wrench(const State& x_d, const State& x, const WbcGains& gains) {
  const Mat3 R_b = rotation_matrix(x.Phi);
  const Mat3 R_d = rotation_matrix(x_d.Phi);
  Vec6 err_p, err_v;
  err_p.head<3>() = x_d.p_c - x.p_c;
  err_p.tail<3>() = R_b * rotation_log(R_b.transpose() * R_d);
  err_v.head<3>() = x_d.v_c - x.v_c;
  err_v.tail<3>() = R_b * (x_d.omega_body - x.omega_body);
  return gains.K.cwiseProduct(err_p) + gains.D.cwiseProduct(err_v);
}

Control project_wrench_to_grf(const Vec6& w_total,
                              const std::array<Vec3, kNumLegs>& p_cf,
                              const StageParams& a, const Control& u_d,
                              const OcpConfig& cfg, const WbcGains& gains) {
  const std::vector<int> slots = stance_slots(a);
  const int n = static_cast<int>(slots.size());
  if (n == 0) throw InvalidSpec("projection requires at least one stance leg");

  // Stack the stance blocks of the wrench map and the regularization target.
  MatX A = MatX::Zero(6, 3 * n);
  VecX ud = VecX::Zero(3 * n);
  VecX t_diag = VecX::Zero(3 * n);
  for (int j = 0; j < n; ++j) {
    const int leg = slots[j];
    A.block<3, 3>(0, 3 * j).setIdentity();
    A.block<3, 3>(3, 3 * j) = skew(p_cf[leg]);
    ud.segment<3>(3 * j) = u_d.forces[leg];
    t_diag.segment<3>(3 * j) = gains.T.segment<3>(3 * leg);
  }

  // min |A f - b|^2_S + |f - u_d|^2_T as 1/2 f' H f + g' f.
  QpSubproblem qp;
  qp.stages.resize(1);
  QpStage& st = qp.stages[0];
  st.nx = 0;
  st.nu = 3 * n;
  st.H = 2.0 * (A.transpose() * gains.S.asDiagonal() * A +
                MatX(t_diag.asDiagonal()));
  st.g = -2.0 * (A.transpose() * (gains.S.asDiagonal() * w_total) +
                 t_diag.cwiseProduct(ud));
  st.A = MatX::Zero(0, 0);
  st.B = MatX::Zero(0, 3 * n);
  st.r = VecX::Zero(0);

  MatX L;
  VecX h0;
  friction_pyramid_rows(a, cfg, L, h0);
  st.C = MatX::Zero(L.rows(), 0);
  st.D = MatX::Zero(L.rows(), 3 * n);
  for (int j = 0; j < n; ++j) {
    st.D.middleCols(3 * j, 3) = L.middleCols(3 * slots[j], 3);
  }
  st.h = h0;

  qp.nxN = 0;
  qp.HN = MatX::Zero(0, 0);
  qp.gN = VecX::Zero(0);
  qp.CN = MatX::Zero(0, 0);
  qp.hN = VecX::Zero(0);
  qp.dx0 = VecX::Zero(0);

  QpSolver solver;
  const QpSolution sol = solver.solve(qp);
  if (!sol.converged) {
    throw InfeasibleQp("grf projection did not converge");
  }
  Control out;
  for (int i = 0; i < kNumLegs; ++i) out.forces[i].setZero();
  for (int j = 0; j < n; ++j) {
    out.forces[slots[j]] = sol.delta_u[0].segment<3>(3 * j);
  }
  return out;
}

Vec12 map_grf_to_torques(const Control& f_d,
                         const std::array<JointConfig, kNumLegs>& q,
                         const LegGeometry& geom, const Mat3& r_base) {
  Vec12 tau;
  for (int i = 0; i < kNumLegs; ++i) {
    const Vec3 f_body = r_base.transpose() * f_d.forces[i];
    tau.segment<3>(3 * i) = -jacobian(q[i], geom).transpose() * f_body;
  }
  return tau;
}

Vec2 zmp_from_forces(const Control& u, const std::array<Vec3, kNumLegs>& feet,
                     const std::array<bool, kNumLegs>& delta) {
  double fz_sum = 0;
  Vec2 num = Vec2::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    if (!delta[i]) continue;
    fz_sum += u.forces[i].z();
    num += u.forces[i].z() * feet[i].head<2>();
  }
  if (fz_sum <= 1e-9) throw DegeneratePolygon("no supporting normal force");
  return num / fz_sum;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Andrew's monotone chain, counter-clockwise hull without collinear points.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return (a - b).norm() < 1e-12;
                        }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 &&
           cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) {
      --k;
    }
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower &&
           cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-12) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t =
      std::clamp(ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0,
                 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

double zmp_margin(const std::vector<Vec3>& stance_feet, const Vec2& zmp_xy) {
  std::vector<Vec2> pts;
  pts.reserve(stance_feet.size());
  for (const Vec3& f : stance_feet) pts.push_back(f.head<2>());
  const std::vector<Vec2> hull = convex_hull(std::move(pts));
  if (hull.size() < 3) {
    throw DegeneratePolygon("support polygon needs 3 non-collinear feet");
  }
  double inside = std::numeric_limits<double>::infinity();
  double boundary = std::numeric_limits<double>::infinity();
  bool outside = false;
  const int m = static_cast<int>(hull.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % m];
    const double signed_d = cross2(b - a, zmp_xy - a) / (b - a).norm();
    if (signed_d < 0) outside = true;
    inside = std::min(inside, signed_d);
    boundary = std::min(boundary, point_segment_distance(zmp_xy, a, b));
  }
  return outside ? -boundary : inside;
}

}  // namespace qmpc
