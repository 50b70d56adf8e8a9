#include "qmpc/leg.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace qmpc {

namespace {

Mat3 haa_rotation(double q1) {
  const double c = std::cos(q1), s = std::sin(q1);
  Mat3 R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

double wrap_pi(double a) {
  while (a > M_PI) a -= 2 * M_PI;
  while (a < -M_PI) a += 2 * M_PI;
  return a;
}

std::vector<double> axis_nodes(double lo, double hi, double res) {
  const int n = std::max(1, (int)std::lround((hi - lo) / res));
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = lo + (hi - lo) * i / n;
  return v;
}

}  // namespace

Vec3 forward_kinematics(const JointConfig& q, const LegGeometry& geom) {
  const double q2 = q.q[1], q3 = q.q[2];
  const double xp = geom.l_upper * std::sin(q2) +
                    geom.l_lower * std::sin(q2 + q3);
  const double zp = -geom.l_upper * std::cos(q2) -
                    geom.l_lower * std::cos(q2 + q3);
  return haa_rotation(q.q[0]) * Vec3(xp, geom.haa_offset, zp);
}

JointConfig inverse_kinematics(const Vec3& p_hf, const LegGeometry& geom) {
  const double h = geom.haa_offset;
  const double r = std::hypot(p_hf.y(), p_hf.z());
  if (r < h) throw Unreachable("target inside the abduction-link cylinder");
  const double q1 =
      wrap_pi(std::atan2(p_hf.z(), p_hf.y()) + std::acos(std::min(1.0, h / r)));
  // Position in the leg plane after removing the HAA rotation; the planar
  // chain hangs toward negative z.
  const double pz = -std::sqrt(std::max(r * r - h * h, 0.0));
  const double lu = geom.l_upper, ll = geom.l_lower;
  const double d2 = p_hf.x() * p_hf.x() + pz * pz;
  const double c3 = (d2 - lu * lu - ll * ll) / (2 * lu * ll);
  if (std::abs(c3) > 1.0) throw Unreachable("outside the reachable annulus");
  const double q3 = -std::acos(c3);  // knee-bent-backward branch
  const double q2 = std::atan2(p_hf.x(), -pz) -
                    std::atan2(ll * std::sin(q3), lu + ll * std::cos(q3));
  JointConfig q;
  q.q << q1, q2, q3;
  for (int j = 0; j < 3; ++j)
    if (q.q[j] < geom.joint_limits[j][0] || q.q[j] > geom.joint_limits[j][1])
      throw Unreachable("joint " + std::to_string(j) + " outside limits");
  return q;
}

Mat3 jacobian(const JointConfig& q, const LegGeometry& geom) {
  const double q2 = q.q[1], q23 = q.q[1] + q.q[2];
  const double lu = geom.l_upper, ll = geom.l_lower;
  const double xp = lu * std::sin(q2) + ll * std::sin(q23);
  const double zp = -lu * std::cos(q2) - ll * std::cos(q23);
  const Mat3 R1 = haa_rotation(q.q[0]);
  const Vec3 p = R1 * Vec3(xp, geom.haa_offset, zp);
  Mat3 J;
  J.col(0) = Vec3::UnitX().cross(p);
  J.col(1) = R1 * Vec3(-zp, 0.0, xp);
  J.col(2) = R1 * Vec3(ll * std::cos(q23), 0.0, ll * std::sin(q23));
  return J;
}

std::pair<double, double> ellipsoid_volume_and_eccentricity(const Mat3& J) {
  const Mat3 JJt = J * J.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(JJt);
  const Vec3 lam = es.eigenvalues();  // ascending
  if (lam.minCoeff() <= 1e-12)
    throw SingularJacobian("ellipsoid axis below floor");
  const double V = 1.0 / (lam[0] * lam[1] * lam[2]);
  const double E = lam[2] / lam[0];
  return {V, E};
}

double mobility_factor(const JointConfig& q, const LegGeometry& geom,
                       const MobilityWeights& w) {
  const auto [V, E] = ellipsoid_volume_and_eccentricity(jacobian(q, geom));
  return w.beta * V / w.v_range - w.gamma * E / w.e_range;
}

MobilityCalibration find_max_mobility_offset(const LegGeometry& geom,
                                             double beta, double gamma,
                                             const WorkspaceGrid& grid) {
  const auto xs = axis_nodes(grid.lo.x(), grid.hi.x(), grid.resolution);
  const auto ys = axis_nodes(grid.lo.y(), grid.hi.y(), grid.resolution);
  const auto zs = axis_nodes(grid.lo.z(), grid.hi.z(), grid.resolution);
  std::vector<Vec3> pts;
  std::vector<std::pair<double, double>> ve;
  for (double x : xs)
    for (double y : ys)
      for (double z : zs) {
        try {
          const JointConfig q = inverse_kinematics(Vec3(x, y, z), geom);
          ve.push_back(ellipsoid_volume_and_eccentricity(jacobian(q, geom)));
          pts.emplace_back(x, y, z);
        } catch (const Unreachable&) {
        } catch (const SingularJacobian&) {
        }
      }
  if (pts.empty()) throw Unreachable("no grid node is reachable");
  double v_min = ve[0].first, v_max = ve[0].first;
  double e_min = ve[0].second, e_max = ve[0].second;
  for (const auto& [V, E] : ve) {
    v_min = std::min(v_min, V);
    v_max = std::max(v_max, V);
    e_min = std::min(e_min, E);
    e_max = std::max(e_max, E);
  }
  MobilityCalibration cal;
  cal.weights.beta = beta;
  cal.weights.gamma = gamma;
  cal.weights.v_range = std::max(v_max - v_min, 1e-12);
  cal.weights.e_range = std::max(e_max - e_min, 1e-12);
  cal.evaluated_nodes = (int)pts.size();
  cal.peak = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i) {
    const double lm = beta * ve[i].first / cal.weights.v_range -
                      gamma * ve[i].second / cal.weights.e_range;
    if (lm > cal.peak) {
      cal.peak = lm;
      cal.argmax = pts[i];
    }
  }
  return cal;
}

std::string mobility_field_csv(const LegGeometry& geom, double beta,
                               double gamma, const WorkspaceGrid& grid) {
  const MobilityCalibration cal =
      find_max_mobility_offset(geom, beta, gamma, grid);
  std::ostringstream out;
  out << "x,y,z,l_m\n";
  for (double x : axis_nodes(grid.lo.x(), grid.hi.x(), grid.resolution))
    for (double y : axis_nodes(grid.lo.y(), grid.hi.y(), grid.resolution))
      for (double z : axis_nodes(grid.lo.z(), grid.hi.z(), grid.resolution)) {
        try {
          const JointConfig q = inverse_kinematics(Vec3(x, y, z), geom);
          const double lm = mobility_factor(q, geom, cal.weights);
          out << x << ',' << y << ',' << z << ',' << lm << '\n';
        } catch (const Unreachable&) {
        } catch (const SingularJacobian&) {
        }
      }
  return out.str();
}

}  // namespace qmpc
