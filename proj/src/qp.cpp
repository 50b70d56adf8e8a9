#include "qmpc/qp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qmpc {

namespace {

struct Iterate {
  std::vector<VecX> dx, du, nu, s, lam;
};

// Per-stage inequality value q = C dx + D du + h (terminal: CN dx + hN).
VecX ineq_value(const QpSubproblem& qp, const Iterate& it, int k) {
  const int N = qp.horizon();
  if (k == N) {
    if (qp.hN.size() == 0) return VecX();
    return qp.CN * it.dx[N] + qp.hN;
  }
  const QpStage& st = qp.stages[k];
  if (st.num_ineq() == 0) return VecX();
  VecX q = st.h;
  if (st.nx) q += st.C * it.dx[k];
  if (st.nu) q += st.D * it.du[k];
  return q;
}

struct Residuals {
  std::vector<VecX> stat_x, stat_u;  // stationarity
  std::vector<VecX> c;               // dynamics defects, index k -> row k+1
  VecX c0;                           // initial condition defect
  std::vector<VecX> rin;             // q - s
  double stat_norm = 0, eq_norm = 0, in_norm = 0, comp_norm = 0;

  double kkt() const {
    return std::max(std::max(stat_norm, eq_norm),
                    std::max(in_norm, comp_norm));
  }
};

double inf_norm(const VecX& v) {
  if (!v.size()) return 0.0;
  // NaN must not be swallowed by std::max chains downstream.
  if (!v.allFinite()) return std::numeric_limits<double>::infinity();
  return v.lpNorm<Eigen::Infinity>();
}

Residuals compute_residuals(const QpSubproblem& qp, const Iterate& it) {
  const int N = qp.horizon();
  Residuals r;
  r.stat_x.resize(N + 1);
  r.stat_u.resize(N);
  r.c.resize(N);
  r.rin.resize(N + 1);
  for (int k = 0; k < N; ++k) {
    const QpStage& st = qp.stages[k];
    VecX z(st.nx + st.nu);
    z << it.dx[k], it.du[k];
    const VecX hz = st.H * z + st.g;
    VecX sx = hz.head(st.nx);
    VecX su = hz.tail(st.nu);
    sx += st.A.transpose() * it.nu[k + 1] - it.nu[k];
    su += st.B.transpose() * it.nu[k + 1];
    if (st.num_ineq()) {
      sx -= st.C.transpose() * it.lam[k];
      su -= st.D.transpose() * it.lam[k];
    }
    r.stat_x[k] = sx;
    r.stat_u[k] = su;
    r.c[k] = st.A * it.dx[k] + st.B * it.du[k] + st.r - it.dx[k + 1];
    r.rin[k] = ineq_value(qp, it, k) - it.s[k];
  }
  r.stat_x[N] = qp.HN * it.dx[N] + qp.gN - it.nu[N];
  if (qp.hN.size()) r.stat_x[N] -= qp.CN.transpose() * it.lam[N];
  r.c0 = qp.dx0 - it.dx[0];
  r.rin[N] = ineq_value(qp, it, N) - it.s[N];
  for (int k = 0; k <= N; ++k) {
    r.stat_norm = std::max(r.stat_norm, inf_norm(r.stat_x[k]));
    if (k < N) {
      r.stat_norm = std::max(r.stat_norm, inf_norm(r.stat_u[k]));
      r.eq_norm = std::max(r.eq_norm, inf_norm(r.c[k]));
    }
    r.in_norm = std::max(r.in_norm, inf_norm(r.rin[k]));
    if (it.s[k].size())
      r.comp_norm = std::max(
          r.comp_norm, inf_norm((it.s[k].array() * it.lam[k].array()).matrix()));
  }
  r.eq_norm = std::max(r.eq_norm, inf_norm(r.c0));
  return r;
}

// Riccati factorization of the barrier-augmented equality-constrained
// problem; reusable for several right-hand sides per interior-point
// iteration.
struct Riccati {
  std::vector<MatX> P;                        // value Hessians, 0..N
  std::vector<MatX> K;                        // feedback gains, 0..N-1
  std::vector<MatX> Qxu;                      // cached cross terms
  std::vector<Eigen::LDLT<MatX>> Quu;         // cached factorizations
  std::vector<MatX> Hbar;                     // augmented stage Hessians
  MatX HbarN;

  void factorize(const QpSubproblem& qp, const Iterate& it, double reg) {
    const int N = qp.horizon();
    P.assign(N + 1, MatX());
    K.assign(N, MatX());
    Qxu.assign(N, MatX());
    Quu.assign(N, Eigen::LDLT<MatX>());
    Hbar.assign(N, MatX());
    HbarN = qp.HN + reg * MatX::Identity(qp.nxN, qp.nxN);
    if (qp.hN.size()) {
      const VecX w = (it.lam[N].array() / it.s[N].array()).matrix();
      HbarN += qp.CN.transpose() * w.asDiagonal() * qp.CN;
    }
    P[N] = HbarN;
    for (int k = N - 1; k >= 0; --k) {
      const QpStage& st = qp.stages[k];
      const int nz = st.nx + st.nu;
      MatX Hb = st.H + reg * MatX::Identity(nz, nz);
      if (st.num_ineq()) {
        MatX CD(st.num_ineq(), nz);
        CD << st.C, st.D;
        const VecX w = (it.lam[k].array() / it.s[k].array()).matrix();
        Hb += CD.transpose() * w.asDiagonal() * CD;
      }
      Hbar[k] = Hb;
      const MatX& F = P[k + 1];
      const MatX FA = F * st.A;
      const MatX FB = F * st.B;
      const MatX Qxx = Hb.topLeftCorner(st.nx, st.nx) + st.A.transpose() * FA;
      const MatX Quu_k =
          Hb.bottomRightCorner(st.nu, st.nu) + st.B.transpose() * FB;
      Qxu[k] = Hb.topRightCorner(st.nx, st.nu) + st.A.transpose() * FB;
      Quu[k].compute(Quu_k);
      K[k] = -Quu[k].solve(Qxu[k].transpose());
      MatX Pk = Qxx + Qxu[k] * K[k];
      P[k] = 0.5 * (Pk + Pk.transpose());
    }
  }

  // Solves for steps given stationarity-fold right-hand sides gbar and
  // equality defects c (dynamics) and c0 (initial condition).
  void solve(const QpSubproblem& qp, const std::vector<VecX>& gbar_x,
             const std::vector<VecX>& gbar_u, const std::vector<VecX>& c,
             const VecX& c0, std::vector<VecX>& ddx, std::vector<VecX>& ddu,
             std::vector<VecX>& dnu) const {
    const int N = qp.horizon();
    std::vector<VecX> p(N + 1), kff(N);
    p[N] = gbar_x[N];
    for (int k = N - 1; k >= 0; --k) {
      const QpStage& st = qp.stages[k];
      const VecX f = p[k + 1] + P[k + 1] * c[k];
      const VecX qx = gbar_x[k] + st.A.transpose() * f;
      const VecX qu = gbar_u[k] + st.B.transpose() * f;
      kff[k] = -Quu[k].solve(qu);
      p[k] = qx + Qxu[k] * kff[k];
    }
    ddx.assign(N + 1, VecX());
    ddu.assign(N, VecX());
    dnu.assign(N + 1, VecX());
    ddx[0] = c0;
    for (int k = 0; k < N; ++k) {
      const QpStage& st = qp.stages[k];
      ddu[k] = K[k] * ddx[k] + kff[k];
      ddx[k + 1] = st.A * ddx[k] + st.B * ddu[k] + c[k];
    }
    for (int k = 0; k <= N; ++k) dnu[k] = P[k] * ddx[k] + p[k];
  }
};

double boundary_step(const std::vector<VecX>& v, const std::vector<VecX>& dv,
                     double tau) {
  double alpha = 1.0;
  for (size_t k = 0; k < v.size(); ++k)
    for (int i = 0; i < v[k].size(); ++i)
      if (dv[k][i] < 0) alpha = std::min(alpha, -tau * v[k][i] / dv[k][i]);
  return alpha;
}

}  // namespace

QpSolution QpSolver::solve(const QpSubproblem& qp) const {
  return solve(qp, QpSolution{});
}

QpSolution QpSolver::solve(const QpSubproblem& qp,
                           const QpSolution& warm) const {
  const int N = qp.horizon();
  if (N == 0) throw std::invalid_argument("empty QP");
  Iterate it;
  it.dx.assign(N + 1, VecX());
  it.du.assign(N, VecX());
  it.nu.assign(N + 1, VecX());
  it.s.assign(N + 1, VecX());
  it.lam.assign(N + 1, VecX());
  const bool has_warm = !warm.delta_x.empty();
  int m_total = 0;
  for (int k = 0; k <= N; ++k) {
    const int nx = (k == N) ? qp.nxN : qp.stages[k].nx;
    it.dx[k] = has_warm ? warm.delta_x[k] : VecX::Zero(nx);
    it.nu[k] = (has_warm && !warm.eq_multipliers.empty())
                   ? warm.eq_multipliers[k]
                   : VecX::Zero(nx);
    if (k < N) {
      it.du[k] = has_warm ? warm.delta_u[k] : VecX::Zero(qp.stages[k].nu);
    }
    const int m = (k == N) ? (int)qp.hN.size() : qp.stages[k].num_ineq();
    m_total += m;
    const VecX q = ineq_value(qp, it, k);
    it.s[k] = VecX::Ones(m);
    it.lam[k] = VecX::Ones(m);
    for (int i = 0; i < m; ++i) it.s[k][i] = std::max(1.0, q[i]);
    if (has_warm && !warm.ineq_multipliers.empty() &&
        warm.ineq_multipliers[k].size() == m)
      for (int i = 0; i < m; ++i)
        it.lam[k][i] = std::max(1e-3, warm.ineq_multipliers[k][i]);
  }

  QpSolution sol;
  sol.regularized = settings_.regularization > 0;
  Riccati ric;
  std::vector<VecX> gx(N + 1), gu(N), ddx, ddu, dnu, ds(N + 1), dlam(N + 1);
  for (int iter = 0; iter < settings_.max_iter; ++iter) {
    const Residuals res = compute_residuals(qp, it);
    sol.kkt_residual = res.kkt();
    sol.iterations = iter;
    if (sol.kkt_residual <= settings_.tol) {
      sol.converged = true;
      break;
    }
    // Slack collapse on an infeasible problem drives the scaled Hessian to
    // infinity and contaminates the iterate.
    if (!std::isfinite(sol.kkt_residual))
      throw InfeasibleQp("iterates diverged (non-finite KKT residual)");
    // Primal infeasibility heuristic: complementarity and stationarity have
    // collapsed but the primal defect refuses to move.
    double mu = 0;
    if (m_total) {
      for (int k = 0; k <= N; ++k) mu += it.s[k].dot(it.lam[k]);
      mu /= m_total;
    }
    if (iter > 10 && m_total && mu < 1e-11 &&
        std::max(res.eq_norm, res.in_norm) > 1e3 * settings_.tol)
      throw InfeasibleQp("primal defect stalled at vanishing barrier");

    ric.factorize(qp, it, settings_.regularization);

    auto fold_rhs = [&](const std::vector<VecX>& rcomp) {
      for (int k = 0; k <= N; ++k) {
        gx[k] = res.stat_x[k];
        if (k < N) gu[k] = res.stat_u[k];
        const int m = (int)it.s[k].size();
        if (!m) continue;
        const VecX t =
            ((rcomp[k].array() + it.lam[k].array() * res.rin[k].array()) /
             it.s[k].array())
                .matrix();
        if (k == N) {
          gx[k] += qp.CN.transpose() * t;
        } else {
          gx[k] += qp.stages[k].C.transpose() * t;
          gu[k] += qp.stages[k].D.transpose() * t;
        }
      }
    };
    auto recover_ineq_steps = [&](const std::vector<VecX>& rcomp) {
      for (int k = 0; k <= N; ++k) {
        const int m = (int)it.s[k].size();
        if (!m) {
          ds[k] = VecX();
          dlam[k] = VecX();
          continue;
        }
        VecX cz;
        if (k == N) {
          cz = qp.CN * ddx[N];
        } else {
          cz = qp.stages[k].C * ddx[k] + qp.stages[k].D * ddu[k];
        }
        ds[k] = cz + res.rin[k];
        dlam[k] = (-(rcomp[k].array() + it.lam[k].array() * ds[k].array()) /
                   it.s[k].array())
                      .matrix();
      }
    };

    std::vector<VecX> rcomp(N + 1);
    for (int k = 0; k <= N; ++k)
      rcomp[k] = (it.s[k].array() * it.lam[k].array()).matrix();

    double alpha_p = 1.0, alpha_d = 1.0;
    if (m_total) {
      // Affine (predictor) direction.
      fold_rhs(rcomp);
      ric.solve(qp, gx, gu, res.c, res.c0, ddx, ddu, dnu);
      recover_ineq_steps(rcomp);
      const double a_p = boundary_step(it.s, ds, 1.0);
      const double a_d = boundary_step(it.lam, dlam, 1.0);
      double mu_aff = 0;
      for (int k = 0; k <= N; ++k)
        if (it.s[k].size())
          mu_aff += (it.s[k] + a_p * ds[k]).dot(it.lam[k] + a_d * dlam[k]);
      mu_aff /= m_total;
      const double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
      // Corrector.
      for (int k = 0; k <= N; ++k)
        if (it.s[k].size())
          rcomp[k] = (it.s[k].array() * it.lam[k].array() +
                      ds[k].array() * dlam[k].array() - sigma * mu)
                         .matrix();
    }
    fold_rhs(rcomp);
    ric.solve(qp, gx, gu, res.c, res.c0, ddx, ddu, dnu);
    recover_ineq_steps(rcomp);
    if (m_total) {
      alpha_p = std::min(1.0, boundary_step(it.s, ds, 0.995));
      alpha_d = std::min(1.0, boundary_step(it.lam, dlam, 0.995));
    }
    for (int k = 0; k <= N; ++k) {
      it.dx[k] += alpha_p * ddx[k];
      if (k < N) it.du[k] += alpha_p * ddu[k];
      it.nu[k] += alpha_d * dnu[k];
      if (it.s[k].size()) {
        it.s[k] += alpha_p * ds[k];
        it.lam[k] += alpha_d * dlam[k];
      }
    }
  }

  if (!sol.converged) {
    const Residuals res = compute_residuals(qp, it);
    sol.kkt_residual = res.kkt();
    sol.iterations = settings_.max_iter;
    sol.converged = sol.kkt_residual <= settings_.tol;
  }
  sol.delta_x = it.dx;
  sol.delta_u = it.du;
  sol.eq_multipliers = it.nu;
  sol.ineq_multipliers = it.lam;
  return sol;
}

double kkt_residual(const QpSubproblem& qp, const QpSolution& sol) {
  const int N = qp.horizon();
  Iterate it;
  it.dx = sol.delta_x;
  it.du = sol.delta_u;
  it.nu = sol.eq_multipliers;
  it.lam = sol.ineq_multipliers;
  it.s.assign(N + 1, VecX());
  for (int k = 0; k <= N; ++k) {
    const VecX q = ineq_value(qp, it, k);
    it.s[k] = q.cwiseMax(0.0);
  }
  return compute_residuals(qp, it).kkt();
}

namespace {

void write_matrix(std::ostream& out, const std::string& tag, const MatX& m) {
  out << tag << ' ' << m.rows() << ' ' << m.cols() << '\n';
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out << m(i, j) << ' ';
    out << '\n';
  }
}

MatX read_matrix(std::istream& in, const std::string& expected_tag) {
  std::string tag;
  int rows, cols;
  if (!(in >> tag >> rows >> cols) || tag != expected_tag)
    throw InvalidSpec("QP dump: expected block " + expected_tag);
  MatX m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) in >> m(i, j);
  return m;
}

}  // namespace

std::string dump_qp(const QpSubproblem& qp) {
  std::ostringstream out;
  out << "qp-subproblem-v1 " << qp.horizon() << ' ' << qp.nxN << '\n';
  write_matrix(out, "dx0", qp.dx0);
  for (int k = 0; k < qp.horizon(); ++k) {
    const QpStage& st = qp.stages[k];
    out << "stage " << k << ' ' << st.nx << ' ' << st.nu << ' '
        << st.num_ineq() << '\n';
    write_matrix(out, "H", st.H);
    write_matrix(out, "g", st.g);
    write_matrix(out, "A", st.A);
    write_matrix(out, "B", st.B);
    write_matrix(out, "r", st.r);
    write_matrix(out, "C", st.C);
    write_matrix(out, "D", st.D);
    write_matrix(out, "h", st.h);
  }
  write_matrix(out, "HN", qp.HN);
  write_matrix(out, "gN", qp.gN);
  write_matrix(out, "CN", qp.CN);
  write_matrix(out, "hN", qp.hN);
  return out.str();
}

QpSubproblem load_qp(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int N, nxN;
  if (!(in >> magic >> N >> nxN) || magic != "qp-subproblem-v1")
    throw InvalidSpec("not a QP dump");
  QpSubproblem qp;
  qp.nxN = nxN;
  qp.dx0 = read_matrix(in, "dx0");
  qp.stages.resize(N);
  for (int k = 0; k < N; ++k) {
    std::string tag;
    int idx;
    QpStage& st = qp.stages[k];
    int m;
    if (!(in >> tag >> idx >> st.nx >> st.nu >> m) || tag != "stage")
      throw InvalidSpec("QP dump: bad stage header");
    st.H = read_matrix(in, "H");
    st.g = read_matrix(in, "g");
    st.A = read_matrix(in, "A");
    st.B = read_matrix(in, "B");
    st.r = read_matrix(in, "r");
    st.C = read_matrix(in, "C");
    st.D = read_matrix(in, "D");
    st.h = read_matrix(in, "h");
  }
  qp.HN = read_matrix(in, "HN");
  qp.gN = read_matrix(in, "gN");
  qp.CN = read_matrix(in, "CN");
  qp.hN = read_matrix(in, "hN");
  return qp;
}

}  // namespace qmpc
