#pragma once

// Dense reference solver for OCP-structured QPs, used to cross-check the
// Riccati interior-point solver in the tests.

#include <optional>
#include <vector>

#include "qmpc/qp.hpp"

namespace qmpc_test {

using namespace qmpc;

// Dense form of an OCP-structured QP: variables z = (dx_0..dx_N, du_0..du_{N-1}),
// equalities Ez = e (initial condition + dynamics), inequalities Gz + h >= 0.
struct DenseQp {
  MatX H;
  VecX g;
  MatX E;
  VecX e;
  MatX G;
  VecX h;
};

inline DenseQp condense(const QpSubproblem& qp) {
  const int N = qp.horizon();
  std::vector<int> xoff(N + 1), uoff(N);
  int nz = 0;
  for (int k = 0; k < N; ++k) {
    xoff[k] = nz;
    nz += qp.stages[k].nx;
  }
  xoff[N] = nz;
  nz += qp.nxN;
  for (int k = 0; k < N; ++k) {
    uoff[k] = nz;
    nz += qp.stages[k].nu;
  }

  DenseQp d;
  d.H = MatX::Zero(nz, nz);
  d.g = VecX::Zero(nz);
  for (int k = 0; k < N; ++k) {
    const auto& s = qp.stages[k];
    const int n = s.nx + s.nu;
    MatX sel = MatX::Zero(n, nz);
    sel.block(0, xoff[k], s.nx, s.nx).setIdentity();
    sel.block(s.nx, uoff[k], s.nu, s.nu).setIdentity();
    d.H += sel.transpose() * s.H * sel;
    d.g += sel.transpose() * s.g;
  }
  if (qp.nxN) {
    d.H.block(xoff[N], xoff[N], qp.nxN, qp.nxN) += qp.HN;
    d.g.segment(xoff[N], qp.nxN) += qp.gN;
  }

  int ne = qp.stages[0].nx;
  for (int k = 0; k < N; ++k) ne += (int)qp.stages[k].r.size();
  d.E = MatX::Zero(ne, nz);
  d.e = VecX::Zero(ne);
  int row = 0;
  d.E.block(0, 0, qp.stages[0].nx, qp.stages[0].nx).setIdentity();
  d.e.segment(0, qp.stages[0].nx) = qp.dx0;
  row += qp.stages[0].nx;
  for (int k = 0; k < N; ++k) {
    const auto& s = qp.stages[k];
    const int nn = (int)s.r.size();
    d.E.block(row, xoff[k + 1], nn, nn) = -MatX::Identity(nn, nn);
    d.E.block(row, xoff[k], nn, s.nx) = s.A;
    if (s.nu) d.E.block(row, uoff[k], nn, s.nu) = s.B;
    d.e.segment(row, nn) = -s.r;
    row += nn;
  }

  int m = (int)qp.hN.size();
  for (int k = 0; k < N; ++k) m += qp.stages[k].num_ineq();
  d.G = MatX::Zero(m, nz);
  d.h = VecX::Zero(m);
  row = 0;
  for (int k = 0; k < N; ++k) {
    const auto& s = qp.stages[k];
    const int mk = s.num_ineq();
    if (!mk) continue;
    d.G.block(row, xoff[k], mk, s.nx) = s.C;
    if (s.nu) d.G.block(row, uoff[k], mk, s.nu) = s.D;
    d.h.segment(row, mk) = s.h;
    row += mk;
  }
  if (qp.hN.size()) {
    d.G.block(row, xoff[N], qp.hN.size(), qp.nxN) = qp.CN;
    d.h.tail(qp.hN.size()) = qp.hN;
  }
  return d;
}

// Brute-force active-set enumeration over the dense form (at most 12 rows).
// Returns the optimal primal vector, or nullopt when no active set gives a
// KKT point (infeasible or out of scope).
inline std::optional<VecX> active_set_oracle(const DenseQp& d) {
  const int m = (int)d.h.size();
  if (m > 12) return std::nullopt;
  std::optional<VecX> best;
  double best_obj = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) act.push_back(i);
    const int na = (int)act.size();
    const int nz = (int)d.g.size();
    const int ne = (int)d.e.size();
    MatX K = MatX::Zero(nz + ne + na, nz + ne + na);
    VecX rhs = VecX::Zero(nz + ne + na);
    K.topLeftCorner(nz, nz) = d.H;
    K.block(0, nz, nz, ne) = d.E.transpose();
    K.block(nz, 0, ne, nz) = d.E;
    rhs.head(nz) = -d.g;
    rhs.segment(nz, ne) = d.e;
    for (int i = 0; i < na; ++i) {
      K.block(0, nz + ne + i, nz, 1) = -d.G.row(act[i]).transpose();
      K.block(nz + ne + i, 0, 1, nz) = d.G.row(act[i]);
      rhs(nz + ne + i) = -d.h(act[i]);
    }
    Eigen::FullPivLU<MatX> lu(K);
    if (!lu.isInvertible()) continue;
    const VecX sol = lu.solve(rhs);
    const VecX z = sol.head(nz);
    const VecX mult = sol.tail(na);
    if (na && mult.minCoeff() < -1e-9) continue;
    if (m && ((d.G * z + d.h).minCoeff() < -1e-8)) continue;
    const double obj = 0.5 * z.dot(d.H * z) + d.g.dot(z);
    if (!best || obj < best_obj - 1e-12) {
      best = z;
      best_obj = obj;
    }
  }
  return best;
}

inline VecX stack_solution(const QpSubproblem& qp, const QpSolution& sol) {
  int nz = 0;
  for (const auto& s : qp.stages) nz += s.nx + s.nu;
  nz += qp.nxN;
  VecX z(nz);
  int off = 0;
  for (int k = 0; k < qp.horizon(); ++k) {
    z.segment(off, qp.stages[k].nx) = sol.delta_x[k];
    off += qp.stages[k].nx;
  }
  z.segment(off, qp.nxN) = sol.delta_x.back();
  off += qp.nxN;
  for (int k = 0; k < qp.horizon(); ++k) {
    if (qp.stages[k].nu) z.segment(off, qp.stages[k].nu) = sol.delta_u[k];
    off += qp.stages[k].nu;
  }
  return z;
}

}  // namespace qmpc_test
