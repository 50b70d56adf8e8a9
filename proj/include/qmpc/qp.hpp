#pragma once

#include <string>
#include <vector>

#include "qmpc/types.hpp"

namespace qmpc {

// One stage of an OCP-structured QP over variables (dx_k, du_k):
//   cost        0.5 [dx;du]' H [dx;du] + g'[dx;du]
//   dynamics    dx_{k+1} = A dx_k + B du_k + r
//   inequality  C dx_k + D du_k + h >= 0
// Dimensions may vary per stage (nu = 0 or nx = 0 are allowed, which is how
// dense single-stage problems such as the WBC force projection reuse the
// solver).
struct QpStage {
  int nx = 0;
  int nu = 0;
  MatX H;  // (nx+nu) x (nx+nu), symmetric PSD
  VecX g;
  MatX A;  // nx_next x nx
  MatX B;  // nx_next x nu
  VecX r;
  MatX C;  // m x nx
  MatX D;  // m x nu
  VecX h;

  int num_ineq() const { return (int)h.size(); }
};

struct QpSubproblem {
  std::vector<QpStage> stages;  // k = 0 .. N-1
  int nxN = 0;
  MatX HN;  // terminal cost
  VecX gN;
  MatX CN;  // optional terminal state inequalities
  VecX hN;
  VecX dx0;  // initial condition dx_0 = dx0 (size stages[0].nx)

  int horizon() const { return (int)stages.size(); }
};

struct QpSolution {
  std::vector<VecX> delta_x;  // N+1
  std::vector<VecX> delta_u;  // N
  std::vector<VecX> eq_multipliers;    // N+1 (initial condition + dynamics)
  std::vector<VecX> ineq_multipliers;  // N+1 (terminal slot last)
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool regularized = false;

  double max_step_norm() const {
    double m = 0;
    for (const auto& d : delta_x)
      if (d.size()) m = std::max(m, d.lpNorm<Eigen::Infinity>());
    for (const auto& d : delta_u)
      if (d.size()) m = std::max(m, d.lpNorm<Eigen::Infinity>());
    return m;
  }
};

struct QpSolverSettings {
  double tol = 1e-6;  // max-norm KKT residual
  int max_iter = 50;
  double regularization = 1e-9;
};

class QpSolver {
 public:
  explicit QpSolver(QpSolverSettings settings = {}) : settings_(settings) {}

  // Structure-exploiting primal-dual interior point with a Riccati
  // factorization per iteration (Mehrotra predictor-corrector).
  // Throws InfeasibleQp on a primal infeasibility certificate; reaching the
  // iteration limit returns the best iterate with converged = false.
  QpSolution solve(const QpSubproblem& qp) const;

  // Warm-started variant: primal/dual iterate seeded from a previous
  // solution of a similarly sized problem.
  QpSolution solve(const QpSubproblem& qp, const QpSolution& warm) const;

  const QpSolverSettings& settings() const { return settings_; }

 private:
  QpSolverSettings settings_;
};

// Max-norm KKT residual (stationarity, equality, inequality violation,
// complementarity) of a candidate solution.
double kkt_residual(const QpSubproblem& qp, const QpSolution& sol);

// Plain-text round trip for offline debugging and oracle comparison.
std::string dump_qp(const QpSubproblem& qp);
QpSubproblem load_qp(const std::string& text);

}  // namespace qmpc
