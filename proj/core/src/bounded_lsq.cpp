#include "tiltsim/bounded_lsq.hpp"

#include <cmath>
#include <limits>

namespace tiltsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

BoundedLsqResult solve_bounded_lsq(const BoundedLsqProblem& p,
                                   const BoundedLsqOptions& opt) {
  const int n = static_cast<int>(p.A.cols());
  const int cap = opt.max_changes > 0 ? opt.max_changes : 10 * n;

  MatrixXd h = MatrixXd::Zero(n, n);
  h.selfadjointView<Eigen::Lower>().rankUpdate(p.A.transpose());
  h = MatrixXd(h.selfadjointView<Eigen::Lower>());
  h.diagonal().array() += opt.ridge;
  const VectorXd c = p.A.transpose() * p.b;

  BoundedLsqResult res;
  res.x = opt.x0.size() == n ? opt.x0 : VectorXd::Zero(n);
  res.x = res.x.cwiseMax(p.lb).cwiseMin(p.ub);
  res.active.assign(n, BoundState::Free);
  for (int i = 0; i < n; ++i) {
    if (res.x[i] <= p.lb[i]) res.active[i] = BoundState::AtLower;
    else if (res.x[i] >= p.ub[i]) res.active[i] = BoundState::AtUpper;
  }

  const double feas_tol = 1e-12;
  std::vector<int> free_idx;
  free_idx.reserve(n);

  while (true) {
    free_idx.clear();
    for (int i = 0; i < n; ++i) {
      if (res.active[i] == BoundState::Free) free_idx.push_back(i);
    }
    const int nf = static_cast<int>(free_idx.size());

    bool candidate_ok = true;
    if (nf > 0) {
      MatrixXd hff(nf, nf);
      VectorXd rhs(nf);
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        for (int bcol = 0; bcol < nf; ++bcol) hff(a, bcol) = h(i, free_idx[bcol]);
        double v = c[i];
        for (int j = 0; j < n; ++j) {
          if (res.active[j] != BoundState::Free) v -= h(i, j) * res.x[j];
        }
        rhs[a] = v;
      }
      const VectorXd xf = hff.ldlt().solve(rhs);
      if (!xf.allFinite()) {
        res.status = LsqStatus::NumericFail;
        break;
      }

      // Step toward the equality constrained optimum, stopping at the first
      // bound hit.
      double alpha = 1.0;
      int blocker = -1;
      BoundState blocker_side = BoundState::Free;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[a];
        const double xi = res.x[i], xt = xf[a];
        if (xt > p.ub[i] + feas_tol) {
          const double step = (p.ub[i] - xi) / (xt - xi);
          if (step < alpha) { alpha = step; blocker = i; blocker_side = BoundState::AtUpper; }
        } else if (xt < p.lb[i] - feas_tol) {
          const double step = (p.lb[i] - xi) / (xt - xi);
          if (step < alpha) { alpha = step; blocker = i; blocker_side = BoundState::AtLower; }
        }
      }
      if (blocker >= 0) {
        if (alpha < 0.0) alpha = 0.0;
        for (int a = 0; a < nf; ++a) {
          const int i = free_idx[a];
          res.x[i] += alpha * (xf[a] - res.x[i]);
        }
        res.x[blocker] = blocker_side == BoundState::AtUpper ? p.ub[blocker] : p.lb[blocker];
        res.active[blocker] = blocker_side;
        if (++res.iterations > cap) { res.status = LsqStatus::NumericFail; break; }
        candidate_ok = false;
      } else {
        for (int a = 0; a < nf; ++a) res.x[free_idx[a]] = xf[a];
      }
    }
    if (!candidate_ok) continue;

    // Multiplier check: release the worst bound whose gradient points inward.
    const VectorXd g = h.selfadjointView<Eigen::Lower>() * res.x - c;
    int worst = -1;
    double worst_viol = opt.kkt_tol;
    for (int i = 0; i < n; ++i) {
      if (p.ub[i] - p.lb[i] <= 1e-14) continue;  // pinned, nothing to release
      if (res.active[i] == BoundState::AtLower && -g[i] > worst_viol) {
        worst_viol = -g[i];
        worst = i;
      } else if (res.active[i] == BoundState::AtUpper && g[i] > worst_viol) {
        worst_viol = g[i];
        worst = i;
      }
    }
    if (worst < 0) break;  // KKT satisfied
    res.active[worst] = BoundState::Free;
    if (++res.iterations > cap) { res.status = LsqStatus::NumericFail; break; }
  }

  res.residual_norm = (p.A * res.x - p.b).norm();
  if (!res.x.allFinite()) res.status = LsqStatus::NumericFail;
  return res;
}

}  // namespace tiltsim
