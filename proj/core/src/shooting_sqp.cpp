#include "tiltsim/shooting_sqp.hpp"

#include <cmath>
#include <limits>

#include "tiltsim/bounded_lsq.hpp"

namespace tiltsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using VecFn = std::function<VectorXd(const VectorXd&)>;

// Central difference Jacobian, step scaled per component.
MatrixXd fd_jacobian(const VecFn& f, const VectorXd& z, int out_dim, double h0) {
  const int n = static_cast<int>(z.size());
  MatrixXd j(out_dim, n);
  VectorXd zp = z, zm = z;
  for (int i = 0; i < n; ++i) {
    const double h = h0 * std::max(1.0, std::abs(z[i]));
    zp[i] = z[i] + h;
    zm[i] = z[i] - h;
    j.col(i) = (f(zp) - f(zm)) / (2.0 * h);
    zp[i] = z[i];
    zm[i] = z[i];
  }
  return j;
}

struct PenaltySpec {
  std::vector<int> idx;       // state component
  std::vector<double> bound;  // bound value
  std::vector<double> sign;   // +1 upper, -1 lower
};

PenaltySpec build_penalty_spec(const NlpProblem& p) {
  PenaltySpec s;
  const double inf = std::numeric_limits<double>::infinity();
  if (p.x_ub.size() == p.state_dim) {
    for (int i = 0; i < p.state_dim; ++i) {
      if (p.x_ub[i] < inf) {
        s.idx.push_back(i);
        s.bound.push_back(p.x_ub[i]);
        s.sign.push_back(1.0);
      }
    }
  }
  if (p.x_lb.size() == p.state_dim) {
    for (int i = 0; i < p.state_dim; ++i) {
      if (p.x_lb[i] > -inf) {
        s.idx.push_back(i);
        s.bound.push_back(p.x_lb[i]);
        s.sign.push_back(-1.0);
      }
    }
  }
  return s;
}

double penalty_cost(const PenaltySpec& s, const VectorXd& x, double w) {
  double c = 0.0;
  for (size_t i = 0; i < s.idx.size(); ++i) {
    const double v = s.sign[i] * (x[s.idx[i]] - s.bound[i]);
    if (v > 0.0) c += w * v * v;
  }
  return c;
}

}  // namespace

NlpSolution solve_nlp(const NlpProblem& p, const NlpSolution* warm,
                      const SqpOptions& opt) {
  const int n = p.state_dim, m = p.input_dim, hN = p.horizon;
  const int nm = hN * m;

  NlpSolution sol;
  sol.states.resize(hN + 1);
  sol.inputs.resize(hN);

  VectorXd u0 = p.u_guess.size() == m ? p.u_guess : VectorXd::Zero(m);
  u0 = u0.cwiseMax(p.u_lb).cwiseMin(p.u_ub);
  if (warm && static_cast<int>(warm->inputs.size()) == hN &&
      static_cast<int>(warm->states.size()) == hN + 1) {
    // Receding horizon shift: drop the first stage, repeat the last.
    for (int k = 0; k < hN; ++k) {
      const int src = std::min(k + 1, hN - 1);
      sol.inputs[k] = warm->inputs[src].cwiseMax(p.u_lb).cwiseMin(p.u_ub);
    }
    sol.states[0] = p.x0;
    for (int k = 1; k < hN; ++k) sol.states[k] = warm->states[k + 1];
    sol.states[hN] = p.dynamics(hN - 1, sol.states[hN - 1], sol.inputs[hN - 1]);
  } else {
    sol.states[0] = p.x0;
    for (int k = 0; k < hN; ++k) {
      sol.inputs[k] = u0;
      sol.states[k + 1] = p.dynamics(k, sol.states[k], sol.inputs[k]);
    }
  }

  const PenaltySpec pen = build_penalty_spec(p);
  const int npen = static_cast<int>(pen.idx.size());
  const double sqw = std::sqrt(p.state_penalty);

  const bool has_terminal = static_cast<bool>(p.terminal_residual);

  // Stacked bounds on the input step.
  VectorXd dlb(nm), dub(nm);

  std::vector<MatrixXd> ak(hN), bk(hN);
  std::vector<VectorXd> defect(hN);
  MatrixXd sens = MatrixXd::Zero(n, nm);
  MatrixXd sens_next = MatrixXd::Zero(n, nm);

  auto merit = [&](const std::vector<VectorXd>& xs,
                   const std::vector<VectorXd>& us, double mu, double* cost_out,
                   double* defect_out) {
    double cost = 0.0, dsum = 0.0, dmax = 0.0;
    for (int k = 0; k < hN; ++k) {
      cost += p.stage_residual(k, xs[k], us[k]).squaredNorm();
      if (k > 0) cost += penalty_cost(pen, xs[k], p.state_penalty);
      const VectorXd d = p.dynamics(k, xs[k], us[k]) - xs[k + 1];
      dsum += d.lpNorm<1>();
      dmax = std::max(dmax, d.lpNorm<Eigen::Infinity>());
    }
    if (has_terminal) cost += p.terminal_residual(xs[hN]).squaredNorm();
    cost += penalty_cost(pen, xs[hN], p.state_penalty);
    if (cost_out) *cost_out = cost;
    if (defect_out) *defect_out = dmax;
    return cost + mu * dsum;
  };

  const double mu = 1e4;
  BoundedLsqOptions qp_opt;
  qp_opt.ridge = 1e-8;
  VectorXd prev_du;

  NlpStatus status = NlpStatus::MaxIterations;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    // Linearize dynamics and residuals around the current trajectory.
    std::vector<MatrixXd> cxs(hN), cus(hN);
    std::vector<VectorXd> res(hN);
    bool finite = true;
    for (int k = 0; k < hN; ++k) {
      const VectorXd& xk = sol.states[k];
      const VectorXd& uk = sol.inputs[k];
      ak[k] = fd_jacobian([&](const VectorXd& z) { return p.dynamics(k, z, uk); }, xk, n, opt.fd_step);
      bk[k] = fd_jacobian([&](const VectorXd& z) { return p.dynamics(k, xk, z); }, uk, n, opt.fd_step);
      res[k] = p.stage_residual(k, xk, uk);
      const int nr = static_cast<int>(res[k].size());
      cxs[k] = fd_jacobian([&](const VectorXd& z) { return p.stage_residual(k, z, uk); }, xk, nr, opt.fd_step);
      cus[k] = fd_jacobian([&](const VectorXd& z) { return p.stage_residual(k, xk, z); }, uk, nr, opt.fd_step);
      defect[k] = p.dynamics(k, xk, uk) - sol.states[k + 1];
      finite = finite && ak[k].allFinite() && bk[k].allFinite() && res[k].allFinite() &&
               cxs[k].allFinite() && cus[k].allFinite() && defect[k].allFinite();
    }
    VectorXd res_n;
    MatrixXd cx_n;
    if (has_terminal) {
      res_n = p.terminal_residual(sol.states[hN]);
      cx_n = fd_jacobian([&](const VectorXd& z) { return p.terminal_residual(z); },
                         sol.states[hN], static_cast<int>(res_n.size()), opt.fd_step);
      finite = finite && res_n.allFinite() && cx_n.allFinite();
    }
    if (!finite) { status = NlpStatus::NumericFail; break; }

    // Count rows: user residuals plus currently violated state penalties.
    int rows = 0;
    for (int k = 0; k < hN; ++k) rows += static_cast<int>(res[k].size());
    if (has_terminal) rows += static_cast<int>(res_n.size());
    std::vector<std::vector<int>> active_pen(hN + 1);
    for (int k = 1; k <= hN; ++k) {
      for (int i = 0; i < npen; ++i) {
        if (pen.sign[i] * (sol.states[k][pen.idx[i]] - pen.bound[i]) > 0.0) {
          active_pen[k].push_back(i);
        }
      }
      rows += static_cast<int>(active_pen[k].size());
    }

    MatrixXd jbig = MatrixXd::Zero(rows, nm);
    VectorXd rhs = VectorXd::Zero(rows);

    // Condense: sensitivities of each shooting state w.r.t. the stacked input
    // step, with the defect carry term t.
    sens.setZero();
    VectorXd t = VectorXd::Zero(n);
    int row = 0;
    for (int k = 0; k < hN; ++k) {
      const int nr = static_cast<int>(res[k].size());
      const int lead = k * m;
      if (lead > 0) {
        jbig.block(row, 0, nr, lead).noalias() = cxs[k] * sens.leftCols(lead);
      }
      jbig.block(row, lead, nr, m) = cus[k];
      rhs.segment(row, nr) = -(res[k] + cxs[k] * t);
      row += nr;
      if (k >= 1) {
        for (int i : active_pen[k]) {
          const double v = pen.sign[i] * (sol.states[k][pen.idx[i]] - pen.bound[i]);
          jbig.block(row, 0, 1, lead).noalias() =
              sqw * pen.sign[i] * sens.row(pen.idx[i]).head(lead);
          rhs[row] = -sqw * (v + pen.sign[i] * t[pen.idx[i]]);
          ++row;
        }
      }
      // Advance sensitivities to stage k + 1.
      sens_next.setZero();
      sens_next.leftCols(lead).noalias() = ak[k] * sens.leftCols(lead);
      sens_next.block(0, lead, n, m) = bk[k];
      sens.swap(sens_next);
      t = ak[k] * t + defect[k];
    }
    if (has_terminal) {
      const int nr = static_cast<int>(res_n.size());
      jbig.block(row, 0, nr, nm).noalias() = cx_n * sens;
      rhs.segment(row, nr) = -(res_n + cx_n * t);
      row += nr;
    }
    for (int i : active_pen[hN]) {
      const double v = pen.sign[i] * (sol.states[hN][pen.idx[i]] - pen.bound[i]);
      jbig.block(row, 0, 1, nm) = sqw * pen.sign[i] * sens.row(pen.idx[i]);
      rhs[row] = -sqw * (v + pen.sign[i] * t[pen.idx[i]]);
      ++row;
    }

    for (int k = 0; k < hN; ++k) {
      dlb.segment(k * m, m) = p.u_lb - sol.inputs[k];
      dub.segment(k * m, m) = p.u_ub - sol.inputs[k];
    }

    // Projected gradient at the current iterate plus defect size.
    const VectorXd grad = -(jbig.transpose() * rhs);
    double pg = 0.0;
    for (int i = 0; i < nm; ++i) {
      double g = grad[i];
      if (dlb[i] >= -1e-12 && g > 0.0) g = 0.0;  // at lower bound
      if (dub[i] <= 1e-12 && g < 0.0) g = 0.0;   // at upper bound
      pg = std::max(pg, std::abs(g));
    }
    double dmax = 0.0;
    for (int k = 0; k < hN; ++k) dmax = std::max(dmax, defect[k].lpNorm<Eigen::Infinity>());
    sol.kkt_residual = std::max(pg, dmax);
    if (sol.kkt_residual <= opt.kkt_tol) { status = NlpStatus::Converged; break; }

    BoundedLsqProblem qp{std::move(jbig), std::move(rhs), dlb, dub};
    qp_opt.x0 = prev_du;
    const BoundedLsqResult qsol = solve_bounded_lsq(qp, qp_opt);
    if (qsol.status == LsqStatus::NumericFail || !qsol.x.allFinite()) {
      status = NlpStatus::NumericFail;
      break;
    }
    prev_du = qsol.x;

    // Candidate update with a simple backtracking merit check.
    double phi0 = merit(sol.states, sol.inputs, mu, nullptr, nullptr);
    std::vector<VectorXd> xs_new(hN + 1), us_new(hN);
    bool accepted = false;
    for (double alpha : {1.0, 0.5, 0.25, 0.125}) {
      xs_new[0] = p.x0;
      // Linearized state update by forward substitution; scaling the input
      // step and the defect carry by alpha scales the whole update by alpha.
      VectorXd dx = VectorXd::Zero(n);
      for (int k = 0; k < hN; ++k) {
        us_new[k] = (sol.inputs[k] + alpha * qsol.x.segment(k * m, m))
                        .cwiseMax(p.u_lb)
                        .cwiseMin(p.u_ub);
        dx = ak[k] * dx + bk[k] * (alpha * qsol.x.segment(k * m, m)) + alpha * defect[k];
        xs_new[k + 1] = sol.states[k + 1] + dx;
      }
      const double phi = merit(xs_new, us_new, mu, nullptr, nullptr);
      if (phi <= phi0 || alpha == 0.125) {
        accepted = true;
        sol.states = xs_new;
        sol.inputs = us_new;
        break;
      }
    }
    if (!accepted) { status = NlpStatus::NumericFail; break; }

    bool ok = true;
    for (auto& x : sol.states) ok = ok && x.allFinite();
    for (auto& u : sol.inputs) ok = ok && u.allFinite();
    if (!ok) { status = NlpStatus::NumericFail; break; }
  }

  double cost = 0.0, dmax = 0.0;
  merit(sol.states, sol.inputs, 0.0, &cost, &dmax);
  sol.cost = cost;
  sol.max_defect = dmax;
  sol.iterations = iter;
  if (status == NlpStatus::MaxIterations && dmax > opt.infeasibility_tol) {
    status = NlpStatus::Infeasible;
  }
  sol.status = status;
  return sol;
}

}  // namespace tiltsim
