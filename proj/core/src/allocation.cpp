#include "hoverwing/allocation.hpp"

#include <Eigen/QR>
#include <cmath>

namespace hoverwing {

namespace {
using Mat84 = Eigen::Matrix<double, 8, 4>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
}  // namespace

double allocation_objective(const AllocationProblem& p, const Vec4& du) {
  const Vec4 e = p.G * du - p.dnu;
  const double gs = p.gamma / (p.u_scale * p.u_scale);
  double j = 0.0;
  for (int i = 0; i < 4; ++i) {
    j += p.Wv(i) * e(i) * e(i) + gs * p.Wu(i) * du(i) * du(i);
  }
  return j;
}

AllocationSolution wls_allocate(const AllocationProblem& p,
                                int max_iterations) {
  // Stack the weighted output rows on top of the regularization rows so the
  // subproblems are plain least squares with guaranteed full column rank.
  Mat84 A = Mat84::Zero();
  Vec8 b = Vec8::Zero();
  for (int i = 0; i < 4; ++i) {
    const double wv = std::sqrt(p.Wv(i));
    A.row(i) = p.G.row(i) * wv;
    b(i) = wv * p.dnu(i);
    A(4 + i, i) = std::sqrt(p.gamma * p.Wu(i)) / p.u_scale;
  }

  AllocationSolution sol;
  Vec4 du = Vec4::Zero();  // zero increment is feasible by contract

  while (sol.iterations < max_iterations) {
    ++sol.iterations;

    int free_idx[4];
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (sol.active[i] == BoundState::kFree) free_idx[k++] = i;
    }

    // Least squares over the free columns, with pinned columns folded
    // into the right-hand side.
    Vec4 target = du;
    if (k > 0) {
      Vec8 r = b;
      Eigen::MatrixXd Af(8, k);
      for (int i = 0; i < 4; ++i) {
        if (sol.active[i] != BoundState::kFree) r -= A.col(i) * du(i);
      }
      for (int j = 0; j < k; ++j) Af.col(j) = A.col(free_idx[j]);
      const Eigen::VectorXd x = Af.colPivHouseholderQr().solve(r);
      for (int j = 0; j < k; ++j) target(free_idx[j]) = x(j);
    }

    // Step toward the subproblem optimum; the nearest violated bound
    // blocks the step and joins the working set (lowest index on ties).
    double alpha = 1.0;
    int blocker = -1;
    BoundState side = BoundState::kFree;
    for (int j = 0; j < k; ++j) {
      const int i = free_idx[j];
      const double step = target(i) - du(i);
      if (step > 0.0 && target(i) > p.du_max(i)) {
        const double a = (p.du_max(i) - du(i)) / step;
        if (a < alpha) {
          alpha = a;
          blocker = i;
          side = BoundState::kUpper;
        }
      } else if (step < 0.0 && target(i) < p.du_min(i)) {
        const double a = (p.du_min(i) - du(i)) / step;
        if (a < alpha) {
          alpha = a;
          blocker = i;
          side = BoundState::kLower;
        }
      }
    }

    if (blocker >= 0) {
      for (int j = 0; j < k; ++j) {
        const int i = free_idx[j];
        du(i) += alpha * (target(i) - du(i));
      }
      du(blocker) =
          side == BoundState::kUpper ? p.du_max(blocker) : p.du_min(blocker);
      sol.active[blocker] = side;
      continue;
    }

    du = target;

    // All free gradients are zero here. Bounds whose multiplier has the
    // wrong sign still lower the objective; release the worst one.
    const Vec4 grad = A.transpose() * (A * du - b);
    const double scale = 1.0 + grad.cwiseAbs().maxCoeff();
    int release = -1;
    double worst = -1e-10 * scale;
    for (int i = 0; i < 4; ++i) {
      double lambda;
      if (sol.active[i] == BoundState::kLower) {
        lambda = grad(i);
      } else if (sol.active[i] == BoundState::kUpper) {
        lambda = -grad(i);
      } else {
        continue;
      }
      if (lambda < worst) {
        worst = lambda;
        release = i;
      }
    }
    if (release < 0) {
      sol.converged = true;
      break;
    }
    sol.active[release] = BoundState::kFree;
  }

  sol.du = du;
  sol.achieved = p.G * du;
  return sol;
}

KktReport check_kkt(const AllocationProblem& p, const AllocationSolution& sol,
                    double tol) {
  KktReport rep;
  const Vec4 e = p.G * sol.du - p.dnu;
  const double gs = p.gamma / (p.u_scale * p.u_scale);
  const Vec4 grad =
      2.0 * (p.G.transpose() * (p.Wv.asDiagonal() * e) +
             gs * p.Wu.asDiagonal() * sol.du);
  const Vec4 grad0 = 2.0 * (p.G.transpose() * (p.Wv.asDiagonal() * p.dnu));
  const double scale = 1.0 + grad0.cwiseAbs().maxCoeff();

  for (int i = 0; i < 4; ++i) {
    const double over = sol.du(i) - p.du_max(i);
    const double under = p.du_min(i) - sol.du(i);
    const double bscale = 1.0 + std::max(std::abs(p.du_min(i)), std::abs(p.du_max(i)));
    rep.bound_violation =
        std::max(rep.bound_violation, std::max(over, under) / bscale);

    switch (sol.active[i]) {
      case BoundState::kFree:
        rep.stationarity = std::max(rep.stationarity, std::abs(grad(i)) / scale);
        break;
      case BoundState::kLower:
        rep.multiplier_violation =
            std::max(rep.multiplier_violation, -grad(i) / scale);
        break;
      case BoundState::kUpper:
        rep.multiplier_violation =
            std::max(rep.multiplier_violation, grad(i) / scale);
        break;
    }
  }
  rep.ok = rep.stationarity < tol && rep.bound_violation < tol &&
           rep.multiplier_violation < tol;
  return rep;
}

}  // namespace hoverwing
