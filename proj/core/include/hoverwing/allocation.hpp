#pragma once

#include <array>

#include "hoverwing/frames.hpp"

namespace hoverwing {

/// Box-constrained weighted least-squares allocation problem:
///   min ||Wv^(1/2) (G du - dnu)||^2 + gamma ||Wu^(1/2) du/u_scale||^2
///   s.t. du_min <= du <= du_max
/// The zero increment must always be feasible (du_min <= 0 <= du_max).
/// The regularization acts on the increment as a fraction of the full
/// command range, so gamma stays negligible against every axis term no
/// matter how small the effectiveness entries are in raw command units.
struct AllocationProblem {
  Mat4 G = Mat4::Zero();
  Vec4 dnu = Vec4::Zero();
  Vec4 du_min = Vec4::Zero();
  Vec4 du_max = Vec4::Zero();
  Vec4 Wv = Vec4::Ones();    // axis priorities
  Vec4 Wu = Vec4::Ones();    // input preference weights
  double gamma = 1e-4;       // keeps the objective strictly convex
  double u_scale = 9600.0;   // full command range, regularization unit
};

/// Per-input saturation state in the solution.
enum class BoundState : int { kLower = -1, kFree = 0, kUpper = 1 };

struct AllocationSolution {
  Vec4 du = Vec4::Zero();
  std::array<BoundState, 4> active{BoundState::kFree, BoundState::kFree,
                                   BoundState::kFree, BoundState::kFree};
  int iterations = 0;
  bool converged = false;
  Vec4 achieved = Vec4::Zero();  // G * du
};

/// Active-set solver. Starts from du = 0 and pivots one bound per
/// iteration; on hitting the iteration cap the best iterate so far is
/// returned with converged = false so the control loop can proceed.
AllocationSolution wls_allocate(const AllocationProblem& p,
                                int max_iterations = 16);

/// Objective value of a candidate increment.
double allocation_objective(const AllocationProblem& p, const Vec4& du);

struct KktReport {
  bool ok = false;
  double stationarity = 0.0;  // largest |gradient| over free inputs
  double bound_violation = 0.0;
  double multiplier_violation = 0.0;  // worst wrong-signed active gradient
};

/// First-order optimality check of a solution against its problem.
KktReport check_kkt(const AllocationProblem& p, const AllocationSolution& sol,
                    double tol = 1e-8);

}  // namespace hoverwing
