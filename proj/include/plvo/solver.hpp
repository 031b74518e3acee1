#pragma once

#include <functional>
#include <vector>

#include "plvo/residuals.hpp"
#include "plvo/types.hpp"

namespace plvo {

struct SolverConfig {
  double lambda0 = 1e-4;
  double lambdaFactor = 10.0;
  int maxIters = 100;
  double costTol = 1e-8;   // relative cost decrease
  double stepTol = 1e-10;  // twist-step norm
  int minConstraints = 6;  // effective residual rows
};

enum class StopReason {
  CostTol,
  StepTol,
  MaxIters,
  InsufficientConstraints,
};

struct SolveReport {
  Twistd xiOpt = Twistd::Zero();
  Posed pose;
  double initialCost = 0.0;
  double finalCost = 0.0;
  int iterations = 0;  // accepted updates
  bool converged = false;
  StopReason reason = StopReason::MaxIters;
};

/// Re-evaluates all residual blocks at a candidate pose.
using BlockBuilder = std::function<std::vector<ResidualBlock>(const Posed&)>;

/// Sum of r^T W r over all blocks.
double totalCost(const std::vector<ResidualBlock>& blocks);

/// Normal equations of the current linearization: H = sum J^T W J,
/// g = sum J^T W r, accumulated in block order.
void normalEquations(const std::vector<ResidualBlock>& blocks, Mat66d* H,
                     Vec6d* g);

/// One damped step: solves (H + lambda diag(H)) delta = -g. Returns false
/// when the damped system is singular or produces non-finite values.
bool lmStep(const Mat66d& H, const Vec6d& g, double lambda, Vec6d* delta);

/// Levenberg-Marquardt minimization over the 6-dof twist with
/// left-multiplicative updates T <- exp(delta) T. The accepted-cost
/// sequence is strictly decreasing until termination.
SolveReport solve(const BlockBuilder& buildBlocks, const Twistd& xi0,
                  const SolverConfig& cfg);

}  // namespace plvo
