#include "plvo/solver.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "plvo/lie.hpp"

namespace plvo {

double totalCost(const std::vector<ResidualBlock>& blocks) {
  double cost = 0.0;
  for (const ResidualBlock& b : blocks) {
    cost += b.r.dot(b.W * b.r);
  }
  return cost;
}

void normalEquations(const std::vector<ResidualBlock>& blocks, Mat66d* H,
                     Vec6d* g) {
  H->setZero();
  g->setZero();
  for (const ResidualBlock& b : blocks) {
    const Mat26d WJ = b.W * b.J;
    *H += b.J.transpose() * WJ;
    *g += b.J.transpose() * (b.W * b.r);
  }
}

bool lmStep(const Mat66d& H, const Vec6d& g, double lambda, Vec6d* delta) {
  Mat66d damped = H;
  damped.diagonal() += lambda * H.diagonal();
  const Eigen::LDLT<Mat66d> ldlt(damped);
  if (ldlt.info() != Eigen::Success) return false;
  *delta = ldlt.solve(-g);
  return delta->allFinite() &&
         (damped * *delta + g).norm() <= 1e-8 * std::max(1.0, g.norm());
}

SolveReport solve(const BlockBuilder& buildBlocks, const Twistd& xi0,
                  const SolverConfig& cfg) {
  SolveReport report;
  Posed T = se3Exp(xi0);
  std::vector<ResidualBlock> blocks = buildBlocks(T);

  if (2 * static_cast<int>(blocks.size()) < cfg.minConstraints) {
    report.xiOpt = xi0;
    report.pose = T;
    report.reason = StopReason::InsufficientConstraints;
    return report;
  }

  double cost = totalCost(blocks);
  report.initialCost = cost;
  double lambda = cfg.lambda0;

  auto finish = [&](bool converged, StopReason reason) {
    report.converged = converged;
    report.reason = reason;
    report.pose = T;
    report.xiOpt = se3Log(T);
    report.finalCost = cost;
    return report;
  };

  for (int outer = 0; outer < cfg.maxIters; ++outer) {
    Mat66d H;
    Vec6d g;
    normalEquations(blocks, &H, &g);

    int failures = 0;
    for (;;) {
      Vec6d delta;
      if (!lmStep(H, g, lambda, &delta)) {
        lambda *= cfg.lambdaFactor;
        if (++failures >= 10) return finish(false, StopReason::MaxIters);
        continue;
      }
      if (delta.norm() < cfg.stepTol) {
        return finish(true, StopReason::StepTol);
      }
      const Posed Tcand = se3Exp(delta) * T;
      std::vector<ResidualBlock> candBlocks = buildBlocks(Tcand);
      const double candCost = totalCost(candBlocks);
      if (std::isfinite(candCost) && candCost < cost) {
        const double relDecrease = (cost - candCost) / cost;
        T = Tcand;
        blocks = std::move(candBlocks);
        cost = candCost;
        lambda /= cfg.lambdaFactor;
        ++report.iterations;
        if (relDecrease < cfg.costTol) {
          return finish(true, StopReason::CostTol);
        }
        break;  // relinearize
      }
      lambda *= cfg.lambdaFactor;
      if (++failures >= 10) return finish(false, StopReason::MaxIters);
    }
  }
  return finish(false, StopReason::MaxIters);
}

}  // namespace plvo
