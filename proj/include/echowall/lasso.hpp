#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "echowall/dictionary.hpp"
#include "echowall/polar_grid.hpp"

namespace echowall {

struct LassoOptions {
  int max_iter = 2000;
  // KKT tolerance relative to ||Phi^T h||_inf.
  double kkt_tol_rel = 1e-6;
  int check_interval = 10;
  bool record_objective_trace = false;
  const Eigen::VectorXd* warm_start = nullptr;
};

struct SolveDiagnostics {
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double kkt_tol = 0.0;
  double mu = 0.0;                 // selected quadratic penalty weight
  double weighted_norm_sq = 0.0;   // ||L s||^2 at the returned solution
  bool constraint_satisfied = true;
  int outer_solves = 1;            // FISTA invocations (mu search included)
  std::vector<double> objective_trace;
};

struct LassoResult {
  Eigen::VectorXd s;
  SolveDiagnostics diagnostics;
};

// min_s  s^T G s - 2 c^T s + rhs_sq + lambda ||s||_1 + sum_i w2_i s_i^2
// via monotone FISTA; the quadratic extras (w2) are handled in the prox so
// the gradient step only touches the Gram. lipschitz bounds the gradient of
// the Gram part (2 * lambda_max(G)).
LassoResult solve_lasso_quadratic(const Eigen::MatrixXd& gram,
                                  const Eigen::VectorXd& corr, double rhs_sq,
                                  double lipschitz, double lambda,
                                  const Eigen::VectorXd* w2,
                                  const LassoOptions& opts);

// min_s ||Phi s - h||_2^2 + lambda ||s||_1
LassoResult solve_lasso(const Dictionary& dict, const Eigen::VectorXd& h,
                        double lambda, const LassoOptions& opts = {});

// min_s ||Phi s - h||_2^2 + lambda ||s||_1  s.t.  ||L s||_2^2 <= b,
// solved through the penalized surrogate + mu search (doubling ladder, then
// bisection in log space, smallest feasible mu kept, warm starts throughout).
// If the bound cannot be met within the mu budget the result is flagged and
// carries the achieved ||L s||^2.
LassoResult solve_lasso_with_prior(const Dictionary& dict,
                                   const Eigen::VectorXd& h, double lambda,
                                   const WeightVector& weight, double bound,
                                   const LassoOptions& opts = {});

// lambda = scale * 2 ||Phi^T h||_inf (the zero-solution threshold is
// 2 ||Phi^T h||_inf, so scale < 1 keeps at least one active coordinate).
double lambda_from_correlation(const Eigen::VectorXd& corr, double scale);

// Max KKT residual of the subgradient optimality conditions; used both for
// convergence and as a test oracle hook.
double lasso_kkt_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr,
                          const Eigen::VectorXd& s, double lambda,
                          const Eigen::VectorXd* w2 = nullptr);

// One JSON line per solve appended to the run log.
void append_solve_log(const std::string& path, const std::string& solve_id,
                      const SolveDiagnostics& diag);

}  // namespace echowall
