#include "echowall/lasso.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace echowall {

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Objective value F(s) for the penalized problem.
double objective_value(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr,
                       double rhs_sq, double lambda, const Eigen::VectorXd* w2,
                       const Eigen::VectorXd& s, Eigen::VectorXd& gram_s) {
  gram_s.noalias() = gram * s;
  double f = s.dot(gram_s) - 2.0 * corr.dot(s) + rhs_sq + lambda * s.lpNorm<1>();
  if (w2) f += w2->cwiseProduct(s.cwiseAbs2()).sum();
  return f;
}

}  // namespace

double lasso_kkt_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr,
                          const Eigen::VectorXd& s, double lambda,
                          const Eigen::VectorXd* w2) {
  Eigen::VectorXd g = gram * s - corr;  // half the smooth gradient
  if (w2) g += w2->cwiseProduct(s);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    double r;
    if (s[i] == 0.0) {
      r = std::max(0.0, std::fabs(g[i]) - lambda / 2.0);
    } else {
      r = std::fabs(g[i] + (lambda / 2.0) * (s[i] > 0.0 ? 1.0 : -1.0));
    }
    worst = std::max(worst, r);
  }
  return worst;
}

LassoResult solve_lasso_quadratic(const Eigen::MatrixXd& gram,
                                  const Eigen::VectorXd& corr, double rhs_sq,
                                  double lipschitz, double lambda,
                                  const Eigen::VectorXd* w2,
                                  const LassoOptions& opts) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const Eigen::Index n = corr.size();
  if (gram.rows() != n || gram.cols() != n)
    throw std::invalid_argument("gram/correlation dimension mismatch");

  const double step = 1.0 / std::max(lipschitz, 1e-300);
  const double thresh = step * lambda;  // prox of (lambda/L)|.|_1 after 1/L step

  LassoResult res;
  res.diagnostics.kkt_tol = opts.kkt_tol_rel * corr.cwiseAbs().maxCoeff();

  Eigen::VectorXd x = opts.warm_start ? *opts.warm_start : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd y = x;
  Eigen::VectorXd z(n), grad(n), gram_y(n), scratch(n);

  double fx = objective_value(gram, corr, rhs_sq, lambda, w2, x, scratch);
  double t = 1.0;
  if (opts.record_objective_trace) res.diagnostics.objective_trace.push_back(fx);

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    gram_y.noalias() = gram * y;
    grad = 2.0 * (gram_y - corr);

    // Forward-backward step; the diagonal quadratic term lives in the prox.
    z = y - step * grad;
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = soft_threshold(z[i], thresh);
      if (w2) v /= 1.0 + 2.0 * step * (*w2)[i];
      z[i] = v;
    }

    const double fz = objective_value(gram, corr, rhs_sq, lambda, w2, z, scratch);

    // Monotone FISTA: keep the best iterate, restart momentum toward it.
    x_prev.swap(x);
    double fx_new;
    if (fz <= fx) {
      x = z;
      fx_new = fz;
    } else {
      x = x_prev;
      fx_new = fx;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    fx = fx_new;
    if (opts.record_objective_trace) res.diagnostics.objective_trace.push_back(fx);

    if ((it + 1) % opts.check_interval == 0 || it + 1 == opts.max_iter) {
      const double kkt = lasso_kkt_residual(gram, corr, x, lambda, w2);
      if (kkt <= res.diagnostics.kkt_tol) {
        res.diagnostics.converged = true;
        res.diagnostics.kkt_residual = kkt;
        ++it;
        break;
      }
      res.diagnostics.kkt_residual = kkt;
    }
  }

  res.diagnostics.iterations = it;
  res.diagnostics.objective = fx;
  res.s = std::move(x);
  if (w2)
    res.diagnostics.weighted_norm_sq =
        w2->cwiseProduct(res.s.cwiseAbs2()).sum();
  return res;
}

LassoResult solve_lasso(const Dictionary& dict, const Eigen::VectorXd& h,
                        double lambda, const LassoOptions& opts) {
  if (h.size() != dict.rows())
    throw std::invalid_argument("stacked response length does not match dictionary");
  const Eigen::VectorXd corr = dict.matrix().transpose() * h;
  return solve_lasso_quadratic(dict.gram(), corr, h.squaredNorm(),
                               2.0 * dict.gram_spectral_norm(), lambda, nullptr,
                               opts);
}

LassoResult solve_lasso_with_prior(const Dictionary& dict,
                                   const Eigen::VectorXd& h, double lambda,
                                   const WeightVector& weight, double bound,
                                   const LassoOptions& opts) {
  if (weight.values.size() != dict.cols())
    throw std::invalid_argument("weight vector length does not match the grid");
  if (!(bound > 0.0)) throw std::invalid_argument("constraint bound must be > 0");

  const Eigen::VectorXd corr = dict.matrix().transpose() * h;
  const double rhs_sq = h.squaredNorm();
  const double lipschitz = 2.0 * dict.gram_spectral_norm();
  const Eigen::VectorXd l2 = weight.values.cwiseAbs2();

  auto weighted_sq = [&](const Eigen::VectorXd& s) {
    return l2.cwiseProduct(s.cwiseAbs2()).sum();
  };

  // Unconstrained first; often already feasible (mu = 0).
  LassoResult best = solve_lasso_quadratic(dict.gram(), corr, rhs_sq, lipschitz,
                                           lambda, nullptr, opts);
  int solves = 1;
  double g0 = weighted_sq(best.s);
  best.diagnostics.weighted_norm_sq = g0;
  if (!std::isfinite(bound) || g0 <= bound) {
    best.diagnostics.mu = 0.0;
    best.diagnostics.outer_solves = solves;
    best.diagnostics.constraint_satisfied = true;
    return best;
  }

  const double max_l2 = l2.maxCoeff();
  if (max_l2 <= 0.0) {
    // Degenerate all-zero weight: constraint can never bind.
    best.diagnostics.mu = 0.0;
    best.diagnostics.outer_solves = solves;
    return best;
  }

  LassoOptions inner = opts;
  Eigen::VectorXd warm = best.s;
  inner.warm_start = &warm;

  auto solve_at = [&](double mu) {
    Eigen::VectorXd w2 = mu * l2;
    LassoResult r = solve_lasso_quadratic(dict.gram(), corr, rhs_sq, lipschitz,
                                          lambda, &w2, inner);
    ++solves;
    r.diagnostics.weighted_norm_sq = l2.cwiseProduct(r.s.cwiseAbs2()).sum();
    return r;
  };

  // Doubling ladder until feasible. The start is scaled so the penalty is a
  // tiny fraction of the data-term curvature.
  double mu_lo = 0.0;
  double mu = lipschitz / max_l2 * 1e-4;
  LassoResult feasible;
  bool found = false;
  for (int k = 0; k < 64; ++k) {
    LassoResult r = solve_at(mu);
    warm = r.s;
    if (r.diagnostics.weighted_norm_sq <= bound) {
      feasible = std::move(r);
      feasible.diagnostics.mu = mu;
      found = true;
      break;
    }
    mu_lo = mu;
    mu *= 2.0;
  }

  if (!found) {
    // mu budget exhausted; report the closest attempt, flagged.
    LassoResult r = solve_at(mu);
    r.diagnostics.mu = mu;
    r.diagnostics.constraint_satisfied =
        r.diagnostics.weighted_norm_sq <= bound;
    r.diagnostics.outer_solves = solves;
    return r;
  }

  // Log-space bisection toward the smallest feasible mu.
  double mu_hi = feasible.diagnostics.mu;
  for (int k = 0; k < 30 && mu_hi > 1.05 * std::max(mu_lo, mu_hi * 1e-12); ++k) {
    const double mid = mu_lo > 0.0 ? std::sqrt(mu_lo * mu_hi) : mu_hi / 2.0;
    LassoResult r = solve_at(mid);
    warm = r.s;
    if (r.diagnostics.weighted_norm_sq <= bound) {
      feasible = std::move(r);
      feasible.diagnostics.mu = mid;
      mu_hi = mid;
    } else {
      mu_lo = mid;
    }
  }

  feasible.diagnostics.constraint_satisfied = true;
  feasible.diagnostics.outer_solves = solves;
  return feasible;
}

double lambda_from_correlation(const Eigen::VectorXd& corr, double scale) {
  return scale * 2.0 * corr.cwiseAbs().maxCoeff();
}

void append_solve_log(const std::string& path, const std::string& solve_id,
                      const SolveDiagnostics& diag) {
  std::FILE* f = std::fopen(path.c_str(), "a");
  if (!f) throw std::runtime_error("cannot open solve log " + path);
  std::fprintf(f,
               "{\"solve\":\"%s\",\"iterations\":%d,\"converged\":%s,"
               "\"objective\":%.12g,\"kkt_residual\":%.6g,\"kkt_tol\":%.6g,"
               "\"mu\":%.6g,\"weighted_norm_sq\":%.6g,\"constraint_satisfied\":%s,"
               "\"outer_solves\":%d}\n",
               solve_id.c_str(), diag.iterations, diag.converged ? "true" : "false",
               diag.objective, diag.kkt_residual, diag.kkt_tol, diag.mu,
               diag.weighted_norm_sq, diag.constraint_satisfied ? "true" : "false",
               diag.outer_solves);
  std::fclose(f);
}

}  // namespace echowall
