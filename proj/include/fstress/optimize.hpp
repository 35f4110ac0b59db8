#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fstress/loss.hpp"

namespace fstress {

enum class FitMethod { GradientDescent, Newton };

struct FitOptions {
  FitMethod method = FitMethod::Newton;
  double tol = 1e-8;   // stop when the gradient infinity norm drops below
  int max_iter = 500;  // iteration budget
  std::uint64_t seed = 0;

  // Armijo backtracking line search: accept x + t*s once
  // stress(x + t*s) <= stress(x) + armijo_c * t * <gradient, s>,
  // halving t at most max_halvings times.
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 60;

  // Jitter budget when the supplied or generated start violates the
  // function's domain.
  int max_start_attempts = 64;

  // Translate the fitted configuration so each axis has mean zero.  Off by
  // default: the loss only sees distances, so the solution is reported where
  // the search left it.
  bool center = false;
};

struct IterationRecord {
  int iteration = 0;
  double stress = 0.0;
  double gradient_norm = 0.0;  // infinity norm
  double step = 0.0;           // accepted line-search step length
  char kind = '0';             // '0' start, 'N' newton, 'G' gradient
};

struct FitResult {
  Configuration configuration;
  double stress = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::vector<IterationRecord> trace;  // stress is non-increasing
};

// Minimizes the loss from an explicit start.  Newton uses the analytic
// Hessian regularized to positive definiteness: lambda*I is added, with
// lambda doubled from 1e-8 * ||H||_inf until the Cholesky factorization
// succeeds (the Hessian is always singular along per-axis translations, so
// some regularization is always needed at flat points).  Steps that leave
// the function's domain score +infinity in the line search and are backed
// off, never stored.  Throws DomainError when no feasible start can be
// found, NonFiniteError if derivatives cease to be finite.
FitResult fit(const Configuration& start, const DissimilarityData& data,
              const FSpec& spec, const FitOptions& options = {});

// As above from a seeded random start (see random_configuration).
FitResult fit(const DissimilarityData& data, const FSpec& spec, std::size_t p,
              const FitOptions& options = {});

// Coordinates i.i.d. uniform in [-1, 1], then rescaled so the mean squared
// distance between points matches the weighted-pair mean dissimilarity
// pulled back through the inverse of base^power, whenever that inverse
// exists and lands in the domain; otherwise the raw draw is returned.
Configuration random_configuration(const DissimilarityData& data,
                                   const FSpec& spec, std::size_t p,
                                   std::uint64_t seed);

// Directional Taylor diagnostics: the loss along x + t*d against its
// second-, third- and fourth-order Taylor models built from the analytic
// tensors at x.
struct TaylorRow {
  double t = 0.0;
  double actual = 0.0;
  double model2 = 0.0;
  double model3 = 0.0;
  double model4 = 0.0;
};

std::vector<TaylorRow> taylor_model(const Configuration& cfg,
                                    const DissimilarityData& data,
                                    const FSpec& spec,
                                    std::span<const double> direction,
                                    std::span<const double> radii);

// Least-squares slope of log(err) against log(t); pairs with a non-positive
// or non-finite error are skipped.  NaN when fewer than two usable points
// remain.  An order-k Taylor model whose slope comes out near k+1 is
// converging at the expected rate.
double log_log_slope(std::span<const double> t, std::span<const double> err);

}  // namespace fstress
