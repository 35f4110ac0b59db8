#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fstress/loss.hpp"

namespace fstress {

// Numerical differentiation used to cross-check the analytic tensors.  The
// routines here treat whatever they differentiate as a black box and share
// no derivative formulas with the rest of the library; agreement between the
// two routes is evidence, not construction.

using ScalarField = std::function<double(std::span<const double>)>;
// Returns a flat dense tensor (fixed order) evaluated at the given point.
using TensorField =
    std::function<std::vector<double>(std::span<const double>)>;

// Relative-step central differencing.  The step for coordinate i is
// epsilon * max(1, |x_i|).  With richardson set, results are extrapolated
// from steps h and h/2 as (4*D(h/2) - D(h)) / 3, cancelling the leading
// O(h^2) truncation term of the central stencils.
struct StepPolicy {
  double epsilon = 1e-5;
  bool richardson = false;

  double step(double xi) const;
};

// First differences tolerate a small step; the default balances O(h^2)
// truncation against eps/h roundoff.
inline StepPolicy gradient_steps() { return {1e-5, false}; }
// Second differences divide by h^2, so roundoff grows as eps/h^2 and the
// optimum sits near eps_machine^(1/4).
inline StepPolicy hessian_steps() { return {2e-4, false}; }

// Central-difference gradient of a scalar field.  Throws EvaluationError,
// naming the probe point, when the field throws or returns a non-finite
// value.
std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x,
                                const StepPolicy& policy = gradient_steps());

// Central second-order stencil (diagonal: 3-point, off-diagonal: 4-point
// cross), symmetrized by averaging with its transpose.  Dense m x m result.
std::vector<double> fd_hessian(const ScalarField& f, std::span<const double> x,
                               const StepPolicy& policy = hessian_steps());

// max |a_i - b_i| / max(1, ||a||_inf, ||b||_inf): the deviation measure all
// checks report.  The 1 floors the scale so near-zero tensors are compared
// absolutely.
double relative_deviation(std::span<const double> a, std::span<const double> b);

// Compares the contraction of a dense order-r tensor with random unit
// directions d against a central difference of the order-(r-1) tensor field
// along the same d.  Returns the worst relative deviation over the probes.
// Deterministic for a given seed.
double directional_fd_deviation(const TensorField& lower_field,
                                std::span<const double> higher, int higher_order,
                                std::size_t m, std::span<const double> x,
                                std::uint64_t seed, int probes = 32,
                                const StepPolicy& policy = gradient_steps());

// Index-permutation invariance of the derivative tensors.  The Hessian must
// be exactly symmetric (bitwise, by construction); orders 3 and 4 are probed
// at random index tuples under all permutations of each tuple.
struct SymmetryReport {
  bool hessian_exact = true;
  double hessian_max_diff = 0.0;
  double order3_max_diff = 0.0;  // worst |t_perm - t| over sampled tuples
  double order3_norm = 0.0;      // max-norm of the order-3 tensor
  double order4_max_diff = 0.0;
  double order4_norm = 0.0;

  // worst deviation across orders, relative to each tensor's max-norm
  double worst_ratio() const;
};

SymmetryReport symmetry_report(const DerivTensors& t, std::uint64_t seed = 7,
                               int samples = 32);

// One pass/fail line of a verification run.
struct CheckLine {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_pass() const;
};

struct CheckOptions {
  int max_order = 2;
  std::uint64_t seed = 1;
  int probes = 32;
  StepPolicy gradient_policy = gradient_steps();
  StepPolicy hessian_policy = hessian_steps();
  double tol_gradient = 1e-6;
  double tol_hessian = 1e-6;
  double tol_order3 = 1e-5;
  double tol_order4 = 1e-5;
  double tol_symmetry = 1e-12;     // x tensor max-norm
  double tol_null_space = 1e-10;   // x tensor norm
  double tol_split = 1e-12;        // stress vs constant - rho + eta
};

// Runs every applicable check on one instance: gradient and Hessian against
// finite differences of the objective, order-3/4 tensors against directional
// differences of the next-lower analytic tensor, permutation symmetry, the
// translation null space (per-axis block sums of the gradient vanish and the
// Hessian annihilates block-constant directions), and the
// constant - rho + eta identity.
CheckReport check_instance(const Configuration& cfg,
                           const DissimilarityData& data, const FSpec& spec,
                           const CheckOptions& options = {});

}  // namespace fstress
