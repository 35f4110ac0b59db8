#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fstress/base_functions.hpp"
#include "fstress/tensors.hpp"

namespace fstress {

// Dense symmetric matrix.  Writes go through set(), which stores the same
// value at (i, j) and (j, i) so symmetry is exact by construction, never a
// property to be checked after the fact.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim) : dim_(dim), e_(dim * dim, 0.0) {}

  static SymmetricMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return e_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double v) {
    e_[i * dim_ + j] = v;
    e_[j * dim_ + i] = v;
  }
  void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }
  void scale(double c) {
    for (double& x : e_) x *= c;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> e_;
};

// The two ingredients every derivative of f(x'Ax) is built from.
struct QuadForm {
  std::vector<double> ax;  // A x
  double gx = 0.0;         // x'Ax
};

QuadForm quad_form_apply(const SymmetricMatrix& a, std::span<const double> x);

// Partial derivatives of f(x'Ax) up to max_order for an explicit symmetric
// matrix A, where f is a base function raised to a power.  Uses the chain
// rule for an outer univariate function composed with a quadratic form; the
// inner form has constant Hessian 2A, so inner derivatives above order two
// vanish and each outer order contributes a fixed set of pairings between
// copies of Ax and copies of A.
DerivTensors faa_di_bruno_general(std::span<const double> x,
                                  const SymmetricMatrix& a, const FSpec& spec,
                                  int max_order = 4,
                                  std::size_t dim_cap = kDefaultDimCap);

}  // namespace fstress
