#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fstress/errors.hpp"

namespace fstress {

// Largest coordinate count for which order-3 and order-4 tensors are
// allocated by default; m^4 doubles get big quickly.
inline constexpr std::size_t kDefaultDimCap = 64;

// Throws DimensionMismatch when dense storage for the requested order at
// dimension m would exceed the cap.  Orders 0-2 are never capped.
void check_dim_cap(std::size_t m, int max_order, std::size_t dim_cap);

// Value plus dense partial-derivative tensors of a scalar field over m
// coordinates.  Order-r entries are stored row-major, all indices 0-based:
// the Hessian entry (i, j) sits at i*m + j, the order-3 entry (i, j, k) at
// (i*m + j)*m + k, and so on.  Tensors above max_order stay empty.
struct DerivTensors {
  std::size_t dim = 0;
  int max_order = 0;
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;
  std::vector<double> third;
  std::vector<double> fourth;

  DerivTensors() = default;
  DerivTensors(std::size_t m, int order);

  double g1(std::size_t i) const { return grad[i]; }
  double& g1(std::size_t i) { return grad[i]; }
  double h2(std::size_t i, std::size_t j) const { return hess[i * dim + j]; }
  double& h2(std::size_t i, std::size_t j) { return hess[i * dim + j]; }
  double h3(std::size_t i, std::size_t j, std::size_t k) const {
    return third[(i * dim + j) * dim + k];
  }
  double& h3(std::size_t i, std::size_t j, std::size_t k) {
    return third[(i * dim + j) * dim + k];
  }
  double h4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return fourth[((i * dim + j) * dim + k) * dim + l];
  }
  double& h4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return fourth[((i * dim + j) * dim + k) * dim + l];
  }

  const std::vector<double>& order(int r) const;
  std::vector<double>& order(int r);

  // Adds c times another tensor set of the same shape.
  void add_scaled(const DerivTensors& other, double c);

  // Fully contracts the order-r tensor with r copies of a direction.
  double directional(int r, std::span<const double> dir) const;
};

// Contracts the last index of a dense row-major order-r tensor over dimension
// m with a direction, producing the dense order-(r-1) tensor.
std::vector<double> contract_last(std::span<const double> tensor, int order,
                                  std::size_t m, std::span<const double> dir);

}  // namespace fstress
