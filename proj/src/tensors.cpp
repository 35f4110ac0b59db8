#include "fstress/tensors.hpp"

#include <string>

namespace fstress {

void check_dim_cap(std::size_t m, int max_order, std::size_t dim_cap) {
  if (max_order >= 3 && m > dim_cap) {
    throw DimensionMismatch(
        "order-" + std::to_string(max_order) + " tensors over " +
        std::to_string(m) + " coordinates exceed the size cap of " +
        std::to_string(dim_cap) + "; raise the cap to allocate " +
        std::to_string(m) + "^" + std::to_string(max_order) + " entries");
  }
}

DerivTensors::DerivTensors(std::size_t m, int order) : dim(m), max_order(order) {
  if (order < 0 || order > 4) {
    throw IndexError("tensor order must be in [0, 4], got " +
                     std::to_string(order));
  }
  if (order >= 1) grad.assign(m, 0.0);
  if (order >= 2) hess.assign(m * m, 0.0);
  if (order >= 3) third.assign(m * m * m, 0.0);
  if (order >= 4) fourth.assign(m * m * m * m, 0.0);
}

const std::vector<double>& DerivTensors::order(int r) const {
  switch (r) {
    case 1:
      return grad;
    case 2:
      return hess;
    case 3:
      return third;
    case 4:
      return fourth;
    default:
      throw IndexError("tensor order must be in [1, 4], got " +
                       std::to_string(r));
  }
}

std::vector<double>& DerivTensors::order(int r) {
  return const_cast<std::vector<double>&>(
      static_cast<const DerivTensors&>(*this).order(r));
}

void DerivTensors::add_scaled(const DerivTensors& other, double c) {
  if (other.dim != dim) {
    throw DimensionMismatch("cannot accumulate tensors over " +
                         std::to_string(other.dim) + " coordinates into " +
                         std::to_string(dim));
  }
  value += c * other.value;
  const int r = std::min(max_order, other.max_order);
  auto axpy = [c](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  };
  if (r >= 1) axpy(grad, other.grad);
  if (r >= 2) axpy(hess, other.hess);
  if (r >= 3) axpy(third, other.third);
  if (r >= 4) axpy(fourth, other.fourth);
}

double DerivTensors::directional(int r, std::span<const double> dir) const {
  if (dir.size() != dim) {
    throw DimensionMismatch("direction has " + std::to_string(dir.size()) +
                         " entries, tensor has dimension " +
                         std::to_string(dim));
  }
  if (r == 0) return value;
  std::vector<double> cur(order(r));
  for (int k = r; k >= 1; --k) {
    cur = contract_last(cur, k, dim, dir);
  }
  return cur[0];
}

std::vector<double> contract_last(std::span<const double> tensor, int order,
                                  std::size_t m, std::span<const double> dir) {
  if (order < 1) throw IndexError("cannot contract an order-0 tensor");
  if (dir.size() != m) {
    throw DimensionMismatch("direction length does not match tensor dimension");
  }
  std::size_t rows = 1;
  for (int k = 1; k < order; ++k) rows *= m;
  if (tensor.size() != rows * m) {
    throw DimensionMismatch("tensor storage does not match its declared shape");
  }
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = tensor.data() + r * m;
    for (std::size_t j = 0; j < m; ++j) acc += row[j] * dir[j];
    out[r] = acc;
  }
  return out;
}

}  // namespace fstress
