#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fstress/base_functions.hpp"
#include "fstress/tensors.hpp"

namespace fstress {

// n points in p dimensions, stored as one flat vector in column-major order:
// coordinate axis s of point i (both 1-based) lives at flat position
// (s-1)*n + (i-1).  A 3-point, 2-dimensional configuration with rows
// (0,3), (1,4), (2,5) is therefore the vector (0, 1, 2, 3, 4, 5).
struct Configuration {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;

  Configuration() = default;
  Configuration(std::size_t n_points, std::size_t n_axes)
      : n(n_points), p(n_axes), x(n_points * n_axes, 0.0) {}
  Configuration(std::size_t n_points, std::size_t n_axes,
                std::vector<double> coords);

  std::size_t coords() const { return n * p; }
  double at(std::size_t point, std::size_t axis) const;
  double& at(std::size_t point, std::size_t axis);
  void validate() const;
};

// Flat 0-based position of (point i, axis s), both 1-based.
std::size_t coord_index(std::size_t point, std::size_t axis, std::size_t n);

// Lower-triangle pairs (i, j) with i > j, both 1-based, are linearized
// column by column: (2,1), (3,1), ..., (n,1), (3,2), ..., (n, n-1).
// Returns the 0-based position of a pair in that order.
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);
std::pair<std::size_t, std::size_t> pair_points(std::size_t k, std::size_t n);
inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Entry (i, j), 1-based flat coordinate indices, of the np x np matrix whose
// quadratic form gives the squared distance between points u and v.  The
// matrix is a direct sum over axes of (e_u - e_v)(e_u - e_v)', so every
// entry is 0, +1 or -1 and is produced on demand; the matrix itself is never
// stored.
int aseek(std::size_t n, std::size_t p, std::size_t u, std::size_t v,
          std::size_t i, std::size_t j);

// Squared Euclidean distance between points u and v (1-based).
double squared_distance(const Configuration& cfg, std::size_t u,
                        std::size_t v);

// Derivatives of f(squared distance between u and v) restricted to the 2p
// coordinates that actually move the pair: axis s of u at slot s-1, axis s
// of v at slot p+s-1, flat positions recorded in id.  Every other partial is
// identically zero.
struct PairBlock {
  std::vector<std::size_t> id;  // flat coordinate position of each slot
  DerivTensors t;               // tensors over the 2p slots
  double qdist = 0.0;           // squared distance
};

PairBlock fdist_pair_block(const Configuration& cfg, std::size_t u,
                           std::size_t v, const FSpec& spec, int max_order);

// Partial derivatives, up to max_order, of f(squared distance between u and
// v) with respect to the full np-coordinate vector, where f is the given
// base function raised to its power.  The block above is scattered into
// dense tensors; entries off the active coordinates stay exactly zero.
// Domain errors carry the offending pair.
DerivTensors fdist_pair_tensors(const Configuration& cfg, std::size_t u,
                                std::size_t v, const FSpec& spec,
                                int max_order = 4,
                                std::size_t dim_cap = kDefaultDimCap);

}  // namespace fstress
