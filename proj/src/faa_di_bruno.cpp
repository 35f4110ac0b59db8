#include "fstress/faa_di_bruno.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace fstress {

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  SymmetricMatrix a(dim);
  for (std::size_t i = 0; i < dim; ++i) a.set(i, i, 1.0);
  return a;
}

QuadForm quad_form_apply(const SymmetricMatrix& a, std::span<const double> x) {
  const std::size_t m = a.dim();
  if (x.size() != m) {
    throw DimensionMismatch("vector of length " + std::to_string(x.size()) +
                         " applied to a " + std::to_string(m) + "x" +
                         std::to_string(m) + " matrix");
  }
  QuadForm q;
  q.ax.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += a(i, j) * x[j];
    q.ax[i] = acc;
    q.gx += x[i] * acc;
  }
  return q;
}

DerivTensors faa_di_bruno_general(std::span<const double> x,
                                  const SymmetricMatrix& a, const FSpec& spec,
                                  int max_order, std::size_t dim_cap) {
  const std::size_t m = a.dim();
  if (x.size() != m) {
    throw DimensionMismatch("configuration vector of length " +
                         std::to_string(x.size()) +
                         " does not match matrix dimension " +
                         std::to_string(m));
  }
  check_dim_cap(m, max_order, dim_cap);

  const QuadForm q = quad_form_apply(a, x);
  const ScalarDerivs g = power_derivs(spec, q.gx);
  const std::vector<double>& ax = q.ax;

  DerivTensors out(m, max_order);
  out.value = g.d0;
  if (max_order < 1) return out;

  for (std::size_t i = 0; i < m; ++i) {
    out.g1(i) = 2.0 * g.d1 * ax[i];
  }
  if (max_order < 2) return out;

  // Compute each entry once for the sorted index tuple and copy it to all
  // permutations: re-evaluating a permuted expression could differ in the
  // last ulp because floating-point products round differently when
  // reassociated, and callers rely on exact symmetry.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double val = 2.0 * g.d1 * a(i, j) + 4.0 * g.d2 * ax[i] * ax[j];
      out.h2(i, j) = val;
      out.h2(j, i) = val;
    }
  }
  if (max_order < 3) return out;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      for (std::size_t k = j; k < m; ++k) {
        const double val =
            4.0 * g.d2 *
                (ax[i] * a(j, k) + ax[j] * a(i, k) + ax[k] * a(i, j)) +
            8.0 * g.d3 * ax[i] * ax[j] * ax[k];
        std::array<std::size_t, 3> idx{i, j, k};
        do {
          out.h3(idx[0], idx[1], idx[2]) = val;
        } while (std::next_permutation(idx.begin(), idx.end()));
      }
    }
  }
  if (max_order < 4) return out;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      for (std::size_t k = j; k < m; ++k) {
        for (std::size_t l = k; l < m; ++l) {
          const double pair2 =
              a(i, j) * a(k, l) + a(i, k) * a(j, l) + a(i, l) * a(j, k);
          const double pair3 = a(i, j) * ax[k] * ax[l] +
                               a(i, k) * ax[j] * ax[l] +
                               a(i, l) * ax[j] * ax[k] +
                               a(j, k) * ax[i] * ax[l] +
                               a(j, l) * ax[i] * ax[k] +
                               a(k, l) * ax[i] * ax[j];
          const double val = 4.0 * g.d2 * pair2 + 8.0 * g.d3 * pair3 +
                             16.0 * g.d4 * ax[i] * ax[j] * ax[k] * ax[l];
          std::array<std::size_t, 4> idx{i, j, k, l};
          do {
            out.h4(idx[0], idx[1], idx[2], idx[3]) = val;
          } while (std::next_permutation(idx.begin(), idx.end()));
        }
      }
    }
  }
  return out;
}

}  // namespace fstress
