#include "fstress/mds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace fstress {

namespace {

void check_point(std::size_t point, std::size_t n, const char* role) {
  if (point < 1 || point > n) {
    throw IndexError(std::string(role) + " index " + std::to_string(point) +
                     " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace

Configuration::Configuration(std::size_t n_points, std::size_t n_axes,
                             std::vector<double> coords)
    : n(n_points), p(n_axes), x(std::move(coords)) {
  if (x.size() != n * p) {
    throw DimensionMismatch("coordinate vector has " + std::to_string(x.size()) +
                         " entries, expected n*p = " + std::to_string(n * p));
  }
}

double Configuration::at(std::size_t point, std::size_t axis) const {
  return x[coord_index(point, axis, n)];
}

double& Configuration::at(std::size_t point, std::size_t axis) {
  return x[coord_index(point, axis, n)];
}

void Configuration::validate() const {
  if (n < 1 || p < 1) {
    throw DimensionMismatch("configuration needs n >= 1 points and p >= 1 axes");
  }
  if (x.size() != n * p) {
    throw DimensionMismatch("coordinate vector has " + std::to_string(x.size()) +
                         " entries, expected n*p = " + std::to_string(n * p));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NonFiniteError("configuration contains a non-finite coordinate");
    }
  }
}

std::size_t coord_index(std::size_t point, std::size_t axis, std::size_t n) {
  check_point(point, n, "point");
  if (axis < 1) throw IndexError("axis index must be >= 1");
  return (axis - 1) * n + (point - 1);
}

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  if (!(j >= 1 && j < i && i <= n)) {
    throw IndexError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") is not a lower-triangle pair of " + std::to_string(n) +
                     " points");
  }
  return (j - 1) * n - j * (j - 1) / 2 + (i - j) - 1;
}

std::pair<std::size_t, std::size_t> pair_points(std::size_t k, std::size_t n) {
  if (k >= pair_count(n)) {
    throw IndexError("pair position " + std::to_string(k) + " outside the " +
                     std::to_string(pair_count(n)) + " pairs of " +
                     std::to_string(n) + " points");
  }
  std::size_t j = 1;
  while (k >= n - j) {
    k -= n - j;
    ++j;
  }
  return {j + 1 + k, j};
}

int aseek(std::size_t n, std::size_t p, std::size_t u, std::size_t v,
          std::size_t i, std::size_t j) {
  check_point(u, n, "point");
  check_point(v, n, "point");
  if (u == v) throw IndexError("pair matrix needs two distinct points");
  if (i < 1 || i > n * p || j < 1 || j > n * p) {
    throw IndexError("coordinate index outside [1, n*p]");
  }
  const std::size_t axis_i = (i - 1) / n, point_i = (i - 1) % n + 1;
  const std::size_t axis_j = (j - 1) / n, point_j = (j - 1) % n + 1;
  if (axis_i != axis_j) return 0;
  if ((point_i == u && point_j == u) || (point_i == v && point_j == v))
    return 1;
  if ((point_i == u && point_j == v) || (point_i == v && point_j == u))
    return -1;
  return 0;
}

double squared_distance(const Configuration& cfg, std::size_t u,
                        std::size_t v) {
  check_point(u, cfg.n, "point");
  check_point(v, cfg.n, "point");
  if (u == v) throw IndexError("squared distance needs two distinct points");
  double acc = 0.0;
  for (std::size_t s = 1; s <= cfg.p; ++s) {
    const double d = cfg.at(u, s) - cfg.at(v, s);
    acc += d * d;
  }
  return acc;
}

PairBlock fdist_pair_block(const Configuration& cfg, std::size_t u,
                           std::size_t v, const FSpec& spec, int max_order) {
  check_point(u, cfg.n, "point");
  check_point(v, cfg.n, "point");
  if (u == v) throw IndexError("pair tensors need two distinct points");

  const std::size_t p = cfg.p;
  const std::size_t w = 2 * p;
  PairBlock out;
  out.id.resize(w);
  std::vector<double> av(w);  // the pair matrix applied to x, active part
  for (std::size_t s = 1; s <= p; ++s) {
    const double d = cfg.at(u, s) - cfg.at(v, s);
    out.id[s - 1] = coord_index(u, s, cfg.n);
    out.id[p + s - 1] = coord_index(v, s, cfg.n);
    av[s - 1] = d;
    av[p + s - 1] = -d;
    out.qdist += d * d;
  }
  // Restriction of the pair matrix to the active slots: +1 on the diagonal,
  // -1 between the u-slot and v-slot of the same axis, 0 across axes.
  auto blk = [p](std::size_t r, std::size_t t) -> double {
    if (r % p != t % p) return 0.0;
    return (r == t) ? 1.0 : -1.0;
  };

  ScalarDerivs g;
  try {
    g = power_derivs(spec, out.qdist);
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " [pair (" + std::to_string(u) +
                          ", " + std::to_string(v) + ")]",
                      u, v);
  }

  DerivTensors& t = out.t;
  t = DerivTensors(w, max_order);
  t.value = g.d0;
  if (max_order < 1) return out;

  for (std::size_t r = 0; r < w; ++r) {
    t.g1(r) = 2.0 * g.d1 * av[r];
  }
  if (max_order < 2) return out;

  // Each entry is computed once for the sorted slot tuple and copied to all
  // permutations, so the tensors are symmetric bit for bit: evaluating a
  // permuted expression instead could differ in the last ulp because
  // floating-point products round differently under reassociation.
  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t s = r; s < w; ++s) {
      const double val = 2.0 * g.d1 * blk(r, s) + 4.0 * g.d2 * av[r] * av[s];
      t.h2(r, s) = val;
      t.h2(s, r) = val;
    }
  }
  if (max_order < 3) return out;

  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t s = r; s < w; ++s) {
      for (std::size_t z = s; z < w; ++z) {
        const double val =
            4.0 * g.d2 *
                (av[r] * blk(s, z) + av[s] * blk(r, z) + av[z] * blk(r, s)) +
            8.0 * g.d3 * av[r] * av[s] * av[z];
        std::array<std::size_t, 3> idx{r, s, z};
        do {
          t.h3(idx[0], idx[1], idx[2]) = val;
        } while (std::next_permutation(idx.begin(), idx.end()));
      }
    }
  }
  if (max_order < 4) return out;

  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t s = r; s < w; ++s) {
      for (std::size_t z = s; z < w; ++z) {
        for (std::size_t y = z; y < w; ++y) {
          const double pair2 = blk(r, s) * blk(z, y) + blk(r, z) * blk(s, y) +
                               blk(r, y) * blk(s, z);
          const double pair3 =
              blk(r, s) * av[z] * av[y] + blk(r, z) * av[s] * av[y] +
              blk(r, y) * av[s] * av[z] + blk(s, z) * av[r] * av[y] +
              blk(s, y) * av[r] * av[z] + blk(z, y) * av[r] * av[s];
          const double val = 4.0 * g.d2 * pair2 + 8.0 * g.d3 * pair3 +
                             16.0 * g.d4 * av[r] * av[s] * av[z] * av[y];
          std::array<std::size_t, 4> idx{r, s, z, y};
          do {
            t.h4(idx[0], idx[1], idx[2], idx[3]) = val;
          } while (std::next_permutation(idx.begin(), idx.end()));
        }
      }
    }
  }
  return out;
}

DerivTensors fdist_pair_tensors(const Configuration& cfg, std::size_t u,
                                std::size_t v, const FSpec& spec,
                                int max_order, std::size_t dim_cap) {
  const std::size_t m = cfg.coords();
  check_dim_cap(m, max_order, dim_cap);
  const PairBlock b = fdist_pair_block(cfg, u, v, spec, max_order);
  const std::size_t w = b.id.size();

  DerivTensors out(m, max_order);
  out.value = b.t.value;
  if (max_order >= 1) {
    for (std::size_t r = 0; r < w; ++r) out.g1(b.id[r]) = b.t.g1(r);
  }
  if (max_order >= 2) {
    for (std::size_t r = 0; r < w; ++r)
      for (std::size_t s = 0; s < w; ++s)
        out.h2(b.id[r], b.id[s]) = b.t.h2(r, s);
  }
  if (max_order >= 3) {
    for (std::size_t r = 0; r < w; ++r)
      for (std::size_t s = 0; s < w; ++s)
        for (std::size_t z = 0; z < w; ++z)
          out.h3(b.id[r], b.id[s], b.id[z]) = b.t.h3(r, s, z);
  }
  if (max_order >= 4) {
    for (std::size_t r = 0; r < w; ++r)
      for (std::size_t s = 0; s < w; ++s)
        for (std::size_t z = 0; z < w; ++z)
          for (std::size_t y = 0; y < w; ++y)
            out.h4(b.id[r], b.id[s], b.id[z], b.id[y]) = b.t.h4(r, s, z, y);
  }
  return out;
}

}  // namespace fstress
