#pragma once

// Shared helpers for the test suite.  Everything here that produces a
// reference value (the high-order stencils, the explicit pair matrices, the
// direct stress implementations) is written from the definitions, not by
// calling the code under test, so agreement is evidence rather than
// tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "fstress/faa_di_bruno.hpp"
#include "fstress/loss.hpp"
#include "fstress/mds.hpp"

namespace testsup {

// ---------------------------------------------------------------------------
// Sixth-order central difference stencils for univariate derivatives 1..4.
// Single-level (no nesting), so roundoff stays at eps/h^order.
// ---------------------------------------------------------------------------

inline double stencil_derivative(const std::function<double(double)>& fn,
                                 double t, int order, double h) {
  struct Tap {
    int off;
    double c;
  };
  // Central coefficients of accuracy order six.
  static const std::vector<Tap> k1 = {{-3, -1.0 / 60}, {-2, 3.0 / 20},
                                      {-1, -3.0 / 4},  {1, 3.0 / 4},
                                      {2, -3.0 / 20},  {3, 1.0 / 60}};
  static const std::vector<Tap> k2 = {
      {-3, 1.0 / 90}, {-2, -3.0 / 20}, {-1, 3.0 / 2}, {0, -49.0 / 18},
      {1, 3.0 / 2},   {2, -3.0 / 20},  {3, 1.0 / 90}};
  static const std::vector<Tap> k3 = {
      {-4, -7.0 / 240}, {-3, 3.0 / 10},    {-2, -169.0 / 120},
      {-1, 61.0 / 30},  {1, -61.0 / 30},   {2, 169.0 / 120},
      {3, -3.0 / 10},   {4, 7.0 / 240}};
  static const std::vector<Tap> k4 = {
      {-4, 7.0 / 240},  {-3, -2.0 / 5},   {-2, 169.0 / 60},
      {-1, -122.0 / 15}, {0, 91.0 / 8},   {1, -122.0 / 15},
      {2, 169.0 / 60},  {3, -2.0 / 5},    {4, 7.0 / 240}};
  const std::vector<Tap>* taps = nullptr;
  switch (order) {
    case 1: taps = &k1; break;
    case 2: taps = &k2; break;
    case 3: taps = &k3; break;
    case 4: taps = &k4; break;
    default: throw std::logic_error("stencil order must be 1..4");
  }
  double acc = 0.0;
  for (const Tap& tap : *taps) acc += tap.c * fn(t + tap.off * h);
  return acc / std::pow(h, order);
}

// Step choice: proportional to t for the logarithm (its high derivatives
// blow up as t -> 0), otherwise pinned near 1/60 and capped so large
// arguments keep the truncation term small.
inline double stencil_step(fstress::BaseFunction base, double t) {
  double h = base == fstress::BaseFunction::Log ? t / 60.0
                                                : std::max(1.0, t) / 60.0;
  return std::min(h, 0.08);
}

// Step choice for differentiating f(t)^q.  The composite inherits extra
// singularities from the power: negative or fractional q blows up wherever
// f(t) crosses zero (t = 1 for the logarithm, t = 0 for the other bases
// with a root there), so the step must shrink with the distance to that
// point, not just with t.
inline double power_stencil_step(fstress::BaseFunction base, double q,
                                 double t) {
  using BF = fstress::BaseFunction;
  const bool rough = q < 0.0 || q != std::floor(q);
  if (base == BF::Log) return (rough ? (t - 1.0) : t) / 60.0;
  if (base == BF::Exp) return std::min(std::max(1.0, t) / 60.0, 0.08);
  return (rough ? t : std::min(std::max(1.0, t), 4.8)) / 60.0;
}

// |a - b| / max(1, |a|, |b|), the same floor-at-one deviation the library
// reports, reimplemented here so test metrics do not lean on library code.
inline double rel_dev(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_dev(std::span<const double> a,
                          std::span<const double> b) {
  double scale = 1.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (double v : b) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / scale;
}

// ---------------------------------------------------------------------------
// Explicit pair matrix, built from its definition as a direct sum over axes
// of (e_u - e_v)(e_u - e_v)'.
// ---------------------------------------------------------------------------

inline fstress::SymmetricMatrix brute_force_pair_matrix(std::size_t n,
                                                        std::size_t p,
                                                        std::size_t u,
                                                        std::size_t v) {
  const std::size_t m = n * p;
  fstress::SymmetricMatrix a(m);
  for (std::size_t s = 1; s <= p; ++s) {
    std::vector<double> e(m, 0.0);
    e[(s - 1) * n + (u - 1)] = 1.0;
    e[(s - 1) * n + (v - 1)] = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (e[i] == 0.0) continue;
      for (std::size_t j = i; j < m; ++j)
        if (e[j] != 0.0) a.set(i, j, e[i] * e[j]);
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Random instances with domain margins.
// ---------------------------------------------------------------------------

// Smallest squared distance the generator will allow, per function.  A
// fractional or non-positive power additionally requires the base value
// itself to stay away from zero, which for the logarithm means squared
// distances above one.
inline double min_qdist_margin(fstress::BaseFunction base, double q) {
  const bool fractional = q != std::floor(q);
  if (base == fstress::BaseFunction::Log)
    return (fractional || q <= 0.0) ? 1.35 : 0.45;
  if (base == fstress::BaseFunction::Exp) return 0.05;
  return 0.15;
}

inline double max_qdist_cap(fstress::BaseFunction base) {
  // exp grows fast and the loss squares it; keep arguments modest.
  return base == fstress::BaseFunction::Exp ? 3.0 : 60.0;
}

struct TestInstance {
  fstress::Configuration cfg;
  fstress::DissimilarityData data;
  fstress::FSpec spec;
};

inline fstress::Configuration random_margin_configuration(
    std::mt19937_64& rng, std::size_t n, std::size_t p,
    const fstress::FSpec& spec) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double lo = min_qdist_margin(spec.base, spec.power);
  const double hi = max_qdist_cap(spec.base);
  std::vector<double> x(n * p);
  for (int attempt = 0; attempt < 5000; ++attempt) {
    for (double& v : x) v = unit(rng);
    double minq = std::numeric_limits<double>::infinity();
    double maxq = 0.0;
    for (std::size_t i = 2; i <= n; ++i)
      for (std::size_t j = 1; j < i; ++j) {
        double q = 0.0;
        for (std::size_t s = 0; s < p; ++s) {
          const double d = x[s * n + (i - 1)] - x[s * n + (j - 1)];
          q += d * d;
        }
        minq = std::min(minq, q);
        maxq = std::max(maxq, q);
      }
    // Keep the pair distances comparable: rescaling a draw whose smallest
    // pair is far tighter than its widest one inflates the coordinates,
    // and large coordinates with small differences lose precision to
    // cancellation in every x'Ax evaluated downstream.  (Four collinear
    // equally spaced points already have maxq/minq = 9, so the bound must
    // sit above that.)
    if (minq <= 0.0 || maxq > 16.0 * minq) continue;
    const double scale2 = 1.1 * lo / minq;
    if (maxq * scale2 > hi) continue;  // spread too wide for this base
    const double scale = std::sqrt(scale2);
    for (double& v : x) v *= scale;
    // Recenter each axis: pair distances are unchanged and the coordinates
    // stay on the order of the configuration's diameter.
    for (std::size_t s = 0; s < p; ++s) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += x[s * n + i];
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) x[s * n + i] -= mean;
    }
    return fstress::Configuration(n, p, x);
  }
  throw std::logic_error("random_margin_configuration: no admissible draw");
}

// Dissimilarities near (but not at) the configuration's transformed
// distances, mixed weights, and optionally a few zero-weight pairs.
inline TestInstance random_instance(std::mt19937_64& rng, std::size_t n,
                                    std::size_t p, const fstress::FSpec& spec,
                                    double zero_weight_fraction = 0.15) {
  TestInstance ti{random_margin_configuration(rng, n, p, spec),
                  fstress::DissimilarityData(n), spec};
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> uw(0.6, 1.8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> w(fstress::pair_count(n)), d(fstress::pair_count(n));
  for (std::size_t k = 0; k < w.size(); ++k) {
    auto [i, j] = fstress::pair_points(k, n);
    const double fd =
        fstress::fdist_pair_block(ti.cfg, i, j, spec, 0).t.value;
    d[k] = fd * (1.0 + 0.35 * unit(rng)) + 0.05 * unit(rng);
    w[k] = (k > 0 && u01(rng) < zero_weight_fraction) ? 0.0 : uw(rng);
  }
  ti.data = fstress::DissimilarityData(n, std::move(w), std::move(d));
  return ti;
}

// ---------------------------------------------------------------------------
// Direct implementations of the classical stress variants.  Each works from
// the textbook formula with its own hand-derived gradient; none of them
// touches the library's derivative machinery.
// ---------------------------------------------------------------------------

struct DirectEval {
  double value = 0.0;
  std::vector<double> grad;
};

// 0.5 * sum w (delta - d^2)^2 over squared Euclidean distances.
inline DirectEval direct_sstress(const fstress::Configuration& cfg,
                                 const fstress::DissimilarityData& data) {
  DirectEval out;
  out.grad.assign(cfg.coords(), 0.0);
  for (std::size_t i = 2; i <= cfg.n; ++i)
    for (std::size_t j = 1; j < i; ++j) {
      const double w = data.weight_between(i, j);
      if (w == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        d2 += diff * diff;
      }
      const double r = data.delta_between(i, j) - d2;
      out.value += 0.5 * w * r * r;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        const double g = -2.0 * w * r * diff;
        out.grad[(s - 1) * cfg.n + (i - 1)] += g;
        out.grad[(s - 1) * cfg.n + (j - 1)] -= g;
      }
    }
  return out;
}

// 0.5 * sum w (delta - d)^2 over plain Euclidean distances.
inline DirectEval direct_raw_stress(const fstress::Configuration& cfg,
                                    const fstress::DissimilarityData& data) {
  DirectEval out;
  out.grad.assign(cfg.coords(), 0.0);
  for (std::size_t i = 2; i <= cfg.n; ++i)
    for (std::size_t j = 1; j < i; ++j) {
      const double w = data.weight_between(i, j);
      if (w == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        d2 += diff * diff;
      }
      const double dist = std::sqrt(d2);
      const double r = data.delta_between(i, j) - dist;
      out.value += 0.5 * w * r * r;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        const double g = -w * r * diff / dist;
        out.grad[(s - 1) * cfg.n + (i - 1)] += g;
        out.grad[(s - 1) * cfg.n + (j - 1)] -= g;
      }
    }
  return out;
}

// 0.5 * sum w (delta - ln d^2)^2.
inline DirectEval direct_lstress(const fstress::Configuration& cfg,
                                 const fstress::DissimilarityData& data) {
  DirectEval out;
  out.grad.assign(cfg.coords(), 0.0);
  for (std::size_t i = 2; i <= cfg.n; ++i)
    for (std::size_t j = 1; j < i; ++j) {
      const double w = data.weight_between(i, j);
      if (w == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        d2 += diff * diff;
      }
      const double r = data.delta_between(i, j) - std::log(d2);
      out.value += 0.5 * w * r * r;
      for (std::size_t s = 1; s <= cfg.p; ++s) {
        const double diff = cfg.at(i, s) - cfg.at(j, s);
        const double g = -2.0 * w * r * diff / d2;
        out.grad[(s - 1) * cfg.n + (i - 1)] += g;
        out.grad[(s - 1) * cfg.n + (j - 1)] -= g;
      }
    }
  return out;
}

}  // namespace testsup
