#include "fstress/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace fstress {

namespace {

double inf_norm(std::span<const double> v) {
  double norm = 0.0;
  for (double e : v) norm = std::max(norm, std::abs(e));
  return norm;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// In-place lower Cholesky factor; false when the matrix is not positive
// definite.
bool cholesky_factor(std::vector<double>& a, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double root = std::sqrt(d);
    a[j * m + j] = root;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = s / root;
    }
  }
  return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t m,
                                   std::span<const double> b) {
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * m + k] * y[k];
    y[i] = s / l[i * m + i];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= l[k * m + ii] * y[k];
    y[ii] = s / l[ii * m + ii];
  }
  return y;
}

// Matrix infinity norm (max absolute row sum) of a dense m x m matrix.
double matrix_inf_norm(const std::vector<double>& a, std::size_t m) {
  double norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += std::abs(a[i * m + j]);
    norm = std::max(norm, row);
  }
  return norm;
}

// Objective value for line-search probing: any step that leaves the domain
// (or overflows) scores +infinity so backtracking rejects it.
double guarded_stress(const Configuration& cfg, const DissimilarityData& data,
                      const FSpec& spec) {
  try {
    const double v = fstress_eval(cfg, data, spec, 0).stress;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const EvaluationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

FitResult fit(const Configuration& start, const DissimilarityData& data,
              const FSpec& spec, const FitOptions& options) {
  Configuration cfg = start;
  cfg.validate();
  if (data.n() != cfg.n) {
    throw DimensionMismatch("dissimilarity data covers " +
                            std::to_string(data.n()) +
                            " points, start configuration has " +
                            std::to_string(cfg.n));
  }

  // Jitter the start until it is feasible for the function's domain.
  {
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ull);
    double radius = 1e-3 * std::max(1.0, inf_norm(cfg.x));
    int attempt = 0;
    while (true) {
      try {
        fstress_eval(cfg, data, spec, 0);
        break;
      } catch (const DomainError& e) {
        if (++attempt > options.max_start_attempts) {
          throw DomainError(
              "no feasible start found after " +
              std::to_string(options.max_start_attempts) +
              " perturbation attempts; last failure: " + e.what());
        }
        std::uniform_real_distribution<double> u(-radius, radius);
        for (double& xi : cfg.x) xi += u(rng);
        radius *= 2.0;
      }
    }
  }

  const int order = options.method == FitMethod::Newton ? 2 : 1;
  const std::size_t m = cfg.coords();

  FitResult res;
  LossReport rep = fstress_eval(cfg, data, spec, order);
  double gnorm = inf_norm(rep.tensors.grad);
  if (!std::isfinite(rep.stress) || !std::isfinite(gnorm)) {
    throw NonFiniteError("objective or gradient non-finite at the start");
  }
  res.trace.push_back({0, rep.stress, gnorm, 0.0, '0'});

  int iter = 0;
  while (gnorm > options.tol && iter < options.max_iter) {
    ++iter;

    std::vector<double> s;
    char kind = 'G';
    if (options.method == FitMethod::Newton) {
      // Regularize until positive definite; the translation null space
      // guarantees plain Cholesky fails at exact stationary points.
      double lam =
          1e-8 * std::max(matrix_inf_norm(rep.tensors.hess, m), 1.0);
      std::vector<double> neg_g(m);
      for (std::size_t i = 0; i < m; ++i) neg_g[i] = -rep.tensors.grad[i];
      for (int tries = 0; tries < 96; ++tries) {
        std::vector<double> fac = rep.tensors.hess;
        for (std::size_t i = 0; i < m; ++i) fac[i * m + i] += lam;
        if (cholesky_factor(fac, m)) {
          s = cholesky_solve(fac, m, neg_g);
          kind = 'N';
          break;
        }
        lam *= 2.0;
      }
    }
    if (s.empty()) {
      s.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) s[i] = -rep.tensors.grad[i];
      kind = 'G';
    }
    double slope = dot(rep.tensors.grad, s);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < m; ++i) s[i] = -rep.tensors.grad[i];
      kind = 'G';
      slope = -dot(rep.tensors.grad, rep.tensors.grad);
      if (!(slope < 0.0)) break;
    }

    double t = 1.0;
    bool accepted = false;
    Configuration trial = cfg;
    for (int h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t i = 0; i < m; ++i) trial.x[i] = cfg.x[i] + t * s[i];
      const double val = guarded_stress(trial, data, spec);
      if (val <= rep.stress + options.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= options.backtrack;
    }
    if (!accepted) break;  // no acceptable step; report where we stand

    cfg = trial;
    rep = fstress_eval(cfg, data, spec, order);
    gnorm = inf_norm(rep.tensors.grad);
    if (!std::isfinite(rep.stress) || !std::isfinite(gnorm)) {
      throw NonFiniteError("objective or gradient non-finite at iteration " +
                           std::to_string(iter));
    }
    res.trace.push_back({iter, rep.stress, gnorm, t, kind});
  }

  if (options.center) {
    for (std::size_t axis = 1; axis <= cfg.p; ++axis) {
      double mean = 0.0;
      for (std::size_t i = 1; i <= cfg.n; ++i) mean += cfg.at(i, axis);
      mean /= static_cast<double>(cfg.n);
      for (std::size_t i = 1; i <= cfg.n; ++i) cfg.at(i, axis) -= mean;
    }
  }

  res.converged = gnorm <= options.tol;
  res.stress = rep.stress;
  res.gradient_norm = gnorm;
  res.configuration = std::move(cfg);
  return res;
}

FitResult fit(const DissimilarityData& data, const FSpec& spec, std::size_t p,
              const FitOptions& options) {
  return fit(random_configuration(data, spec, p, options.seed), data, spec,
             options);
}

Configuration random_configuration(const DissimilarityData& data,
                                   const FSpec& spec, std::size_t p,
                                   std::uint64_t seed) {
  if (p < 1) throw DimensionMismatch("need at least one axis");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Configuration cfg(data.n(), p);
  for (double& xi : cfg.x) xi = u(rng);

  // Pull the mean dissimilarity back through the inverse of base^power to a
  // target mean squared distance; skip the rescale when no usable inverse
  // exists.
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < data.pairs(); ++k) {
    if (data.weight(k) != 0.0) {
      sum += data.delta(k);
      ++cnt;
    }
  }
  if (cnt == 0 || spec.power == 0.0) return cfg;
  const double mean_delta = sum / static_cast<double>(cnt);

  double z;  // base-function value corresponding to the mean dissimilarity
  if (mean_delta > 0.0) {
    z = std::pow(mean_delta, 1.0 / spec.power);
  } else if (mean_delta == 0.0 && spec.power > 0.0) {
    z = 0.0;
  } else {
    return cfg;
  }

  double target = std::numeric_limits<double>::quiet_NaN();
  switch (spec.base) {
    case BaseFunction::Log:
      target = std::exp(z);
      break;
    case BaseFunction::Identity:
      target = z;
      break;
    case BaseFunction::Exp:
      if (z > 0.0) target = std::log(z);
      break;
    case BaseFunction::Bounded:
      if (z > 0.0 && z < 1.0) target = z / (1.0 - z);
      break;
    case BaseFunction::LogPlusOne:
      target = std::expm1(z);
      break;
  }
  if (!std::isfinite(target) || target <= 0.0) return cfg;

  double msd = 0.0;
  for (std::size_t k = 0; k < pair_count(cfg.n); ++k) {
    const auto [i, j] = pair_points(k, cfg.n);
    msd += squared_distance(cfg, i, j);
  }
  msd /= static_cast<double>(pair_count(cfg.n));
  if (!(msd > 0.0)) return cfg;

  const double scale = std::sqrt(target / msd);
  for (double& xi : cfg.x) xi *= scale;
  return cfg;
}

std::vector<TaylorRow> taylor_model(const Configuration& cfg,
                                    const DissimilarityData& data,
                                    const FSpec& spec,
                                    std::span<const double> direction,
                                    std::span<const double> radii) {
  if (direction.size() != cfg.coords()) {
    throw DimensionMismatch("direction has " +
                            std::to_string(direction.size()) +
                            " entries, configuration has " +
                            std::to_string(cfg.coords()) + " coordinates");
  }
  const LossReport rep = fstress_eval(cfg, data, spec, 4);
  const double c0 = rep.stress;
  const double c1 = rep.tensors.directional(1, direction);
  const double c2 = rep.tensors.directional(2, direction);
  const double c3 = rep.tensors.directional(3, direction);
  const double c4 = rep.tensors.directional(4, direction);

  std::vector<TaylorRow> table;
  table.reserve(radii.size());
  Configuration trial = cfg;
  for (double t : radii) {
    for (std::size_t i = 0; i < cfg.coords(); ++i) {
      trial.x[i] = cfg.x[i] + t * direction[i];
    }
    TaylorRow row;
    row.t = t;
    row.actual = fstress_eval(trial, data, spec, 0).stress;
    row.model2 = c0 + t * c1 + t * t / 2.0 * c2;
    row.model3 = row.model2 + t * t * t / 6.0 * c3;
    row.model4 = row.model3 + t * t * t * t / 24.0 * c4;
    table.push_back(row);
  }
  return table;
}

double log_log_slope(std::span<const double> t, std::span<const double> err) {
  if (t.size() != err.size()) {
    throw DimensionMismatch("slope fit needs matching abscissa and error lengths");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(err[i] > 0.0) || !std::isfinite(err[i])) continue;
    const double lx = std::log(t[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
  const double nd = static_cast<double>(cnt);
  const double denom = sxx - sx * sx / nd;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (sxy - sx * sy / nd) / denom;
}

}  // namespace fstress
