#include "fstress/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fstress {

double StepPolicy::step(double xi) const {
  return epsilon * std::max(1.0, std::abs(xi));
}

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream out;
  out << "(";
  const std::size_t shown = std::min<std::size_t>(x.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out << ", ";
    out << x[i];
  }
  if (shown < x.size()) out << ", ...";
  out << ")";
  return out.str();
}

double probe(const ScalarField& f, std::span<const double> x) {
  double v;
  try {
    v = f(x);
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("objective failed at probe point ") +
                          format_point(x) + ": " + e.what());
  }
  if (!std::isfinite(v)) {
    throw EvaluationError("objective returned a non-finite value at probe point " +
                          format_point(x));
  }
  return v;
}

std::vector<double> probe_tensor(const TensorField& f,
                                 std::span<const double> x,
                                 std::size_t expected_size) {
  std::vector<double> v;
  try {
    v = f(x);
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("tensor field failed at probe point ") +
                          format_point(x) + ": " + e.what());
  }
  if (v.size() != expected_size) {
    throw DimensionMismatch("tensor field returned " + std::to_string(v.size()) +
                         " entries, expected " + std::to_string(expected_size));
  }
  for (double e : v) {
    if (!std::isfinite(e)) {
      throw EvaluationError(
          "tensor field returned a non-finite entry at probe point " +
          format_point(x));
    }
  }
  return v;
}

std::vector<double> fd_gradient_once(const ScalarField& f,
                                     std::span<const double> x, double eps) {
  std::vector<double> pt(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double h = eps * std::max(1.0, std::abs(xi));
    const double up = xi + h;
    const double dn = xi - h;
    pt[i] = up;
    const double fp = probe(f, pt);
    pt[i] = dn;
    const double fm = probe(f, pt);
    pt[i] = xi;
    g[i] = (fp - fm) / (up - dn);
  }
  return g;
}

std::vector<double> fd_hessian_once(const ScalarField& f,
                                    std::span<const double> x, double eps) {
  const std::size_t m = x.size();
  std::vector<double> pt(x.begin(), x.end());
  std::vector<double> hess(m * m, 0.0);
  const double f0 = probe(f, x);

  for (std::size_t i = 0; i < m; ++i) {
    const double xi = x[i];
    const double hi = eps * std::max(1.0, std::abs(xi));
    const double up = xi + hi;
    const double dn = xi - hi;
    pt[i] = up;
    const double fp = probe(f, pt);
    pt[i] = dn;
    const double fm = probe(f, pt);
    pt[i] = xi;
    const double h = 0.5 * (up - dn);
    hess[i * m + i] = (fp - 2.0 * f0 + fm) / (h * h);
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double xi = x[i], xj = x[j];
      const double hi = eps * std::max(1.0, std::abs(xi));
      const double hj = eps * std::max(1.0, std::abs(xj));
      const double iu = xi + hi, id = xi - hi;
      const double ju = xj + hj, jd = xj - hj;
      pt[i] = iu; pt[j] = ju;
      const double fpp = probe(f, pt);
      pt[j] = jd;
      const double fpm = probe(f, pt);
      pt[i] = id; pt[j] = ju;
      const double fmp = probe(f, pt);
      pt[j] = jd;
      const double fmm = probe(f, pt);
      pt[i] = xi; pt[j] = xj;
      const double v = ((fpp - fpm) - (fmp - fmm)) / ((iu - id) * (ju - jd));
      hess[i * m + j] = v;
      hess[j * m + i] = v;
    }
  }

  // symmetrize by averaging (a no-op for the mirrored fill above, kept so the
  // contract holds even if the fill strategy changes)
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double avg = 0.5 * (hess[i * m + j] + hess[j * m + i]);
      hess[i * m + j] = avg;
      hess[j * m + i] = avg;
    }
  }
  return hess;
}

std::vector<double> richardson_combine(const std::vector<double>& coarse,
                                       const std::vector<double>& fine) {
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  }
  return out;
}

std::vector<double> random_unit_direction(std::size_t m,
                                          std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> d(m);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& e : d) {
      e = nd(rng);
      norm += e * e;
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-12);
  for (double& e : d) e /= norm;
  return d;
}

}  // namespace

std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x,
                                const StepPolicy& policy) {
  if (!policy.richardson) return fd_gradient_once(f, x, policy.epsilon);
  return richardson_combine(fd_gradient_once(f, x, policy.epsilon),
                            fd_gradient_once(f, x, 0.5 * policy.epsilon));
}

std::vector<double> fd_hessian(const ScalarField& f, std::span<const double> x,
                               const StepPolicy& policy) {
  if (!policy.richardson) return fd_hessian_once(f, x, policy.epsilon);
  return richardson_combine(fd_hessian_once(f, x, policy.epsilon),
                            fd_hessian_once(f, x, 0.5 * policy.epsilon));
}

double relative_deviation(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cannot compare tensors of sizes " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

double directional_fd_deviation(const TensorField& lower_field,
                                std::span<const double> higher,
                                int higher_order, std::size_t m,
                                std::span<const double> x, std::uint64_t seed,
                                int probes, const StepPolicy& policy) {
  if (higher_order < 1 || m == 0) {
    throw IndexError("directional check needs a tensor of order >= 1");
  }
  std::size_t lower_size = 1;
  for (int r = 1; r < higher_order; ++r) lower_size *= m;
  if (higher.size() != lower_size * m) {
    throw DimensionMismatch("tensor storage does not match its declared shape");
  }

  double xscale = 1.0;
  for (double xi : x) xscale = std::max(xscale, std::abs(xi));

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::vector<double> xp(x.size()), xm(x.size());
  for (int probe_i = 0; probe_i < probes; ++probe_i) {
    const std::vector<double> d = random_unit_direction(m, rng);
    const std::vector<double> expected =
        contract_last(higher, higher_order, m, d);

    auto central = [&](double h) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h * d[i];
        xm[i] = x[i] - h * d[i];
      }
      const std::vector<double> lp = probe_tensor(lower_field, xp, lower_size);
      const std::vector<double> lm = probe_tensor(lower_field, xm, lower_size);
      std::vector<double> fd(lower_size);
      for (std::size_t i = 0; i < lower_size; ++i) {
        fd[i] = (lp[i] - lm[i]) / (2.0 * h);
      }
      return fd;
    };

    const double h = policy.epsilon * xscale;
    std::vector<double> fd = central(h);
    if (policy.richardson) fd = richardson_combine(fd, central(0.5 * h));
    worst = std::max(worst, relative_deviation(expected, fd));
  }
  return worst;
}

double SymmetryReport::worst_ratio() const {
  auto ratio = [](double diff, double norm) {
    return diff / std::max(norm, 1.0);
  };
  return std::max({ratio(hessian_max_diff, 1.0),
                   order3_norm > 0.0 ? order3_max_diff / order3_norm
                                     : order3_max_diff,
                   order4_norm > 0.0 ? order4_max_diff / order4_norm
                                     : order4_max_diff});
}

SymmetryReport symmetry_report(const DerivTensors& t, std::uint64_t seed,
                               int samples) {
  SymmetryReport rep;
  const std::size_t m = t.dim;
  if (m == 0) return rep;
  std::mt19937_64 rng(seed);

  if (t.max_order >= 2) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double diff = std::abs(t.h2(i, j) - t.h2(j, i));
        if (diff != 0.0) rep.hessian_exact = false;
        rep.hessian_max_diff = std::max(rep.hessian_max_diff, diff);
      }
    }
  }

  std::uniform_int_distribution<std::size_t> pick(0, m - 1);

  if (t.max_order >= 3) {
    for (double e : t.third) rep.order3_norm = std::max(rep.order3_norm, std::abs(e));
    for (int s = 0; s < samples; ++s) {
      std::size_t idx[3] = {pick(rng), pick(rng), pick(rng)};
      const double base = t.h3(idx[0], idx[1], idx[2]);
      std::size_t perm[3] = {0, 1, 2};
      std::sort(perm, perm + 3);
      do {
        const double v = t.h3(idx[perm[0]], idx[perm[1]], idx[perm[2]]);
        rep.order3_max_diff = std::max(rep.order3_max_diff, std::abs(v - base));
      } while (std::next_permutation(perm, perm + 3));
    }
  }

  if (t.max_order >= 4) {
    for (double e : t.fourth) rep.order4_norm = std::max(rep.order4_norm, std::abs(e));
    for (int s = 0; s < samples; ++s) {
      std::size_t idx[4] = {pick(rng), pick(rng), pick(rng), pick(rng)};
      const double base = t.h4(idx[0], idx[1], idx[2], idx[3]);
      std::size_t perm[4] = {0, 1, 2, 3};
      do {
        const double v = t.h4(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]);
        rep.order4_max_diff = std::max(rep.order4_max_diff, std::abs(v - base));
      } while (std::next_permutation(perm, perm + 4));
    }
  }
  return rep;
}

bool CheckReport::all_pass() const {
  for (const CheckLine& line : lines) {
    if (!line.pass) return false;
  }
  return true;
}

CheckReport check_instance(const Configuration& cfg,
                           const DissimilarityData& data, const FSpec& spec,
                           const CheckOptions& options) {
  const LossReport rep = fstress_eval(cfg, data, spec, options.max_order);
  const std::size_t m = cfg.coords();
  CheckReport out;
  auto add = [&out](const std::string& name, double dev, double tol) {
    out.lines.push_back({name, dev, tol, dev <= tol});
  };

  const ScalarField objective = [&](std::span<const double> pt) {
    Configuration c(cfg.n, cfg.p, std::vector<double>(pt.begin(), pt.end()));
    return fstress_eval(c, data, spec, 0).stress;
  };

  {
    const double split = rep.constant - rep.rho + rep.eta;
    const double dev =
        std::abs(rep.stress - split) / std::max(1.0, std::abs(rep.stress));
    add("stress_split_identity", dev, options.tol_split);
  }

  if (options.max_order >= 1) {
    const std::vector<double> fd =
        fd_gradient(objective, cfg.x, options.gradient_policy);
    add("gradient_vs_fd", relative_deviation(rep.tensors.grad, fd),
        options.tol_gradient);

    double grad_scale = 1.0, worst_sum = 0.0;
    for (double g : rep.tensors.grad) grad_scale = std::max(grad_scale, std::abs(g));
    for (std::size_t s = 0; s < cfg.p; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < cfg.n; ++i) sum += rep.tensors.grad[s * cfg.n + i];
      worst_sum = std::max(worst_sum, std::abs(sum));
    }
    add("gradient_translation_null", worst_sum / grad_scale,
        options.tol_null_space);
  }

  if (options.max_order >= 2) {
    const std::vector<double> fd =
        fd_hessian(objective, cfg.x, options.hessian_policy);
    add("hessian_vs_fd", relative_deviation(rep.tensors.hess, fd),
        options.tol_hessian);

    const SymmetryReport sym =
        symmetry_report(rep.tensors, options.seed, options.probes);
    out.lines.push_back({"hessian_symmetry", sym.hessian_max_diff, 0.0,
                         sym.hessian_exact});
    if (options.max_order >= 3) {
      const double ratio = sym.order3_norm > 0.0
                               ? sym.order3_max_diff / sym.order3_norm
                               : sym.order3_max_diff;
      add("order3_symmetry", ratio, options.tol_symmetry);
    }
    if (options.max_order >= 4) {
      const double ratio = sym.order4_norm > 0.0
                               ? sym.order4_max_diff / sym.order4_norm
                               : sym.order4_max_diff;
      add("order4_symmetry", ratio, options.tol_symmetry);
    }

    double hess_scale = 1.0, worst = 0.0;
    for (double h : rep.tensors.hess) hess_scale = std::max(hess_scale, std::abs(h));
    for (std::size_t s = 0; s < cfg.p; ++s) {
      // block-constant direction: ones on axis s, zeros elsewhere
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < cfg.n; ++k) {
          acc += rep.tensors.h2(i, s * cfg.n + k);
        }
        worst = std::max(worst, std::abs(acc));
      }
    }
    add("hessian_translation_null", worst / hess_scale,
        options.tol_null_space);
  }

  if (options.max_order >= 3) {
    const TensorField hess_field = [&](std::span<const double> pt) {
      Configuration c(cfg.n, cfg.p, std::vector<double>(pt.begin(), pt.end()));
      return fstress_eval(c, data, spec, 2).tensors.hess;
    };
    add("order3_vs_directional_fd",
        directional_fd_deviation(hess_field, rep.tensors.third, 3, m, cfg.x,
                                 options.seed + 1, options.probes,
                                 options.gradient_policy),
        options.tol_order3);
  }

  if (options.max_order >= 4) {
    const TensorField third_field = [&](std::span<const double> pt) {
      Configuration c(cfg.n, cfg.p, std::vector<double>(pt.begin(), pt.end()));
      return fstress_eval(c, data, spec, 3).tensors.third;
    };
    add("order4_vs_directional_fd",
        directional_fd_deviation(third_field, rep.tensors.fourth, 4, m, cfg.x,
                                 options.seed + 2, options.probes,
                                 options.gradient_policy),
        options.tol_order4);
  }

  return out;
}

}  // namespace fstress
