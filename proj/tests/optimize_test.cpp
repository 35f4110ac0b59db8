#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "fstress/optimize.hpp"
#include "fstress/verify.hpp"
#include "support.hpp"

using namespace fstress;

namespace {

// Dissimilarities that are exactly the transformed distances of a known
// configuration, so the global minimum value is zero.
DissimilarityData perfect_data(const Configuration& cfg, const FSpec& spec) {
  DissimilarityData data(cfg.n);
  for (std::size_t i = 2; i <= cfg.n; ++i)
    for (std::size_t j = 1; j < i; ++j) {
      const double fd = fdist_pair_block(cfg, i, j, spec, 0).t.value;
      data.set_pair(i, j, fd, 1.0);
    }
  return data;
}

bool non_increasing(const std::vector<IterationRecord>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k].stress > trace[k - 1].stress * (1.0 + 1e-12) + 1e-300)
      return false;
  return true;
}

}  // namespace

TEST_CASE("a perfect start is already converged") {
  std::mt19937_64 rng(3);
  const FSpec spec{BaseFunction::Identity, 1.0};
  const Configuration cfg = testsup::random_margin_configuration(rng, 4, 2, spec);
  const DissimilarityData data = perfect_data(cfg, spec);
  const FitResult res = fit(cfg, data, spec);
  CHECK(res.converged);
  CHECK(res.stress < 1e-20);
  CHECK(res.trace.size() == 1);
  CHECK(res.trace[0].kind == '0');
}

TEST_CASE("newton recovers a hidden configuration") {
  std::mt19937_64 rng(5);
  const FSpec spec{BaseFunction::Identity, 1.0};
  const Configuration hidden = testsup::random_margin_configuration(rng, 5, 2, spec);
  const DissimilarityData data = perfect_data(hidden, spec);

  // Random starts can land in local minima; one of a handful of seeds must
  // reach the global value zero.
  FitResult best;
  bool recovered = false;
  for (std::uint64_t seed = 1; seed <= 5 && !recovered; ++seed) {
    FitOptions options;
    options.seed = seed;
    best = fit(data, spec, 2, options);
    CHECK(non_increasing(best.trace));
    CHECK(best.trace.size() <= 501);
    recovered = best.converged && best.stress < 1e-10;
  }
  CHECK(recovered);

  // The gradient at the reported point passes the independent FD check.
  const ScalarField f = [&](std::span<const double> y) {
    Configuration c(5, 2, std::vector<double>(y.begin(), y.end()));
    return fstress_eval(c, data, spec, 0).stress;
  };
  const std::vector<double> fd = fd_gradient(f, best.configuration.x);
  const LossReport rep = fstress_eval(best.configuration, data, spec, 1);
  CHECK(relative_deviation(fd, rep.tensors.grad) < 1e-6);
}

TEST_CASE("gradient descent also makes monotone progress") {
  std::mt19937_64 rng(7);
  const auto ti = testsup::random_instance(rng, 4, 2, {BaseFunction::Bounded, 1.0}, 0.0);
  FitOptions options;
  options.method = FitMethod::GradientDescent;
  options.max_iter = 120;
  options.tol = 1e-6;
  const FitResult res = fit(ti.cfg, ti.data, ti.spec, options);
  CHECK(non_increasing(res.trace));
  CHECK(res.stress <= res.trace.front().stress);
  CHECK(res.gradient_norm < res.trace.front().gradient_norm + 1e-12);
}

TEST_CASE("fitting is equivariant under translation of the start") {
  std::mt19937_64 rng(11);
  const auto ti = testsup::random_instance(rng, 4, 2, {BaseFunction::Identity, 1.0}, 0.0);
  Configuration shifted = ti.cfg;
  for (std::size_t i = 1; i <= shifted.n; ++i) {
    shifted.at(i, 1) += 2.0;
    shifted.at(i, 2) -= 1.0;
  }
  FitOptions options;
  options.max_iter = 40;
  const FitResult a = fit(ti.cfg, ti.data, ti.spec, options);
  const FitResult b = fit(shifted, ti.data, ti.spec, options);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k)
    CHECK(testsup::rel_dev(a.trace[k].stress, b.trace[k].stress) < 1e-10);
  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK(testsup::rel_dev(b.configuration.at(i, 1),
                           a.configuration.at(i, 1) + 2.0) < 1e-8);
    CHECK(testsup::rel_dev(b.configuration.at(i, 2),
                           a.configuration.at(i, 2) - 1.0) < 1e-8);
  }
}

TEST_CASE("infeasible starts are jittered into the domain") {
  // Coincident points give log a zero squared distance at the start.
  Configuration cfg(3, 1, {1.0, 1.0, 2.0});
  DissimilarityData data(3);
  data.set_pair(2, 1, 0.1, 1.0);
  data.set_pair(3, 1, 0.2, 1.0);
  data.set_pair(3, 2, 0.1, 1.0);
  const FSpec spec{BaseFunction::Log, 1.0};
  FitOptions options;
  options.max_iter = 50;
  const FitResult res = fit(cfg, data, spec, options);
  CHECK(std::isfinite(res.stress));
  CHECK(non_increasing(res.trace));

  FitOptions no_attempts = options;
  no_attempts.max_start_attempts = 0;
  CHECK_THROWS_AS(fit(cfg, data, spec, no_attempts), DomainError);
}

TEST_CASE("random starts are scaled to the dissimilarities") {
  // Identity with power one: mean squared distance should track mean delta.
  DissimilarityData data(4);
  for (std::size_t i = 2; i <= 4; ++i)
    for (std::size_t j = 1; j < i; ++j) data.set_pair(i, j, 3.0, 1.0);
  const Configuration cfg =
      random_configuration(data, {BaseFunction::Identity, 1.0}, 2, 77);
  double msd = 0.0;
  for (std::size_t i = 2; i <= 4; ++i)
    for (std::size_t j = 1; j < i; ++j) msd += squared_distance(cfg, i, j);
  msd /= 6.0;
  CHECK(msd == doctest::Approx(3.0).epsilon(1e-10));

  // Log: mean squared distance should track exp(mean delta).
  DissimilarityData logdata(4);
  for (std::size_t i = 2; i <= 4; ++i)
    for (std::size_t j = 1; j < i; ++j) logdata.set_pair(i, j, 1.0, 1.0);
  const Configuration logcfg =
      random_configuration(logdata, {BaseFunction::Log, 1.0}, 2, 78);
  double logmsd = 0.0;
  for (std::size_t i = 2; i <= 4; ++i)
    for (std::size_t j = 1; j < i; ++j) logmsd += squared_distance(logcfg, i, j);
  logmsd /= 6.0;
  CHECK(logmsd == doctest::Approx(std::exp(1.0)).epsilon(1e-10));

  // Bounded with a mean delta outside its range: the draw is left unscaled
  // but still usable.
  DissimilarityData wild(3);
  wild.set_pair(2, 1, 1.5, 1.0);
  wild.set_pair(3, 1, 1.5, 1.0);
  wild.set_pair(3, 2, 1.5, 1.0);
  const Configuration raw =
      random_configuration(wild, {BaseFunction::Bounded, 1.0}, 2, 79);
  raw.validate();
}

TEST_CASE("taylor models converge at their order") {
  // Two points on a line with a log loss: high directional derivatives are
  // sizeable, so even the order-4 remainder stays far above rounding noise
  // at the smallest radius.
  Configuration cfg(2, 1, {0.0, 0.7});
  DissimilarityData data(2);
  data.set_pair(2, 1, std::log(0.49) + 0.3, 1.0);
  const FSpec spec{BaseFunction::Log, 1.0};
  const std::vector<double> dir = {0.8, -0.6};

  std::vector<double> radii;
  for (int k = 0; k <= 8; ++k) radii.push_back(1e-3 * std::pow(10.0, 0.25 * k));
  const std::vector<TaylorRow> rows = taylor_model(cfg, data, spec, dir, radii);
  REQUIRE(rows.size() == radii.size());

  std::vector<double> e2, e3, e4;
  for (const TaylorRow& row : rows) {
    e2.push_back(std::abs(row.actual - row.model2));
    e3.push_back(std::abs(row.actual - row.model3));
    e4.push_back(std::abs(row.actual - row.model4));
  }
  CHECK(std::abs(log_log_slope(radii, e2) - 3.0) < 0.4);
  CHECK(std::abs(log_log_slope(radii, e3) - 4.0) < 0.4);
  CHECK(std::abs(log_log_slope(radii, e4) - 5.0) < 0.4);
}

TEST_CASE("fourth-order model is exact for a quartic loss") {
  std::mt19937_64 rng(17);
  const auto ti = testsup::random_instance(rng, 4, 2, {BaseFunction::Identity, 1.0}, 0.0);
  const std::size_t m = ti.cfg.coords();
  std::vector<double> dir(m, 0.0);
  dir[1] = 0.6;
  dir[m - 1] = -0.8;
  std::vector<double> radii = {0.001, 0.01, 0.05, 0.1};
  for (const TaylorRow& row : taylor_model(ti.cfg, ti.data, ti.spec, dir, radii))
    CHECK(std::abs(row.actual - row.model4) < 1e-12);
}

TEST_CASE("log-log slope of a synthetic power law") {
  std::vector<double> t = {0.001, 0.01, 0.1, 1.0};
  std::vector<double> err;
  for (double v : t) err.push_back(5.0 * v * v * v);
  CHECK(log_log_slope(t, err) == doctest::Approx(3.0).epsilon(1e-12));
  std::vector<double> junk = {0.0, -1.0, std::nan(""), 1e-320};
  CHECK(std::isnan(log_log_slope(t, junk)));
}
