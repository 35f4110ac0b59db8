#include "fstress/loss.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fstress {

DissimilarityData::DissimilarityData(std::size_t n_points,
                                     std::vector<double> weights,
                                     std::vector<double> deltas)
    : n_(n_points), w_(std::move(weights)), d_(std::move(deltas)) {
  if (w_.size() != pairs() || d_.size() != pairs()) {
    throw DimensionMismatch("dissimilarity data for " + std::to_string(n_) +
                         " points needs " + std::to_string(pairs()) +
                         " weights and deltas, got " +
                         std::to_string(w_.size()) + " and " +
                         std::to_string(d_.size()));
  }
}

double DissimilarityData::weight_between(std::size_t i, std::size_t j) const {
  return w_[pair_index(std::max(i, j), std::min(i, j), n_)];
}

double DissimilarityData::delta_between(std::size_t i, std::size_t j) const {
  return d_[pair_index(std::max(i, j), std::min(i, j), n_)];
}

void DissimilarityData::set_pair(std::size_t i, std::size_t j, double delta,
                                 double weight) {
  const std::size_t k = pair_index(std::max(i, j), std::min(i, j), n_);
  d_[k] = delta;
  w_[k] = weight;
}

double DissimilarityData::constant_term() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    if (w_[k] != 0.0) acc += w_[k] * d_[k] * d_[k];
  }
  return 0.5 * acc;
}

void DissimilarityData::validate() const {
  for (std::size_t k = 0; k < w_.size(); ++k) {
    if (!std::isfinite(w_[k]) || w_[k] < 0.0) {
      const auto [i, j] = pair_points(k, n_);
      throw EvaluationError("weight of pair (" + std::to_string(i) + ", " +
                            std::to_string(j) +
                            ") must be finite and non-negative, got " +
                            std::to_string(w_[k]));
    }
    if (w_[k] != 0.0 && !std::isfinite(d_[k])) {
      const auto [i, j] = pair_points(k, n_);
      throw EvaluationError("dissimilarity of weighted pair (" +
                            std::to_string(i) + ", " + std::to_string(j) +
                            ") is not finite");
    }
  }
}

LossReport fstress_eval(const Configuration& cfg,
                        const DissimilarityData& data, const FSpec& spec,
                        int max_order, std::size_t dim_cap) {
  cfg.validate();
  data.validate();
  if (data.n() != cfg.n) {
    throw DimensionMismatch("dissimilarity data covers " +
                         std::to_string(data.n()) +
                         " points, configuration has " +
                         std::to_string(cfg.n));
  }
  const std::size_t m = cfg.coords();
  check_dim_cap(m, max_order, dim_cap);

  LossReport rep;
  rep.qdist.assign(data.pairs(), 0.0);
  rep.fdist.assign(data.pairs(), std::numeric_limits<double>::quiet_NaN());
  rep.tensors = DerivTensors(m, max_order);

  // f^(2q): the square of the transformed distance, whose derivatives carry
  // the eta part of the loss.
  FSpec sq = spec;
  sq.power = 2.0 * spec.power;

  double sum_sq = 0.0;
  DerivTensors& t = rep.tensors;
  for (std::size_t k = 0; k < data.pairs(); ++k) {
    const auto [i, j] = pair_points(k, data.n());
    rep.qdist[k] = squared_distance(cfg, i, j);
    const double w = data.weight(k);
    if (w == 0.0) continue;
    const double delta = data.delta(k);

    const PairBlock h = fdist_pair_block(cfg, i, j, spec, max_order);
    const PairBlock g = fdist_pair_block(cfg, i, j, sq, max_order);
    const double fd = h.t.value;
    rep.fdist[k] = fd;

    const double resid = delta - fd;
    sum_sq += w * resid * resid;
    rep.constant += 0.5 * w * delta * delta;
    rep.rho += w * delta * fd;
    rep.eta += 0.5 * w * g.t.value;

    // w * (0.5 * G_r - delta * H_r), written only to active coordinates.
    const double ch = -w * delta;
    const double cg = 0.5 * w;
    const std::size_t ww = h.id.size();
    if (max_order >= 1) {
      for (std::size_t r = 0; r < ww; ++r)
        t.g1(h.id[r]) += cg * g.t.g1(r) + ch * h.t.g1(r);
    }
    if (max_order >= 2) {
      for (std::size_t r = 0; r < ww; ++r)
        for (std::size_t s = 0; s < ww; ++s)
          t.h2(h.id[r], h.id[s]) += cg * g.t.h2(r, s) + ch * h.t.h2(r, s);
    }
    if (max_order >= 3) {
      for (std::size_t r = 0; r < ww; ++r)
        for (std::size_t s = 0; s < ww; ++s)
          for (std::size_t z = 0; z < ww; ++z)
            t.h3(h.id[r], h.id[s], h.id[z]) +=
                cg * g.t.h3(r, s, z) + ch * h.t.h3(r, s, z);
    }
    if (max_order >= 4) {
      for (std::size_t r = 0; r < ww; ++r)
        for (std::size_t s = 0; s < ww; ++s)
          for (std::size_t z = 0; z < ww; ++z)
            for (std::size_t y = 0; y < ww; ++y)
              t.h4(h.id[r], h.id[s], h.id[z], h.id[y]) +=
                  cg * g.t.h4(r, s, z, y) + ch * h.t.h4(r, s, z, y);
    }
  }

  rep.stress = 0.5 * sum_sq;
  rep.stress_unscaled = sum_sq;
  rep.tensors.value = rep.stress;
  return rep;
}

RhoEtaSplit rho_eta_split(const Configuration& cfg,
                          const DissimilarityData& data, const FSpec& spec) {
  const LossReport rep = fstress_eval(cfg, data, spec, 0);
  return {rep.constant, rep.rho, rep.eta};
}

}  // namespace fstress
