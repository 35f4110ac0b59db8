#pragma once

#include <cstddef>
#include <vector>

#include "fstress/mds.hpp"

namespace fstress {

// Weighted dissimilarities over the lower triangle of n points, stored dense
// in pair order.  A pair that was never measured keeps weight zero and takes
// no part in any evaluation, so its dissimilarity value is irrelevant.
class DissimilarityData {
 public:
  DissimilarityData() = default;
  explicit DissimilarityData(std::size_t n_points)
      : n_(n_points),
        w_(pair_count(n_points), 0.0),
        d_(pair_count(n_points), 0.0) {}
  DissimilarityData(std::size_t n_points, std::vector<double> weights,
                    std::vector<double> deltas);

  std::size_t n() const { return n_; }
  std::size_t pairs() const { return pair_count(n_); }

  double weight(std::size_t k) const { return w_[k]; }
  double delta(std::size_t k) const { return d_[k]; }
  double weight_between(std::size_t i, std::size_t j) const;
  double delta_between(std::size_t i, std::size_t j) const;
  void set_pair(std::size_t i, std::size_t j, double delta,
                double weight = 1.0);

  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& deltas() const { return d_; }

  // 0.5 * sum of w * delta^2, the configuration-independent part of the loss.
  double constant_term() const;

  // Weights must be finite and non-negative; deltas of weighted pairs finite.
  void validate() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
  std::vector<double> d_;
};

// Everything one evaluation of the loss produces.  With fdist_k the
// transformed distance of pair k,
//
//   stress = 0.5 * sum_k w_k (delta_k - fdist_k)^2
//          = constant - rho + eta,
//
// where constant = 0.5 sum w delta^2, rho = sum w delta fdist and
// eta = 0.5 sum w fdist^2.  stress_unscaled = 2 * stress is reported
// alongside for callers that prefer the plain sum of squares.  The
// derivative tensors always belong to the halved convention.
struct LossReport {
  double stress = 0.0;
  double stress_unscaled = 0.0;
  double constant = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  std::vector<double> qdist;  // squared distance per pair, pair order
  std::vector<double> fdist;  // transformed distance; NaN where weight is 0
  DerivTensors tensors;       // over the n*p coordinates, up to max_order
};

// Evaluates the loss and its derivative tensors.  Each weighted pair
// contributes w * (0.5 * d^r[f^(2q)] - delta * d^r[f^q]) to the order-r
// tensor, accumulated over the pair's active coordinates only.  Pairs with
// weight zero are skipped before any domain check.  Throws DomainError
// (with the pair attached) when a weighted pair leaves the base function's
// domain.
LossReport fstress_eval(const Configuration& cfg,
                        const DissimilarityData& data, const FSpec& spec,
                        int max_order = 2,
                        std::size_t dim_cap = kDefaultDimCap);

struct RhoEtaSplit {
  double constant = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  double stress() const { return constant - rho + eta; }
};

RhoEtaSplit rho_eta_split(const Configuration& cfg,
                          const DissimilarityData& data, const FSpec& spec);

}  // namespace fstress
