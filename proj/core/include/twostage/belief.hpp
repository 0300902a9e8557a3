#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "twostage/rng.hpp"

namespace twostage {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameters of the LinUCB confidence-width schedule.
struct BetaSchedule {
  BetaSchedule(double reg, int dim);

  double reg;
  int dim;
};

/// Confidence multiplier beta_t = (sqrt(reg) + sqrt(2 log t' + d log((d reg + t') / (d reg))))^2
/// with t' = max(t, 1).
double beta(const BetaSchedule& schedule, std::uint64_t t);

/// Reward statistics a synchronization step should impose along one direction.
struct SyncTarget {
  double target_mean;
  double target_var;
};

struct RewardMoments {
  double mean;
  double var;
};

/// Gaussian posterior N(mean, covariance) over linear reward parameters.
///
/// The precision matrix is the source of truth. The covariance is carried
/// alongside and kept consistent by Sherman-Morrison updates; it is recomputed
/// from a Cholesky factorization of the precision every kRefreshInterval
/// rank-one updates, whenever max|covariance * precision - I| exceeds
/// kDriftTolerance, and after strongly contracting synchronization steps.
class GaussianBelief {
 public:
  static constexpr int kRefreshInterval = 1000;
  static constexpr double kDriftTolerance = 1e-8;
  // Sherman-Morrison loses ~log10(ratio) digits of x'Sx when the update shrinks
  // the variance along x by this factor or more, so such steps re-invert.
  static constexpr double kContractionRefreshRatio = 1e3;
  static constexpr double kMinDenominator = 1e-12;

  /// Builds a belief from mean and precision; validates symmetry and positive
  /// definiteness.
  static GaussianBelief from_precision(Vector mean, Matrix precision);
  static GaussianBelief from_covariance(Vector mean, const Matrix& covariance);

  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& precision() const noexcept { return precision_; }
  const Matrix& covariance() const noexcept { return covariance_; }

  /// Ridge/Bayesian update with one observation (x, r): precision += x x',
  /// mean = covariance * (old precision * old mean + r x).
  void update(const Vector& x, double r);

  /// KL projection onto {m : <m, u> = target_mean} x {S : u'Su = target_var}.
  /// Requires u != 0 and 0 < target_var <= u' covariance u.
  void synchronize(const Vector& u, const SyncTarget& target);

  RewardMoments reward_moments(const Vector& x) const;

  /// max |covariance * precision - I|.
  double inverse_drift() const;

  int updates_since_refresh() const noexcept { return updates_since_refresh_; }

 private:
  GaussianBelief(Vector mean, Matrix precision, Matrix covariance);

  void check_dim(const Vector& x, const char* what) const;
  void rank_one(const Vector& u, double c, bool force_refresh);
  void refresh();

  Vector mean_;
  Matrix precision_;
  Matrix covariance_;
  Vector scratch_;
  int updates_since_refresh_ = 0;
};

/// Prior N(0, reg^-1 I).
GaussianBelief init_prior(int dim, double reg);

/// Pretrained prior: precision (reg + pseudo_count) I and mean drawn
/// elementwise from N(theta_star_j, init_noise^2) using rng.
GaussianBelief pretrained_prior(const Vector& theta_star, double reg, double pseudo_count,
                                double init_noise, RandomStream& rng);

GaussianBelief observe(GaussianBelief belief, const Vector& x, double r);

RewardMoments reward_mean_var(const GaussianBelief& belief, const Vector& x);

/// <x, mean> + sqrt(beta) * ||x||_covariance.
double ucb_score(const GaussianBelief& belief, const Vector& x, double beta);

GaussianBelief sync_to_target(GaussianBelief belief, const Vector& u, const SyncTarget& target);

/// KL(N(b1) || N(b2)), clamped at zero against round-off.
double kl_divergence(const GaussianBelief& b1, const GaussianBelief& b2);

}  // namespace twostage
