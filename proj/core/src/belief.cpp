#include "twostage/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "twostage/errors.hpp"

namespace twostage {
namespace {

constexpr double kSymmetryTolerance = 1e-10;

double max_relative_asymmetry(const Matrix& m) {
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

void symmetrize(Matrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
  }
}

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvariantError(std::string(what) + " is not positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  symmetrize(inv);
  return inv;
}

double spd_log_det(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvariantError("kl_divergence: precision is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

BetaSchedule::BetaSchedule(double reg_, int dim_) : reg(reg_), dim(dim_) {
  if (!(reg_ > 0.0) || !std::isfinite(reg_)) {
    throw std::invalid_argument("BetaSchedule: reg must be positive, got " + std::to_string(reg_));
  }
  if (dim_ < 1) {
    throw std::invalid_argument("BetaSchedule: dim must be >= 1, got " + std::to_string(dim_));
  }
}

double beta(const BetaSchedule& schedule, std::uint64_t t) {
  const double tc = static_cast<double>(std::max<std::uint64_t>(t, 1));
  const double dl = schedule.dim * schedule.reg;
  const double width = std::sqrt(2.0 * std::log(tc) + schedule.dim * std::log((dl + tc) / dl));
  const double root = std::sqrt(schedule.reg) + width;
  return root * root;
}

GaussianBelief::GaussianBelief(Vector mean, Matrix precision, Matrix covariance)
    : mean_(std::move(mean)),
      precision_(std::move(precision)),
      covariance_(std::move(covariance)),
      scratch_(mean_.size()) {}

GaussianBelief GaussianBelief::from_precision(Vector mean, Matrix precision) {
  if (mean.size() < 1) {
    throw std::invalid_argument("GaussianBelief: dimension must be >= 1");
  }
  if (precision.rows() != mean.size() || precision.cols() != mean.size()) {
    throw std::invalid_argument("GaussianBelief: precision shape does not match mean");
  }
  if (!precision.allFinite() || !mean.allFinite()) {
    throw std::invalid_argument("GaussianBelief: non-finite entries");
  }
  if (max_relative_asymmetry(precision) > kSymmetryTolerance) {
    throw std::invalid_argument("GaussianBelief: precision is not symmetric");
  }
  symmetrize(precision);
  Matrix covariance = spd_inverse(precision, "GaussianBelief: precision");
  return GaussianBelief(std::move(mean), std::move(precision), std::move(covariance));
}

GaussianBelief GaussianBelief::from_covariance(Vector mean, const Matrix& covariance) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
    throw std::invalid_argument("GaussianBelief: covariance shape does not match mean");
  }
  if (max_relative_asymmetry(covariance) > kSymmetryTolerance) {
    throw std::invalid_argument("GaussianBelief: covariance is not symmetric");
  }
  Matrix sym = covariance;
  symmetrize(sym);
  return from_precision(std::move(mean), spd_inverse(sym, "GaussianBelief: covariance"));
}

void GaussianBelief::check_dim(const Vector& x, const char* what) const {
  if (x.size() != mean_.size()) {
    throw std::invalid_argument(std::string(what) + ": vector has length " +
                                std::to_string(x.size()) + ", belief has dimension " +
                                std::to_string(mean_.size()));
  }
}

void GaussianBelief::update(const Vector& x, double r) {
  check_dim(x, "observe");
  scratch_.noalias() = precision_ * mean_;
  scratch_ += r * x;
  rank_one(x, 1.0, false);
  mean_.noalias() = covariance_ * scratch_;
}

void GaussianBelief::synchronize(const Vector& u, const SyncTarget& target) {
  check_dim(u, "sync_to_target");
  if (u.isZero(0.0)) {
    throw std::invalid_argument("sync_to_target: direction must be nonzero");
  }
  if (!(target.target_var > 0.0)) {
    throw std::invalid_argument("sync_to_target: target variance must be positive");
  }
  scratch_.noalias() = covariance_ * u;
  const double var = u.dot(scratch_);
  if (target.target_var > var) {
    throw PreconditionError("sync_to_target: target variance " + std::to_string(target.target_var) +
                            " exceeds current variance " + std::to_string(var));
  }
  mean_ += ((target.target_mean - mean_.dot(u)) / var) * scratch_;
  const double c = 1.0 / target.target_var - 1.0 / var;
  if (c == 0.0) {
    return;
  }
  rank_one(u, c, var / target.target_var >= kContractionRefreshRatio);
}

void GaussianBelief::rank_one(const Vector& u, double c, bool force_refresh) {
  Vector su = covariance_ * u;
  const double denom = 1.0 + c * u.dot(su);
  if (c < 0.0 && denom < kMinDenominator) {
    throw PreconditionError("rank-one precision update would lose positive definiteness");
  }
  precision_.noalias() += c * (u * u.transpose());
  symmetrize(precision_);
  covariance_.noalias() -= (c / denom) * (su * su.transpose());
  symmetrize(covariance_);
  ++updates_since_refresh_;
  if (force_refresh || updates_since_refresh_ >= kRefreshInterval ||
      inverse_drift() > kDriftTolerance) {
    refresh();
  }
}

void GaussianBelief::refresh() {
  covariance_ = spd_inverse(precision_, "posterior precision");
  updates_since_refresh_ = 0;
}

RewardMoments GaussianBelief::reward_moments(const Vector& x) const {
  check_dim(x, "reward_mean_var");
  const double var = x.dot(covariance_ * x);
  return {x.dot(mean_), std::max(var, 0.0)};
}

double GaussianBelief::inverse_drift() const {
  const Eigen::Index n = precision_.rows();
  return (covariance_ * precision_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

GaussianBelief init_prior(int dim, double reg) {
  if (dim < 1) {
    throw std::invalid_argument("init_prior: dim must be >= 1");
  }
  if (!(reg > 0.0) || !std::isfinite(reg)) {
    throw std::invalid_argument("init_prior: reg must be positive");
  }
  return GaussianBelief::from_precision(Vector::Zero(dim), reg * Matrix::Identity(dim, dim));
}

GaussianBelief pretrained_prior(const Vector& theta_star, double reg, double pseudo_count,
                                double init_noise, RandomStream& rng) {
  if (theta_star.size() < 1) {
    throw std::invalid_argument("pretrained_prior: theta_star is empty");
  }
  if (!(reg > 0.0)) {
    throw std::invalid_argument("pretrained_prior: reg must be positive");
  }
  if (!(pseudo_count >= 0.0)) {
    throw std::invalid_argument("pretrained_prior: pseudo_count must be nonnegative");
  }
  if (!(init_noise >= 0.0)) {
    throw std::invalid_argument("pretrained_prior: init_noise must be nonnegative");
  }
  const Eigen::Index d = theta_star.size();
  Vector mean(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    mean(j) = theta_star(j) + init_noise * rng.normal();
  }
  return GaussianBelief::from_precision(std::move(mean),
                                        (reg + pseudo_count) * Matrix::Identity(d, d));
}

GaussianBelief observe(GaussianBelief belief, const Vector& x, double r) {
  belief.update(x, r);
  return belief;
}

RewardMoments reward_mean_var(const GaussianBelief& belief, const Vector& x) {
  return belief.reward_moments(x);
}

double ucb_score(const GaussianBelief& belief, const Vector& x, double beta) {
  if (!(beta >= 0.0)) {
    throw std::invalid_argument("ucb_score: beta must be nonnegative");
  }
  const RewardMoments m = belief.reward_moments(x);
  return m.mean + std::sqrt(beta) * std::sqrt(m.var);
}

GaussianBelief sync_to_target(GaussianBelief belief, const Vector& u, const SyncTarget& target) {
  belief.synchronize(u, target);
  return belief;
}

double kl_divergence(const GaussianBelief& b1, const GaussianBelief& b2) {
  if (b1.dim() != b2.dim()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  if (b1.mean() == b2.mean() && b1.precision() == b2.precision()) {
    return 0.0;
  }
  const Vector diff = b2.mean() - b1.mean();
  const double trace = (b2.precision() * b1.covariance()).trace();
  const double maha = diff.dot(b2.precision() * diff);
  // log det S2 - log det S1 = log det P1 - log det P2
  const double log_ratio = spd_log_det(b1.precision()) - spd_log_det(b2.precision());
  const double kl = 0.5 * (trace + maha - b1.dim() + log_ratio);
  return std::max(kl, 0.0);
}

}  // namespace twostage
