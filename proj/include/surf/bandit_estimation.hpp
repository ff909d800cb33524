#pragma once

// Plug-in estimation of the bandit arc-length CDF from noisy offline pulls,
// and the error-versus-budget experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "surf/cdf.hpp"
#include "surf/geometry.hpp"
#include "surf/problems/bandit.hpp"
#include "surf/stats.hpp"

namespace surf {

struct PullRecord {
  std::size_t arm = 0;
  double reward1 = 0.0;
  double reward2 = 0.0;
};

struct BanditDataset {
  std::vector<PullRecord> records;
  std::size_t pull_budget = 0;
};

struct RewardEstimate {
  Vector r1_hat;
  Vector r2_hat;
  std::vector<std::size_t> counts;
};

/// Generator for one (seed, budget, trial) stream. Streams are split by
/// feeding all three values through std::seed_seq into mt19937_64.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t budget, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(budget), static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

/// Round-robin allocation (pull t goes to arm t mod A) with additive
/// Gaussian noise on both reward channels.
inline BanditDataset simulate_pulls(const EntropicBandit& truth, std::size_t budget, double noise_sigma,
                                    std::mt19937_64& rng) {
  const std::size_t arms = truth.arm_count();
  if (budget < arms) {
    throw Error(ErrorCode::budget, "bandit_estimation",
                "pull budget " + std::to_string(budget) + " smaller than arm count " + std::to_string(arms));
  }
  if (!(noise_sigma >= 0)) throw Error(ErrorCode::parameter, "bandit_estimation", "noise sigma must be >= 0");
  BanditDataset data;
  data.pull_budget = budget;
  data.records.reserve(budget);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t t = 0; t < budget; ++t) {
    const std::size_t arm = t % arms;
    const double e1 = noise_sigma > 0 ? noise_sigma * noise(rng) : 0.0;
    const double e2 = noise_sigma > 0 ? noise_sigma * noise(rng) : 0.0;
    data.records.push_back({arm, truth.r1()(static_cast<Eigen::Index>(arm)) + e1,
                            truth.r2()(static_cast<Eigen::Index>(arm)) + e2});
  }
  return data;
}

inline BanditDataset simulate_pulls(const EntropicBandit& truth, std::size_t budget, double noise_sigma,
                                    std::uint64_t seed) {
  auto rng = stream_rng(seed, budget, 0);
  return simulate_pulls(truth, budget, noise_sigma, rng);
}

/// Per-arm empirical means.
inline RewardEstimate estimate_rewards(const BanditDataset& data, std::size_t arms) {
  RewardEstimate est{Vector::Zero(static_cast<Eigen::Index>(arms)), Vector::Zero(static_cast<Eigen::Index>(arms)),
                     std::vector<std::size_t>(arms, 0)};
  for (const auto& rec : data.records) {
    if (rec.arm >= arms) {
      throw Error(ErrorCode::domain, "bandit_estimation", "arm index " + std::to_string(rec.arm) + " out of range");
    }
    est.r1_hat(static_cast<Eigen::Index>(rec.arm)) += rec.reward1;
    est.r2_hat(static_cast<Eigen::Index>(rec.arm)) += rec.reward2;
    ++est.counts[rec.arm];
  }
  for (std::size_t a = 0; a < arms; ++a) {
    if (est.counts[a] == 0) {
      throw Error(ErrorCode::coverage, "bandit_estimation", "arm " + std::to_string(a) + " was never pulled");
    }
    est.r1_hat(static_cast<Eigen::Index>(a)) /= static_cast<double>(est.counts[a]);
    est.r2_hat(static_cast<Eigen::Index>(a)) /= static_cast<double>(est.counts[a]);
  }
  return est;
}

/// Phi-hat from the plug-in speed with (R1-hat, R2-hat).
inline CdfEstimate estimated_cdf(const RewardEstimate& est, const Vector& r0, double beta,
                                 std::size_t grid_size = kDefaultGridSize, const QuadratureConfig& cfg = {}) {
  const EntropicBandit plug_in(r0, est.r1_hat, est.r2_hat, beta);
  return cdf_from_speed([&](double w) { return *plug_in.closed_form_speed(Weight(w)); }, grid_size, cfg);
}

struct CdfErrorRow {
  std::size_t pulls = 0;
  double mean_sup_error = 0.0;
  double std_sup_error = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct CdfErrorExperiment {
  std::vector<CdfErrorRow> rows;
  double loglog_slope = 0.0;
};

/// For each budget T, `trials` independent simulate -> estimate -> Phi-hat
/// pipelines measured in sup-distance against the true Phi.
inline CdfErrorExperiment cdf_error_experiment(const EntropicBandit& truth, std::vector<std::size_t> pull_grid,
                                               int trials, double noise_sigma, std::uint64_t seed,
                                               std::size_t grid_size = kDefaultGridSize,
                                               const QuadratureConfig& cfg = {}) {
  if (trials < 2) throw Error(ErrorCode::parameter, "bandit_estimation", "trials must be >= 2");
  if (pull_grid.empty()) throw Error(ErrorCode::parameter, "bandit_estimation", "pull grid is empty");
  std::sort(pull_grid.begin(), pull_grid.end());
  const CdfEstimate truth_cdf =
      cdf_from_speed([&](double w) { return *truth.closed_form_speed(Weight(w)); }, grid_size, cfg);

  CdfErrorExperiment out;
  std::vector<double> budgets;
  std::vector<double> means;
  for (std::size_t budget : pull_grid) {
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(trials));
    for (int trial = 0; trial < trials; ++trial) {
      auto rng = stream_rng(seed, budget, static_cast<std::uint64_t>(trial));
      const auto data = simulate_pulls(truth, budget, noise_sigma, rng);
      const auto est = estimate_rewards(data, truth.arm_count());
      errors.push_back(sup_distance(estimated_cdf(est, truth.r0(), truth.beta(), grid_size, cfg), truth_cdf));
    }
    out.rows.push_back({budget, mean(errors), sample_stddev(errors), trials, seed});
    budgets.push_back(static_cast<double>(budget));
    means.push_back(out.rows.back().mean_sup_error);
  }
  if (budgets.size() >= 2 && std::all_of(means.begin(), means.end(), [](double m) { return m > 0; })) {
    out.loglog_slope = loglog_slope(budgets, means);
  }
  return out;
}

}  // namespace surf
