#pragma once

// Monte Carlo engine for the distribution of test statistics.
//
// Replication r draws its sample from the substream cfg.rng.with_substream(r)
// and writes its value into slot r, so the output does not depend on how
// replications are spread across worker threads. Workers claim fixed-size
// blocks of replication indices.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/normal_dist.hpp"
#include "robust_t/robust_estimators.hpp"
#include "robust_t/sampling.hpp"
#include "robust_t/statistics.hpp"

namespace robust_t {

struct StdNormalModel {};

struct LocationScaleModel {
  double mu = 0.0;
  double sigma = 1.0;
};

using DataModel = std::variant<StdNormalModel, LocationScaleModel, ContaminationModel>;

struct SimulationConfig {
  std::size_t n = 0;
  std::size_t reps = 0;
  RngSpec rng{};
  StatisticKind statistic_kind = StatisticKind::pivot;
  DataModel data_model = StdNormalModel{};
  double mu0 = 0.0;
  // Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 1;
};

struct EmpiricalDistribution {
  std::vector<double> sorted_values;
  SimulationConfig config;
  // Degenerate replications that were redrawn.
  std::size_t resampled = 0;

  std::size_t size() const noexcept { return sorted_values.size(); }
};

inline constexpr std::size_t kReplicationBlock = 1024;
// Redraws tolerated before a run is declared broken, as a fraction of reps.
inline constexpr double kMaxDegenerateFraction = 1e-3;

namespace detail {

inline void validate(const SimulationConfig& cfg) {
  if (cfg.n < 2) throw InsufficientDataError("simulation: n must be at least 2");
  if (cfg.reps < 1) throw DomainError("simulation: reps must be at least 1");
  if (!std::isfinite(cfg.mu0)) throw DomainError("simulation: mu0 must be finite");
  std::visit(
      [](const auto& model) {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, LocationScaleModel>) {
          require_scale(model.sigma, "simulation");
          if (!std::isfinite(model.mu)) throw DomainError("simulation: mu must be finite");
        } else if constexpr (std::is_same_v<M, ContaminationModel>) {
          model.validate();
        }
      },
      cfg.data_model);
}

inline unsigned worker_count(unsigned requested, std::size_t blocks) {
  unsigned workers = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));
}

}  // namespace detail

struct SimulatedValues {
  std::vector<double> values;  // in replication order
  std::size_t resampled = 0;
};

/// Runs cfg.reps replications of `statistic` over samples drawn per
/// cfg.data_model. `statistic` receives a mutable buffer holding the sample
/// and may reorder it; throwing DegenerateSampleError causes a redraw from
/// the continuation of the same substream.
template <typename Statistic>
SimulatedValues simulate_values(const SimulationConfig& cfg, Statistic statistic) {
  detail::validate(cfg);
  const std::size_t reps = cfg.reps;
  const std::size_t blocks = (reps + kReplicationBlock - 1) / kReplicationBlock;
  const std::size_t max_redraws =
      static_cast<std::size_t>(kMaxDegenerateFraction * static_cast<double>(reps));

  SimulatedValues out;
  out.values.assign(reps, 0.0);
  std::atomic<std::size_t> next_block{0};
  std::atomic<std::size_t> redraws{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<double> buf(cfg.n);
    try {
      for (;;) {
        const std::size_t block = next_block.fetch_add(1);
        if (block >= blocks || aborted.load()) return;
        const std::size_t first = block * kReplicationBlock;
        const std::size_t last = std::min(reps, first + kReplicationBlock);
        for (std::size_t r = first; r < last; ++r) {
          const RngSpec rng = cfg.rng.with_substream(r);
          NormalVariates normals(rng);
          std::mt19937_64 indicators;
          const auto* contamination = std::get_if<ContaminationModel>(&cfg.data_model);
          if (contamination != nullptr) indicators = make_engine(rng, Lane::mixture);
          for (;;) {
            std::visit(
                [&](const auto& model) {
                  using M = std::decay_t<decltype(model)>;
                  if constexpr (std::is_same_v<M, StdNormalModel>) {
                    fill_std_normal(normals, buf);
                  } else if constexpr (std::is_same_v<M, LocationScaleModel>) {
                    fill_location_scale(normals, buf, model.mu, model.sigma);
                  } else {
                    fill_contaminated(normals, indicators, buf, model);
                  }
                },
                cfg.data_model);
            try {
              out.values[r] = statistic(std::span<double>(buf));
              break;
            } catch (const DegenerateSampleError&) {
              if (redraws.fetch_add(1) + 1 > max_redraws) {
                throw SimulationIntegrityError(
                    "simulation: degenerate replications exceed " +
                    std::to_string(kMaxDegenerateFraction * 100.0) + "% of " +
                    std::to_string(reps));
              }
            }
          }
        }
      }
    } catch (...) {
      aborted.store(true);
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned workers = detail::worker_count(cfg.threads, blocks);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  out.resampled = redraws.load();
  return out;
}

/// The statistic selected by `kind`, evaluated on a scratch buffer.
inline auto statistic_functor(StatisticKind kind, double mu0) {
  return [kind, mu0](std::span<double> buf) {
    const double n = static_cast<double>(buf.size());
    switch (kind) {
      case StatisticKind::pivot: return pivot_statistic_inplace(buf, mu0);
      case StatisticKind::robust_t: return std::sqrt(n) * pivot_statistic_inplace(buf, mu0);
      case StatisticKind::scaled_robust_t:
        return scaling_constant(buf.size()) * pivot_statistic_inplace(buf, mu0);
      case StatisticKind::classical_t: return classical_t(std::span<const double>(buf), mu0);
    }
    return 0.0;
  };
}

template <typename Statistic>
EmpiricalDistribution simulate_distribution(const SimulationConfig& cfg, Statistic statistic) {
  auto sim = simulate_values(cfg, std::move(statistic));
  std::sort(sim.values.begin(), sim.values.end());
  return EmpiricalDistribution{std::move(sim.values), cfg, sim.resampled};
}

inline EmpiricalDistribution simulate_statistic(const SimulationConfig& cfg) {
  return simulate_distribution(cfg, statistic_functor(cfg.statistic_kind, cfg.mu0));
}

/// Linear interpolation between order statistics at h = (size - 1) * p.
inline double empirical_quantile(std::span<const double> sorted, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("empirical_quantile: p must lie in (0, 1)");
  if (sorted.size() < 2) throw DomainError("empirical_quantile: need at least 2 values");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double empirical_quantile(const EmpiricalDistribution& dist, double p) {
  return empirical_quantile(dist.sorted_values, p);
}

/// Kolmogorov-Smirnov distance between the empirical CDF and Phi.
inline double ks_distance_to_std_normal(std::span<const double> sorted) {
  if (sorted.empty()) throw DomainError("ks_distance_to_std_normal: empty distribution");
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = std_normal_cdf(sorted[i]);
    d = std::max({d, std::fabs(static_cast<double>(i + 1) / m - cdf),
                  std::fabs(static_cast<double>(i) / m - cdf)});
  }
  return d;
}

inline double ks_distance_to_std_normal(const EmpiricalDistribution& dist) {
  return ks_distance_to_std_normal(dist.sorted_values);
}

struct Moments {
  double mean;
  double variance;  // n-1 divisor
};

inline Moments moments(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("moments: need at least 2 values");
  const auto [mean, sd] = detail::mean_sd(values);
  return {mean, sd * sd};
}

/// Fraction of replications with |T| > critical (two-sided) or T > critical.
inline double estimate_rejection_rate(const SimulationConfig& cfg, double critical,
                                      bool two_sided) {
  if (!(critical >= 0.0)) throw DomainError("estimate_rejection_rate: critical must be >= 0");
  const auto sim = simulate_values(cfg, statistic_functor(cfg.statistic_kind, cfg.mu0));
  const auto rejected = std::count_if(sim.values.begin(), sim.values.end(), [&](double t) {
    return two_sided ? std::fabs(t) > critical : t > critical;
  });
  return static_cast<double>(rejected) / static_cast<double>(sim.values.size());
}

}  // namespace robust_t
