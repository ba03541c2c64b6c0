#pragma once

// Reproducible normal, location-scale and contaminated sampling.
//
// Every variate stream is keyed by (seed, stream, substream, lane) and backed
// by std::mt19937_64 seeded through std::seed_seq. Both are fully specified by
// the standard, and normals are generated here with the polar method instead
// of std::normal_distribution, so a given key produces the same values with
// any conforming standard library.
//
// Lanes separate independent uses within one key: lane 0 carries normal
// variates, lane 1 the mixture indicators of contaminated sampling. Keeping
// indicators off the normal lane means a contaminated sample with epsilon = 0
// is bit-identical to the corresponding location-scale sample.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "robust_t/errors.hpp"
#include "robust_t/robust_estimators.hpp"

namespace robust_t {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  // Per-replication index used by the simulation engine; 0 for direct sampling.
  std::uint64_t substream = 0;

  RngSpec with_substream(std::uint64_t index) const { return {seed, stream, index}; }

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

enum class Lane : std::uint32_t { normal = 0, mixture = 1 };

inline std::mt19937_64 make_engine(const RngSpec& rng, Lane lane = Lane::normal) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(rng.seed),      hi(rng.seed),      lo(rng.stream),
                    hi(rng.stream),    lo(rng.substream), hi(rng.substream),
                    static_cast<std::uint32_t>(lane)};
  return std::mt19937_64(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Standard normal variates by the Marsaglia polar method.
class NormalVariates {
 public:
  explicit NormalVariates(const RngSpec& rng, Lane lane = Lane::normal)
      : engine_(make_engine(rng, lane)) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01(engine_) - 1.0;
      v = 2.0 * uniform01(engine_) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ContaminationModel {
  double epsilon = 0.0;
  double clean_mu = 0.0;
  double clean_sigma = 1.0;
  double contam_mu = 0.0;
  double contam_sigma = 1.0;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw DomainError("ContaminationModel: epsilon must lie in [0, 1]");
    }
    if (!(clean_sigma > 0.0) || !(contam_sigma > 0.0) || !std::isfinite(clean_sigma) ||
        !std::isfinite(contam_sigma)) {
      throw DomainError("ContaminationModel: component scales must be positive and finite");
    }
    if (!std::isfinite(clean_mu) || !std::isfinite(contam_mu)) {
      throw DomainError("ContaminationModel: component locations must be finite");
    }
  }
};

namespace detail {

inline void require_count(std::size_t n, const char* fn) {
  if (n == 0) throw DomainError(std::string(fn) + ": n must be at least 1");
}

inline void require_scale(double sigma, const char* fn) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError(std::string(fn) + ": sigma must be positive and finite");
  }
}

}  // namespace detail

// Buffer-filling forms used by the simulation loop.

inline void fill_std_normal(NormalVariates& normals, std::span<double> out) {
  for (double& x : out) x = normals();
}

inline void fill_location_scale(NormalVariates& normals, std::span<double> out, double mu,
                                double sigma) {
  for (double& x : out) x = sigma * normals() + mu;
}

/// Returns the number of observations drawn from the contaminating component.
inline std::size_t fill_contaminated(NormalVariates& normals, std::mt19937_64& indicators,
                                     std::span<double> out, const ContaminationModel& model) {
  std::size_t contaminated = 0;
  for (double& x : out) {
    const bool from_contam = uniform01(indicators) < model.epsilon;
    const double z = normals();
    if (from_contam) {
      ++contaminated;
      x = model.contam_sigma * z + model.contam_mu;
    } else {
      x = model.clean_sigma * z + model.clean_mu;
    }
  }
  return contaminated;
}

inline Sample sample_std_normal(const RngSpec& rng, std::size_t n) {
  detail::require_count(n, "sample_std_normal");
  NormalVariates normals(rng);
  std::vector<double> values(n);
  fill_std_normal(normals, values);
  return Sample(std::move(values));
}

inline Sample sample_location_scale(const RngSpec& rng, std::size_t n, double mu, double sigma) {
  detail::require_count(n, "sample_location_scale");
  detail::require_scale(sigma, "sample_location_scale");
  if (!std::isfinite(mu)) throw DomainError("sample_location_scale: mu must be finite");
  NormalVariates normals(rng);
  std::vector<double> values(n);
  fill_location_scale(normals, values, mu, sigma);
  return Sample(std::move(values));
}

struct ContaminatedSample {
  Sample sample;
  std::size_t contaminated;
};

inline ContaminatedSample sample_contaminated_counted(const RngSpec& rng, std::size_t n,
                                                      const ContaminationModel& model) {
  detail::require_count(n, "sample_contaminated");
  model.validate();
  NormalVariates normals(rng, Lane::normal);
  auto indicators = make_engine(rng, Lane::mixture);
  std::vector<double> values(n);
  const std::size_t count = fill_contaminated(normals, indicators, values, model);
  return {Sample(std::move(values)), count};
}

inline Sample sample_contaminated(const RngSpec& rng, std::size_t n,
                                  const ContaminationModel& model) {
  return sample_contaminated_counted(rng, n, model).sample;
}

}  // namespace robust_t
