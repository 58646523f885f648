#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fmdiag {

// Uniformly sampled real-valued record. Always nonempty, finite, with a
// strictly positive sample rate.
class Signal {
 public:
  Signal(std::vector<double> samples, double sample_rate);

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  bool all_zero() const noexcept;

  bool operator==(const Signal&) const = default;

 private:
  std::vector<double> samples_;
  double sample_rate_;
};

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
  bool operator==(const Band&) const = default;
};

// FIR filter with at least two finite taps, not all zero.
class FirFilter {
 public:
  explicit FirFilter(std::vector<double> taps, std::optional<Band> band = std::nullopt);

  std::span<const double> taps() const noexcept { return taps_; }
  std::size_t size() const noexcept { return taps_.size(); }
  const std::optional<Band>& band() const noexcept { return band_; }

  double norm() const noexcept;
  // Copy scaled to unit L2 norm; band metadata is kept.
  FirFilter normalized() const;

  bool operator==(const FirFilter&) const = default;

 private:
  std::vector<double> taps_;
  std::optional<Band> band_;
};

struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> magnitudes;

  std::size_t argmax() const;
};

}  // namespace fmdiag
