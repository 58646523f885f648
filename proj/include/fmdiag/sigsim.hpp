#pragma once

#include <cstddef>
#include <cstdint>

#include "fmdiag/signal.hpp"

namespace fmdiag {

// Damped-resonance bearing fault model:
//   s(t) = sum_j A exp(-d (t - t_j)) sin(2 pi f_r (t - t_j)) [t >= t_j]
//          + A_s sin(2 pi f_s t) + N(0, sigma^2)
// with impulse gaps (1 / f_fault)(1 + jitter u_j), u_j ~ U[-1, 1].
struct BearingSimConfig {
  double sample_rate = 19200.0;
  double duration = 2.5;
  double fault_freq = 12.34;
  double resonance_freq = 3000.0;
  double damping = 1200.0;
  double slip_jitter = 0.0;
  double impulse_amplitude = 1.0;
  double shaft_freq = 50.0;
  double shaft_amplitude = 0.5;
  double noise_std = 0.0;
  std::uint64_t seed = 1;

  std::size_t sample_count() const;
  void validate() const;
};

Signal simulate_bearing(const BearingSimConfig& cfg);

/// Noise level that puts the impulse component at `snr_db` relative to the
/// additive Gaussian noise (shaft tone excluded from the signal power).
double noise_std_for_snr(const BearingSimConfig& cfg, double snr_db);

/// Fractional Gaussian noise with Hurst exponent `hurst` and marginal standard
/// deviation `sigma`, generated exactly by circulant embedding.
Signal simulate_fgn(std::size_t n, double hurst, double sigma, std::uint64_t seed,
                    double sample_rate = 1.0);

/// Theoretical FGN autocovariance gamma(k) for unit variance.
double fgn_autocovariance(std::size_t lag, double hurst);

}  // namespace fmdiag
