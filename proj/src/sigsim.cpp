#include "fmdiag/sigsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fft.hpp"
#include "fmdiag/error.hpp"

namespace fmdiag {
namespace {

// Independent streams for impulse timing and additive noise so that changing
// the noise level never moves the impulses.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

}  // namespace

std::size_t BearingSimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

void BearingSimConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidConfig, what); };
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) fail("sample_rate must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be positive");
  if (!(fault_freq > 0.0)) fail("fault_freq must be positive");
  if (!(fault_freq < resonance_freq)) fail("fault_freq must be below resonance_freq");
  if (!(resonance_freq < sample_rate / 2.0)) fail("resonance_freq must be below Nyquist");
  if (!(damping >= 0.0)) fail("damping must be non-negative");
  if (!(slip_jitter >= 0.0 && slip_jitter <= 0.05)) fail("slip_jitter must lie in [0, 0.05]");
  if (!(noise_std >= 0.0)) fail("noise_std must be non-negative");
  if (!std::isfinite(impulse_amplitude) || !std::isfinite(shaft_amplitude) || !std::isfinite(shaft_freq))
    fail("amplitudes and shaft frequency must be finite");
  if (sample_count() < 1000) fail("duration * sample_rate must give at least 1000 samples");
}

Signal simulate_bearing(const BearingSimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  const double fs = cfg.sample_rate;
  std::vector<double> s(n, 0.0);

  auto timing = stream(cfg.seed, 0x1b3a);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double gap = 1.0 / cfg.fault_freq;
  // Impulses ring for ~40 time constants at most; beyond that the tail is below 1e-17.
  const double tail = cfg.damping > 0.0 ? 40.0 / cfg.damping : static_cast<double>(n) / fs;
  const double two_pi_fr = 2.0 * std::numbers::pi * cfg.resonance_freq;

  if (cfg.impulse_amplitude != 0.0) {
    double onset = unit(timing) * gap;
    const double end = static_cast<double>(n) / fs;
    while (onset < end) {
      const auto first = static_cast<std::size_t>(std::ceil(onset * fs));
      const auto last = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil((onset + tail) * fs)));
      for (std::size_t i = first; i < last; ++i) {
        const double dt = static_cast<double>(i) / fs - onset;
        if (dt < 0.0) continue;
        s[i] += cfg.impulse_amplitude * std::exp(-cfg.damping * dt) * std::sin(two_pi_fr * dt);
      }
      const double u = 2.0 * unit(timing) - 1.0;
      onset += gap * (1.0 + cfg.slip_jitter * u);
    }
  }

  if (cfg.shaft_amplitude != 0.0) {
    const double w = 2.0 * std::numbers::pi * cfg.shaft_freq;
    for (std::size_t i = 0; i < n; ++i)
      s[i] += cfg.shaft_amplitude * std::sin(w * static_cast<double>(i) / fs);
  }

  if (cfg.noise_std > 0.0) {
    auto noise = stream(cfg.seed, 0x2c5d);
    std::normal_distribution<double> gauss(0.0, cfg.noise_std);
    for (double& v : s) v += gauss(noise);
  }
  return Signal(std::move(s), fs);
}

double noise_std_for_snr(const BearingSimConfig& cfg, double snr_db) {
  BearingSimConfig clean = cfg;
  clean.noise_std = 0.0;
  clean.shaft_amplitude = 0.0;
  const Signal s = simulate_bearing(clean);
  double power = 0.0;
  for (double v : s.samples()) power += v * v;
  power /= static_cast<double>(s.size());
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

double fgn_autocovariance(std::size_t lag, double hurst) {
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

Signal simulate_fgn(std::size_t n, double hurst, double sigma, std::uint64_t seed, double sample_rate) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "FGN needs n >= 2");
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(ErrorKind::InvalidArgument, "Hurst exponent must lie in (0, 1)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return Signal(std::vector<double>(n, 0.0), sample_rate);

  // Circulant of size 2m with first row gamma(0..m), gamma(m-1..1).
  const std::size_t m = n;
  const std::size_t size = 2 * m;
  std::vector<fft::cplx> row(size);
  for (std::size_t k = 0; k <= m; ++k) row[k] = fgn_autocovariance(k, hurst);
  for (std::size_t k = 1; k < m; ++k) row[size - k] = row[k];
  const auto eig = fft::forward(row);

  std::vector<double> lambda(size);
  double lambda_max = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    lambda[k] = eig[k].real();
    lambda_max = std::max(lambda_max, std::abs(lambda[k]));
  }
  for (double& l : lambda) {
    if (l < -1e-10 * lambda_max)
      throw Error(ErrorKind::NumericalFailure,
                  "circulant embedding is not non-negative definite; increase n");
    l = std::max(l, 0.0);
  }

  auto rng = stream(seed, 0x3f9e);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<fft::cplx> y(size);
  y[0] = std::sqrt(lambda[0]) * gauss(rng);
  y[m] = std::sqrt(lambda[m]) * gauss(rng);
  for (std::size_t k = 1; k < m; ++k) {
    const double a = gauss(rng);
    const double b = gauss(rng);
    y[k] = std::sqrt(lambda[k] / 2.0) * fft::cplx(a, b);
    y[size - k] = std::conj(y[k]);
  }
  const auto x = fft::forward(y);
  const double scale = sigma / std::sqrt(static_cast<double>(size));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * x[i].real();
  return Signal(std::move(out), sample_rate);
}

}  // namespace fmdiag
