#pragma once

// Core numerics shared by the decomposition and diagnosis stages. All
// functions are pure and safe to call concurrently.

#include <cstddef>
#include <span>
#include <vector>

#include "fmdiag/signal.hpp"

namespace fmdiag {

/// Symmetric Hann window, w[k] = 0.5 (1 - cos(2 pi k / (n - 1))). Requires n >= 2.
std::vector<double> hann_window(std::size_t n);

/// "Valid" convolution: y[n] = sum_l f[l] x[n + L - 1 - l] for n = 0..N-L.
/// Only fully overlapped outputs are produced; the sample rate is kept.
Signal convolve_valid(const Signal& x, const FirFilter& f);

/// Biased autocorrelation R(tau) = sum_n x[n] x[n + tau], tau = 0..N-1,
/// normalized so that R(0) = 1. Computed through a zero-padded FFT.
std::vector<double> autocorr(const Signal& x);

/// Period (in samples) read off a normalized autocorrelation: the lag of the
/// maximum of R beyond its first zero crossing at or after `min_lag`.
/// Throws NoPeriodicity when R never crosses zero there.
std::size_t estimate_period(std::span<const double> r, std::size_t min_lag);

/// Lag of the largest R value with lag >= min_lag. Fallback used when a mode
/// shows no zero crossing.
std::size_t argmax_lag(std::span<const double> r, std::size_t min_lag);

/// Single-sided magnitude spectrum of the mean-removed Hilbert envelope.
/// Bin k sits at k * fs / N. Requires N >= 16.
Spectrum envelope_spectrum(const Signal& x);

/// (value - lo) / (hi - lo). Values outside [lo, hi] map outside [0, 1].
double minmax_normalize(double value, double lo, double hi);

}  // namespace fmdiag
