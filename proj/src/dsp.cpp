#include "fmdiag/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "fmdiag/error.hpp"

namespace fmdiag {

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Hann window needs n >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  // Fill the first half and mirror so that w[k] == w[n-1-k] holds bit-exactly.
  for (std::size_t k = 0; k < (n + 1) / 2; ++k) {
    const double v = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom));
    w[k] = v;
    w[n - 1 - k] = v;
  }
  return w;
}

Signal convolve_valid(const Signal& x, const FirFilter& f) {
  const std::size_t n = x.size();
  const std::size_t len = f.size();
  if (n < len) throw Error(ErrorKind::SignalTooShort, "signal shorter than filter");
  const auto xs = x.samples();
  const auto taps = f.taps();
  const std::size_t ny = n - len + 1;
  std::vector<double> y(ny, 0.0);
  // Tap-major accumulation keeps the inner loop a vectorizable axpy.
  for (std::size_t l = 0; l < len; ++l) {
    const double t = taps[l];
    const double* src = xs.data() + (len - 1 - l);
    double* dst = y.data();
    for (std::size_t i = 0; i < ny; ++i) dst[i] += t * src[i];
  }
  return Signal(std::move(y), x.sample_rate());
}

std::vector<double> autocorr(const Signal& x) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::SignalTooShort, "autocorrelation needs at least two samples");
  if (x.all_zero()) throw Error(ErrorKind::DegenerateSignal, "autocorrelation of an all-zero signal");

  auto r = fft::autocorrelation(x.samples());
  const double r0 = r[0];
  for (double& v : r) v /= r0;
  r[0] = 1.0;
  return r;
}

std::size_t estimate_period(std::span<const double> r, std::size_t min_lag) {
  if (min_lag < 1) throw Error(ErrorKind::InvalidArgument, "min_lag must be at least 1");
  const std::size_t n = r.size();
  std::size_t crossing = 0;
  bool found = false;
  for (std::size_t lag = min_lag; lag < n; ++lag) {
    const double prev = r[lag - 1];
    const double cur = r[lag];
    if (cur == 0.0 || (prev > 0.0 && cur < 0.0) || (prev < 0.0 && cur > 0.0)) {
      crossing = lag;
      found = true;
      break;
    }
  }
  if (!found || crossing + 1 >= n)
    throw Error(ErrorKind::NoPeriodicity, "autocorrelation has no zero crossing");

  std::size_t best = crossing + 1;
  for (std::size_t lag = crossing + 2; lag < n; ++lag)
    if (r[lag] > r[best]) best = lag;
  return best;
}

std::size_t argmax_lag(std::span<const double> r, std::size_t min_lag) {
  const std::size_t start = std::max<std::size_t>(min_lag, 1);
  if (start >= r.size()) throw Error(ErrorKind::SignalTooShort, "no lags beyond min_lag");
  std::size_t best = start;
  for (std::size_t lag = start + 1; lag < r.size(); ++lag)
    if (r[lag] > r[best]) best = lag;
  return best;
}

Spectrum envelope_spectrum(const Signal& x) {
  const std::size_t n = x.size();
  if (n < 16) throw Error(ErrorKind::SignalTooShort, "envelope spectrum needs at least 16 samples");

  std::vector<fft::cplx> buf(x.samples().begin(), x.samples().end());
  auto spec = fft::forward(buf);
  // Analytic signal: keep DC (and Nyquist for even n), double positive bins.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) spec[k] *= 2.0;
    else if (!(n % 2 == 0 && k == half)) spec[k] = 0.0;
  }
  auto analytic = fft::backward(spec);

  std::vector<double> env(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    env[i] = std::abs(analytic[i]) / static_cast<double>(n);
    mean += env[i];
  }
  mean /= static_cast<double>(n);
  for (double& v : env) v -= mean;

  auto env_spec = fft::forward_real(env, n);
  Spectrum out;
  out.frequencies.resize(half + 1);
  out.magnitudes.resize(half + 1);
  const double df = x.sample_rate() / static_cast<double>(n);
  for (std::size_t k = 0; k <= half; ++k) {
    out.frequencies[k] = df * static_cast<double>(k);
    const double scale = (k == 0 || (n % 2 == 0 && k == half)) ? 1.0 : 2.0;
    out.magnitudes[k] = scale * std::abs(env_spec[k]) / static_cast<double>(n);
  }
  return out;
}

double minmax_normalize(double value, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorKind::DegenerateRange, "normalization range has hi <= lo");
  return (value - lo) / (hi - lo);
}

}  // namespace fmdiag
