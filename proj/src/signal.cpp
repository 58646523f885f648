#include "fmdiag/signal.hpp"

#include <algorithm>
#include <cmath>

#include "fmdiag/error.hpp"

namespace fmdiag {

Signal::Signal(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) throw Error(ErrorKind::InvalidArgument, "signal has no samples");
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
    throw Error(ErrorKind::InvalidArgument, "sample rate must be positive and finite");
  for (double v : samples_)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "signal contains a non-finite sample");
}

bool Signal::all_zero() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
}

FirFilter::FirFilter(std::vector<double> taps, std::optional<Band> band)
    : taps_(std::move(taps)), band_(band) {
  if (taps_.size() < 2) throw Error(ErrorKind::InvalidArgument, "FIR filter needs at least two taps");
  bool any_nonzero = false;
  for (double v : taps_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "FIR filter tap is not finite");
    any_nonzero = any_nonzero || v != 0.0;
  }
  if (!any_nonzero) throw Error(ErrorKind::InvalidArgument, "FIR filter taps are all zero");
}

double FirFilter::norm() const noexcept {
  double s = 0.0;
  for (double v : taps_) s += v * v;
  return std::sqrt(s);
}

FirFilter FirFilter::normalized() const {
  const double n = norm();
  std::vector<double> out(taps_);
  for (double& v : out) v /= n;
  return FirFilter(std::move(out), band_);
}

std::size_t Spectrum::argmax() const {
  if (magnitudes.empty()) throw Error(ErrorKind::InvalidArgument, "empty spectrum");
  return static_cast<std::size_t>(
      std::distance(magnitudes.begin(), std::max_element(magnitudes.begin(), magnitudes.end())));
}

}  // namespace fmdiag
