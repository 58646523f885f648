#include "fmdiag/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "fmdiag/error.hpp"

namespace fmdiag {

void IndicatorConfig::validate() const {
  if (embedding < 1) throw Error(ErrorKind::InvalidConfig, "embedding dimension must be at least 1");
  if (!(tolerance_factor > 0.0) || !std::isfinite(tolerance_factor))
    throw Error(ErrorKind::InvalidConfig, "tolerance factor must be positive");
}

double approx_entropy(const Signal& x, const IndicatorConfig& cfg) {
  cfg.validate();
  const auto xs = x.samples();
  const std::size_t n = xs.size();
  const auto m = static_cast<std::size_t>(cfg.embedding);
  if (n < m + 2) throw Error(ErrorKind::SignalTooShort, "approximate entropy needs N >= m + 2");

  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  const double r = cfg.tolerance_factor * std::sqrt(ss / static_cast<double>(n - 1));

  // Windows of length m start at 0..N-m; those starting at 0..N-m-1 also have
  // an (m+1)-th sample. Candidates for a match share the first coordinate, so
  // sort window starts by x and scan only the slice within r of the query.
  const std::size_t wm = n - m + 1;
  const std::size_t wm1 = n - m;
  std::vector<std::size_t> order(wm);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  // Coordinate planes in sorted order; the missing extension is NaN so that
  // every comparison against it fails.
  std::vector<std::vector<double>> plane(m + 1, std::vector<double>(wm));
  for (std::size_t p = 0; p < wm; ++p) {
    const std::size_t s = order[p];
    for (std::size_t c = 0; c < m; ++c) plane[c][p] = xs[s + c];
    plane[m][p] = s < wm1 ? xs[s + m] : std::numeric_limits<double>::quiet_NaN();
  }
  const std::vector<double>& first = plane[0];

  double sum_log_m = 0.0;
  double sum_log_m1 = 0.0;
  std::vector<unsigned char> match(wm);
  for (std::size_t p = 0; p < wm; ++p) {
    const double q0 = first[p];
    // |x_j - q0| <= r holds on a contiguous slice of the sorted first plane.
    const auto lo_it = std::partition_point(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(p),
                                            [&](double v) { return !(std::abs(v - q0) <= r); });
    const auto hi_it = std::partition_point(first.begin() + static_cast<std::ptrdiff_t>(p), first.end(),
                                            [&](double v) { return std::abs(v - q0) <= r; });
    const auto lo = static_cast<std::size_t>(lo_it - first.begin());
    const auto hi = static_cast<std::size_t>(hi_it - first.begin());

    std::fill(match.begin() + static_cast<std::ptrdiff_t>(lo), match.begin() + static_cast<std::ptrdiff_t>(hi), 1);
    for (std::size_t c = 1; c < m; ++c) {
      const double q = plane[c][p];
      const double* col = plane[c].data();
      for (std::size_t j = lo; j < hi; ++j) match[j] &= static_cast<unsigned char>(std::abs(col[j] - q) <= r);
    }
    std::size_t count_m = 0;
    std::size_t count_m1 = 0;
    const double qe = plane[m][p];
    const double* ext = plane[m].data();
    for (std::size_t j = lo; j < hi; ++j) {
      count_m += match[j];
      count_m1 += match[j] & static_cast<unsigned char>(std::abs(ext[j] - qe) <= r);
    }
    sum_log_m += std::log(static_cast<double>(count_m) / static_cast<double>(wm));
    if (order[p] < wm1) sum_log_m1 += std::log(static_cast<double>(count_m1) / static_cast<double>(wm1));
  }
  const double phi_m = sum_log_m / static_cast<double>(wm);
  const double phi_m1 = sum_log_m1 / static_cast<double>(wm1);
  return std::max(0.0, phi_m - phi_m1);
}

double kurtosis_index(const Signal& x) {
  double peak = 0.0;
  for (double v : x.samples()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw Error(ErrorKind::DegenerateSignal, "kurtosis index of an all-zero signal");
  // Scaling by the peak keeps constants exact (every term is 1) and avoids
  // overflow of the fourth powers.
  double s2 = 0.0;
  double s4 = 0.0;
  for (double v : x.samples()) {
    const double u = v / peak;
    const double sq = u * u;
    s2 += sq;
    s4 += sq * sq;
  }
  const double n = static_cast<double>(x.size());
  const double m2 = s2 / n;
  return (s4 / n) / (m2 * m2);
}

double simi(const Signal& x, const IndicatorConfig& cfg) {
  const double ki = kurtosis_index(x);
  return approx_entropy(x, cfg) / ki;
}

double pearson_cc(const Signal& a, const Signal& b) {
  const std::size_t n = a.size();
  if (n != b.size()) throw Error(ErrorKind::InvalidArgument, "correlation inputs differ in length");
  if (n < 2) throw Error(ErrorKind::SignalTooShort, "correlation needs at least two samples");
  const auto as = a.samples();
  const auto bs = b.samples();
  const double ma = std::accumulate(as.begin(), as.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(bs.begin(), bs.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = as[i] - ma;
    const double db = bs[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorKind::DegenerateSignal, "correlation of a constant signal");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double mode_energy(const Signal& x) {
  double e = 0.0;
  for (double v : x.samples()) e += v * v;
  return e;
}

}  // namespace fmdiag
