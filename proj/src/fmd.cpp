#include "fmdiag/fmd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fmdiag/dsp.hpp"
#include "fmdiag/error.hpp"
#include "fmdiag/indicators.hpp"

namespace fmdiag {
namespace {

double sinc(double v) {
  if (v == 0.0) return 1.0;
  const double a = std::numbers::pi * v;
  return std::sin(a) / a;
}

std::size_t mode_period(const Signal& u, std::size_t min_lag) {
  if (min_lag >= u.size()) throw Error(ErrorKind::SignalTooShort, "mode shorter than the minimum period lag");
  const auto r = autocorr(u);
  try {
    return estimate_period(r, min_lag);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoPeriodicity) throw;
    return argmax_lag(r, min_lag);
  }
}

Mode make_mode(const Signal& x, const FirFilter& f, std::size_t min_lag) {
  Signal u = convolve_valid(x, f);
  const std::size_t period = mode_period(u, min_lag);
  const double ck = correlated_kurtosis(u, period, 1);
  return Mode{std::move(u), f, period, ck};
}

}  // namespace

int FmdConfig::effective_bank_size() const { return bank_size.value_or(std::max(7, mode_count)); }

std::size_t FmdConfig::effective_min_lag() const {
  return static_cast<std::size_t>(min_period_lag.value_or(filter_len));
}

void FmdConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
  const int m = effective_bank_size();
  if (max_iter < 1) fail("max_iter must be at least 1");
  if (!(ridge > 0.0) || !std::isfinite(ridge)) fail("ridge must be positive");
  if (min_period_lag && *min_period_lag < 1) fail("min_period_lag must be at least 1");
  if (mode_count > m) fail("mode count K=" + std::to_string(mode_count) + " exceeds bank size M=" + std::to_string(m));
  if (unchecked_domain) {
    if (mode_count < 1) fail("mode count must be at least 1");
    if (filter_len < 2) fail("filter length must be at least 2");
    return;
  }
  if (mode_count < 3 || mode_count > 8) fail("mode count K must lie in [3, 8]");
  if (filter_len < 20 || filter_len > 50) fail("filter length L must lie in [20, 50]");
  if (m < 5 || m > 10) fail("bank size M must lie in [5, 10]");
}

std::vector<FirFilter> init_filter_bank(int bank_size, int filter_len, double sample_rate) {
  if (bank_size < 1) throw Error(ErrorKind::InvalidArgument, "bank size must be at least 1");
  if (filter_len < 2) throw Error(ErrorKind::InvalidArgument, "filter length must be at least 2");
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample rate must be positive");

  const auto len = static_cast<std::size_t>(filter_len);
  const auto window = hann_window(len);
  const double centre = 0.5 * static_cast<double>(len - 1);
  std::vector<FirFilter> bank;
  bank.reserve(static_cast<std::size_t>(bank_size));
  for (int m = 0; m < bank_size; ++m) {
    const double lo_hz = m * sample_rate / (2.0 * bank_size);
    const double hi_hz = (m + 1) * sample_rate / (2.0 * bank_size);
    const double lo = lo_hz / sample_rate;  // cycles per sample
    const double hi = hi_hz / sample_rate;
    std::vector<double> taps(len);
    for (std::size_t n = 0; n < len; ++n) {
      const double t = static_cast<double>(n) - centre;
      taps[n] = window[n] * (2.0 * hi * sinc(2.0 * hi * t) - 2.0 * lo * sinc(2.0 * lo * t));
    }
    bank.push_back(FirFilter(std::move(taps), Band{lo_hz, hi_hz}).normalized());
  }
  return bank;
}

double correlated_kurtosis(const Signal& x, std::size_t period, int shift_order) {
  if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be at least 1");
  if (shift_order < 1) throw Error(ErrorKind::InvalidArgument, "shift order must be at least 1");
  const auto xs = x.samples();
  const std::size_t n = xs.size();
  const std::size_t span = static_cast<std::size_t>(shift_order) * period;
  if (n <= span) throw Error(ErrorKind::SignalTooShort, "signal not longer than shift_order * period");

  double energy = 0.0;
  for (double v : xs) energy += v * v;
  if (energy == 0.0) throw Error(ErrorKind::DegenerateSignal, "correlated kurtosis of an all-zero signal");

  double num = 0.0;
  for (std::size_t i = span; i < n; ++i) {
    double prod = 1.0;
    for (int m = 0; m <= shift_order; ++m) prod *= xs[i - static_cast<std::size_t>(m) * period];
    num += prod * prod;
  }
  return num / std::pow(energy, shift_order + 1);
}

CkDeconvolver::CkDeconvolver(const Signal& x, std::size_t filter_len, double ridge)
    : x_(x), filter_len_(filter_len) {
  const std::size_t n = x.size();
  const std::size_t len = filter_len;
  if (len < 2) throw Error(ErrorKind::InvalidArgument, "filter length must be at least 2");
  if (n < len) throw Error(ErrorKind::SignalTooShort, "signal shorter than filter");
  if (!(ridge > 0.0)) throw Error(ErrorKind::InvalidArgument, "ridge must be positive");
  const auto xs = x.samples();

  // S(a, b) = sum_{i=0}^{N-L} x[i+a] x[i+b]; A(k, j) = S(L-1-k, L-1-j).
  const std::size_t count = n - len + 1;
  Eigen::MatrixXd s(len, len);
  for (std::size_t b = 0; b < len; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += xs[i] * xs[i + b];
    s(0, b) = acc;
    s(b, 0) = acc;
  }
  for (std::size_t a = 1; a < len; ++a)
    for (std::size_t b = a; b < len; ++b) {
      const double v = s(a - 1, b - 1) - xs[a - 1] * xs[b - 1] + xs[count + a - 1] * xs[count + b - 1];
      s(a, b) = v;
      s(b, a) = v;
    }
  Eigen::MatrixXd a_mat = s.reverse();  // A(k, j) = S(L-1-k, L-1-j)

  const double trace = a_mat.trace();
  if (!(trace > 0.0)) throw Error(ErrorKind::DegenerateSignal, "input correlation matrix is zero");
  a_mat.diagonal().array() += ridge * trace / static_cast<double>(len);
  llt_.compute(a_mat);
  if (llt_.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "Cholesky factorization failed despite ridge");
}

FirFilter CkDeconvolver::update(const FirFilter& f, std::size_t period) const {
  return update(f, convolve_valid(x_, f), period);
}

FirFilter CkDeconvolver::update(const FirFilter& f, const Signal& output, std::size_t period) const {
  const std::size_t len = filter_len_;
  if (f.size() != len) throw Error(ErrorKind::InvalidArgument, "filter length does not match deconvolver");
  if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be at least 1");
  if (x_.size() < len + period) throw Error(ErrorKind::SignalTooShort, "signal shorter than L + T");
  const auto u = output.samples();
  const std::size_t nu = u.size();
  if (nu != x_.size() - len + 1) throw Error(ErrorKind::InvalidArgument, "filter output has the wrong length");

  // g[i] = a0[i] + a1[i + T], folding the delayed term onto the undelayed grid.
  std::vector<double> g(nu, 0.0);
  for (std::size_t i = period; i < nu; ++i) {
    const double cur = u[i];
    const double lag = u[i - period];
    g[i] += cur * lag * lag;
    g[i - period] += cur * cur * lag;
  }

  const auto xs = x_.samples();
  const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(nu));
  Eigen::VectorXd rhs(len);
  for (std::size_t k = 0; k < len; ++k) {
    const Eigen::Map<const Eigen::VectorXd> col(xs.data() + (len - 1 - k), static_cast<Eigen::Index>(nu));
    rhs(static_cast<Eigen::Index>(k)) = col.dot(gv);
  }

  const Eigen::VectorXd sol = llt_.solve(rhs);
  const double norm = sol.norm();
  if (!std::isfinite(norm) || norm == 0.0)
    throw Error(ErrorKind::NumericalFailure, "filter update produced a zero or non-finite filter");
  std::vector<double> taps(len);
  for (std::size_t k = 0; k < len; ++k) taps[k] = sol(static_cast<Eigen::Index>(k)) / norm;
  return FirFilter(std::move(taps), f.band());
}

FirFilter mckd_update_step(const Signal& x, const FirFilter& f, std::size_t period, double ridge) {
  return CkDeconvolver(x, f.size(), ridge).update(f, period);
}

void fmd_decompose_path(const Signal& x, const FmdConfig& cfg,
                        const std::function<void(int k, const DecompositionResult&)>& on_k) {
  cfg.validate();
  const auto len = static_cast<std::size_t>(cfg.filter_len);
  if (x.size() < 4 * len)
    throw Error(ErrorKind::SignalTooShort, "FMD needs at least 4 L samples");
  if (x.all_zero()) throw Error(ErrorKind::DegenerateSignal, "cannot decompose an all-zero signal");

  const std::size_t min_lag = cfg.effective_min_lag();
  std::vector<FirFilter> filters = init_filter_bank(cfg.effective_bank_size(), cfg.filter_len, x.sample_rate());
  const CkDeconvolver deconv(x, len, cfg.ridge);

  DecompositionResult result;
  for (;;) {
    for (int it = 0; it < cfg.max_iter; ++it) {
      for (auto& f : filters) {
        const Signal u = convolve_valid(x, f);
        const std::size_t period = mode_period(u, min_lag);
        f = deconv.update(f, u, period);
      }
    }

    result.modes.clear();
    for (const auto& f : filters) result.modes.push_back(make_mode(x, f, min_lag));

    CycleLog log;
    log.bank_size = static_cast<int>(filters.size());
    log.iterations = cfg.max_iter;
    for (const auto& m : result.modes) {
      log.periods.push_back(m.period);
      log.ck.push_back(m.ck);
    }

    const int live = static_cast<int>(filters.size());
    if (live <= cfg.mode_count) {
      result.cycles.push_back(std::move(log));
      on_k(live, result);
      return;
    }

    // Snapshot for this K before merging: the cycle log carries no merge yet.
    {
      DecompositionResult snapshot{result.modes, result.cycles};
      snapshot.cycles.push_back(log);
      on_k(live, snapshot);
    }

    MergeEvent merge;
    merge.abs_cc = -1.0;
    for (std::size_t i = 0; i < result.modes.size(); ++i)
      for (std::size_t j = i + 1; j < result.modes.size(); ++j) {
        const double cc = std::abs(pearson_cc(result.modes[i].samples, result.modes[j].samples));
        if (cc > merge.abs_cc) {
          merge.abs_cc = cc;
          merge.kept = i;
          merge.dropped = j;
        }
      }
    if (result.modes[merge.dropped].ck > result.modes[merge.kept].ck) std::swap(merge.kept, merge.dropped);
    log.merge = merge;
    result.cycles.push_back(std::move(log));
    filters.erase(filters.begin() + static_cast<std::ptrdiff_t>(merge.dropped));
  }
}

DecompositionResult fmd_decompose(const Signal& x, const FmdConfig& cfg) {
  DecompositionResult out;
  fmd_decompose_path(x, cfg, [&](int k, const DecompositionResult& r) {
    if (k == cfg.mode_count) out = r;
  });
  return out;
}

}  // namespace fmdiag
