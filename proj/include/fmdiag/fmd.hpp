#pragma once

// Feature mode decomposition: a Hann-windowed FIR filter bank whose filters
// are driven toward periodic impulsive content by correlated-kurtosis
// deconvolution, then pruned pairwise by correlation until K modes remain.
//
// The filter update is a reconstruction. It uses the fixed-point step of
// minimum correlated kurtosis deconvolution with shift order 1:
//   (X0 X0^T + ridge I) f = X0 a0 + X_T a1,
//   a0[n] = u[n] u[n-T]^2,  a1[n] = u[n]^2 u[n-T],
// with f renormalized to unit L2 norm after every step.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fmdiag/signal.hpp"

namespace fmdiag {

struct FmdConfig {
  int mode_count = 3;        // K
  int filter_len = 30;       // L
  std::optional<int> bank_size;  // M; defaults to max(7, K)
  int max_iter = 20;         // update sweeps per reduction cycle
  double ridge = 1e-8;       // relative to trace(A) / L
  std::optional<int> min_period_lag;  // defaults to L
  // Skip the K/L/M domain checks. Intended for tests and `--unsafe` runs.
  bool unchecked_domain = false;

  int effective_bank_size() const;
  std::size_t effective_min_lag() const;
  void validate() const;
};

struct Mode {
  Signal samples;
  FirFilter filter;
  std::size_t period = 1;
  double ck = 0.0;
};

struct MergeEvent {
  std::size_t kept = 0;     // indices into the filter list before the merge
  std::size_t dropped = 0;
  double abs_cc = 0.0;
};

struct CycleLog {
  int bank_size = 0;                  // live filters during this cycle
  int iterations = 0;
  std::vector<std::size_t> periods;   // per filter at the end of the cycle
  std::vector<double> ck;             // per filter at the end of the cycle
  std::optional<MergeEvent> merge;
};

struct DecompositionResult {
  std::vector<Mode> modes;
  std::vector<CycleLog> cycles;
};

/// Bank of M Hann-windowed band-pass filters splitting [0, fs/2] uniformly.
std::vector<FirFilter> init_filter_bank(int bank_size, int filter_len, double sample_rate);

/// CK_M(T) = sum_{n >= MT} (prod_{m=0..M} x[n - mT])^2 / (sum x^2)^(M+1).
double correlated_kurtosis(const Signal& x, std::size_t period, int shift_order = 1);

/// Precomputed state for repeated filter updates on one input signal: the
/// Cholesky factor of the regularized L x L input correlation matrix.
class CkDeconvolver {
 public:
  CkDeconvolver(const Signal& x, std::size_t filter_len, double ridge = 1e-8);

  FirFilter update(const FirFilter& f, std::size_t period) const;
  // Same step reusing an already computed filter output u = x * f.
  FirFilter update(const FirFilter& f, const Signal& output, std::size_t period) const;

  std::size_t filter_len() const noexcept { return filter_len_; }

 private:
  Signal x_;
  std::size_t filter_len_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// One correlated-kurtosis deconvolution step (builds its own CkDeconvolver).
FirFilter mckd_update_step(const Signal& x, const FirFilter& f, std::size_t period, double ridge = 1e-8);

DecompositionResult fmd_decompose(const Signal& x, const FmdConfig& cfg);

/// Runs the reduction loop from M filters down to `cfg.mode_count` and reports
/// the intermediate result for every K visited on the way (M, M-1, ..., K).
/// Each reported result equals fmd_decompose with that mode count and the same
/// bank size.
void fmd_decompose_path(const Signal& x, const FmdConfig& cfg,
                        const std::function<void(int k, const DecompositionResult&)>& on_k);

}  // namespace fmdiag
