#pragma once

#include "fmdiag/signal.hpp"

namespace fmdiag {

struct IndicatorConfig {
  int embedding = 2;              // pattern length m
  double tolerance_factor = 0.2;  // r = tolerance_factor * sample SD

  void validate() const;
};

/// Approximate entropy phi^m(r) - phi^(m+1)(r) with Chebyshev window distance,
/// self-matches included and natural logarithms.
double approx_entropy(const Signal& x, const IndicatorConfig& cfg = {});

/// Fourth-moment ratio mean(x^4) / mean(x^2)^2, without mean removal.
double kurtosis_index(const Signal& x);

/// Sparsity impact measure index: approx_entropy / kurtosis_index. Smaller is
/// more periodic and more impulsive.
double simi(const Signal& x, const IndicatorConfig& cfg = {});

double pearson_cc(const Signal& a, const Signal& b);

/// Sum of squared samples.
double mode_energy(const Signal& x);

}  // namespace fmdiag
