#pragma once

// Training and diagnosis: tune (K, L) per condition with the hummingbird
// optimizer against the SIMI indicator, describe each signal by the energies
// of its lowest-SIMI modes, turn per-condition energy ranges into neutrosophic
// templates and label unknown signals by minimum weighted cross-entropy.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmdiag/aha.hpp"
#include "fmdiag/fmd.hpp"
#include "fmdiag/indicators.hpp"
#include "fmdiag/neutrosophic.hpp"
#include "fmdiag/signal.hpp"

namespace fmdiag {

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool operator==(const IntRange&) const = default;
};

// FMD knobs other than (K, L).
struct FmdSettings {
  std::optional<int> bank_size;
  int max_iter = 20;
  double ridge = 1e-8;
  std::optional<int> min_period_lag;

  FmdConfig config(int mode_count, int filter_len) const;
  bool operator==(const FmdSettings&) const = default;
};

// Everything needed to turn a signal into an energy vector once (K, L) is known.
struct FeatureSettings {
  int selected_modes = 4;
  IndicatorConfig indicator;
  FmdSettings fmd;

  bool operator==(const FeatureSettings& o) const {
    return selected_modes == o.selected_modes && indicator.embedding == o.indicator.embedding &&
           indicator.tolerance_factor == o.indicator.tolerance_factor && fmd == o.fmd;
  }
};

inline constexpr double kTestLowerBound = 0.01;

struct TrainConfig {
  AhaConfig aha{30, 20, 1};
  // K = 3 cannot supply four selected modes, so the default box starts at 4.
  IntRange k_bounds{4, 8};
  IntRange l_bounds{20, 50};
  FeatureSettings features;
  std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
  double ind_floor = kDefaultIndeterminacyFloor;
  // Optimize (K, L) on all of a condition's signals joined end to end instead
  // of on its first signal.
  bool optimize_on_concatenation = false;

  void validate() const;
};

struct ParamChoice {
  int mode_count = 0;
  int filter_len = 0;
  OptResult search;
  std::size_t distinct_evaluations = 0;
  std::vector<std::string> skipped;  // (K, L) points whose decomposition failed
};

/// Minimizes min_k SIMI(mode_k) over the (K, L) box with the hummingbird optimizer.
ParamChoice optimize_fmd_params(const Signal& x, const TrainConfig& cfg);

struct ModeFeatures {
  std::vector<double> energies;          // raw energies, ascending SIMI order
  std::vector<double> simi;              // SIMI of the selected modes
  std::vector<std::size_t> mode_index;   // positions in the decomposition
  std::vector<std::size_t> periods;
};

ModeFeatures extract_features(const Signal& x, int mode_count, int filter_len, const FeatureSettings& settings);

struct ConditionModel {
  std::string label;
  int mode_count = 0;
  int filter_len = 0;
  std::vector<EnergyInterval> intervals;
  Svns svns;
  std::vector<double> simi;

  bool operator==(const ConditionModel&) const = default;
};

struct FeatureStats {
  std::vector<double> min;
  std::vector<double> max;

  bool operator==(const FeatureStats&) const = default;
};

struct DiagnosisModel {
  static constexpr int kFormatVersion = 1;

  int version = kFormatVersion;
  std::vector<ConditionModel> conditions;
  FeatureStats stats;
  std::vector<double> weights;
  double ind_floor = kDefaultIndeterminacyFloor;
  FeatureSettings features;

  void validate() const;
  bool operator==(const DiagnosisModel&) const = default;
};

struct LabeledSignals {
  std::string label;
  std::vector<Signal> signals;
};

/// Global min-max normalization followed by clamping into [0.01, 1].
std::vector<double> normalize_energies(std::span<const double> raw, const FeatureStats& stats);

/// Test-sample set: interval [0.01, e] per normalized energy e.
Svns test_svns(std::span<const double> normalized, double ind_floor = kDefaultIndeterminacyFloor);

DiagnosisModel train(std::span<const LabeledSignals> dataset, const TrainConfig& cfg);

struct Diagnosis {
  std::string label;
  std::size_t index = 0;
  std::vector<double> scores;  // per condition, model order
  bool tie = false;
};

Diagnosis diagnose(const Signal& x, const DiagnosisModel& model);

/// Per-condition seed derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace fmdiag
