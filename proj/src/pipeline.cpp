#include "fmdiag/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "fmdiag/dsp.hpp"
#include "fmdiag/error.hpp"

namespace fmdiag {
namespace {

// Fitness assigned to (K, L) points whose decomposition fails; finite so the
// optimizer keeps running and never selects them over a valid point.
constexpr double kFailedFitness = std::numeric_limits<double>::max();

std::vector<double> mode_simi(const DecompositionResult& r, const IndicatorConfig& ind) {
  std::vector<double> out;
  out.reserve(r.modes.size());
  for (const auto& m : r.modes) out.push_back(simi(m.samples, ind));
  return out;
}

Signal concatenate(const std::vector<Signal>& signals) {
  std::vector<double> joined;
  for (const auto& s : signals) {
    if (s.sample_rate() != signals.front().sample_rate())
      throw Error(ErrorKind::InvalidArgument, "signals of one condition must share a sample rate");
    joined.insert(joined.end(), s.samples().begin(), s.samples().end());
  }
  return Signal(std::move(joined), signals.front().sample_rate());
}

}  // namespace

FmdConfig FmdSettings::config(int mode_count, int filter_len) const {
  FmdConfig c;
  c.mode_count = mode_count;
  c.filter_len = filter_len;
  c.bank_size = bank_size;
  c.max_iter = max_iter;
  c.ridge = ridge;
  c.min_period_lag = min_period_lag;
  return c;
}

void TrainConfig::validate() const {
  aha.validate();
  features.indicator.validate();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
  if (k_bounds.lo > k_bounds.hi || k_bounds.lo < 3 || k_bounds.hi > 8) fail("K bounds must lie within [3, 8]");
  if (l_bounds.lo > l_bounds.hi || l_bounds.lo < 20 || l_bounds.hi > 50) fail("L bounds must lie within [20, 50]");
  if (features.selected_modes < 1) fail("selected_modes must be at least 1");
  if (features.selected_modes > k_bounds.lo)
    fail("selected_modes exceeds the smallest feasible mode count");
  if (weights.size() != static_cast<std::size_t>(features.selected_modes))
    fail("one weight per selected mode is required");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) fail("weights must be finite and non-negative");
  if (!(ind_floor >= 0.0 && ind_floor <= 1.0)) fail("ind_floor must lie in [0, 1]");
}

ParamChoice optimize_fmd_params(const Signal& x, const TrainConfig& cfg) {
  cfg.validate();
  ParamChoice choice;
  std::map<std::pair<int, int>, double> fitness;

  const auto& settings = cfg.features;
  auto bank_for = [&](int k) { return settings.fmd.bank_size.value_or(std::max(7, k)); };

  // Every K sharing a bank size lies on one reduction path, so a single
  // decomposition run scores all of them for a given L.
  auto evaluate = [&](int k, int l) -> double {
    if (auto it = fitness.find({k, l}); it != fitness.end()) return it->second;
    const int bank = bank_for(k);
    int lowest = k;
    for (int kk = cfg.k_bounds.lo; kk <= k; ++kk)
      if (bank_for(kk) == bank) {
        lowest = kk;
        break;
      }
    FmdConfig fc = settings.fmd.config(lowest, l);
    fc.bank_size = bank;
    try {
      fmd_decompose_path(x, fc, [&](int kk, const DecompositionResult& r) {
        if (kk < cfg.k_bounds.lo || kk > cfg.k_bounds.hi || bank_for(kk) != bank) return;
        if (fitness.contains({kk, l})) return;
        const auto s = mode_simi(r, settings.indicator);
        fitness[{kk, l}] = *std::min_element(s.begin(), s.end());
        ++choice.distinct_evaluations;
      });
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "K=" << k << " L=" << l << ": " << e.what();
      choice.skipped.push_back(msg.str());
    }
    // A failure part-way down the path leaves the remaining points unscored.
    for (int kk = lowest; kk <= k; ++kk)
      if (bank_for(kk) == bank && !fitness.contains({kk, l})) fitness[{kk, l}] = kFailedFitness;
    return fitness.at({k, l});
  };

  const SearchSpace space({{static_cast<double>(cfg.k_bounds.lo), static_cast<double>(cfg.k_bounds.hi), true},
                           {static_cast<double>(cfg.l_bounds.lo), static_cast<double>(cfg.l_bounds.hi), true}});
  choice.search = aha_minimize(
      [&](std::span<const double> p) {
        return evaluate(static_cast<int>(std::lround(p[0])), static_cast<int>(std::lround(p[1])));
      },
      space, cfg.aha);
  choice.mode_count = static_cast<int>(std::lround(choice.search.best_position[0]));
  choice.filter_len = static_cast<int>(std::lround(choice.search.best_position[1]));
  if (choice.search.best_fitness == kFailedFitness)
    throw Error(ErrorKind::NumericalFailure, "no (K, L) point produced a valid decomposition");
  return choice;
}

ModeFeatures extract_features(const Signal& x, int mode_count, int filter_len, const FeatureSettings& settings) {
  if (mode_count < settings.selected_modes)
    throw Error(ErrorKind::InvalidConfig, "mode count is smaller than the number of selected modes");
  const auto result = fmd_decompose(x, settings.fmd.config(mode_count, filter_len));
  const auto s = mode_simi(result, settings.indicator);

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });

  ModeFeatures f;
  for (int i = 0; i < settings.selected_modes; ++i) {
    const std::size_t idx = order[static_cast<std::size_t>(i)];
    f.mode_index.push_back(idx);
    f.simi.push_back(s[idx]);
    f.energies.push_back(mode_energy(result.modes[idx].samples));
    f.periods.push_back(result.modes[idx].period);
  }
  return f;
}

std::vector<double> normalize_energies(std::span<const double> raw, const FeatureStats& stats) {
  if (raw.size() != stats.min.size() || raw.size() != stats.max.size())
    throw Error(ErrorKind::InvalidArgument, "energy vector length differs from normalization statistics");
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k)
    out[k] = std::clamp(minmax_normalize(raw[k], stats.min[k], stats.max[k]), kTestLowerBound, 1.0);
  return out;
}

Svns test_svns(std::span<const double> normalized, double ind_floor) {
  std::vector<EnergyInterval> iv;
  iv.reserve(normalized.size());
  for (double e : normalized) iv.push_back({kTestLowerBound, std::clamp(e, kTestLowerBound, 1.0)});
  return svns_from_interval(iv, ind_floor);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over (master, index)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DiagnosisModel train(std::span<const LabeledSignals> dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.size() < 2) throw Error(ErrorKind::InvalidArgument, "training needs at least two conditions");
  for (const auto& c : dataset)
    if (c.signals.empty()) throw Error(ErrorKind::InvalidArgument, "condition '" + c.label + "' has no signals");

  const auto features = static_cast<std::size_t>(cfg.features.selected_modes);
  DiagnosisModel model;
  model.weights = cfg.weights;
  model.ind_floor = cfg.ind_floor;
  model.features = cfg.features;

  std::vector<std::vector<std::vector<double>>> raw(dataset.size());
  for (std::size_t c = 0; c < dataset.size(); ++c) {
    const auto& cond = dataset[c];
    TrainConfig local = cfg;
    local.aha.seed = derive_seed(cfg.aha.seed, c);
    const Signal representative = cfg.optimize_on_concatenation ? concatenate(cond.signals) : cond.signals.front();
    const ParamChoice choice = optimize_fmd_params(representative, local);

    ConditionModel cm;
    cm.label = cond.label;
    cm.mode_count = choice.mode_count;
    cm.filter_len = choice.filter_len;
    for (std::size_t s = 0; s < cond.signals.size(); ++s) {
      auto f = extract_features(cond.signals[s], cm.mode_count, cm.filter_len, cfg.features);
      if (s == 0) cm.simi = f.simi;
      raw[c].push_back(std::move(f.energies));
    }
    model.conditions.push_back(std::move(cm));
  }

  model.stats.min.assign(features, std::numeric_limits<double>::infinity());
  model.stats.max.assign(features, -std::numeric_limits<double>::infinity());
  for (const auto& cond : raw)
    for (const auto& v : cond)
      for (std::size_t k = 0; k < features; ++k) {
        model.stats.min[k] = std::min(model.stats.min[k], v[k]);
        model.stats.max[k] = std::max(model.stats.max[k], v[k]);
      }
  for (std::size_t k = 0; k < features; ++k)
    if (!(model.stats.max[k] > model.stats.min[k]))
      throw Error(ErrorKind::DegenerateRange, "feature " + std::to_string(k) + " has the same energy in every training signal");

  for (std::size_t c = 0; c < dataset.size(); ++c) {
    std::vector<EnergyInterval> iv(features, {1.0, 0.0});
    for (const auto& v : raw[c]) {
      const auto e = normalize_energies(v, model.stats);
      for (std::size_t k = 0; k < features; ++k) {
        iv[k].lower = std::min(iv[k].lower, e[k]);
        iv[k].upper = std::max(iv[k].upper, e[k]);
      }
    }
    model.conditions[c].intervals = iv;
    model.conditions[c].svns = svns_from_interval(iv, cfg.ind_floor);
  }
  return model;
}

void DiagnosisModel::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ParseError, "invalid model: " + what); };
  if (version != kFormatVersion) throw Error(ErrorKind::VersionError, "unsupported model version " + std::to_string(version));
  if (conditions.size() < 2) fail("at least two conditions are required");
  const auto n = static_cast<std::size_t>(features.selected_modes);
  if (n == 0 || stats.min.size() != n || stats.max.size() != n || weights.size() != n) fail("feature counts disagree");
  for (std::size_t k = 0; k < n; ++k)
    if (!(stats.max[k] > stats.min[k])) fail("normalization range is degenerate");
  for (const auto& c : conditions) {
    if (c.svns.size() != n || c.intervals.size() != n) fail("condition '" + c.label + "' has the wrong feature count");
    if (c.mode_count < features.selected_modes) fail("condition '" + c.label + "' has too few modes");
  }
}

Diagnosis diagnose(const Signal& x, const DiagnosisModel& model) {
  model.validate();
  if (x.all_zero()) throw Error(ErrorKind::DegenerateSignal, "cannot diagnose an all-zero signal");

  // Conditions sharing (K, L) share one decomposition of x.
  std::map<std::pair<int, int>, Svns> by_params;
  Diagnosis out;
  for (const auto& c : model.conditions) {
    const std::pair<int, int> key{c.mode_count, c.filter_len};
    auto it = by_params.find(key);
    if (it == by_params.end()) {
      const auto f = extract_features(x, c.mode_count, c.filter_len, model.features);
      it = by_params.emplace(key, test_svns(normalize_energies(f.energies, model.stats), model.ind_floor)).first;
    }
    out.scores.push_back(weighted_svnce(it->second, c.svns, model.weights));
  }
  for (std::size_t k = 1; k < out.scores.size(); ++k)
    if (out.scores[k] < out.scores[out.index]) out.index = k;
  for (std::size_t k = 0; k < out.scores.size(); ++k)
    if (k != out.index && out.scores[k] == out.scores[out.index]) out.tie = true;
  out.label = model.conditions[out.index].label;
  return out;
}

}  // namespace fmdiag
