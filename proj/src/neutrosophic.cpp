#include "fmdiag/neutrosophic.hpp"

#include <algorithm>
#include <cmath>

#include "fmdiag/error.hpp"

namespace fmdiag {
namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void require_same_size(const Svns& a, const Svns& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "neutrosophic sets differ in feature count");
}

double feature_term(const NeutroTriple& a, const NeutroTriple& b) {
  return svnce_term(a.truth, b.truth) + svnce_term(a.indeterminacy, b.indeterminacy) +
         svnce_term(a.falsity, b.falsity);
}

}  // namespace

Svns::Svns(std::vector<NeutroTriple> features) : features_(std::move(features)) {
  for (const auto& t : features_) {
    if (!in_unit(t.truth) || !in_unit(t.indeterminacy) || !in_unit(t.falsity))
      throw Error(ErrorKind::InvalidArgument, "neutrosophic membership outside [0, 1]");
    const double sum = t.truth + t.indeterminacy + t.falsity;
    if (!(sum >= 0.0 && sum <= 3.0)) throw Error(ErrorKind::InvalidArgument, "membership sum outside [0, 3]");
  }
}

Svns svns_from_interval(std::span<const EnergyInterval> intervals, double ind_floor) {
  if (!(ind_floor >= 0.0 && ind_floor <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "indeterminacy floor must lie in [0, 1]");
  std::vector<NeutroTriple> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    if (!(iv.lower >= 0.0 && iv.lower <= iv.upper && iv.upper <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "energy interval must satisfy 0 <= LB <= UB <= 1");
    const double fal = 1.0 - iv.upper;
    const double ind = std::max(ind_floor, 1.0 - fal - iv.lower);
    out.push_back({iv.lower, std::min(ind, 1.0), fal});
  }
  return Svns(std::move(out));
}

EntropyMeasure tn_measure(const Svns& a) {
  const double n = static_cast<double>(a.size());
  double value = 2.0 * n * std::log2(3.0 / 5.0);
  for (const auto& t : a.features()) {
    const double mu = t.truth;
    const double ind = t.indeterminacy;
    const double fal = t.falsity;
    value += std::log2(1.0 + 0.4 * std::sqrt(ind * (1.0 - ind)));
    value += (2.0 + mu + fal) / 3.0 * std::log2(1.0 + (2.0 + 2.0 * std::sqrt(mu * fal)) / (2.0 + mu + fal));
    value += (4.0 - mu - fal) / 3.0 *
             std::log2((2.0 + 2.0 * std::sqrt((1.0 - mu) * (1.0 - fal))) / (4.0 - mu - fal));
  }
  return {value, 3.0 * (1.0 - std::log2(5.0 / 3.0)) * n};
}

double svnce_term(double a, double b) {
  const double s = a + b;
  const double first = (2.0 + s) * std::log2((2.0 + s) / (0.5 * (4.0 + s + 2.0 * std::sqrt(a * b))));
  const double second =
      (4.0 - s) * std::log2((4.0 - s) / (0.5 * (6.0 - s + 2.0 * std::sqrt((1.0 - a) * (1.0 - b)))));
  // Each term is non-negative by AM-GM; clamp the rounding residue near a == b.
  return std::max(0.0, first + second);
}

double svnce(const Svns& a, const Svns& b) {
  require_same_size(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += feature_term(a[i], b[i]);
  return total;
}

Svns complement(const Svns& a) {
  std::vector<NeutroTriple> out;
  out.reserve(a.size());
  for (const auto& t : a.features()) out.push_back({t.falsity, 1.0 - t.indeterminacy, t.truth});
  return Svns(std::move(out));
}

double weighted_svnce(const Svns& test, const Svns& train, std::span<const double> weights) {
  require_same_size(test, train);
  if (weights.size() != test.size()) throw Error(ErrorKind::InvalidArgument, "weight count differs from feature count");
  double total = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be non-negative");
    if (weights[i] == 0.0) continue;
    total += weights[i] * feature_term(test[i], train[i]);
  }
  return total;
}

Classification classify_min_svnce(const Svns& test, std::span<const LabeledSvns> templates,
                                  std::span<const double> weights) {
  if (templates.empty()) throw Error(ErrorKind::InvalidArgument, "no templates to classify against");
  Classification out;
  out.scores.reserve(templates.size());
  for (const auto& t : templates) out.scores.push_back(weighted_svnce(test, t.set, weights));
  for (std::size_t k = 1; k < out.scores.size(); ++k) {
    if (out.scores[k] < out.scores[out.index]) {
      out.index = k;
    }
  }
  for (std::size_t k = 0; k < out.scores.size(); ++k)
    if (k != out.index && out.scores[k] == out.scores[out.index]) out.tie = true;
  out.label = templates[out.index].label;
  return out;
}

}  // namespace fmdiag
