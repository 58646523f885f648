#pragma once

// Single-valued neutrosophic sets and the symmetric cross-entropy used for
// minimum-argument classification. All logarithms are base 2.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fmdiag {

struct NeutroTriple {
  double truth = 0.0;
  double indeterminacy = 0.0;
  double falsity = 0.0;

  bool operator==(const NeutroTriple&) const = default;
};

/// One (truth, indeterminacy, falsity) triple per feature, each in [0, 1].
class Svns {
 public:
  Svns() = default;
  explicit Svns(std::vector<NeutroTriple> features);

  std::size_t size() const noexcept { return features_.size(); }
  const NeutroTriple& operator[](std::size_t i) const noexcept { return features_[i]; }
  const std::vector<NeutroTriple>& features() const noexcept { return features_; }

  bool operator==(const Svns&) const = default;

 private:
  std::vector<NeutroTriple> features_;
};

struct EnergyInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const EnergyInterval&) const = default;
};

inline constexpr double kDefaultIndeterminacyFloor = 0.01;

/// truth = LB, falsity = 1 - UB, indeterminacy = max(floor, 1 - falsity - LB).
Svns svns_from_interval(std::span<const EnergyInterval> intervals,
                        double ind_floor = kDefaultIndeterminacyFloor);

struct EntropyMeasure {
  double value = 0.0;
  double claimed_max = 0.0;  // 3 (1 - log2(5/3)) n
};

/// Neutrosophic entropy measure T_N, evaluated term by term.
EntropyMeasure tn_measure(const Svns& a);

/// Symmetric cross-entropy summed over the truth, indeterminacy and falsity
/// channels of every feature. Zero iff the sets are equal.
double svnce(const Svns& a, const Svns& b);

/// Per-channel cross-entropy term for memberships a, b in [0, 1].
double svnce_term(double a, double b);

/// Standard complement (falsity, 1 - indeterminacy, truth).
Svns complement(const Svns& a);

/// Cross-entropy with per-feature weights applied before summation.
double weighted_svnce(const Svns& test, const Svns& train, std::span<const double> weights);

struct LabeledSvns {
  std::string label;
  Svns set;
};

struct Classification {
  std::string label;
  std::size_t index = 0;
  std::vector<double> scores;  // one per template, declaration order
  bool tie = false;
};

/// Minimum-argument rule: the template with the smallest weighted cross-entropy
/// wins; exact ties go to the first declared template and set `tie`.
Classification classify_min_svnce(const Svns& test, std::span<const LabeledSvns> templates,
                                  std::span<const double> weights);

}  // namespace fmdiag
