#pragma once

// Artificial hummingbird algorithm over mixed integer/continuous boxes.
//
// Each iteration every bird picks a flight pattern (axial, diagonal or
// omnidirectional, uniformly) and then, with equal probability, either guided
// foraging toward the food source it has not visited for longest, or
// territorial foraging around its own source. Acceptance is greedy. Every
// 2 * pop_size iterations the worst bird migrates to a random position.
//
// The visit-table bookkeeping follows the reference formulation: a bird's
// row ages by one after each move, the visited target resets to zero, and a
// bird whose source improved becomes the most attractive target for everyone.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace fmdiag {

struct DimBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool integer = false;
};

class SearchSpace {
 public:
  explicit SearchSpace(std::vector<DimBounds> dims);

  std::size_t dims() const noexcept { return dims_.size(); }
  const DimBounds& operator[](std::size_t i) const noexcept { return dims_[i]; }

  // Clamp to the box and round integer dimensions into their integer range.
  void project(std::span<double> x) const;
  bool contains(std::span<const double> x) const;

 private:
  std::vector<DimBounds> dims_;
};

struct AhaConfig {
  std::size_t pop_size = 30;
  std::size_t max_iter = 20;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t migration_period() const noexcept { return 2 * pop_size; }
};

enum class FlightKind { Axial, Diagonal, Omnidirectional };

/// 0/1 direction mask of length d for the given flight pattern.
std::vector<std::uint8_t> flight_direction(FlightKind kind, std::size_t d, std::mt19937_64& rng);

/// m x m table of "iterations since bird i last visited source j".
class VisitTable {
 public:
  explicit VisitTable(std::size_t birds);

  std::size_t size() const noexcept { return n_; }
  long level(std::size_t i, std::size_t j) const { return levels_[i * n_ + j]; }

  // Most neglected source for bird i; ties go to the better (lower) fitness.
  std::size_t target_for(std::size_t i, std::span<const double> fitness) const;
  // Bird i finished a move; `visited` (if any) is the target it flew to.
  void after_move(std::size_t i, std::ptrdiff_t visited);
  // Bird i now holds a better source: make it the top target for all others.
  void promote(std::size_t i);

 private:
  std::size_t n_;
  std::vector<long> levels_;
};

struct OptResult {
  std::vector<double> best_position;
  double best_fitness = 0.0;
  std::vector<double> history;            // best fitness after each iteration
  std::vector<std::size_t> migrations;    // 1-based iterations at which migration fired
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` over `space`. Throws NumericalFailure if the
/// objective returns a non-finite value.
OptResult aha_minimize(const Objective& objective, const SearchSpace& space, const AhaConfig& cfg);

}  // namespace fmdiag
