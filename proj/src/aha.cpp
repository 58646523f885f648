#include "fmdiag/aha.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fmdiag/error.hpp"

namespace fmdiag {

SearchSpace::SearchSpace(std::vector<DimBounds> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error(ErrorKind::InvalidArgument, "search space has no dimensions");
  for (const auto& d : dims_) {
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || d.upper < d.lower)
      throw Error(ErrorKind::InvalidArgument, "search space bounds must be finite with upper >= lower");
    if (d.integer && std::ceil(d.lower) > std::floor(d.upper))
      throw Error(ErrorKind::InvalidArgument, "integer dimension contains no integer");
  }
}

void SearchSpace::project(std::span<double> x) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    if (d.integer) {
      x[i] = std::clamp(std::round(x[i]), std::ceil(d.lower), std::floor(d.upper));
    } else {
      x[i] = std::clamp(x[i], d.lower, d.upper);
    }
  }
}

bool SearchSpace::contains(std::span<const double> x) const {
  if (x.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    if (!(x[i] >= d.lower && x[i] <= d.upper)) return false;
    if (d.integer && x[i] != std::round(x[i])) return false;
  }
  return true;
}

void AhaConfig::validate() const {
  if (pop_size < 2) throw Error(ErrorKind::InvalidConfig, "population must hold at least two birds");
  if (max_iter < 1) throw Error(ErrorKind::InvalidConfig, "max_iter must be at least 1");
}

std::vector<std::uint8_t> flight_direction(FlightKind kind, std::size_t d, std::mt19937_64& rng) {
  std::vector<std::uint8_t> mask(d, 0);
  if (d == 0) return mask;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (kind) {
    case FlightKind::Omnidirectional:
      std::fill(mask.begin(), mask.end(), 1);
      break;
    case FlightKind::Axial: {
      std::uniform_int_distribution<std::size_t> pick(0, d - 1);
      mask[pick(rng)] = 1;
      break;
    }
    case FlightKind::Diagonal: {
      // k = ceil(R (d - 2) + 1) lies in [2, d - 1] for d >= 3; d = 1, 2 fly on all axes.
      std::size_t k = d;
      if (d >= 3) {
        const double r = unit(rng);
        k = static_cast<std::size_t>(std::ceil(r * static_cast<double>(d - 2) + 1.0));
        k = std::clamp<std::size_t>(k, 2, d - 1);
      }
      std::vector<std::size_t> perm(d);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < k; ++i) mask[perm[i]] = 1;
      break;
    }
  }
  return mask;
}

VisitTable::VisitTable(std::size_t birds) : n_(birds), levels_(birds * birds, 0) {}

std::size_t VisitTable::target_for(std::size_t i, std::span<const double> fitness) const {
  std::size_t best = i == 0 ? 1 : 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j == i) continue;
    const long lj = level(i, j);
    const long lb = level(i, best);
    if (lj > lb || (lj == lb && fitness[j] < fitness[best])) best = j;
  }
  return best;
}

void VisitTable::after_move(std::size_t i, std::ptrdiff_t visited) {
  for (std::size_t j = 0; j < n_; ++j)
    if (j != i) ++levels_[i * n_ + j];
  if (visited >= 0) levels_[i * n_ + static_cast<std::size_t>(visited)] = 0;
}

void VisitTable::promote(std::size_t i) {
  for (std::size_t r = 0; r < n_; ++r) {
    if (r == i) continue;
    long row_max = 0;
    for (std::size_t j = 0; j < n_; ++j)
      if (j != r) row_max = std::max(row_max, levels_[r * n_ + j]);
    levels_[r * n_ + i] = row_max + 1;
  }
}

OptResult aha_minimize(const Objective& objective, const SearchSpace& space, const AhaConfig& cfg) {
  cfg.validate();
  const std::size_t d = space.dims();
  const std::size_t m = cfg.pop_size;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  OptResult result;
  auto evaluate = [&](std::span<const double> x) {
    const double f = objective(x);
    ++result.evaluations;
    if (!std::isfinite(f)) {
      std::ostringstream msg;
      msg << "objective returned a non-finite value at (";
      for (std::size_t k = 0; k < x.size(); ++k) msg << (k ? ", " : "") << x[k];
      msg << ")";
      throw Error(ErrorKind::NumericalFailure, msg.str());
    }
    return f;
  };
  auto random_position = [&] {
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = space[k].lower + unit(rng) * (space[k].upper - space[k].lower);
    space.project(x);
    return x;
  };

  std::vector<std::vector<double>> pos(m);
  std::vector<double> fit(m);
  for (std::size_t i = 0; i < m; ++i) {
    pos[i] = random_position();
    fit[i] = evaluate(pos[i]);
  }
  VisitTable table(m);

  std::size_t best_idx = static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  result.best_fitness = fit[best_idx];
  result.best_position = pos[best_idx];

  std::vector<double> cand(d);
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto kind = static_cast<FlightKind>(std::uniform_int_distribution<int>(0, 2)(rng));
      const auto dir = flight_direction(kind, d, rng);
      const bool guided = unit(rng) < 0.5;
      std::ptrdiff_t target = -1;
      if (guided) {
        target = static_cast<std::ptrdiff_t>(table.target_for(i, fit));
        const auto& xt = pos[static_cast<std::size_t>(target)];
        const double a = gauss(rng);
        for (std::size_t k = 0; k < d; ++k) cand[k] = xt[k] + a * dir[k] * (pos[i][k] - xt[k]);
      } else {
        const double b = gauss(rng);
        for (std::size_t k = 0; k < d; ++k) cand[k] = pos[i][k] + b * dir[k] * pos[i][k];
      }
      space.project(cand);
      const double f = evaluate(cand);
      table.after_move(i, target);
      if (f < fit[i]) {
        pos[i] = cand;
        fit[i] = f;
        table.promote(i);
      }
    }

    if (it % cfg.migration_period() == 0) {
      const std::size_t worst = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
      pos[worst] = random_position();
      fit[worst] = evaluate(pos[worst]);
      table.after_move(worst, -1);
      table.promote(worst);
      result.migrations.push_back(it);
    }

    for (std::size_t i = 0; i < m; ++i)
      if (fit[i] < result.best_fitness) {
        result.best_fitness = fit[i];
        result.best_position = pos[i];
      }
    result.history.push_back(result.best_fitness);
  }
  return result;
}

}  // namespace fmdiag
