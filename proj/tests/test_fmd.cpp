#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fmdiag/dsp.hpp"
#include "fmdiag/error.hpp"
#include "fmdiag/fmd.hpp"
#include "fmdiag/sigsim.hpp"
#include "oracles.hpp"

using namespace fmdiag;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an fmdiag::Error");
  return ErrorKind::InvalidArgument;
}

std::vector<double> taps_of(const FirFilter& f) { return {f.taps().begin(), f.taps().end()}; }

Signal impulse_train(std::size_t n, std::size_t period, std::size_t offset = 0) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i = offset; i < n; i += period) x[i] = 1.0;
  return Signal(std::move(x), 1.0);
}

Signal noisy_fault(std::uint64_t seed, double duration = 1.0, double snr_db = 0.0) {
  BearingSimConfig cfg;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.noise_std = noise_std_for_snr(cfg, snr_db);
  return simulate_bearing(cfg);
}

}  // namespace

TEST_CASE("filter bank design") {
  SUBCASE("single band is all-pass in shape") {
    const auto bank = init_filter_bank(1, 21, 1000.0);
    REQUIRE(bank.size() == 1);
    const auto t = taps_of(bank[0]);
    CHECK(bank[0].norm() == doctest::Approx(1.0));
    const double dc = oracle::response(t, 0.0, 1000.0);
    CHECK(oracle::response(t, 250.0, 1000.0) == doctest::Approx(dc));
    CHECK(oracle::response(t, 500.0, 1000.0) == doctest::Approx(dc));
  }
  SUBCASE("two bands split at fs/4") {
    const auto bank = init_filter_bank(2, 21, 1000.0);
    REQUIRE(bank.size() == 2);
    CHECK(bank[0].band()->low_hz == 0.0);
    CHECK(bank[0].band()->high_hz == doctest::Approx(250.0));
    CHECK(bank[1].band()->low_hz == doctest::Approx(250.0));
    CHECK(bank[1].band()->high_hz == doctest::Approx(500.0));
    const auto lo = taps_of(bank[0]);
    const auto hi = taps_of(bank[1]);
    CHECK(oracle::response(lo, 50.0, 1000.0) > oracle::response(lo, 450.0, 1000.0));
    CHECK(oracle::response(hi, 450.0, 1000.0) > oracle::response(hi, 50.0, 1000.0));
  }
  SUBCASE("seven bands at 19.2 kHz") {
    const auto bank = init_filter_bank(7, 30, 19200.0);
    REQUIRE(bank.size() == 7);
    for (const auto& f : bank) {
      CHECK(f.size() == 30);
      CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto t = taps_of(bank[3]);
    double best_f = 0.0, best = -1.0;
    for (double f = 0.0; f <= 9600.0; f += 1.0) {
      const double r = oracle::response(t, f, 19200.0);
      if (r > best) {
        best = r;
        best_f = f;
      }
    }
    CHECK(best_f >= 4114.3);
    CHECK(best_f <= 5485.7);
    CHECK(bank[3].band()->low_hz == doctest::Approx(4114.2857).epsilon(1e-6));
  }
  SUBCASE("filters are symmetric") {
    for (const auto& f : init_filter_bank(5, 25, 8000.0)) {
      const auto t = taps_of(f);
      for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(t[t.size() - 1 - i]).epsilon(1e-12));
    }
  }
  CHECK(kind_of([] { init_filter_bank(0, 21, 1000.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { init_filter_bank(3, 1, 1000.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("correlated kurtosis closed forms") {
  const auto train = impulse_train(20 * 50, 50);
  CHECK(std::abs(correlated_kurtosis(train, 50) - 19.0 / 400.0) < 1e-12);
  CHECK(correlated_kurtosis(train, 53) == 0.0);

  const std::size_t n = 500, t = 40;
  const Signal c(std::vector<double>(n, 3.0), 1.0);
  CHECK(correlated_kurtosis(c, t) ==
        doctest::Approx(static_cast<double>(n - t) / static_cast<double>(n * n)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::gaussian(300, rng);
    for (int order : {1, 2}) {
      const double got = correlated_kurtosis(Signal(x, 1.0), 17, order);
      CHECK(oracle::rel_err(got, oracle::correlated_kurtosis(x, 17, order)) < 1e-12);
    }
  }
  CHECK(kind_of([&] { correlated_kurtosis(train, 0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { correlated_kurtosis(Signal(std::vector<double>(10, 0.0), 1.0), 2); }) ==
        ErrorKind::DegenerateSignal);
}

TEST_CASE("deconvolution step") {
  SUBCASE("delta is a fixed point on a clean impulse train") {
    const auto x = impulse_train(4000, 97, 11);
    std::vector<double> delta(30, 0.0);
    delta[0] = 1.0;
    const auto f = mckd_update_step(x, FirFilter(delta), 97);
    const double cosang = std::abs(f.taps()[0]);
    CHECK(std::acos(std::min(1.0, cosang)) < 0.1);
    CHECK(f.norm() == doctest::Approx(1.0));
  }
  SUBCASE("constant input is regularized") {
    const Signal x(std::vector<double>(500, 1.0), 1.0);
    const auto f = mckd_update_step(x, FirFilter(std::vector<double>(20, 1.0)), 30);
    CHECK(f.norm() == doctest::Approx(1.0));
    for (double v : f.taps()) CHECK(std::isfinite(v));
  }
  SUBCASE("correlated kurtosis rarely decreases") {
    int ascents = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto x = noisy_fault(seed, 0.5);
      const std::size_t period = static_cast<std::size_t>(std::lround(19200.0 / 12.34));
      std::mt19937_64 rng(seed);
      const FirFilter f0 = FirFilter(oracle::gaussian(30, rng)).normalized();
      const double before = correlated_kurtosis(convolve_valid(x, f0), period);
      const auto f1 = mckd_update_step(x, f0, period);
      const double after = correlated_kurtosis(convolve_valid(x, f1), period);
      ascents += after >= before;
    }
    CHECK(ascents >= 45);
  }
  SUBCASE("cached deconvolver agrees with the one-shot step") {
    const auto x = noisy_fault(4, 0.25);
    const auto f0 = init_filter_bank(7, 30, 19200.0)[2];
    const CkDeconvolver d(x, 30);
    CHECK(d.update(f0, 800) == mckd_update_step(x, f0, 800));
    CHECK(d.update(f0, convolve_valid(x, f0), 800) == d.update(f0, 800));
  }
  const auto x = impulse_train(100, 10);
  CHECK(kind_of([&] { CkDeconvolver(x, 20).update(FirFilter(std::vector<double>(21, 1.0)), 10); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { CkDeconvolver(x, 20).update(FirFilter(std::vector<double>(20, 1.0)), 90); }) ==
        ErrorKind::SignalTooShort);
}

TEST_CASE("config validation") {
  FmdConfig cfg;
  CHECK(cfg.effective_bank_size() == 7);
  CHECK(cfg.effective_min_lag() == 30);
  cfg.mode_count = 8;
  CHECK(cfg.effective_bank_size() == 8);

  auto kind = [](auto mutate) {
    FmdConfig c;
    mutate(c);
    return kind_of([&] { c.validate(); });
  };
  CHECK(kind([](FmdConfig& c) { c.mode_count = 9; }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) { c.mode_count = 2; }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) { c.filter_len = 19; }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) { c.filter_len = 51; }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) {
          c.mode_count = 6;
          c.bank_size = 5;
        }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) { c.max_iter = 0; }) == ErrorKind::InvalidConfig);
  CHECK(kind([](FmdConfig& c) { c.ridge = 0.0; }) == ErrorKind::InvalidConfig);
  FmdConfig loose;
  loose.mode_count = 2;
  loose.filter_len = 8;
  loose.unchecked_domain = true;
  CHECK_NOTHROW(loose.validate());
}

TEST_CASE("decomposition contract") {
  const auto x = noisy_fault(2, 0.5);
  FmdConfig cfg;
  cfg.max_iter = 5;
  const auto r = fmd_decompose(x, cfg);
  REQUIRE(r.modes.size() == 3);
  for (const auto& m : r.modes) {
    CHECK(m.samples.size() == x.size() - 29);
    CHECK(m.period >= 30);
    CHECK(m.ck >= 0.0);
    CHECK(m.filter.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Seven filters reduced to three: five cycles, four merges.
  REQUIRE(r.cycles.size() == 5);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(r.cycles[c].bank_size == static_cast<int>(7 - c));
    CHECK(r.cycles[c].iterations == 5);
    REQUIRE(r.cycles[c].merge);
    CHECK(r.cycles[c].merge->abs_cc >= 0.0);
    CHECK(r.cycles[c].merge->abs_cc <= 1.0);
    const auto& ck = r.cycles[c].ck;
    CHECK(ck[r.cycles[c].merge->kept] >= ck[r.cycles[c].merge->dropped]);
  }
  CHECK_FALSE(r.cycles.back().merge);

  CHECK(fmd_decompose(x, cfg).modes[0].samples == r.modes[0].samples);
}

TEST_CASE("bank size equal to K runs a single cycle") {
  const auto x = noisy_fault(5, 0.25);
  FmdConfig cfg;
  cfg.mode_count = 5;
  cfg.bank_size = 5;
  cfg.max_iter = 3;
  const auto r = fmd_decompose(x, cfg);
  CHECK(r.modes.size() == 5);
  REQUIRE(r.cycles.size() == 1);
  CHECK_FALSE(r.cycles[0].merge);
  CHECK(r.cycles[0].iterations == 3);
}

TEST_CASE("path snapshots equal standalone runs") {
  const auto x = noisy_fault(6, 0.3);
  FmdConfig cfg;
  cfg.max_iter = 4;
  std::vector<std::pair<int, DecompositionResult>> seen;
  fmd_decompose_path(x, cfg, [&](int k, const DecompositionResult& r) { seen.emplace_back(k, r); });
  REQUIRE(seen.size() == 5);
  for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i].first == 7 - static_cast<int>(i));
  for (const auto& [k, snap] : seen) {
    FmdConfig one = cfg;
    one.mode_count = k;
    one.bank_size = 7;
    const auto direct = fmd_decompose(x, one);
    REQUIRE(direct.modes.size() == snap.modes.size());
    for (std::size_t m = 0; m < direct.modes.size(); ++m) {
      CHECK(direct.modes[m].samples == snap.modes[m].samples);
      CHECK(direct.modes[m].period == snap.modes[m].period);
    }
    CHECK(direct.cycles.size() == snap.cycles.size());
  }
}

TEST_CASE("decomposition is scale-equivariant") {
  const auto x = noisy_fault(7, 0.25);
  std::vector<double> doubled(x.values());
  for (double& v : doubled) v *= 2.0;
  FmdConfig cfg;
  cfg.max_iter = 3;
  const auto a = fmd_decompose(x, cfg);
  const auto b = fmd_decompose(Signal(doubled, x.sample_rate()), cfg);
  for (std::size_t m = 0; m < a.modes.size(); ++m) {
    CHECK(a.modes[m].filter == b.modes[m].filter);
    CHECK(a.modes[m].period == b.modes[m].period);
  }
}

TEST_CASE("slow fault behind a strong shaft tone") {
  BearingSimConfig sim;
  sim.fault_freq = 4.45;
  sim.shaft_amplitude = 2.0;
  sim.seed = 3;
  sim.noise_std = 0.5 * noise_std_for_snr(sim, 0.0);
  const auto x = simulate_bearing(sim);
  FmdConfig cfg;
  cfg.mode_count = 3;
  cfg.filter_len = 30;
  cfg.bank_size = 5;
  const auto r = fmd_decompose(x, cfg);
  bool found = false;
  for (const auto& m : r.modes) found = found || std::abs(static_cast<long>(m.period) - 4315L) <= 2;
  CHECK(found);
}

TEST_CASE("decomposition errors") {
  FmdConfig cfg;
  FmdConfig too_many;
  too_many.mode_count = 8;
  too_many.bank_size = 7;
  CHECK(kind_of([&] { fmd_decompose(noisy_fault(1, 0.25), too_many); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { fmd_decompose(Signal(std::vector<double>(119, 1.0), 1.0), cfg); }) ==
        ErrorKind::SignalTooShort);
  CHECK(kind_of([&] { fmd_decompose(Signal(std::vector<double>(2000, 0.0), 1.0), cfg); }) ==
        ErrorKind::DegenerateSignal);
}
