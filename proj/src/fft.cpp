#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace fmdiag::fft {
namespace {

// The FFTW planner is not thread-safe; only fftw_execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using Buffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
Buffer<T> alloc(std::size_t n) {
  return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

std::vector<cplx> complex_transform(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto in = alloc<fftw_complex>(n);
  auto out = alloc<fftw_complex>(n);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = x[i].real();
    in[i][1] = x[i].imag();
  }
  fftw_execute(plan.get());
  std::vector<cplx> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> x) { return complex_transform(x, FFTW_FORWARD); }
std::vector<cplx> backward(std::span<const cplx> x) { return complex_transform(x, FFTW_BACKWARD); }

namespace {

// Plans and aligned buffers are cached per transform size; FMD calls the same
// sizes hundreds of times and plan creation plus page faults dominated.
struct RealPair {
  std::size_t n = 0;
  Buffer<double> real;
  Buffer<fftw_complex> half;
  Plan r2c;
  Plan c2r;
};

RealPair& real_pair(std::size_t n) {
  thread_local std::vector<std::unique_ptr<RealPair>> cache;
  for (auto& p : cache)
    if (p->n == n) return *p;
  if (cache.size() >= 8) cache.erase(cache.begin());
  auto p = std::make_unique<RealPair>();
  p->n = n;
  p->real = alloc<double>(n);
  p->half = alloc<fftw_complex>(n / 2 + 1);
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  p->r2c.reset(fftw_plan_dft_r2c_1d(len, p->real.get(), p->half.get(), FFTW_ESTIMATE));
  p->c2r.reset(fftw_plan_dft_c2r_1d(len, p->half.get(), p->real.get(), FFTW_ESTIMATE));
  cache.push_back(std::move(p));
  return *cache.back();
}

}  // namespace

std::vector<cplx> forward_real(std::span<const double> x, std::size_t n) {
  const std::size_t bins = n / 2 + 1;
  auto& p = real_pair(n);
  const std::size_t m = std::min(n, x.size());
  std::copy_n(x.begin(), m, p.real.get());
  std::fill(p.real.get() + m, p.real.get() + n, 0.0);
  fftw_execute(p.r2c.get());
  std::vector<cplx> result(bins);
  for (std::size_t i = 0; i < bins; ++i) result[i] = {p.half[i][0], p.half[i][1]};
  return result;
}

std::vector<double> backward_real(std::span<const cplx> half_spectrum, std::size_t n) {
  const std::size_t bins = n / 2 + 1;
  auto& p = real_pair(n);
  // c2r destroys its input, which is the cached scratch buffer here.
  for (std::size_t i = 0; i < bins; ++i) {
    const cplx v = i < half_spectrum.size() ? half_spectrum[i] : cplx{};
    p.half[i][0] = v.real();
    p.half[i][1] = v.imag();
  }
  fftw_execute(p.c2r.get());
  return std::vector<double>(p.real.get(), p.real.get() + n);
}

std::vector<double> autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t nfft = smooth_size(2 * n - 1);
  auto& p = real_pair(nfft);
  std::copy(x.begin(), x.end(), p.real.get());
  std::fill(p.real.get() + n, p.real.get() + nfft, 0.0);
  fftw_execute(p.r2c.get());
  for (std::size_t i = 0; i < nfft / 2 + 1; ++i) {
    p.half[i][0] = p.half[i][0] * p.half[i][0] + p.half[i][1] * p.half[i][1];
    p.half[i][1] = 0.0;
  }
  fftw_execute(p.c2r.get());
  std::vector<double> r(p.real.get(), p.real.get() + n);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (double& v : r) v *= scale;
  return r;
}

std::size_t smooth_size(std::size_t n) {
  std::size_t best = next_pow2(n);
  for (std::size_t p5 = 1; p5 < best; p5 *= 5)
    for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
      std::size_t v = p35;
      while (v < n) v *= 2;
      best = std::min(best, v);
    }
  return best;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace fmdiag::fft
