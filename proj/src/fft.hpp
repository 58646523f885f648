#pragma once

// Thin RAII layer over FFTW. Transforms are unnormalized in both directions,
// matching FFTW's convention: backward(forward(x)) == n * x.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fmdiag::fft {

using cplx = std::complex<double>;

std::vector<cplx> forward(std::span<const cplx> x);
std::vector<cplx> backward(std::span<const cplx> x);

// Real input zero-padded to n; returns the n/2 + 1 non-negative bins.
std::vector<cplx> forward_real(std::span<const double> x, std::size_t n);
// Inverse of forward_real for a length-n real sequence.
std::vector<double> backward_real(std::span<const cplx> half_spectrum, std::size_t n);

// Linear (non-circular) autocorrelation sum_i x[i] x[i + k] for k < x.size().
std::vector<double> autocorrelation(std::span<const double> x);

std::size_t next_pow2(std::size_t n);
// Smallest 2^a 3^b 5^c >= n.
std::size_t smooth_size(std::size_t n);

}  // namespace fmdiag::fft
