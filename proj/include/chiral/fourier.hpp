#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "chiral/lattice.hpp"

namespace chiral::fourier {

/// Signed frequency of FFT bin k for a length-M transform; the Nyquist bin maps to M/2.
[[nodiscard]] inline long signed_frequency(long k, long M) noexcept { return k <= M / 2 ? k : k - M; }

/// Normalized forward transform: c_m = (1/M) sum_k x_k exp(-i 2 pi m k / M).
[[nodiscard]] inline std::vector<cplx> analyze(const std::vector<cplx>& samples) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, samples);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& x : out) x *= scale;
  return out;
}

/// d/dz of periodic samples on [0, L); the Nyquist bin is dropped for even M.
[[nodiscard]] inline Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& samples, double L) {
  const auto M = static_cast<long>(samples.size());
  std::vector<cplx> in(samples.data(), samples.data() + M);
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, in);
  for (long k = 0; k < M; ++k) {
    const long m = signed_frequency(k, M);
    if (M % 2 == 0 && k == M / 2) {
      spec[static_cast<std::size_t>(k)] = 0.0;
    } else {
      spec[static_cast<std::size_t>(k)] *= cplx(0.0, kTwoPi * static_cast<double>(m) / L);
    }
  }
  std::vector<cplx> back;
  fft.inv(back, spec);
  return Eigen::Map<Eigen::VectorXcd>(back.data(), M);
}

}  // namespace chiral::fourier
