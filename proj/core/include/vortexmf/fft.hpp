#pragma once

#include <complex>
#include <vector>

namespace vortexmf {

/// Minimal RAII wrapper over FFTW's complex 2D transforms on an n-by-n grid.
/// Plans are created with FFTW_ESTIMATE so results are deterministic across
/// runs. One instance per thread of control; execution on distinct buffers is
/// safe, plan creation is serialized internally.
class Fft2D {
 public:
  explicit Fft2D(int n);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  /// data[i*n + j] -> sum over (i,j) of data * e^{-i k.x}; unnormalized.
  void forward(std::complex<double>* data) const;
  /// data[k] -> sum over k of data * e^{+i k.x}; unnormalized, so
  /// inverse(forward(x)) = n^2 * x.
  void inverse(std::complex<double>* data) const;

  /// Signed wavevector component for grid index i (standard FFT layout).
  int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }
  /// Grid index holding wavevector k, valid for |k| < n/2.
  int index_of(int k) const { return k >= 0 ? k : k + n_; }

 private:
  int n_;
  void* plan_fw_;
  void* plan_bw_;
};

}  // namespace vortexmf
