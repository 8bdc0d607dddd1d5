#include "vortexmf/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace vortexmf {

namespace {
// The FFTW planner mutates global state; executing plans is thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2D::Fft2D(int n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Fft2D: n must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  // In-place guru plans bound at execute time via fftw_execute_dft.
  fftw_complex* tmp = fftw_alloc_complex(size());
  plan_fw_ = fftw_plan_dft_2d(n_, n_, tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bw_ = fftw_plan_dft_2d(n_, n_, tmp, tmp, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(tmp);
  if (plan_fw_ == nullptr || plan_bw_ == nullptr) {
    throw std::runtime_error("Fft2D: plan creation failed");
  }
}

Fft2D::~Fft2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fw_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bw_));
}

void Fft2D::forward(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fw_), d, d);
}

void Fft2D::inverse(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bw_), d, d);
}

}  // namespace vortexmf
