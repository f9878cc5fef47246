#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace wapf::detail {
namespace {
// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::array<int, 3> shape, int dim) : shape_{1, 1, 1} {
  for (int a = 0; a < dim; ++a) shape_[a] = shape[a];
  real_size_ = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  complex_size_ = static_cast<std::size_t>(complex_nx()) * shape_[1] * shape_[2];
  rbuf_ = fftw_alloc_real(real_size_);
  auto* c = fftw_alloc_complex(complex_size_);
  cbuf_ = c;
  // FFTW wants the slowest axis first.
  int n[3];
  for (int a = 0; a < dim; ++a) n[a] = shape_[dim - 1 - a];
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c(dim, n, rbuf_, c, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r(dim, n, c, rbuf_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  std::memcpy(rbuf_, in, real_size_ * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), cbuf_, complex_size_ * sizeof(fftw_complex));
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
  std::memcpy(cbuf_, static_cast<const void*>(in), complex_size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(inv_));
  std::memcpy(out, rbuf_, real_size_ * sizeof(double));
}

}  // namespace wapf::detail
