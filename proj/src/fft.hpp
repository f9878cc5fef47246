#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace wapf::detail {

/// Real-to-complex FFT on a 1-3 dimensional grid stored x fastest. Plans are
/// built once with FFTW_ESTIMATE, so repeated transforms are deterministic.
class RealFft {
 public:
  RealFft(std::array<int, 3> shape, int dim);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }
  /// Number of stored modes along x (n_x/2 + 1).
  int complex_nx() const { return shape_[0] / 2 + 1; }
  const std::array<int, 3>& shape() const { return shape_; }

  void forward(const double* in, std::complex<double>* out) const;
  /// Unnormalised inverse; the caller divides by real_size().
  void inverse(const std::complex<double>* in, double* out) const;

 private:
  std::array<int, 3> shape_;
  std::size_t real_size_;
  std::size_t complex_size_;
  double* rbuf_ = nullptr;
  void* cbuf_ = nullptr;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace wapf::detail
