#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "autocorr/weight.hpp"

namespace autocorr {

/// out_i = delta * sum_j w~(|i - j| delta) in_j, O(m^2) reference.
void convolve_direct(const DiscretizedKernel& kernel, std::span<const double> in,
                     std::span<double> out);

/// Symmetric Toeplitz matvec on a block of m cells via a zero-padded circulant
/// embedding and real FFTs.  Small blocks fall back to the direct sum.
///
/// An instance owns scratch buffers and is not safe for concurrent use; make one
/// per worker.  The kernel is only read during construction.
class ToeplitzConvolver {
 public:
  ToeplitzConvolver(const DiscretizedKernel& kernel, std::size_t block);
  ~ToeplitzConvolver();
  ToeplitzConvolver(ToeplitzConvolver&&) noexcept;
  ToeplitzConvolver& operator=(ToeplitzConvolver&&) noexcept;
  ToeplitzConvolver(const ToeplitzConvolver&) = delete;
  ToeplitzConvolver& operator=(const ToeplitzConvolver&) = delete;

  std::size_t block() const { return block_; }
  void apply(std::span<const double> in, std::span<double> out);

  static constexpr std::size_t kDirectThreshold = 48;

 private:
  struct Fft;

  std::size_t block_ = 0;
  double delta_ = 0.0;
  std::vector<double> direct_taps_;  // used below kDirectThreshold
  std::unique_ptr<Fft> fft_;
};

}  // namespace autocorr
