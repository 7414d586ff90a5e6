#include "autocorr/toeplitz.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace autocorr {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution with the
// new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t fft_length(std::size_t block) {
  std::size_t n = 1;
  while (n < 2 * block) n <<= 1;
  return n;
}

}  // namespace

void convolve_direct(const DiscretizedKernel& kernel, std::span<const double> in,
                     std::span<double> out) {
  if (in.size() != out.size())
    throw std::invalid_argument("convolve_direct: size mismatch");
  const std::size_t m = in.size();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      acc += kernel.at(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j)) * in[j];
    out[i] = kernel.delta * acc;
  }
}

struct ToeplitzConvolver::Fft {
  std::size_t length = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(std::size_t n) : length(n) {
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum, real, FFTW_ESTIMATE);
  }
  ~Fft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(spectrum);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

ToeplitzConvolver::ToeplitzConvolver(const DiscretizedKernel& kernel, std::size_t block)
    : block_(block), delta_(kernel.delta) {
  if (block == 0) throw std::invalid_argument("ToeplitzConvolver: empty block");
  if (block <= kDirectThreshold) {
    direct_taps_.resize(block);
    for (std::size_t d = 0; d < block; ++d) direct_taps_[d] = kernel.at(static_cast<std::ptrdiff_t>(d));
    return;
  }
  fft_ = std::make_unique<Fft>(fft_length(block));
  const std::size_t n = fft_->length;
  std::fill(fft_->real, fft_->real + n, 0.0);
  for (std::size_t d = 0; d < block; ++d) {
    const double v = kernel.at(static_cast<std::ptrdiff_t>(d));
    fft_->real[d] = v;
    if (d > 0) fft_->real[n - d] = v;
  }
  fftw_execute_dft_r2c(fft_->forward, fft_->real, fft_->spectrum);
  const double scale = delta_ / static_cast<double>(n);
  fft_->kernel_hat.resize(n / 2 + 1);
  for (std::size_t i = 0; i <= n / 2; ++i)
    fft_->kernel_hat[i] =
        std::complex<double>(fft_->spectrum[i][0], fft_->spectrum[i][1]) * scale;
}

ToeplitzConvolver::~ToeplitzConvolver() = default;
ToeplitzConvolver::ToeplitzConvolver(ToeplitzConvolver&&) noexcept = default;
ToeplitzConvolver& ToeplitzConvolver::operator=(ToeplitzConvolver&&) noexcept = default;

void ToeplitzConvolver::apply(std::span<const double> in, std::span<double> out) {
  if (in.size() != block_ || out.size() != block_)
    throw std::invalid_argument("ToeplitzConvolver: block size mismatch");
  if (!fft_) {
    for (std::size_t i = 0; i < block_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < block_; ++j)
        acc += direct_taps_[i > j ? i - j : j - i] * in[j];
      out[i] = delta_ * acc;
    }
    return;
  }
  const std::size_t n = fft_->length;
  std::copy(in.begin(), in.end(), fft_->real);
  std::fill(fft_->real + block_, fft_->real + n, 0.0);
  fftw_execute_dft_r2c(fft_->forward, fft_->real, fft_->spectrum);
  for (std::size_t i = 0; i <= n / 2; ++i) {
    const std::complex<double> x(fft_->spectrum[i][0], fft_->spectrum[i][1]);
    const std::complex<double> y = x * fft_->kernel_hat[i];
    fft_->spectrum[i][0] = y.real();
    fft_->spectrum[i][1] = y.imag();
  }
  fftw_execute_dft_c2r(fft_->backward, fft_->spectrum, fft_->real);
  std::copy(fft_->real, fft_->real + block_, out.begin());
}

}  // namespace autocorr
