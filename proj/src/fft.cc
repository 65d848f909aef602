#include "pvq/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "pvq/error.h"

namespace pvq {
namespace {

// The FFTW planner is not thread-safe; execution with a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t size) : size_(size) {
  if (!is_power_of_two(size) || size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fft size must be a power of two >= 2");
  }
  std::vector<double> in(size);
  std::vector<std::complex<double>> out(size / 2 + 1);
  std::lock_guard lock(planner_mutex());
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(size), in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw Error(ErrorCode::kInternal, "fftw planning failed");
  plan_ = std::shared_ptr<void>(p, [](void* q) {
    std::lock_guard inner(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(q));
  });
}

void Fft::power_spectrum(std::span<const double> input, std::span<double> power, Scratch& scratch) const {
  scratch.input.assign(size_, 0.0);
  std::copy_n(input.begin(), std::min(input.size(), size_), scratch.input.begin());
  scratch.output.resize(size_ / 2 + 1);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_.get()), scratch.input.data(),
                       reinterpret_cast<fftw_complex*>(scratch.output.data()));
  for (std::size_t k = 0; k <= size_ / 2; ++k) power[k] = std::norm(scratch.output[k]);
}

}  // namespace pvq
