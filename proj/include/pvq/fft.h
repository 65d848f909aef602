#ifndef PVQ_FFT_H_
#define PVQ_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pvq {

/// Real-input FFT of a fixed power-of-two size, backed by an FFTW plan.
/// power_spectrum() is const and may be shared across threads as long as
/// each thread passes its own scratch buffers.
class Fft {
 public:
  explicit Fft(std::size_t size);

  std::size_t size() const { return size_; }

  struct Scratch {
    std::vector<double> input;
    std::vector<std::complex<double>> output;
  };

  /// |X[k]|^2 for k = 0..size/2 of the zero-padded real input.
  void power_spectrum(std::span<const double> input, std::span<double> power, Scratch& scratch) const;

 private:
  std::size_t size_;
  std::shared_ptr<void> plan_;
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace pvq

#endif  // PVQ_FFT_H_
