#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference used by
// the tests and the benchmark; the OpenMP versions must reproduce it bitwise.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rigidity {

enum class Exec { serial, parallel };

/// Cap the number of OpenMP workers (0 keeps the runtime default).
void set_thread_count(int threads);
int thread_count();

namespace kernels {

/// Real DFT of uniformly sampled periodic data f(2*pi*i/N):
///   f ~ a[0] + sum_{k>=1} a[k] cos(k t) + b[k] sin(k t),  k < N/2.
/// The Nyquist term is dropped.
struct RealSpectrum {
  std::vector<double> a;
  std::vector<double> b;
};

RealSpectrum real_dft_serial(std::span<const double> samples);
RealSpectrum real_dft_parallel(std::span<const double> samples);
RealSpectrum real_dft(std::span<const double> samples, Exec exec);

/// out[i] = fn(i) for i in [0, n). Each entry is computed independently, so
/// serial and parallel results are identical.
void tabulate_serial(std::size_t n, const std::function<double(std::size_t)>& fn,
                     std::span<double> out);
void tabulate_parallel(std::size_t n, const std::function<double(std::size_t)>& fn,
                       std::span<double> out);
void tabulate(std::size_t n, const std::function<double(std::size_t)>& fn,
              std::span<double> out, Exec exec);

/// Maximum of a nonnegative row-wise quantity (0 for no rows); rows are evaluated independently and the
/// max is taken in ascending row order.
double max_over_rows_serial(std::size_t rows, const std::function<double(std::size_t)>& row_value);
double max_over_rows_parallel(std::size_t rows, const std::function<double(std::size_t)>& row_value);
double max_over_rows(std::size_t rows, const std::function<double(std::size_t)>& row_value,
                     Exec exec);

/// Fixed-order pairwise summation (deterministic regardless of threading).
double pairwise_sum(std::span<const double> values);

}  // namespace kernels
}  // namespace rigidity
