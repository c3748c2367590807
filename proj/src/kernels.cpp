#include "rigidity/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rigidity {

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {
namespace {

std::vector<double> cos_table(std::size_t n) {
  std::vector<double> table(n);
  for (std::size_t m = 0; m < n; ++m)
    table[m] = std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  return table;
}

std::vector<double> sin_table(std::size_t n) {
  std::vector<double> table(n);
  for (std::size_t m = 0; m < n; ++m)
    table[m] = std::sin(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  return table;
}

// One coefficient pair; shared by both DFT variants so the summation order is fixed.
void dft_mode(std::span<const double> f, const std::vector<double>& ct,
              const std::vector<double>& st, std::size_t k, double& a, double& b) {
  const std::size_t n = f.size();
  double sa = 0.0;
  double sb = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += f[i] * ct[idx];
    sb += f[i] * st[idx];
    idx += k;
    if (idx >= n) idx -= n;
  }
  const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n);
  a = sa * scale;
  b = sb * scale;
}

}  // namespace

RealSpectrum real_dft_serial(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const std::size_t modes = (n + 1) / 2;
  const auto ct = cos_table(n);
  const auto st = sin_table(n);
  RealSpectrum out{std::vector<double>(modes), std::vector<double>(modes)};
  for (std::size_t k = 0; k < modes; ++k) dft_mode(samples, ct, st, k, out.a[k], out.b[k]);
  out.b[0] = 0.0;
  return out;
}

RealSpectrum real_dft_parallel(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const std::size_t modes = (n + 1) / 2;
  const auto ct = cos_table(n);
  const auto st = sin_table(n);
  RealSpectrum out{std::vector<double>(modes), std::vector<double>(modes)};
  const auto count = static_cast<long>(modes);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    dft_mode(samples, ct, st, kk, out.a[kk], out.b[kk]);
  }
  out.b[0] = 0.0;
  return out;
}

RealSpectrum real_dft(std::span<const double> samples, Exec exec) {
  return exec == Exec::parallel ? real_dft_parallel(samples) : real_dft_serial(samples);
}

void tabulate_serial(std::size_t n, const std::function<double(std::size_t)>& fn,
                     std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
}

void tabulate_parallel(std::size_t n, const std::function<double(std::size_t)>& fn,
                       std::span<double> out) {
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
}

void tabulate(std::size_t n, const std::function<double(std::size_t)>& fn, std::span<double> out,
              Exec exec) {
  if (exec == Exec::parallel)
    tabulate_parallel(n, fn, out);
  else
    tabulate_serial(n, fn, out);
}

double max_over_rows_serial(std::size_t rows, const std::function<double(std::size_t)>& row_value) {
  double best = 0.0;
  for (std::size_t i = 0; i < rows; ++i) best = std::max(best, row_value(i));
  return best;
}

double max_over_rows_parallel(std::size_t rows,
                              const std::function<double(std::size_t)>& row_value) {
  std::vector<double> values(rows);
  tabulate_parallel(rows, row_value, values);
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

double max_over_rows(std::size_t rows, const std::function<double(std::size_t)>& row_value,
                     Exec exec) {
  return exec == Exec::parallel ? max_over_rows_parallel(rows, row_value)
                                : max_over_rows_serial(rows, row_value);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace kernels
}  // namespace rigidity
