#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace edrlab::fft {

namespace detail {

// FFTW's planner is not reentrant.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

using Buffer = std::unique_ptr<fftw_complex, FftwFree>;

}  // namespace detail

// Unnormalised forward DFT: X_k = sum_j x_j exp(-2 pi i j k / n).
inline std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  detail::Buffer in(fftw_alloc_complex(n));
  detail::Buffer out(fftw_alloc_complex(n));
  if (!in || !out) throw std::bad_alloc();

  fftw_plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan = fftw_plan_dft_1d(n, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");

  auto* src = reinterpret_cast<std::complex<double>*>(in.get());
  std::copy(x.begin(), x.end(), src);
  fftw_execute(plan);

  const auto* dst = reinterpret_cast<const std::complex<double>*>(out.get());
  std::vector<std::complex<double>> result(dst, dst + n);
  {
    std::lock_guard lock(detail::planner_mutex());
    fftw_destroy_plan(plan);
  }
  return result;
}

}  // namespace edrlab::fft
