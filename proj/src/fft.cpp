#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace gclab::detail {
namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  explicit Plan(std::size_t n) : n(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buffer = fftw_alloc_complex(n);
    forward = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  std::size_t n;
  fftw_complex* buffer;
  fftw_plan forward;
  fftw_plan backward;
};

Plan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
         bool inverse) {
  Plan& p = plan_for(in.size());
  auto* buf = reinterpret_cast<std::complex<double>*>(p.buffer);
  std::copy(in.begin(), in.end(), buf);
  fftw_execute(inverse ? p.backward : p.forward);
  std::copy(buf, buf + p.n, out.begin());
}

}  // namespace

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(in, out, false);
}

void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(in, out, true);
}

}  // namespace gclab::detail
