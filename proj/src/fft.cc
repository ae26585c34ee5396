#include "fft.h"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace boussctl::detail {
namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  int n = 0;
  fftw_complex* buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plan(int size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buf);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

Plan& plan_for(int n) {
  thread_local std::map<int, std::unique_ptr<Plan>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plan>(n)).first;
  return *it->second;
}

}  // namespace

void dft(std::span<std::complex<double>> data, int sign) {
  const int n = static_cast<int>(data.size());
  Plan& p = plan_for(n);
  std::memcpy(static_cast<void*>(p.buf), static_cast<const void*>(data.data()), sizeof(fftw_complex) * data.size());
  fftw_execute(sign > 0 ? p.backward : p.forward);
  std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(p.buf), sizeof(fftw_complex) * data.size());
}

}  // namespace boussctl::detail
