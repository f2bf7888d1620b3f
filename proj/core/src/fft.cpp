// SPDX-License-Identifier: Apache-2.0
#include "uwlink/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace uwlink::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One cached in-place plan per (size, direction), with an owned aligned buffer.
struct PlanCache {
  struct Entry {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
    int n = 0;
  };
  std::unordered_map<long long, Entry> entries;

  Entry& get(int n, int sign) {
    const long long key = (static_cast<long long>(n) << 1) | (sign == FFTW_BACKWARD ? 1 : 0);
    auto it = entries.find(key);
    if (it != entries.end()) return it->second;
    std::lock_guard<std::mutex> lock(planner_mutex());
    Entry e;
    e.n = n;
    e.buf = fftw_alloc_complex(static_cast<size_t>(n));
    e.plan = fftw_plan_dft_1d(n, e.buf, e.buf, sign, FFTW_ESTIMATE);
    return entries.emplace(key, e).first->second;
  }

  ~PlanCache() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [k, e] : entries) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.buf);
    }
  }
};

void execute(std::span<cd> data, int sign) {
  thread_local PlanCache cache;
  const int n = static_cast<int>(data.size());
  if (n <= 1) return;
  auto& e = cache.get(n, sign);
  std::memcpy(e.buf, static_cast<const void*>(data.data()), sizeof(cd) * data.size());
  fftw_execute(e.plan);
  std::memcpy(static_cast<void*>(data.data()), e.buf, sizeof(cd) * data.size());
}

void scale(std::span<cd> data, double s) {
  for (auto& v : data) v *= s;
}

}  // namespace

void forward_raw(std::span<cd> data) { execute(data, FFTW_FORWARD); }

void inverse_raw(std::span<cd> data) {
  execute(data, FFTW_BACKWARD);
  scale(data, 1.0 / static_cast<double>(data.empty() ? 1 : data.size()));
}

void forward_unitary(std::span<cd> data) {
  execute(data, FFTW_FORWARD);
  scale(data, 1.0 / std::sqrt(static_cast<double>(data.empty() ? 1 : data.size())));
}

void inverse_unitary(std::span<cd> data) {
  execute(data, FFTW_BACKWARD);
  scale(data, 1.0 / std::sqrt(static_cast<double>(data.empty() ? 1 : data.size())));
}

}  // namespace uwlink::fft
