// avsr/base/parallel.h

// Copyright 2026  The AVSR Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef AVSR_BASE_PARALLEL_H_
#define AVSR_BASE_PARALLEL_H_

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace avsr {

// Worker count from the AVSR_WORKERS environment variable, else fallback.
inline int WorkersFromEnv(int fallback = 1) {
  const char *v = std::getenv("AVSR_WORKERS");
  if (v == nullptr || *v == '\0') return fallback;
  char *end = nullptr;
  long n = std::strtol(v, &end, 10);
  return (*end == '\0' && n >= 1 && n <= 256) ? static_cast<int>(n) : fallback;
}

// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; the first exception is rethrown after all threads join.
inline void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers && static_cast<size_t>(w) < n; ++w)
    threads.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace avsr

#endif  // AVSR_BASE_PARALLEL_H_
