#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace occsel {

// Index-addressed parallel loop. Work items must write only to slots keyed by
// their own index, so results are identical for any worker count; the
// schedule is invisible in the output. If several items throw, the
// lowest-index exception is rethrown.
inline void parallel_for(long long count, int threads,
                         const std::function<void(long long)>& body) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = int(std::min<long long>(threads, count));
  std::atomic<long long> next{0};
  std::vector<std::exception_ptr> errors;
  errors.resize(std::size_t(count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const long long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          errors[std::size_t(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (long long i = 0; i < count; ++i)
    if (errors[std::size_t(i)]) std::rethrow_exception(errors[std::size_t(i)]);
}

}  // namespace occsel
