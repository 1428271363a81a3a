#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace vffrls {

// Worker threads for Monte Carlo work; VFFRLS_THREADS caps it.
inline unsigned worker_count()
{
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (char const *env = std::getenv("VFFRLS_THREADS")) {
    try {
      int const cap = std::stoi(env);
      if (cap >= 1) { n = std::min(n, static_cast<unsigned>(cap)); }
    } catch (std::exception const &) {
    }
  }
  return n;
}

// Evaluates work(i) for i in [0, n) on worker threads and hands the results to consume(i, result)
// strictly in index order, so reductions are identical for any thread count.
template <typename Work, typename Consume> void ordered_parallel(std::int64_t n, Work work, Consume consume)
{
  using Result          = decltype(work(std::int64_t{0}));
  unsigned const threads = worker_count();
  if (threads == 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) { consume(i, work(i)); }
    return;
  }

  std::int64_t const batch = static_cast<std::int64_t>(threads) * 4;
  for (std::int64_t begin = 0; begin < n; begin += batch) {
    std::int64_t const               end = std::min(n, begin + batch);
    std::vector<std::optional<Result>> results(static_cast<std::size_t>(end - begin));
    std::vector<std::exception_ptr>    errors(results.size());
    std::atomic<std::int64_t>          next{begin};
    std::vector<std::thread>           pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::int64_t i = next++; i < end; i = next++) {
          auto const slot = static_cast<std::size_t>(i - begin);
          try {
            results[slot].emplace(work(i));
          } catch (...) {
            errors[slot] = std::current_exception();
          }
        }
      });
    }
    for (auto &th : pool) { th.join(); }
    for (std::size_t s = 0; s < results.size(); ++s) {
      if (errors[s]) { std::rethrow_exception(errors[s]); }
      consume(begin + static_cast<std::int64_t>(s), std::move(*results[s]));
    }
  }
}

template <typename T, typename Work> T ordered_parallel_sum(std::int64_t n, Work work, T zero)
{
  T total = std::move(zero);
  ordered_parallel(n, work, [&](std::int64_t, auto &&part) { total += part; });
  return total;
}

} // namespace vffrls
