#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace gpdrift::exp {

/// out[i] = f(i) for i < count, on `workers` threads with contiguous blocks.
/// Each result depends only on its index, so the output is the same for any
/// worker count. If several indices throw, the lowest one is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, std::size_t workers, F&& f) {
  std::vector<R> out(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, count);

  auto run_block = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
        error_index[w] = i;
        return;
      }
    }
  };

  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run_block, w);
    for (auto& t : threads) t.join();
  }
  const auto first = std::min_element(error_index.begin(), error_index.end());
  if (*first < count) std::rethrow_exception(errors[static_cast<std::size_t>(first - error_index.begin())]);
  return out;
}

}  // namespace gpdrift::exp
