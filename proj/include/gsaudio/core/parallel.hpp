#pragma once

#include <cstddef>
#include <functional>

namespace gsaudio::core {

/// Worker count used by parallel_for. Defaults to the hardware concurrency.
unsigned thread_count() noexcept;
void set_thread_count(unsigned threads) noexcept;

/// Splits [0, n) into contiguous ranges of at least `min_chunk` items and runs
/// `body(begin, end)` on each. Ranges never share output, so results do not
/// depend on the thread count.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace gsaudio::core
