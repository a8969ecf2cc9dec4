#include "rankhc/parallel.hpp"

#include <atomic>

namespace rankhc {

namespace {
std::atomic<std::size_t> g_max_threads{0};
}

std::size_t max_threads() {
    const std::size_t cap = g_max_threads.load();
    if (cap > 0) return cap;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void set_max_threads(std::size_t threads) { g_max_threads.store(threads); }

}  // namespace rankhc
