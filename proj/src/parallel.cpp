#include "bmprior/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace bmprior {
namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("BMPRIOR_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned> g_threads{0};

}  // namespace

unsigned thread_count() {
    unsigned n = g_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        n = default_threads();
        g_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_thread_count(unsigned n) { g_threads.store(n == 0 ? default_threads() : n); }

}  // namespace bmprior
