#include "sohb/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace sohb {

unsigned default_thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SOHB_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) hw = std::min(hw, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain) {
    if (threads == 0) threads = default_thread_count();
    const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(1, n / std::max<std::size_t>(1, grain)));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        pool.emplace_back([&, w, b, e] {
            try {
                if (b < e) body(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace sohb
