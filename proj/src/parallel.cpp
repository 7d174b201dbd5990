#include "molchan/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace molchan {

unsigned worker_count_from_env()
{
    if (const char* value = std::getenv("MOLCHAN_THREADS")) {
        try {
            const long n = std::stol(value);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
            // fall through to auto
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

unsigned resolve_workers(unsigned requested)
{
    return requested > 0 ? requested : worker_count_from_env();
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task)
{
    if (count == 0) return;
    const std::size_t threads = std::min<std::size_t>(std::max(1U, workers), count);
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace molchan
