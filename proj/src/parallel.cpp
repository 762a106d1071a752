#include "knt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace knt
{
namespace
{
std::atomic<int> g_threads{1};
}

int default_threads()
{
    return g_threads.load();
}

void set_default_threads(int n)
{
    g_threads.store(std::max(1, n));
}

void parallel_for(std::size_t n, std::function<void(std::size_t)> const& body,
                  int threads)
{
    if (threads <= 0)
        threads = default_threads();
    std::size_t nt = std::min<std::size_t>(threads, n);
    if (nt <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t)
    {
        pool.emplace_back([&, t] {
            try
            {
                for (std::size_t i = t; i < n; i += nt)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err)
                    err = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

}  // namespace knt
