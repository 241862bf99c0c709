// SPDX-License-Identifier: Apache-2.0
#include "vf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vf {

int worker_count()
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0)
        hw = 1;
    if (const char* env = std::getenv("VF_THREADS"))
    {
        int cap = std::atoi(env);
        if (cap > 0)
            hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_chunks(std::size_t n_chunks,
                     const std::function<void(std::size_t)>& fn)
{
    std::size_t nw = std::min<std::size_t>(worker_count(), n_chunks);
    if (nw <= 1)
    {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto work = [&] {
        for (std::size_t c = next++; c < n_chunks; c = next++)
        {
            try
            {
                fn(c);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err)
                    err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nw; ++i)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

}  // namespace vf
