#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dmvo
{
    /// Resolves a requested worker count; 0 means hardware concurrency.
    inline std::size_t resolve_threads(std::size_t requested)
    {
        if (requested != 0)
            return requested;
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    /**
     * Calls fn(i) for i in [0, n) across `threads` workers in contiguous chunks.
     * fn must only write to per-index state; callers reduce afterwards in index
     * order so results do not depend on the worker count.
     */
    template <typename Fn>
    void parallel_for(std::size_t n, std::size_t threads, Fn &&fn)
    {
        threads = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
        if (threads <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        {
            std::vector<std::jthread> workers;
            workers.reserve(threads);
            const std::size_t chunk = (n + threads - 1) / threads;
            for (std::size_t w = 0; w < threads; ++w)
            {
                const std::size_t begin = w * chunk;
                const std::size_t end = std::min(n, begin + chunk);
                if (begin >= end)
                    break;
                workers.emplace_back([&, begin, end] {
                    try
                    {
                        for (std::size_t i = begin; i < end; ++i)
                            fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                });
            }
        }
        if (error)
            std::rethrow_exception(error);
    }
}
