#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>

namespace randop::harness {

template <class Fn>
auto replicate(std::int64_t reps, std::uint64_t master_seed, unsigned threads, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{}, std::uint64_t{}))> {
    using Result = decltype(fn(std::int64_t{}, std::uint64_t{}));
    std::vector<std::optional<Result>> slots(static_cast<std::size_t>(std::max<std::int64_t>(reps, 0)));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= reps) return;
            try {
                slots[static_cast<std::size_t>(r)].emplace(fn(r, stream_seed(master_seed, static_cast<std::uint64_t>(r))));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(reps);
            }
        }
    };

    const auto n_workers = static_cast<unsigned>(std::min<std::int64_t>(std::max(1u, threads), std::max<std::int64_t>(reps, 1)));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Result> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace randop::harness
