// Copyright 2026 The qphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace qphase {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

/// Runs fn(i) for i in [0, count) on a pool of workers. Tasks are claimed
/// through an atomic counter; fn must write its result into a slot indexed
/// by i so the output order is independent of scheduling.
inline void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn,
                               unsigned threads = 0) {
    if (threads == 0) threads = worker_count();
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    pool.reserve(spawn);
    for (unsigned t = 1; t < spawn; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

/// Deterministic chunked reduction: [0, count) is split into fixed-size
/// chunks (independent of the worker count), each chunk is reduced by
/// `map`, and the chunk results are combined in index order by pairwise
/// tree passes. Bit-stable for a fixed chunk size.
template <typename T, typename MapFn, typename CombineFn>
T chunked_tree_reduce(std::size_t count, std::size_t chunk_size, MapFn map, CombineFn combine,
                      T identity, unsigned threads = 0) {
    if (count == 0) return identity;
    std::size_t chunks = (count + chunk_size - 1) / chunk_size;
    std::vector<T> partial(chunks, identity);
    parallel_for_index(
        chunks,
        [&](std::size_t c) {
            std::size_t lo = c * chunk_size;
            std::size_t hi = std::min(count, lo + chunk_size);
            partial[c] = map(lo, hi);
        },
        threads);
    while (partial.size() > 1) {
        std::vector<T> merged;
        merged.reserve((partial.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < partial.size(); i += 2)
            merged.push_back(combine(partial[i], partial[i + 1]));
        if (partial.size() % 2 == 1) merged.push_back(partial.back());
        partial = std::move(merged);
    }
    return partial.front();
}

}  // namespace qphase
