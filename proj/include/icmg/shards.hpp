#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rng.hpp"

namespace icmg {

// Splits `samples` across `shards` independent RNG streams (stream_id =
// shard index) and invokes work(shard, rng, n_shard) once per shard, using
// threads when available.  Each shard must write only to its own slot, so
// results are reproducible for a fixed (seed, samples, shards) regardless
// of scheduling.
template <class Work>
void for_each_shard(std::uint64_t samples, std::uint64_t seed, unsigned shards, Work&& work) {
    if (shards == 0) throw std::invalid_argument("for_each_shard: shards must be positive");
    auto shard_size = [&](unsigned s) {
        return samples / shards + (s < samples % shards ? 1 : 0);
    };
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > shards) workers = shards;

    if (workers <= 1) {
        for (unsigned s = 0; s < shards; ++s) {
            RngStream rng(seed, s);
            work(s, rng, shard_size(s));
        }
        return;
    }

    std::atomic<unsigned> next{0};
    auto runner = [&] {
        for (;;) {
            unsigned s = next.fetch_add(1);
            if (s >= shards) return;
            RngStream rng(seed, s);
            work(s, rng, shard_size(s));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(runner);
    for (auto& t : pool) t.join();
}

} // namespace icmg
