#pragma once

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include "podforge/scene.hpp"

namespace podforge {

struct GenerationRun {
    std::vector<Scene> scenes;  // in scene_index order regardless of thread count
    double mean_seconds_per_scene = 0;
};

// Generates scenes 0..count-1 with a bounded worker pool. compose_scene is a
// pure function of (config, pools, index), so the result is invariant to the
// thread count.
inline GenerationRun generate_scenes(const GenerationConfig& config, const PodPool& pods,
                                     const BackgroundPool& backgrounds, int count,
                                     int threads = 1) {
    if (count < 0) throw InvalidArgument("scene count must be >= 0");
    config.validate();
    threads = std::max(1, threads);

    GenerationRun run;
    run.scenes.resize(count);
    const auto t0 = std::chrono::steady_clock::now();

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                run.scenes[i] = compose_scene(config, pods, backgrounds, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    if (threads == 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    const auto t1 = std::chrono::steady_clock::now();
    run.mean_seconds_per_scene =
        count == 0 ? 0.0 : std::chrono::duration<double>(t1 - t0).count() / count;
    return run;
}

}  // namespace podforge
