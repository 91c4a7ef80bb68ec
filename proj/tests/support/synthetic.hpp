#pragma once

// Separable synthetic window sets for training sanity checks.

#include <utility>
#include <vector>

#include "nicbench/rng.hpp"
#include "nicbench/signal.hpp"

namespace synthetic {

struct SplitWindows {
    std::vector<nicbench::Window> train;
    std::vector<nicbench::Window> test;
};

// K classes separated by large per-channel mean offsets on top of a small
// class-specific tone; linearly separable for any sensible classifier.
inline SplitWindows separable_windows(int classes, std::size_t train_per_class,
                                      std::size_t test_per_class, std::size_t window_len,
                                      std::uint64_t seed) {
    nicbench::Rng rng(seed);
    SplitWindows out;
    auto make_window = [&](int cls, bool test) {
        nicbench::Window w;
        w.label = cls;
        w.subject = test ? "test" : "train";
        w.rate_hz = 50.0;
        w.samples.resize(window_len);
        for (std::size_t t = 0; t < window_len; ++t) {
            w.samples[t].t = static_cast<std::int64_t>(t);
            for (int c = 0; c < nicbench::kNumChannels; ++c) {
                const double tone = 0.4 * std::sin(0.3 * double(t) * (1.0 + cls) + 0.5 * c);
                w.samples[t].set_channel(c, 2.5 * cls + tone + 0.3 * rng.normal());
            }
        }
        return w;
    };
    for (int cls = 0; cls < classes; ++cls) {
        for (std::size_t i = 0; i < train_per_class; ++i)
            out.train.push_back(make_window(cls, false));
        for (std::size_t i = 0; i < test_per_class; ++i) out.test.push_back(make_window(cls, true));
    }
    return out;
}

// z-scores both splits with train statistics.
inline void normalize_split(SplitWindows& split) {
    const auto stats = nicbench::fit_stats(split.train);
    for (auto& w : split.train) w = nicbench::normalize(w, stats);
    for (auto& w : split.test) w = nicbench::normalize(w, stats);
}

}  // namespace synthetic
