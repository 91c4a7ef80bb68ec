#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nicbench {

inline constexpr int kNumChannels = 6;  // fx fy fz wx wy wz

// One 6-axis inertial reading: specific force [m/s^2], angular rate [rad/s],
// and the sample index within its source stream.
struct ImuSample {
    std::array<double, 3> f{};
    std::array<double, 3> w{};
    std::int64_t t = 0;

    double channel(int c) const { return c < 3 ? f[c] : w[c - 3]; }
    void set_channel(int c, double v) {
        if (c < 3) f[c] = v; else w[c - 3] = v;
    }
    bool finite() const {
        for (int c = 0; c < kNumChannels; ++c)
            if (!std::isfinite(channel(c))) return false;
        return true;
    }
};

// A sample plus its activity label, the element type of a labeled stream.
struct StreamSample {
    ImuSample sample;
    int label = 0;
};

// Fixed-length, label-homogeneous slice of a stream: one classification
// instance.
struct Window {
    std::vector<ImuSample> samples;
    int label = 0;
    std::string subject;
    double rate_hz = 0.0;

    std::size_t length() const { return samples.size(); }
};

// Per-channel mean and population std, fitted on training windows only.
struct ChannelStats {
    std::array<double, kNumChannels> mean{};
    std::array<double, kNumChannels> std{};
};

// Cuts a labeled stream into windows at offsets 0, stride, 2*stride, ...
// Candidates that span a label change are dropped, so every returned window
// carries one unambiguous label.
inline std::vector<Window> segment_stream(std::span<const StreamSample> stream,
                                          std::size_t win_len, std::size_t stride,
                                          const std::string& subject, double rate_hz) {
    if (win_len < 1 || stride < 1)
        throw std::invalid_argument("segment_stream: win_len and stride must be >= 1");

    std::vector<Window> windows;
    if (stream.size() < win_len) return windows;

    for (std::size_t start = 0; start + win_len <= stream.size(); start += stride) {
        const int label = stream[start].label;
        bool homogeneous = true;
        for (std::size_t i = 1; i < win_len; ++i) {
            if (stream[start + i].label != label) {
                homogeneous = false;
                break;
            }
        }
        if (!homogeneous) continue;

        Window w;
        w.samples.reserve(win_len);
        for (std::size_t i = 0; i < win_len; ++i) w.samples.push_back(stream[start + i].sample);
        w.label = label;
        w.subject = subject;
        w.rate_hz = rate_hz;
        windows.push_back(std::move(w));
    }
    return windows;
}

// Per-channel mean and population std over every sample of every window.
// Throws on an empty input or a zero-variance channel.
inline ChannelStats fit_stats(std::span<const Window> train_windows) {
    std::size_t n = 0;
    for (const Window& w : train_windows) n += w.length();
    if (n == 0) throw std::invalid_argument("fit_stats: no samples in training windows");

    ChannelStats stats;
    for (int c = 0; c < kNumChannels; ++c) {
        double sum = 0.0;
        for (const Window& w : train_windows)
            for (const ImuSample& s : w.samples) sum += s.channel(c);
        const double mean = sum / static_cast<double>(n);

        double sq = 0.0;
        for (const Window& w : train_windows)
            for (const ImuSample& s : w.samples) {
                const double d = s.channel(c) - mean;
                sq += d * d;
            }
        const double var = sq / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
            throw std::invalid_argument("fit_stats: degenerate channel " + std::to_string(c) +
                                        " (zero variance)");
        stats.mean[c] = mean;
        stats.std[c] = sd;
    }
    return stats;
}

// Per-channel z-score. Label, subject, rate and sample indices pass through.
inline Window normalize(const Window& window, const ChannelStats& stats) {
    Window out = window;
    for (ImuSample& s : out.samples)
        for (int c = 0; c < kNumChannels; ++c)
            s.set_channel(c, (s.channel(c) - stats.mean[c]) / stats.std[c]);
    return out;
}

}  // namespace nicbench
