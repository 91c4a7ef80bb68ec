#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "nicbench/signal.hpp"

namespace nicbench {

// Moving-average window size. The benchmark exercises 10, 25 and 50.
struct MaSpec {
    std::size_t n = 10;
};

// Forward-window mean: out[t] = mean(x[t .. t+n-1]), length L-n+1.
// Implemented with a running sum; the brute-force recomputation is kept in
// the tests as the equivalence oracle.
inline std::vector<double> moving_average(std::span<const double> signal, std::size_t n) {
    if (n < 1) throw std::invalid_argument("moving_average: n must be >= 1");
    if (n > signal.size())
        throw std::invalid_argument("moving_average: window size exceeds signal length");

    std::vector<double> out(signal.size() - n + 1);
    if (n == 1) {
        for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i];
        return out;
    }

    // Kahan-compensated running sum; plain updates drift on long streams.
    double sum = 0.0, comp = 0.0;
    auto add = [&](double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    for (std::size_t i = 0; i < n; ++i) add(signal[i]);
    out[0] = sum / static_cast<double>(n);
    for (std::size_t t = 1; t < out.size(); ++t) {
        add(signal[t + n - 1]);
        add(-signal[t - 1]);
        out[t] = sum / static_cast<double>(n);
    }
    return out;
}

// Filters all six channels of a labeled stream with the same window size.
// Output sample t keeps the label and time index of input sample t, so the
// stream shortens by n-1 at the tail.
inline std::vector<StreamSample> denoise_stream(std::span<const StreamSample> stream,
                                                const MaSpec& spec) {
    if (stream.size() < spec.n)
        throw std::invalid_argument("denoise_stream: stream shorter than filter window");

    std::vector<double> channel(stream.size());
    std::vector<std::vector<double>> filtered(kNumChannels);
    for (int c = 0; c < kNumChannels; ++c) {
        for (std::size_t i = 0; i < stream.size(); ++i) channel[i] = stream[i].sample.channel(c);
        filtered[c] = moving_average(channel, spec.n);
    }

    const std::size_t out_len = stream.size() - spec.n + 1;
    std::vector<StreamSample> out(out_len);
    for (std::size_t t = 0; t < out_len; ++t) {
        out[t].sample.t = stream[t].sample.t;
        out[t].label = stream[t].label;
        for (int c = 0; c < kNumChannels; ++c) out[t].sample.set_channel(c, filtered[c][t]);
    }
    return out;
}

}  // namespace nicbench
