#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "nicbench/rng.hpp"
#include "nicbench/signal.hpp"

namespace nicbench {

enum class RotationAxis { X, Y, Z, All };

// Orthonormal 3x3 rotation applied rigidly to both sensor triads.
struct RotationMatrix {
    std::array<std::array<double, 3>, 3> m{};

    std::array<double, 3> apply(const std::array<double, 3>& v) const {
        std::array<double, 3> out{};
        for (int r = 0; r < 3; ++r)
            out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
        return out;
    }

    RotationMatrix transposed() const {
        RotationMatrix t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t.m[r][c] = m[c][r];
        return t;
    }
};

// The three fixed pi/6 axis rotations used for augmentation.
inline RotationMatrix rotation_matrix(RotationAxis axis) {
    const double c = std::cos(3.14159265358979323846 / 6.0);
    const double s = std::sin(3.14159265358979323846 / 6.0);
    RotationMatrix t;
    switch (axis) {
        case RotationAxis::X:
            t.m = {{{1, 0, 0}, {0, c, s}, {0, -s, c}}};
            break;
        case RotationAxis::Y:
            t.m = {{{c, 0, -s}, {0, 1, 0}, {s, 0, c}}};
            break;
        case RotationAxis::Z:
            t.m = {{{c, s, 0}, {-s, c, 0}, {0, 0, 1}}};
            break;
        case RotationAxis::All:
            throw std::invalid_argument("rotation_matrix: All is expanded by the caller");
    }
    return t;
}

// Rotates every sample's force and rate triads by the same matrix.
inline Window rotate_window(const Window& window, const RotationMatrix& t) {
    Window out = window;
    for (ImuSample& s : out.samples) {
        s.f = t.apply(s.f);
        s.w = t.apply(s.w);
    }
    return out;
}

// Originals first, then one rotated copy per original (X/Y/Z) or three
// copies in T1,T2,T3 order (All). Copies are always generated from the
// originals, so repeated calls never stack rotations inside one pass.
inline std::vector<Window> augment_rotation(std::span<const Window> train, RotationAxis axis) {
    if (train.empty()) throw std::invalid_argument("augment_rotation: empty training set");

    std::vector<RotationAxis> axes;
    if (axis == RotationAxis::All)
        axes = {RotationAxis::X, RotationAxis::Y, RotationAxis::Z};
    else
        axes = {axis};

    std::vector<Window> out;
    out.reserve(train.size() * (1 + axes.size()));
    for (const Window& w : train) out.push_back(w);
    for (RotationAxis a : axes) {
        const RotationMatrix t = rotation_matrix(a);
        for (const Window& w : train) out.push_back(rotate_window(w, t));
    }
    return out;
}

// Additive-noise magnitude: per-channel sigma is a fixed fraction of the
// training-split std for that channel.
struct NoiseSpec {
    double sigma_fraction = 0.05;
    std::uint64_t seed = 0;
};

// Originals first, then one noisy copy per original. Each copy draws from
// its own counter-based stream keyed by source window index, so generation
// order does not depend on traversal order.
inline std::vector<Window> augment_noise(std::span<const Window> train, const NoiseSpec& spec,
                                         const ChannelStats& stats) {
    if (train.empty()) throw std::invalid_argument("augment_noise: empty training set");
    if (!(spec.sigma_fraction > 0.0))
        throw std::invalid_argument("augment_noise: sigma fraction must be > 0");

    std::vector<Window> out;
    out.reserve(train.size() * 2);
    for (const Window& w : train) out.push_back(w);
    for (std::size_t i = 0; i < train.size(); ++i) {
        Rng rng(substream_seed(spec.seed, i));
        Window copy = train[i];
        for (ImuSample& s : copy.samples)
            for (int c = 0; c < kNumChannels; ++c) {
                const double sigma = spec.sigma_fraction * stats.std[c];
                s.set_channel(c, s.channel(c) + sigma * rng.normal());
            }
        out.push_back(std::move(copy));
    }
    return out;
}

}  // namespace nicbench
