#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nicbench/nn/tensor.hpp"

namespace nicbench::nn {

template <typename T>
struct AdamConfig {
    T lr = T(0.001);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-8);
};

// Adam with bias correction. Moment buffers are laid out to match the
// parameter list passed on the first step; the list must stay stable.
template <typename T>
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig<T> cfg = {}) : cfg_(cfg) {}

    void step(const std::vector<ParamView<T>>& params) {
        if (slots_.empty()) {
            slots_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                slots_[i].m.assign(params[i].value.size(), T(0));
                slots_[i].v.assign(params[i].value.size(), T(0));
            }
        }
        if (slots_.size() != params.size())
            throw std::invalid_argument("adam: parameter list changed size");

        ++t_;
        const T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
        const T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));

        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& slot = slots_[i];
            auto value = params[i].value;
            auto grad = params[i].grad;
            if (slot.m.size() != value.size())
                throw std::invalid_argument("adam: parameter shape changed");
            for (std::size_t j = 0; j < value.size(); ++j) {
                const T g = grad[j];
                slot.m[j] = cfg_.beta1 * slot.m[j] + (T(1) - cfg_.beta1) * g;
                slot.v[j] = cfg_.beta2 * slot.v[j] + (T(1) - cfg_.beta2) * g * g;
                const T mhat = slot.m[j] / bc1;
                const T vhat = slot.v[j] / bc2;
                value[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    long step_count() const { return t_; }
    const AdamConfig<T>& config() const { return cfg_; }

private:
    struct Slot {
        std::vector<T> m, v;
    };
    AdamConfig<T> cfg_;
    std::vector<Slot> slots_;
    long t_ = 0;
};

}  // namespace nicbench::nn
