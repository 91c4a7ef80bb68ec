#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "nicbench/errors.hpp"
#include "nicbench/model.hpp"
#include "nicbench/nn/adam.hpp"
#include "nicbench/rng.hpp"
#include "nicbench/signal.hpp"

namespace nicbench {

// Windows converted to model input tensors ([6, L] each).
template <typename T>
struct WindowTensors {
    std::vector<nn::Tensor<T>> inputs;
    std::vector<int> labels;

    std::size_t size() const { return inputs.size(); }
};

template <typename T>
WindowTensors<T> to_model_inputs(std::span<const Window> windows) {
    WindowTensors<T> out;
    out.inputs.reserve(windows.size());
    out.labels.reserve(windows.size());
    for (const Window& w : windows) {
        nn::Tensor<T> x(kNumChannels, w.length());
        for (std::size_t i = 0; i < w.length(); ++i)
            for (int c = 0; c < kNumChannels; ++c)
                x.at(static_cast<std::size_t>(c), i) = static_cast<T>(w.samples[i].channel(c));
        out.inputs.push_back(std::move(x));
        out.labels.push_back(w.label);
    }
    return out;
}

struct TrainConfig {
    double lr = 0.001;
    std::size_t batch = 64;
    std::size_t epochs = 10;
    std::uint64_t seed = 42;
    std::size_t eval_every = 1;  // test-accuracy cadence, in epochs
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double test_acc = 0.0;
    long long wall_ms = 0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    double final_test_acc = 0.0;
    double best_test_acc = 0.0;
    std::size_t best_epoch = 0;
};

// Accuracy percent of argmax predictions, dropout in eval mode.
template <typename T>
double evaluate(ModelState<T>& model, const WindowTensors<T>& data) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty window set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& logits = model.forward(data.inputs[i], /*train=*/false);
        std::size_t best = 0;
        for (std::size_t k = 1; k < logits.numel(); ++k)
            if (logits[k] > logits[best]) best = k;
        if (static_cast<int>(best) == data.labels[i]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace detail {
inline void write_epoch_record(std::ostream& os, const EpochRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "{\"epoch\":%zu,\"train_loss\":%.6f,\"test_acc\":%.4f,\"wall_ms\":%lld}",
                  r.epoch, r.train_loss, r.test_acc, r.wall_ms);
    os << buf << '\n' << std::flush;
}
}  // namespace detail

// Seeded-shuffle mini-batch training with Adam. Gradients accumulate in a
// fixed serial order so a given seed reproduces the same trajectory.
template <typename T>
TrainLog train_model(ModelState<T>& model, const WindowTensors<T>& train_set,
                     const WindowTensors<T>& test_set, const TrainConfig& cfg,
                     std::ostream* log_stream = nullptr) {
    if (train_set.size() == 0) throw train_error("train: empty training set");
    if (test_set.size() == 0) throw train_error("train: empty test set");
    if (cfg.batch < 1 || cfg.epochs < 1) throw train_error("train: batch and epochs must be >= 1");
    for (int label : train_set.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= model.spec().classes)
            throw train_error("train: label out of range for model class count");

    nn::AdamConfig<T> adam_cfg;
    adam_cfg.lr = static_cast<T>(cfg.lr);
    adam_cfg.beta1 = static_cast<T>(cfg.beta1);
    adam_cfg.beta2 = static_cast<T>(cfg.beta2);
    adam_cfg.eps = static_cast<T>(cfg.eps);
    nn::AdamOptimizer<T> adam(adam_cfg);

    const std::uint64_t shuffle_family = substream_seed(cfg.seed, 1);
    const std::uint64_t dropout_family = substream_seed(cfg.seed, 2);

    TrainLog log;
    const auto params = model.params();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(substream_seed(shuffle_family, epoch));
        Rng dropout_rng(substream_seed(dropout_family, epoch));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        nn::SoftmaxXent<T> xent;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t end = std::min(order.size(), start + cfg.batch);
            const T scale = T(1) / static_cast<T>(end - start);
            model.zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t idx = order[i];
                const auto& logits = model.forward(train_set.inputs[idx], /*train=*/true,
                                                   &dropout_rng);
                xent.forward(logits, train_set.labels[idx]);
                if (!std::isfinite(static_cast<double>(xent.loss)))
                    throw train_error("train: non-finite loss (diverged)");
                loss_sum += static_cast<double>(xent.loss);
                model.backward(xent.backward(scale));
            }
#ifndef NDEBUG
            for (const auto& p : params)
                for (T g : p.grad)
                    if (!std::isfinite(static_cast<double>(g)))
                        throw train_error("train: non-finite gradient");
#endif
            adam.step(params);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train_set.size());
        if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)
            rec.test_acc = evaluate(model, test_set);
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (log_stream) detail::write_epoch_record(*log_stream, rec);
        log.epochs.push_back(rec);

        if (rec.test_acc >= log.best_test_acc) {
            log.best_test_acc = rec.test_acc;
            log.best_epoch = epoch;
        }
    }

    log.final_test_acc = log.epochs.back().test_acc;
    return log;
}

}  // namespace nicbench
