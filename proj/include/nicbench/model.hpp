#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nicbench/io.hpp"
#include "nicbench/nn/adam.hpp"
#include "nicbench/nn/layers.hpp"
#include "nicbench/nn/tensor.hpp"
#include "nicbench/rng.hpp"
#include "nicbench/signal.hpp"

namespace nicbench {

enum class ModelVariant { Baseline, Head2, Head3 };

enum class Reduction { LastStep, MeanPool };

inline const char* to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::Baseline: return "baseline";
        case ModelVariant::Head2: return "head2";
        case ModelVariant::Head3: return "head3";
    }
    return "?";
}

// Architecture description. Every head runs conv+ReLU -> maxpool -> Bi-LSTM
// -> temporal reduction -> dropout; head features are concatenated before
// the fully connected classifier.
struct ModelSpec {
    ModelVariant variant = ModelVariant::Baseline;
    std::size_t classes = 2;
    std::size_t hidden = 128;
    std::size_t filters = 64;
    std::size_t kernel = 5;
    std::size_t pool = 3;
    std::size_t fc_width = 256;
    double dropout_p = 0.25;
    Reduction reduction = Reduction::LastStep;

    // Channel index lists per head; fx fy fz wx wy wz = 0..5.
    std::vector<std::vector<std::size_t>> head_channels() const {
        switch (variant) {
            case ModelVariant::Baseline: return {{0, 1, 2, 3, 4, 5}};
            case ModelVariant::Head2: return {{0, 1, 2}, {3, 4, 5}};
            case ModelVariant::Head3: return {{0, 3}, {1, 4}, {2, 5}};
        }
        throw std::invalid_argument("model spec: unknown variant");
    }

    std::string canonical() const {
        std::ostringstream os;
        os << to_string(variant) << "|K=" << classes << "|H=" << hidden << "|F=" << filters
           << "|k=" << kernel << "|d=" << pool << "|fc=" << fc_width << "|p=" << dropout_p
           << "|red=" << (reduction == Reduction::LastStep ? "last" : "mean");
        return os.str();
    }

    std::uint64_t hash() const { return io::fnv1a(canonical()); }
};

// A model instance: layer stack plus recorded activations for backprop.
template <typename T>
class ModelState {
public:
    explicit ModelState(const ModelSpec& spec) : spec_(spec) {
        if (spec.classes < 2) throw std::invalid_argument("model: need at least 2 classes");
        const auto partitions = spec.head_channels();
        std::size_t total = 0;
        for (const auto& p : partitions) total += p.size();
        if (total != kNumChannels)
            throw std::invalid_argument("model: channel partition must cover all 6 channels");

        for (const auto& channels : partitions) {
            auto head = std::make_unique<Head>(spec, channels);
            heads_.push_back(std::move(head));
        }
        const std::size_t fused = heads_.size() * 2 * spec.hidden;
        fc1_ = std::make_unique<nn::Dense<T>>(fused, spec.fc_width);
        fc2_ = std::make_unique<nn::Dense<T>>(spec.fc_width, spec.classes);

        build_registry();
    }

    void init(std::uint64_t seed) {
        Rng rng(substream_seed(seed, 0xA11));
        for (auto& head : heads_) {
            head->conv.init(rng);
            head->lstm.init(rng);
        }
        fc1_->init(rng);
        fc2_->init(rng);
    }

    // x is the full [6, L] window; heads slice their channel subsets.
    // rng drives dropout masks and is only consulted when train is true.
    const nn::Tensor<T>& forward(const nn::Tensor<T>& x, bool train, Rng* rng = nullptr) {
        if (x.rows() != kNumChannels) throw std::invalid_argument("model: input must have 6 rows");

        nn::Tensor<T> fused(heads_.size() * 2 * spec_.hidden);
        std::size_t offset = 0;
        for (auto& head : heads_) {
            nn::Tensor<T> slice(head->channels.size(), x.cols());
            for (std::size_t r = 0; r < head->channels.size(); ++r)
                for (std::size_t t = 0; t < x.cols(); ++t)
                    slice.at(r, t) = x.at(head->channels[r], t);

            const auto& conv_out = head->conv.forward(slice);
            const auto& pooled = head->pool.forward(conv_out);
            const auto& seq = head->lstm.forward(pooled);
            nn::Tensor<T> feat = reduce(seq);
            const auto& dropped = head->dropout.forward(feat, train, rng);
            head->seq_len = seq.rows();
            for (std::size_t i = 0; i < dropped.numel(); ++i) fused[offset + i] = dropped[i];
            offset += dropped.numel();
        }

        const auto& a1 = fc1_->forward(fused);
        logits_ = fc2_->forward(a1);
        nn::debug_check_finite(logits_, "model logits");
        return logits_;
    }

    // Accumulates parameter gradients for d(loss)/d(logits).
    void backward(const nn::Tensor<T>& dlogits) {
        if (logits_.numel() == 0)
            throw std::logic_error("model: backward called without a recorded forward pass");
        auto da1 = fc2_->backward(dlogits);
        auto dfused = fc1_->backward(da1);
        std::size_t offset = 0;
        for (auto& head : heads_) {
            const std::size_t feat_dim = 2 * spec_.hidden;
            nn::Tensor<T> dfeat(feat_dim);
            for (std::size_t i = 0; i < feat_dim; ++i) dfeat[i] = dfused[offset + i];
            offset += feat_dim;

            auto dreduced = head->dropout.backward(dfeat);
            nn::Tensor<T> dseq = expand(dreduced, head->seq_len);
            auto dpooled = head->lstm.backward(dseq);
            auto dconv = head->pool.backward(dpooled);
            head->conv.backward(dconv);
        }
    }

    void zero_grads() {
        for (auto& [name, p] : registry_) p->zero_grad();
    }

    template <typename F>
    void visit_params(F&& f) {
        for (auto& [name, p] : registry_)
            f(nn::ParamView<T>{name.c_str(), std::span<T>(p->value.v), std::span<T>(p->grad.v)});
    }

    std::vector<nn::ParamView<T>> params() {
        std::vector<nn::ParamView<T>> out;
        visit_params([&](nn::ParamView<T> p) { out.push_back(p); });
        return out;
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& [name, p] : registry_) n += p->value.numel();
        return n;
    }

    const ModelSpec& spec() const { return spec_; }
    std::size_t head_count() const { return heads_.size(); }

    nn::Conv1d<T>& head_conv(std::size_t i) { return heads_.at(i)->conv; }
    nn::BiLstm<T>& head_lstm(std::size_t i) { return heads_.at(i)->lstm; }
    nn::Dense<T>& fc1() { return *fc1_; }
    nn::Dense<T>& fc2() { return *fc2_; }

private:
    struct Head {
        Head(const ModelSpec& spec, std::vector<std::size_t> ch)
            : channels(std::move(ch)),
              conv(channels.size(), spec.filters, spec.kernel),
              pool(spec.pool),
              lstm(spec.filters, spec.hidden),
              dropout(spec.dropout_p) {}

        std::vector<std::size_t> channels;
        nn::Conv1d<T> conv;
        nn::MaxPool1d<T> pool;
        nn::BiLstm<T> lstm;
        nn::Dropout<T> dropout;
        std::size_t seq_len = 0;
    };

    void build_registry() {
        registry_.clear();
        int h = 0;
        for (auto& head : heads_) {
            const std::string base = "head" + std::to_string(h++);
            registry_.emplace_back(base + ".conv.w", &head->conv.weights());
            registry_.emplace_back(base + ".conv.b", &head->conv.bias());
            registry_.emplace_back(base + ".lstm.fw.wx", &head->lstm.forward_dir().wx);
            registry_.emplace_back(base + ".lstm.fw.wh", &head->lstm.forward_dir().wh);
            registry_.emplace_back(base + ".lstm.fw.b", &head->lstm.forward_dir().b);
            registry_.emplace_back(base + ".lstm.bw.wx", &head->lstm.backward_dir().wx);
            registry_.emplace_back(base + ".lstm.bw.wh", &head->lstm.backward_dir().wh);
            registry_.emplace_back(base + ".lstm.bw.b", &head->lstm.backward_dir().b);
        }
        registry_.emplace_back("fc1.w", &fc1_->weights());
        registry_.emplace_back("fc1.b", &fc1_->bias());
        registry_.emplace_back("fc2.w", &fc2_->weights());
        registry_.emplace_back("fc2.b", &fc2_->bias());
    }

    // Temporal reduction of the Bi-LSTM output [L, 2H] to a [2H] feature:
    // forward block at the last step, backward block at the first.
    nn::Tensor<T> reduce(const nn::Tensor<T>& seq) {
        const std::size_t H = spec_.hidden;
        nn::Tensor<T> feat(2 * H);
        if (spec_.reduction == Reduction::LastStep) {
            for (std::size_t j = 0; j < H; ++j) {
                feat[j] = seq.at(seq.rows() - 1, j);
                feat[H + j] = seq.at(0, H + j);
            }
        } else {
            const T inv = T(1) / static_cast<T>(seq.rows());
            for (std::size_t t = 0; t < seq.rows(); ++t)
                for (std::size_t j = 0; j < 2 * H; ++j) feat[j] += seq.at(t, j) * inv;
        }
        return feat;
    }

    nn::Tensor<T> expand(const nn::Tensor<T>& dfeat, std::size_t seq_len) {
        const std::size_t H = spec_.hidden;
        nn::Tensor<T> dseq(seq_len, 2 * H);
        if (spec_.reduction == Reduction::LastStep) {
            for (std::size_t j = 0; j < H; ++j) {
                dseq.at(seq_len - 1, j) = dfeat[j];
                dseq.at(0, H + j) = dfeat[H + j];
            }
        } else {
            const T inv = T(1) / static_cast<T>(seq_len);
            for (std::size_t t = 0; t < seq_len; ++t)
                for (std::size_t j = 0; j < 2 * H; ++j) dseq.at(t, j) = dfeat[j] * inv;
        }
        return dseq;
    }

    ModelSpec spec_;
    std::vector<std::unique_ptr<Head>> heads_;
    std::unique_ptr<nn::Dense<T>> fc1_, fc2_;
    std::vector<std::pair<std::string, nn::Param<T>*>> registry_;
    nn::Tensor<T> logits_;
};

inline constexpr std::uint32_t kCheckpointMagic = 0x4D43494Eu;  // "NICM"
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Checkpoint container: magic, version, spec hash, then parameter blobs as
// little-endian 32-bit floats in visitation order.
template <typename T>
void save_checkpoint(ModelState<T>& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    io::write_pod<std::uint32_t>(os, kCheckpointMagic);
    io::write_pod<std::uint32_t>(os, kCheckpointVersion);
    io::write_pod<std::uint64_t>(os, model.spec().hash());
    std::uint64_t count = 0;
    model.visit_params([&](nn::ParamView<T>) { ++count; });
    io::write_pod<std::uint64_t>(os, count);
    model.visit_params([&](nn::ParamView<T> p) {
        io::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(p.value.size()));
        for (T v : p.value) io::write_pod<float>(os, static_cast<float>(v));
    });
    if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

template <typename T>
void load_checkpoint(ModelState<T>& model, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
    if (io::read_pod<std::uint32_t>(is) != kCheckpointMagic)
        throw std::runtime_error("checkpoint: bad magic: " + path);
    if (io::read_pod<std::uint32_t>(is) != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version: " + path);
    if (io::read_pod<std::uint64_t>(is) != model.spec().hash())
        throw std::runtime_error("checkpoint: model spec mismatch: " + path);
    std::uint64_t count = io::read_pod<std::uint64_t>(is);
    std::uint64_t seen = 0;
    model.visit_params([&](nn::ParamView<T> p) {
        ++seen;
        const auto n = io::read_pod<std::uint64_t>(is);
        if (n != p.value.size())
            throw std::runtime_error("checkpoint: parameter size mismatch: " + path);
        for (auto& v : p.value) v = static_cast<T>(io::read_pod<float>(is));
    });
    if (seen != count) throw std::runtime_error("checkpoint: parameter count mismatch: " + path);
}

}  // namespace nicbench
