#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "nicbench/nn/tensor.hpp"
#include "nicbench/rng.hpp"

namespace nicbench::nn {

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

// 1D convolution over a [C, L] input with fused ReLU, stride 1.
// Output is [F, L-k+1].
template <typename T>
class Conv1d {
public:
    Conv1d(std::size_t in_channels, std::size_t filters, std::size_t kernel)
        : in_c_(in_channels), filters_(filters), k_(kernel) {
        w_.resize_like(Tensor<T>(filters_, in_c_ * k_));
        b_.resize_like(Tensor<T>(filters_));
    }

    void init(Rng& rng) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_c_ * k_));
        for (auto& x : w_.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
        b_.value.fill(T(0));
    }

    const Tensor<T>& forward(const Tensor<T>& x) {
        if (x.rows() != in_c_) throw std::invalid_argument("conv1d: channel count mismatch");
        const std::size_t L = x.cols();
        if (L < k_) throw std::invalid_argument("conv1d: input shorter than kernel");
        const std::size_t out_len = L - k_ + 1;

        x_ = x;
        y_ = Tensor<T>(filters_, out_len);
        for (std::size_t f = 0; f < filters_; ++f) {
            const T* wf = w_.value.row(f);
            for (std::size_t t = 0; t < out_len; ++t) {
                T acc = b_.value[f];
                for (std::size_t c = 0; c < in_c_; ++c) {
                    const T* xc = x.row(c) + t;
                    const T* wc = wf + c * k_;
                    for (std::size_t i = 0; i < k_; ++i) acc += wc[i] * xc[i];
                }
                y_.at(f, t) = acc > T(0) ? acc : T(0);
            }
        }
        return y_;
    }

    // dy is [F, out_len]; returns dx [C, L] and accumulates parameter grads.
    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t out_len = y_.cols();
        Tensor<T> dx(in_c_, x_.cols());
        for (std::size_t f = 0; f < filters_; ++f) {
            const T* wf = w_.value.row(f);
            T* dwf = w_.grad.row(f);
            for (std::size_t t = 0; t < out_len; ++t) {
                if (!(y_.at(f, t) > T(0))) continue;  // ReLU gate
                const T g = dy.at(f, t);
                b_.grad[f] += g;
                for (std::size_t c = 0; c < in_c_; ++c) {
                    const T* xc = x_.row(c) + t;
                    T* dxc = dx.row(c) + t;
                    T* dwc = dwf + c * k_;
                    const T* wc = wf + c * k_;
                    for (std::size_t i = 0; i < k_; ++i) {
                        dwc[i] += g * xc[i];
                        dxc[i] += g * wc[i];
                    }
                }
            }
        }
        return dx;
    }

    Param<T>& weights() { return w_; }
    Param<T>& bias() { return b_; }
    std::size_t in_channels() const { return in_c_; }
    std::size_t filters() const { return filters_; }
    std::size_t kernel() const { return k_; }

private:
    std::size_t in_c_, filters_, k_;
    Param<T> w_;  // [F, C*k], filter-major
    Param<T> b_;  // [F]
    Tensor<T> x_, y_;
};

// Non-overlapping max pooling along time: [F, L] -> [F, floor(L/d)].
template <typename T>
class MaxPool1d {
public:
    explicit MaxPool1d(std::size_t depth) : d_(depth) {}

    const Tensor<T>& forward(const Tensor<T>& x) {
        const std::size_t L = x.cols();
        if (L < d_) throw std::invalid_argument("maxpool1d: input shorter than pool depth");
        const std::size_t out_len = L / d_;
        in_cols_ = L;
        y_ = Tensor<T>(x.rows(), out_len);
        argmax_.assign(x.rows() * out_len, 0);
        for (std::size_t f = 0; f < x.rows(); ++f) {
            const T* xf = x.row(f);
            for (std::size_t t = 0; t < out_len; ++t) {
                std::size_t best = t * d_;
                for (std::size_t i = 1; i < d_; ++i)
                    if (xf[t * d_ + i] > xf[best]) best = t * d_ + i;
                y_.at(f, t) = xf[best];
                argmax_[f * out_len + t] = best;
            }
        }
        return y_;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(y_.rows(), in_cols_);
        const std::size_t out_len = y_.cols();
        for (std::size_t f = 0; f < y_.rows(); ++f)
            for (std::size_t t = 0; t < out_len; ++t)
                dx.at(f, argmax_[f * out_len + t]) += dy.at(f, t);
        return dx;
    }

private:
    std::size_t d_;
    std::size_t in_cols_ = 0;
    Tensor<T> y_;
    std::vector<std::size_t> argmax_;
};

// Bidirectional LSTM over a channel-major [D, L] input, standard cell with
// sigmoid gates and tanh candidate/output. Produces time-major [L, 2H]
// with the forward block in columns [0,H) and the backward block in [H,2H).
template <typename T>
class BiLstm {
public:
    BiLstm(std::size_t in_dim, std::size_t hidden) : d_(in_dim), h_(hidden) {
        for (auto* dir : {&fw_, &bw_}) {
            dir->wx.resize_like(Tensor<T>(4 * h_, d_));
            dir->wh.resize_like(Tensor<T>(4 * h_, h_));
            dir->b.resize_like(Tensor<T>(4 * h_));
        }
    }

    void init(Rng& rng) {
        const double bx = 1.0 / std::sqrt(static_cast<double>(d_));
        const double bh = 1.0 / std::sqrt(static_cast<double>(h_));
        for (auto* dir : {&fw_, &bw_}) {
            for (auto& x : dir->wx.value.v) x = static_cast<T>(rng.uniform(-bx, bx));
            for (auto& x : dir->wh.value.v) x = static_cast<T>(rng.uniform(-bh, bh));
            dir->b.value.fill(T(0));
            // Forget-gate bias starts at 1 so early training retains state.
            for (std::size_t j = 0; j < h_; ++j) dir->b.value[h_ + j] = T(1);
        }
    }

    const Tensor<T>& forward(const Tensor<T>& x) {
        if (x.rows() != d_) throw std::invalid_argument("bilstm: input dim mismatch");
        const std::size_t L = x.cols();
        if (L < 1) throw std::invalid_argument("bilstm: empty sequence");
        x_ = x;
        y_ = Tensor<T>(L, 2 * h_);
        run_direction(fw_, false, L);
        run_direction(bw_, true, L);
        return y_;
    }

    // dy is [L, 2H]; returns dx [D, L].
    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t L = y_.rows();
        Tensor<T> dx(d_, L);
        backward_direction(fw_, false, L, dy, dx);
        backward_direction(bw_, true, L, dy, dx);
        return dx;
    }

    std::size_t hidden() const { return h_; }
    std::size_t in_dim() const { return d_; }

    struct Direction {
        Param<T> wx;  // [4H, D], gate order i f g o
        Param<T> wh;  // [4H, H]
        Param<T> b;   // [4H]
        // per-step caches, indexed by absolute time
        Tensor<T> gi, gf, gg, go, c, h;
    };

    Direction& forward_dir() { return fw_; }
    Direction& backward_dir() { return bw_; }

private:
    void run_direction(Direction& dir, bool reverse, std::size_t L) {
        dir.gi = Tensor<T>(L, h_);
        dir.gf = Tensor<T>(L, h_);
        dir.gg = Tensor<T>(L, h_);
        dir.go = Tensor<T>(L, h_);
        dir.c = Tensor<T>(L, h_);
        dir.h = Tensor<T>(L, h_);

        std::vector<T> z(4 * h_);
        std::vector<T> h_prev(h_, T(0)), c_prev(h_, T(0));
        const std::size_t col0 = reverse ? h_ : 0;

        for (std::size_t p = 0; p < L; ++p) {
            const std::size_t t = reverse ? L - 1 - p : p;
            for (std::size_t j = 0; j < 4 * h_; ++j) z[j] = dir.b.value[j];
            // z += Wx * x_t  (x is channel-major, stride L along channels)
            for (std::size_t j = 0; j < 4 * h_; ++j) {
                const T* wr = dir.wx.value.row(j);
                T acc = z[j];
                for (std::size_t c = 0; c < d_; ++c) acc += wr[c] * x_.at(c, t);
                z[j] = acc;
            }
            // z += Wh * h_prev
            for (std::size_t j = 0; j < 4 * h_; ++j) {
                const T* wr = dir.wh.value.row(j);
                T acc = z[j];
                for (std::size_t c = 0; c < h_; ++c) acc += wr[c] * h_prev[c];
                z[j] = acc;
            }
            for (std::size_t j = 0; j < h_; ++j) {
                const T i = sigmoid(z[j]);
                const T f = sigmoid(z[h_ + j]);
                const T g = std::tanh(z[2 * h_ + j]);
                const T o = sigmoid(z[3 * h_ + j]);
                const T c_new = f * c_prev[j] + i * g;
                const T h_new = o * std::tanh(c_new);
                dir.gi.at(t, j) = i;
                dir.gf.at(t, j) = f;
                dir.gg.at(t, j) = g;
                dir.go.at(t, j) = o;
                dir.c.at(t, j) = c_new;
                dir.h.at(t, j) = h_new;
                c_prev[j] = c_new;
                h_prev[j] = h_new;
                y_.at(t, col0 + j) = h_new;
            }
        }
    }

    void backward_direction(Direction& dir, bool reverse, std::size_t L, const Tensor<T>& dy,
                            Tensor<T>& dx) {
        std::vector<T> dh_carry(h_, T(0)), dc_carry(h_, T(0));
        std::vector<T> dz(4 * h_);
        const std::size_t col0 = reverse ? h_ : 0;

        for (std::size_t p = L; p-- > 0;) {
            const std::size_t t = reverse ? L - 1 - p : p;
            const bool has_prev = p > 0;
            const std::size_t t_prev = reverse ? t + 1 : t - 1;

            for (std::size_t j = 0; j < h_; ++j) {
                const T i = dir.gi.at(t, j);
                const T f = dir.gf.at(t, j);
                const T g = dir.gg.at(t, j);
                const T o = dir.go.at(t, j);
                const T tc = std::tanh(dir.c.at(t, j));
                const T c_prev = has_prev ? dir.c.at(t_prev, j) : T(0);

                const T dh = dy.at(t, col0 + j) + dh_carry[j];
                const T dc = dh * o * (T(1) - tc * tc) + dc_carry[j];

                const T dzo = dh * tc * o * (T(1) - o);
                const T dzi = dc * g * i * (T(1) - i);
                const T dzf = dc * c_prev * f * (T(1) - f);
                const T dzg = dc * i * (T(1) - g * g);

                dz[j] = dzi;
                dz[h_ + j] = dzf;
                dz[2 * h_ + j] = dzg;
                dz[3 * h_ + j] = dzo;
                dc_carry[j] = dc * f;
            }

            for (std::size_t j = 0; j < 4 * h_; ++j) {
                const T g = dz[j];
                if (g == T(0)) continue;
                dir.b.grad[j] += g;
                T* dwx = dir.wx.grad.row(j);
                const T* wx = dir.wx.value.row(j);
                for (std::size_t c = 0; c < d_; ++c) {
                    dwx[c] += g * x_.at(c, t);
                    dx.at(c, t) += g * wx[c];
                }
            }
            // dh_prev = Wh^T dz, and dWh += dz (x) h_prev
            std::fill(dh_carry.begin(), dh_carry.end(), T(0));
            for (std::size_t j = 0; j < 4 * h_; ++j) {
                const T g = dz[j];
                if (g == T(0)) continue;
                T* dwh = dir.wh.grad.row(j);
                const T* wh = dir.wh.value.row(j);
                if (has_prev) {
                    for (std::size_t c = 0; c < h_; ++c) {
                        dwh[c] += g * dir.h.at(t_prev, c);
                        dh_carry[c] += g * wh[c];
                    }
                }
            }
        }
    }

    std::size_t d_, h_;
    Direction fw_, bw_;
    Tensor<T> x_, y_;
};

// Inverted dropout on a flat feature vector: surviving activations are
// scaled by 1/(1-p) at train time so eval is the identity.
template <typename T>
class Dropout {
public:
    explicit Dropout(double p) : p_(p) {
        if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: p must be in [0,1)");
    }

    const Tensor<T>& forward(const Tensor<T>& x, bool train, Rng* rng) {
        y_ = x;
        mask_.assign(x.numel(), T(1));
        if (train && p_ > 0.0) {
            if (rng == nullptr) throw std::invalid_argument("dropout: train mode needs an rng");
            const T scale = T(1.0 / (1.0 - p_));
            for (std::size_t i = 0; i < x.numel(); ++i) {
                if (rng->uniform() < p_) {
                    mask_[i] = T(0);
                    y_[i] = T(0);
                } else {
                    mask_[i] = scale;
                    y_[i] = x[i] * scale;
                }
            }
        }
        return y_;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx = dy;
        for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] *= mask_[i];
        return dx;
    }

    double p() const { return p_; }

private:
    double p_;
    Tensor<T> y_;
    std::vector<T> mask_;
};

// Fully connected y = W x + b with no activation.
template <typename T>
class Dense {
public:
    Dense(std::size_t in_dim, std::size_t out_dim) : in_(in_dim), out_(out_dim) {
        w_.resize_like(Tensor<T>(out_dim, in_dim));
        b_.resize_like(Tensor<T>(out_dim));
    }

    void init(Rng& rng) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
        for (auto& x : w_.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
        b_.value.fill(T(0));
    }

    const Tensor<T>& forward(const Tensor<T>& x) {
        if (x.numel() != in_) throw std::invalid_argument("dense: input size mismatch");
        x_ = x;
        y_ = Tensor<T>(out_);
        for (std::size_t r = 0; r < out_; ++r) {
            const T* wr = w_.value.row(r);
            T acc = b_.value[r];
            for (std::size_t c = 0; c < in_; ++c) acc += wr[c] * x[c];
            y_[r] = acc;
        }
        return y_;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(in_);
        for (std::size_t r = 0; r < out_; ++r) {
            const T g = dy[r];
            b_.grad[r] += g;
            T* dwr = w_.grad.row(r);
            const T* wr = w_.value.row(r);
            for (std::size_t c = 0; c < in_; ++c) {
                dwr[c] += g * x_[c];
                dx[c] += g * wr[c];
            }
        }
        return dx;
    }

    Param<T>& weights() { return w_; }
    Param<T>& bias() { return b_; }
    std::size_t in_dim() const { return in_; }
    std::size_t out_dim() const { return out_; }

private:
    std::size_t in_, out_;
    Param<T> w_;  // [out, in]
    Param<T> b_;
    Tensor<T> x_, y_;
};

// Numerically stabilized softmax + cross-entropy.
template <typename T>
struct SoftmaxXent {
    T loss = T(0);
    Tensor<T> probs;

    void forward(const Tensor<T>& logits, int label) {
        const std::size_t k = logits.numel();
        if (k < 2) throw std::invalid_argument("softmax_xent: need at least 2 classes");
        if (label < 0 || static_cast<std::size_t>(label) >= k)
            throw std::invalid_argument("softmax_xent: label out of range");
        T max = logits[0];
        for (std::size_t i = 1; i < k; ++i) max = std::max(max, logits[i]);
        probs = Tensor<T>(k);
        T denom = T(0);
        for (std::size_t i = 0; i < k; ++i) {
            probs[i] = std::exp(logits[i] - max);
            denom += probs[i];
        }
        for (std::size_t i = 0; i < k; ++i) probs[i] /= denom;
        loss = -std::log(std::max(probs[static_cast<std::size_t>(label)],
                                  std::numeric_limits<T>::min()));
        label_ = label;
    }

    // d(scale * loss)/d(logits) = scale * (probs - onehot)
    Tensor<T> backward(T scale = T(1)) const {
        Tensor<T> d = probs;
        for (std::size_t i = 0; i < d.numel(); ++i) d[i] *= scale;
        d[static_cast<std::size_t>(label_)] -= scale;
        return d;
    }

private:
    int label_ = 0;
};

}  // namespace nicbench::nn
