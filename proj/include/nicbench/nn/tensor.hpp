#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace nicbench::nn {

// Dense row-major buffer with a shape list. float in production; tests also
// instantiate double where finite-difference checks need the headroom.
template <typename T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> v;

    Tensor() = default;
    explicit Tensor(std::size_t n) : shape{n}, v(n, T(0)) {}
    Tensor(std::size_t r, std::size_t c) : shape{r, c}, v(r * c, T(0)) {}

    std::size_t numel() const { return v.size(); }
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    T& operator[](std::size_t i) { return v[i]; }
    const T& operator[](std::size_t i) const { return v[i]; }
    T& at(std::size_t r, std::size_t c) { return v[r * shape[1] + c]; }
    const T& at(std::size_t r, std::size_t c) const { return v[r * shape[1] + c]; }
    T* row(std::size_t r) { return v.data() + r * shape[1]; }
    const T* row(std::size_t r) const { return v.data() + r * shape[1]; }

    void fill(T x) { std::fill(v.begin(), v.end(), x); }

    bool finite() const {
        for (const T& x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }
};

// Trainable value plus its gradient accumulator, same shape.
template <typename T>
struct Param {
    Tensor<T> value;
    Tensor<T> grad;

    void resize_like(const Tensor<T>& shape_src) {
        value = shape_src;
        grad = shape_src;
        grad.fill(T(0));
    }
    void zero_grad() { grad.fill(T(0)); }
};

// Non-owning view used by the optimizer and the checkpoint writer.
template <typename T>
struct ParamView {
    const char* name;
    std::span<T> value;
    std::span<T> grad;
};

#ifndef NDEBUG
template <typename T>
inline void debug_check_finite(const Tensor<T>& t, const char* where) {
    if (!t.finite()) throw std::runtime_error(std::string("non-finite values in ") + where);
}
#else
template <typename T>
inline void debug_check_finite(const Tensor<T>&, const char*) {}
#endif

}  // namespace nicbench::nn
