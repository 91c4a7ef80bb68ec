#pragma once

// Central finite-difference gradient checking against the analytic backward
// passes. Run on double instantiations so difference quotients are not
// drowned by float rounding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nicbench/model.hpp"
#include "nicbench/nn/tensor.hpp"

namespace gradcheck {

struct Report {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t checked = 0;
};

inline double rel_err(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / denom;
}

// Checks d(loss)/d(theta) for every parameter of a model against central
// differences. loss_fn must be a pure function of the current parameter
// values (reseed any dropout rng inside it).
inline Report check_model(nicbench::ModelState<double>& model,
                          const std::function<double()>& loss_fn,
                          const std::function<void()>& backward_fn, double h = 1e-5) {
    Report report;
    model.zero_grads();
    backward_fn();

    model.visit_params([&](nicbench::nn::ParamView<double> p) {
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value[i];
            p.value[i] = saved + h;
            const double lp = loss_fn();
            p.value[i] = saved - h;
            const double lm = loss_fn();
            p.value[i] = saved;
            const double fd = (lp - lm) / (2.0 * h);
            const double err = rel_err(p.grad[i], fd);
            ++report.checked;
            if (err > report.max_rel_err) {
                report.max_rel_err = err;
                report.worst_param = std::string(p.name) + "[" + std::to_string(i) + "]";
            }
        }
    });
    return report;
}

// Same idea for a free-standing vector of values (op inputs, logits, ...).
inline double check_values(std::vector<double>& values, const std::vector<double>& analytic,
                           const std::function<double()>& loss_fn, double h = 1e-5) {
    double max_err = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        values[i] = saved + h;
        const double lp = loss_fn();
        values[i] = saved - h;
        const double lm = loss_fn();
        values[i] = saved;
        const double fd = (lp - lm) / (2.0 * h);
        max_err = std::max(max_err, rel_err(analytic[i], fd));
    }
    return max_err;
}

}  // namespace gradcheck
