#pragma once

#include <functional>
#include <string>
#include <vector>

#include "anonet/matrix.hpp"

namespace anonet::nn {

/// A named view into one parameter matrix and its analytic gradient.
struct GradCheckParam {
    std::string name;
    Matrix* value = nullptr;
    const Matrix* analytic = nullptr;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t checked = 0;

    bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

/// Central finite differences over every coordinate of every listed
/// parameter. `loss` is re-evaluated at perturbed values; the caller must
/// make it deterministic (fixed data, fixed dropout masks or eval mode).
/// Relative error per coordinate: |a - n| / max(1, |a|, |n|).
GradCheckReport grad_check(std::vector<GradCheckParam> params,
                           const std::function<double()>& loss, double step = 1e-5);

}  // namespace anonet::nn
