#include "anonet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "anonet/errors.hpp"

namespace anonet::nn {

GradCheckReport grad_check(std::vector<GradCheckParam> params,
                           const std::function<double()>& loss, double step) {
    std::size_t total = 0;
    for (const auto& p : params) {
        if (!p.value || !p.analytic) throw InputError("grad_check: null parameter view");
        if (!p.value->same_shape(*p.analytic))
            throw ShapeError("grad_check: analytic gradient shape mismatch for " + p.name);
        total += p.value->size();
    }
    if (total > 10000) throw InputError("grad_check: too many parameters for finite differences");

    GradCheckReport report;
    for (const auto& p : params) {
        for (std::size_t i = 0; i < p.value->size(); ++i) {
            const double saved = p.value->data[i];
            p.value->data[i] = saved + step;
            const double up = loss();
            p.value->data[i] = saved - step;
            const double down = loss();
            p.value->data[i] = saved;

            const double numeric = (up - down) / (2.0 * step);
            const double analytic = p.analytic->data[i];
            const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            const double rel = std::abs(analytic - numeric) / denom;
            ++report.checked;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p.name;
                report.worst_index = i;
                report.worst_analytic = analytic;
                report.worst_numeric = numeric;
            }
        }
    }
    return report;
}

}  // namespace anonet::nn
