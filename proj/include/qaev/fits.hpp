#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qaev/common.hpp"

namespace qaev {

enum class FitModel { linear, quadratic, exponential };

std::string to_string(FitModel model);
FitModel fit_model_from_string(const std::string& name);

// Ordinary least squares over (n, y) points. The exponential model y = a*b^n
// is fit linearly on log y; its coefficients are reported as (a, b) and its
// rss is the residual sum of squares in log space. Polynomial models report
// rss in linear space.
struct FitResult {
    FitModel model = FitModel::linear;
    RealVector coefficients;  // linear: (c0, c1); quadratic: (c0, c1, c2); exponential: (a, b)
    double rss = 0.0;

    // Predicted y at a given bit count.
    double operator()(double n) const;
};

FitResult fit(FitModel model, const std::vector<std::pair<double, double>>& points);

}  // namespace qaev
