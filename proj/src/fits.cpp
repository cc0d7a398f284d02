#include "qaev/fits.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace qaev {

std::string to_string(FitModel model) {
    switch (model) {
        case FitModel::linear: return "linear";
        case FitModel::quadratic: return "quadratic";
        case FitModel::exponential: return "exponential";
    }
    throw ConfigError("unknown fit model");
}

FitModel fit_model_from_string(const std::string& name) {
    if (name == "linear") return FitModel::linear;
    if (name == "quadratic") return FitModel::quadratic;
    if (name == "exponential") return FitModel::exponential;
    throw ConfigError("unknown fit model: " + name);
}

double FitResult::operator()(double n) const {
    switch (model) {
        case FitModel::linear: return coefficients[0] + coefficients[1] * n;
        case FitModel::quadratic:
            return coefficients[0] + coefficients[1] * n + coefficients[2] * n * n;
        case FitModel::exponential:
            return coefficients[0] * std::pow(coefficients[1], n);
    }
    throw ConfigError("unknown fit model");
}

FitResult fit(FitModel model, const std::vector<std::pair<double, double>>& points) {
    const int degree = model == FitModel::quadratic ? 2 : 1;
    const int params = degree + 1;
    const auto count = static_cast<Eigen::Index>(points.size());
    if (count < params)
        throw FitError("fit needs at least " + std::to_string(params) + " points, got " +
                       std::to_string(count));

    Eigen::MatrixXd design(count, params);
    RealVector target(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto [n, y] = points[static_cast<std::size_t>(i)];
        double value = y;
        if (model == FitModel::exponential) {
            if (y <= 0) throw FitError("exponential fit needs positive values");
            value = std::log(y);
        }
        design(i, 0) = 1.0;
        design(i, 1) = n;
        if (params > 2) design(i, 2) = n * n;
        target[i] = value;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < params) throw FitError("degenerate fit input (collinear points)");
    RealVector solution = qr.solve(target);

    FitResult result;
    result.model = model;
    result.rss = (design * solution - target).squaredNorm();
    if (model == FitModel::exponential) {
        result.coefficients = RealVector(2);
        result.coefficients << std::exp(solution[0]), std::exp(solution[1]);
    } else {
        result.coefficients = solution;
    }
    return result;
}

}  // namespace qaev
