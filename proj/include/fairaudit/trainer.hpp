#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

// One-hot / standardization recipe learned from fit rows. Categorical
// features drop the lexicographically first level; numeric columns are
// standardized with the sample (n-1) deviation, constant columns get sd 1.
struct Encoding {
    struct FeatureEnc {
        std::string name;
        bool numeric = false;
        double mean = 0.0;
        double sd = 1.0;
        std::vector<std::string> levels;  // kept levels, first one dropped
    };
    std::vector<FeatureEnc> features;
};

// Row-major numeric matrix with a trailing intercept column of ones.
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<std::string> column_names;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

Encoding learn_encoding(const std::vector<FeatureColumn>& features,
                        std::span<const std::size_t> fit_rows);

// Unseen categories map to an all-zero block for that feature.
DesignMatrix apply_encoding(const Encoding& enc, const std::vector<FeatureColumn>& features);

// learn on fit_rows, apply to all rows
DesignMatrix encode(const std::vector<FeatureColumn>& features,
                    std::span<const std::size_t> fit_rows);

struct FitOptions {
    double l2 = 1e-6;  // ridge on non-intercept coefficients; guards separation
    int max_iter = 100;
    double tol = 1e-8;  // infinity norm of the gradient
};

struct LogisticModel {
    std::vector<double> coef;  // aligned with DesignMatrix columns
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    double final_loss = 0.0;
};

// Damped Newton (IRLS with step halving) on the weighted negative
// log-likelihood plus (l2/2)*||coef without intercept||^2. Non-convergence
// is reported in the result, not thrown.
LogisticModel fit_logistic(const DesignMatrix& X, std::span<const int> y,
                           std::span<const double> weights = {}, const FitOptions& opt = {});

std::vector<double> predict_proba(const LogisticModel& m, const DesignMatrix& X);

// gradient of the fit objective at arbitrary coefficients (exposed for checks)
std::vector<double> logistic_gradient(const DesignMatrix& X, std::span<const int> y,
                                      std::span<const double> weights, double l2,
                                      std::span<const double> coef);
double logistic_loss(const DesignMatrix& X, std::span<const int> y,
                     std::span<const double> weights, double l2, std::span<const double> coef);

// P(random positive outranks random negative), ties counted 1/2.
double auc(std::span<const double> scores, std::span<const int> y_true);

}  // namespace fairaudit
