#include "fairaudit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace fairaudit {

Encoding learn_encoding(const std::vector<FeatureColumn>& features,
                        std::span<const std::size_t> fit_rows) {
    if (features.empty()) throw std::invalid_argument("at least one feature is required");
    Encoding enc;
    for (const auto& f : features) {
        Encoding::FeatureEnc fe;
        fe.name = f.name;
        fe.numeric = f.is_numeric();
        if (fe.numeric) {
            const auto& v = f.numeric();
            double sum = 0.0;
            for (std::size_t i : fit_rows) sum += v[i];
            fe.mean = sum / static_cast<double>(fit_rows.size());
            double ss = 0.0;
            for (std::size_t i : fit_rows) ss += (v[i] - fe.mean) * (v[i] - fe.mean);
            fe.sd = fit_rows.size() > 1 ? std::sqrt(ss / static_cast<double>(fit_rows.size() - 1))
                                        : 0.0;
            if (fe.sd == 0.0) fe.sd = 1.0;
        } else {
            const auto& v = f.categorical();
            std::set<std::string> levels;
            for (std::size_t i : fit_rows) levels.insert(v[i]);
            fe.levels.assign(levels.begin(), levels.end());
        }
        enc.features.push_back(std::move(fe));
    }
    return enc;
}

DesignMatrix apply_encoding(const Encoding& enc, const std::vector<FeatureColumn>& features) {
    std::size_t rows = 0;
    std::vector<const FeatureColumn*> cols;
    for (const auto& fe : enc.features) {
        auto it = std::find_if(features.begin(), features.end(),
                               [&](const FeatureColumn& f) { return f.name == fe.name; });
        if (it == features.end())
            throw std::runtime_error("feature '" + fe.name + "' missing from data");
        if (it->is_numeric() != fe.numeric)
            throw std::runtime_error("feature '" + fe.name + "' changed type");
        cols.push_back(&*it);
        rows = it->size();
    }

    DesignMatrix X;
    X.rows = rows;
    for (const auto& fe : enc.features) {
        if (fe.numeric) X.column_names.push_back(fe.name);
        else
            for (std::size_t k = 1; k < fe.levels.size(); ++k)
                X.column_names.push_back(fe.name + "=" + fe.levels[k]);
    }
    X.column_names.push_back("(intercept)");
    X.cols = X.column_names.size();
    X.data.assign(X.rows * X.cols, 0.0);

    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < enc.features.size(); ++j) {
            const auto& fe = enc.features[j];
            if (fe.numeric) {
                X.at(r, c++) = (cols[j]->numeric()[r] - fe.mean) / fe.sd;
            } else {
                const std::string& v = cols[j]->categorical()[r];
                auto it = std::lower_bound(fe.levels.begin(), fe.levels.end(), v);
                std::size_t hit = (it != fe.levels.end() && *it == v)
                                      ? static_cast<std::size_t>(it - fe.levels.begin())
                                      : 0;  // unseen or dropped level -> all zeros
                for (std::size_t k = 1; k < fe.levels.size(); ++k)
                    X.at(r, c++) = (k == hit) ? 1.0 : 0.0;
            }
        }
        X.at(r, c) = 1.0;
    }
    return X;
}

DesignMatrix encode(const std::vector<FeatureColumn>& features,
                    std::span<const std::size_t> fit_rows) {
    return apply_encoding(learn_encoding(features, fit_rows), features);
}

namespace {

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// ln(1 + e^eta), stable for large |eta|
double softplus(double eta) {
    if (eta > 35.0) return eta;
    if (eta < -35.0) return std::exp(eta);
    return std::log1p(std::exp(eta));
}

// Cholesky solve of A x = b for symmetric positive definite A (in place copies).
// Returns false when the factorization breaks down.
bool cholesky_solve(std::vector<double> A, std::vector<double> b, std::size_t n,
                    std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = A[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= A[j * n + k] * A[j * n + k];
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        A[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            A[i * n + j] = s / d;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= A[k * n + ii] * x[k];
        x[ii] = s / A[ii * n + ii];
    }
    return true;
}

void check_inputs(const DesignMatrix& X, std::span<const int> y, std::span<const double> w) {
    if (y.size() != X.rows) throw std::invalid_argument("label length does not match matrix rows");
    if (!w.empty() && w.size() != X.rows)
        throw std::invalid_argument("weight length does not match matrix rows");
    for (double v : X.data)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in design matrix");
    for (double v : w)
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("weights must be finite and >= 0");
}

}  // namespace

double logistic_loss(const DesignMatrix& X, std::span<const int> y,
                     std::span<const double> weights, double l2, std::span<const double> coef) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (std::size_t c = 0; c < X.cols; ++c) eta += X.at(i, c) * coef[c];
        const double w = weights.empty() ? 1.0 : weights[i];
        // -[y*eta - ln(1+e^eta)]
        loss += w * (softplus(eta) - (y[i] == 1 ? eta : 0.0));
    }
    for (std::size_t c = 0; c + 1 < X.cols; ++c) loss += 0.5 * l2 * coef[c] * coef[c];
    return loss;
}

std::vector<double> logistic_gradient(const DesignMatrix& X, std::span<const int> y,
                                      std::span<const double> weights, double l2,
                                      std::span<const double> coef) {
    std::vector<double> g(X.cols, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (std::size_t c = 0; c < X.cols; ++c) eta += X.at(i, c) * coef[c];
        const double w = weights.empty() ? 1.0 : weights[i];
        const double r = w * (sigmoid(eta) - (y[i] == 1 ? 1.0 : 0.0));
        for (std::size_t c = 0; c < X.cols; ++c) g[c] += r * X.at(i, c);
    }
    for (std::size_t c = 0; c + 1 < X.cols; ++c) g[c] += l2 * coef[c];
    return g;
}

LogisticModel fit_logistic(const DesignMatrix& X, std::span<const int> y,
                           std::span<const double> weights, const FitOptions& opt) {
    check_inputs(X, y, weights);
    const std::size_t p = X.cols;
    LogisticModel m;
    m.coef.assign(p, 0.0);

    double loss = logistic_loss(X, y, weights, opt.l2, m.coef);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        std::vector<double> g = logistic_gradient(X, y, weights, opt.l2, m.coef);
        m.grad_norm = 0.0;
        for (double v : g) m.grad_norm = std::max(m.grad_norm, std::fabs(v));
        m.iterations = iter;
        if (m.grad_norm <= opt.tol) {
            m.converged = true;
            break;
        }

        // Hessian: X^T diag(w p (1-p)) X + l2 on non-intercept diagonal
        std::vector<double> H(p * p, 0.0);
        for (std::size_t i = 0; i < X.rows; ++i) {
            double eta = 0.0;
            for (std::size_t c = 0; c < p; ++c) eta += X.at(i, c) * m.coef[c];
            const double pr = std::clamp(sigmoid(eta), 1e-10, 1.0 - 1e-10);
            const double wi = (weights.empty() ? 1.0 : weights[i]) * pr * (1.0 - pr);
            for (std::size_t a = 0; a < p; ++a) {
                const double xa = X.at(i, a) * wi;
                for (std::size_t b = a; b < p; ++b) H[a * p + b] += xa * X.at(i, b);
            }
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < a; ++b) H[a * p + b] = H[b * p + a];
        for (std::size_t c = 0; c + 1 < p; ++c) H[c * p + c] += opt.l2;

        std::vector<double> step;
        double jitter = 0.0;
        while (!cholesky_solve(H, g, p, step)) {
            jitter = jitter == 0.0 ? 1e-8 : jitter * 100.0;
            if (jitter > 1.0) { m.final_loss = loss; return m; }  // hopeless Hessian
            for (std::size_t c = 0; c < p; ++c) H[c * p + c] += jitter;
        }

        // halve the step until the loss stops increasing
        double scale = 1.0;
        std::vector<double> trial(p);
        for (int h = 0; h < 40; ++h) {
            for (std::size_t c = 0; c < p; ++c) trial[c] = m.coef[c] - scale * step[c];
            const double trial_loss = logistic_loss(X, y, weights, opt.l2, trial);
            if (trial_loss <= loss || scale < 1e-12) {
                m.coef = trial;
                loss = trial_loss;
                break;
            }
            scale *= 0.5;
        }
        m.iterations = iter + 1;
    }
    if (!m.converged) {
        std::vector<double> g = logistic_gradient(X, y, weights, opt.l2, m.coef);
        m.grad_norm = 0.0;
        for (double v : g) m.grad_norm = std::max(m.grad_norm, std::fabs(v));
        m.converged = m.grad_norm <= opt.tol;
    }
    m.final_loss = loss;
    return m;
}

std::vector<double> predict_proba(const LogisticModel& m, const DesignMatrix& X) {
    if (m.coef.size() != X.cols)
        throw std::invalid_argument("coefficient count does not match matrix columns");
    std::vector<double> p(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (std::size_t c = 0; c < X.cols; ++c) eta += X.at(i, c) * m.coef[c];
        p[i] = std::clamp(sigmoid(eta), 1e-15, 1.0 - 1e-15);
    }
    return p;
}

double auc(std::span<const double> scores, std::span<const int> y_true) {
    if (scores.size() != y_true.size())
        throw std::invalid_argument("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over ties, then the Mann-Whitney statistic
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (y_true[k] == 1) { rank_sum += rank[k]; ++n_pos; }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc requires both classes to be present");
    const double u = rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace fairaudit
