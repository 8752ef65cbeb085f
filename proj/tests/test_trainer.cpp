#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>
#include <random>

#include "fairaudit/trainer.hpp"

using namespace fairaudit;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), 0);
    return r;
}

DesignMatrix random_design(std::mt19937& rng, std::size_t n, std::size_t p) {
    std::normal_distribution<double> g(0.0, 1.0);
    DesignMatrix X;
    X.rows = n;
    X.cols = p + 1;
    X.data.assign(n * (p + 1), 0.0);
    for (std::size_t c = 0; c < p; ++c) X.column_names.push_back("x" + std::to_string(c));
    X.column_names.push_back("(intercept)");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < p; ++c) X.at(i, c) = g(rng);
        X.at(i, p) = 1.0;
    }
    return X;
}

std::vector<int> random_labels(std::mt19937& rng, const DesignMatrix& X,
                               const std::vector<double>& beta) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> y(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double eta = 0.0;
        for (std::size_t c = 0; c < X.cols; ++c) eta += X.at(i, c) * beta[c];
        y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
    }
    return y;
}

}  // namespace

TEST_CASE("encoding") {
    SUBCASE("categorical drops the first level") {
        std::vector<FeatureColumn> f = {{"c", std::vector<std::string>{"a", "b", "a", "b"}}};
        const DesignMatrix X = encode(f, all_rows(4));
        REQUIRE(X.cols == 2);  // one indicator + intercept
        CHECK(X.column_names[0] == "c=b");
        CHECK(X.at(0, 0) == 0.0);
        CHECK(X.at(1, 0) == 1.0);
        CHECK(X.at(0, 1) == 1.0);
    }
    SUBCASE("numeric standardized with the sample deviation") {
        std::vector<FeatureColumn> f = {{"x", std::vector<double>{1.0, 3.0}}};
        const DesignMatrix X = encode(f, all_rows(2));
        CHECK(X.at(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(X.at(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("constant column becomes zeros") {
        std::vector<FeatureColumn> f = {{"x", std::vector<double>{2.0, 2.0, 2.0}}};
        const DesignMatrix X = encode(f, all_rows(3));
        for (std::size_t i = 0; i < 3; ++i) CHECK(X.at(i, 0) == 0.0);
    }
    SUBCASE("unseen category maps to an all-zero block") {
        std::vector<FeatureColumn> train = {{"c", std::vector<std::string>{"a", "b", "a"}}};
        const Encoding enc = learn_encoding(train, all_rows(3));
        std::vector<FeatureColumn> apply = {{"c", std::vector<std::string>{"b", "zzz"}}};
        const DesignMatrix X = apply_encoding(enc, apply);
        CHECK(X.at(0, 0) == 1.0);
        CHECK(X.at(1, 0) == 0.0);
    }
    SUBCASE("empty feature set rejected") {
        std::vector<FeatureColumn> none;
        CHECK_THROWS_AS(encode(none, all_rows(0)), std::invalid_argument);
    }
}

TEST_CASE("intercept-only fit has the closed form") {
    DesignMatrix X;
    X.rows = 8;
    X.cols = 1;
    X.column_names = {"(intercept)"};
    X.data.assign(8, 1.0);
    const std::vector<int> y = {1, 1, 1, 1, 1, 1, 0, 0};  // 75% positive
    const LogisticModel m = fit_logistic(X, y);
    CHECK(m.converged);
    CHECK(m.coef[0] == doctest::Approx(std::log(3.0)).epsilon(1e-8));
    const std::vector<double> p = predict_proba(m, X);
    for (double v : p) CHECK(v == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("separable data reaches training accuracy 1 at cutoff 0.5") {
    DesignMatrix X;
    X.rows = 4;
    X.cols = 2;
    X.column_names = {"x", "(intercept)"};
    X.data = {-2, 1, -1, 1, 1, 1, 2, 1};
    const std::vector<int> y = {0, 0, 1, 1};
    const LogisticModel m = fit_logistic(X, y);
    const std::vector<double> p = predict_proba(m, X);
    for (std::size_t i = 0; i < 4; ++i) CHECK((p[i] >= 0.5 ? 1 : 0) == y[i]);
}

TEST_CASE("doubling the weights leaves coefficients nearly unchanged") {
    std::mt19937 rng(41);
    const DesignMatrix X = random_design(rng, 60, 3);
    const std::vector<int> y = random_labels(rng, X, {0.8, -0.5, 0.3, 0.1});
    std::vector<double> w1(60, 1.0), w2(60, 2.0);
    const LogisticModel m1 = fit_logistic(X, y, w1);
    const LogisticModel m2 = fit_logistic(X, y, w2);
    for (std::size_t c = 0; c < X.cols; ++c)
        CHECK(std::fabs(m1.coef[c] - m2.coef[c]) <= 1e-4);
}

TEST_CASE("analytic gradient matches central differences"
          * doctest::description("property")) {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + static_cast<std::size_t>(rng() % 30);
        const std::size_t p = 1 + static_cast<std::size_t>(rng() % 3);
        const DesignMatrix X = random_design(rng, n, p);
        std::vector<double> beta(p + 1, 0.3);
        const std::vector<int> y = random_labels(rng, X, beta);

        FitOptions opt;
        opt.max_iter = 2;  // stop early so the gradient is far from zero
        const LogisticModel m = fit_logistic(X, y, {}, opt);
        CHECK_FALSE(m.converged);  // reported, not thrown

        const std::vector<double> g = logistic_gradient(X, y, {}, opt.l2, m.coef);
        const double h = 1e-5;
        for (std::size_t c = 0; c < m.coef.size(); ++c) {
            std::vector<double> up = m.coef, dn = m.coef;
            up[c] += h;
            dn[c] -= h;
            const double fd =
                (logistic_loss(X, y, {}, opt.l2, up) - logistic_loss(X, y, {}, opt.l2, dn)) /
                (2 * h);
            CHECK(std::fabs(g[c] - fd) <= 1e-4 * std::max(1.0, std::fabs(g[c])));
        }
    }
}

TEST_CASE("non-finite design values are rejected") {
    DesignMatrix X;
    X.rows = 2;
    X.cols = 1;
    X.column_names = {"(intercept)"};
    X.data = {1.0, std::numeric_limits<double>::quiet_NaN()};
    const std::vector<int> y = {0, 1};
    CHECK_THROWS_AS(fit_logistic(X, y), std::invalid_argument);
}

TEST_CASE("loss is monotone in the iteration cap") {
    std::mt19937 rng(47);
    const DesignMatrix X = random_design(rng, 80, 4);
    const std::vector<int> y = random_labels(rng, X, {1.2, -0.7, 0.4, -0.2, 0.1});
    double prev = std::numeric_limits<double>::infinity();
    for (int cap = 1; cap <= 6; ++cap) {
        FitOptions opt;
        opt.max_iter = cap;
        const LogisticModel m = fit_logistic(X, y, {}, opt);
        CHECK(m.final_loss <= prev + 1e-12);
        prev = m.final_loss;
    }
}

TEST_CASE("predict_proba") {
    DesignMatrix X;
    X.rows = 2;
    X.cols = 2;
    X.column_names = {"x", "(intercept)"};
    X.data = {0.5, 1.0, -0.5, 1.0};
    SUBCASE("zero coefficients score one half") {
        LogisticModel m;
        m.coef = {0.0, 0.0};
        for (double v : predict_proba(m, X)) CHECK(v == 0.5);
    }
    SUBCASE("intercept ln 3 scores 0.75") {
        LogisticModel m;
        m.coef = {0.0, std::log(3.0)};
        for (double v : predict_proba(m, X)) CHECK(v == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("monotone in a positively weighted feature") {
        LogisticModel m;
        m.coef = {2.0, 0.1};
        const std::vector<double> p = predict_proba(m, X);
        CHECK(p[0] > p[1]);
    }
    SUBCASE("dimension mismatch") {
        LogisticModel m;
        m.coef = {1.0};
        CHECK_THROWS_AS(predict_proba(m, X), std::invalid_argument);
    }
}

TEST_CASE("auc") {
    SUBCASE("perfect ranking") {
        CHECK(auc(std::vector<double>{0.1, 0.9}, std::vector<int>{0, 1}) == 1.0);
    }
    SUBCASE("all ties give one half") {
        CHECK(auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{0, 1, 0, 1}) == 0.5);
    }
    SUBCASE("matches the quadratic pair oracle") {
        std::mt19937 rng(53);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 5 + rng() % 40;
            std::vector<double> s(n);
            std::vector<int> y(n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = std::round(u(rng) * 8) / 8.0;  // force ties
                y[i] = i < n / 2 ? 0 : 1;
            }
            if (std::count(y.begin(), y.end(), 1) == 0 ||
                std::count(y.begin(), y.end(), 0) == 0)
                continue;
            double wins = 0.0;
            std::size_t pairs = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (y[i] == 1 && y[j] == 0) {
                        ++pairs;
                        if (s[i] > s[j]) wins += 1.0;
                        else if (s[i] == s[j]) wins += 0.5;
                    }
            CHECK(auc(s, y) == wins / static_cast<double>(pairs));
        }
    }
    SUBCASE("invariant under strictly increasing transforms") {
        std::mt19937 rng(59);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> s(30);
        std::vector<int> y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            s[i] = u(rng);
            y[i] = i % 3 == 0 ? 1 : 0;
        }
        std::vector<double> t = s;
        for (double& v : t) v = std::tanh(3.0 * v);  // strictly increasing into (0,1)
        CHECK(auc(s, y) == auc(t, y));
    }
    SUBCASE("single class rejected") {
        CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.9}, std::vector<int>{1, 1}),
                        std::invalid_argument);
    }
}
