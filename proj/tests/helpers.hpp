#pragma once

#include <random>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace testing {

// Random valid dataset: every (subgroup, label) cell non-empty so reweighting
// and resampling preconditions hold.
inline fairaudit::AuditDataset random_dataset(std::mt19937& rng, int min_levels = 2,
                                              int max_levels = 4, int min_rows = 20,
                                              int max_rows = 200, int n_models = 1) {
    using namespace fairaudit;
    std::uniform_int_distribution<int> level_count(min_levels, max_levels);
    const int k = level_count(rng);
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));

    std::uniform_int_distribution<int> row_count(std::max(min_rows, 4 * k), max_rows);
    const int n = row_count(rng);

    AuditDataset d;
    d.label_name = "y";
    d.group_name = "g";
    // seed every cell, then fill the rest at random
    for (int i = 0; i < k; ++i)
        for (int y : {0, 1}) {
            d.group.push_back(names[static_cast<std::size_t>(i)]);
            d.y_true.push_back(y);
        }
    std::uniform_int_distribution<int> pick_level(0, k - 1);
    std::bernoulli_distribution pick_label(0.4 + 0.4 * std::uniform_real_distribution<>(0, 1)(rng));
    for (int i = 2 * k; i < n; ++i) {
        d.group.push_back(names[static_cast<std::size_t>(pick_level(rng))]);
        d.y_true.push_back(pick_label(rng) ? 1 : 0);
    }

    // loader-canonical form: the protected column is also a categorical feature
    d.features.push_back({d.group_name, d.group});

    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (int m = 0; m < n_models; ++m) {
        ScoreColumn sc;
        sc.label = "m" + std::to_string(m);
        sc.column = "score_m" + std::to_string(m);
        for (int i = 0; i < n; ++i) {
            // correlate mildly with the label so confusion cells stay populated
            double s = 0.65 * score(rng) + 0.35 * (d.y_true[static_cast<std::size_t>(i)] ? 0.9 : 0.1);
            sc.values.push_back(s);
        }
        d.scores.push_back(std::move(sc));
    }
    return d;
}

}  // namespace testing
