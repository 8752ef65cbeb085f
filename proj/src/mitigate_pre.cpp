#include "fairaudit/mitigate_pre.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fairaudit {

namespace {

std::map<std::pair<std::string, int>, std::vector<std::size_t>> cell_rows(
    std::span<const std::string> group, std::span<const int> y_true) {
    if (group.size() != y_true.size())
        throw std::invalid_argument("protected and label vectors differ in length");
    std::map<std::pair<std::string, int>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < group.size(); ++i)
        cells[{group[i], y_true[i]}].push_back(i);
    return cells;
}

// uniform draw from [0,n) via multiply-shift; stable across standard libraries
std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

long long round_half_away(double v) {
    return std::llround(v);  // llround rounds halfway cases away from zero
}

}  // namespace

ReweightResult reweight(std::span<const std::string> group, std::span<const int> y_true) {
    const auto cells = cell_rows(group, y_true);
    const double n_total = static_cast<double>(group.size());

    std::map<std::string, std::size_t> n_s;
    std::array<std::size_t, 2> n_y = {0, 0};
    for (std::size_t i = 0; i < group.size(); ++i) {
        ++n_s[group[i]];
        ++n_y[static_cast<std::size_t>(y_true[i])];
    }

    ReweightResult out;
    for (const auto& [level, count] : n_s)
        for (int label : {0, 1})
            if (!cells.contains({level, label}))
                throw std::runtime_error("reweight: empty cell (subgroup '" + level +
                                         "', label " + std::to_string(label) + ")");

    for (const auto& [key, rows] : cells) {
        const auto& [level, label] = key;
        const double w = static_cast<double>(n_s[level]) *
                         static_cast<double>(n_y[static_cast<std::size_t>(label)]) /
                         (n_total * static_cast<double>(rows.size()));
        out.cell_weights[key] = w;
    }
    out.row_weights.resize(group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
        out.row_weights[i] = out.cell_weights.at({group[i], y_true[i]});
    return out;
}

ResamplePlan resample(std::span<const std::string> group, std::span<const int> y_true,
                      ResampleMode mode, std::span<const double> ranker_scores, double cutoff,
                      std::uint64_t seed) {
    if (mode == ResampleMode::preferential) {
        if (ranker_scores.size() != group.size())
            throw std::invalid_argument("preferential resampling requires ranker scores");
        for (double r : ranker_scores)
            if (!(r >= 0.0 && r <= 1.0))
                throw std::invalid_argument("ranker scores must lie in [0,1]");
    }

    const ReweightResult rw = reweight(group, y_true);
    const auto cells = cell_rows(group, y_true);
    std::mt19937_64 rng(seed);

    ResamplePlan plan;
    for (const auto& [key, rows] : cells) {
        const std::size_t n = rows.size();
        const auto target =
            static_cast<std::size_t>(round_half_away(rw.cell_weights.at(key) * static_cast<double>(n)));
        plan.cells.push_back({key.first, key.second, n, target});

        std::vector<std::size_t> take;
        if (target == n) {
            take = rows;
        } else if (mode == ResampleMode::uniform) {
            if (target > n) {
                take = rows;
                for (std::size_t k = n; k < target; ++k) take.push_back(rows[bounded(rng, n)]);
            } else {
                std::vector<std::size_t> pool = rows;
                for (std::size_t k = 0; k < target; ++k)
                    std::swap(pool[k], pool[k + bounded(rng, n - k)]);
                take.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(target));
            }
        } else {
            // most borderline first: |ranker - cutoff| ascending, then row index
            std::vector<std::size_t> order = rows;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double da = std::fabs(ranker_scores[a] - cutoff);
                const double db = std::fabs(ranker_scores[b] - cutoff);
                if (da != db) return da < db;
                return a < b;
            });
            if (target > n) {
                take = rows;
                for (std::size_t k = 0; k < target - n; ++k) take.push_back(order[k % n]);
            } else {
                take.assign(order.begin() + static_cast<std::ptrdiff_t>(n - target), order.end());
            }
        }
        plan.indices.insert(plan.indices.end(), take.begin(), take.end());
    }
    std::sort(plan.indices.begin(), plan.indices.end());
    return plan;
}

RepairedFeature repair_feature(std::span<const double> feature, std::span<const std::string> group,
                               double lambda) {
    if (feature.size() != group.size())
        throw std::invalid_argument("feature and protected vectors differ in length");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("lambda must lie in [0,1]");
    if (feature.empty()) throw std::invalid_argument("empty feature");

    RepairedFeature out;
    out.lambda = lambda;
    out.values.assign(feature.begin(), feature.end());
    if (lambda == 0.0) return out;

    std::map<std::string, std::vector<std::size_t>> subgroup_rows;
    for (std::size_t i = 0; i < group.size(); ++i) subgroup_rows[group[i]].push_back(i);

    const long long grid_n =
        std::max<long long>(1000, static_cast<long long>(feature.size()));

    struct GroupData {
        std::vector<double> sorted;
        std::vector<long long> rank2;  // 2 * average rank (1-based), per original row
        std::vector<std::size_t> rows;
    };
    std::map<std::string, GroupData> groups;
    for (auto& [level, level_rows] : subgroup_rows) {
        GroupData gd;
        gd.rows = level_rows;
        const std::vector<std::size_t>& rows = gd.rows;
        std::vector<std::size_t> order(rows.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return feature[rows[a]] < feature[rows[b]];
        });
        gd.sorted.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) gd.sorted[k] = feature[rows[order[k]]];

        gd.rank2.resize(rows.size());
        std::size_t i = 0;
        while (i < rows.size()) {
            std::size_t j = i;
            while (j + 1 < rows.size() && gd.sorted[j + 1] == gd.sorted[i]) ++j;
            const long long r2 = static_cast<long long>(i + j) + 2;  // 2 * avg 1-based rank
            for (std::size_t k = i; k <= j; ++k) gd.rank2[order[k]] = r2;
            i = j + 1;
        }
        groups.emplace(level, std::move(gd));
    }

    // target quantile function: per-grid-point median across subgroup quantiles
    std::vector<double> target(static_cast<std::size_t>(grid_n));
    std::vector<double> vals(groups.size());
    for (long long j = 1; j <= grid_n; ++j) {
        std::size_t g = 0;
        for (const auto& [level, gd] : groups) {
            const long long ns = static_cast<long long>(gd.sorted.size());
            const long long k = (j * ns + grid_n - 1) / grid_n;  // ceil(j*ns/G), in [1, ns]
            vals[g++] = gd.sorted[static_cast<std::size_t>(k - 1)];
        }
        std::sort(vals.begin(), vals.end());
        const std::size_t mid = vals.size() / 2;
        target[static_cast<std::size_t>(j - 1)] =
            vals.size() % 2 ? vals[mid] : 0.5 * (vals[mid - 1] + vals[mid]);
    }

    for (const auto& [level, gd] : groups) {
        const long long ns = static_cast<long long>(gd.rows.size());
        for (std::size_t k = 0; k < gd.rows.size(); ++k) {
            const long long r2 = gd.rank2[k];
            // snap the quantile to the grid from below so that the grid
            // evaluation lands back on this observation's own order statistic
            const long long j = (r2 * grid_n) / (2 * ns);
            const double a = target[static_cast<std::size_t>(j - 1)];
            const std::size_t row = gd.rows[k];
            out.values[row] = (1.0 - lambda) * feature[row] + lambda * a;
        }
    }
    return out;
}

namespace {

AuditDataset gather_rows(const AuditDataset& d, std::span<const std::size_t> idx) {
    AuditDataset out;
    out.label_name = d.label_name;
    out.group_name = d.group_name;
    out.y_true.reserve(idx.size());
    out.group.reserve(idx.size());
    for (std::size_t i : idx) {
        out.y_true.push_back(d.y_true[i]);
        out.group.push_back(d.group[i]);
    }
    for (const auto& s : d.scores) {
        ScoreColumn sc{s.label, s.column, {}};
        sc.values.reserve(idx.size());
        for (std::size_t i : idx) sc.values.push_back(s.values[i]);
        out.scores.push_back(std::move(sc));
    }
    for (const auto& f : d.features) {
        FeatureColumn fc;
        fc.name = f.name;
        if (f.is_numeric()) {
            std::vector<double> v;
            v.reserve(idx.size());
            for (std::size_t i : idx) v.push_back(f.numeric()[i]);
            fc.values = std::move(v);
        } else {
            std::vector<std::string> v;
            v.reserve(idx.size());
            for (std::size_t i : idx) v.push_back(f.categorical()[i]);
            fc.values = std::move(v);
        }
        out.features.push_back(std::move(fc));
    }
    return out;
}

}  // namespace

AuditDataset pre_process_data(const AuditDataset& d, PreProcessMethod method,
                              const PreProcessParams& params) {
    switch (method) {
        case PreProcessMethod::reweight: {
            if (d.has_feature("_weights_"))
                throw std::runtime_error("dataset already has a '_weights_' column");
            const ReweightResult rw = reweight(d.group, d.y_true);
            AuditDataset out = d;
            out.features.push_back({"_weights_", rw.row_weights});
            return out;
        }
        case PreProcessMethod::resample_uniform: {
            const ResamplePlan plan =
                resample(d.group, d.y_true, ResampleMode::uniform, {}, 0.5, params.seed);
            return gather_rows(d, plan.indices);
        }
        case PreProcessMethod::resample_preferential: {
            if (params.ranker_label.empty())
                throw std::runtime_error("preferential resampling requires a ranker score column");
            const ScoreColumn& ranker = d.score(params.ranker_label);
            const ResamplePlan plan = resample(d.group, d.y_true, ResampleMode::preferential,
                                               ranker.values, params.ranker_cutoff, params.seed);
            return gather_rows(d, plan.indices);
        }
        case PreProcessMethod::disparate_impact_remover: {
            if (params.feature.empty())
                throw std::runtime_error("disparate impact remover requires a feature name");
            const FeatureColumn& f = d.feature(params.feature);
            if (!f.is_numeric())
                throw std::runtime_error("disparate impact remover requires a numeric feature; '" +
                                         params.feature + "' is categorical");
            const RepairedFeature rep = repair_feature(f.numeric(), d.group, params.lambda);
            AuditDataset out = d;
            for (auto& fc : out.features)
                if (fc.name == params.feature) fc.values = rep.values;
            return out;
        }
    }
    throw std::logic_error("unreachable method");
}

}  // namespace fairaudit
