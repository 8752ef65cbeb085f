#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

// w(s,y) = n_s * n_y / (N * n_{s,y}); every row gets the weight of its cell.
// With these weights applied, weighted favorable fractions agree across
// subgroups exactly.
struct ReweightResult {
    std::vector<double> row_weights;
    std::map<std::pair<std::string, int>, double> cell_weights;  // (level, label) -> w
};

ReweightResult reweight(std::span<const std::string> group, std::span<const int> y_true);

enum class ResampleMode { uniform, preferential };

struct ResampleCell {
    std::string level;
    int label = 0;
    std::size_t original_count = 0;
    std::size_t target_count = 0;  // round(w * n), half away from zero
};

struct ResamplePlan {
    std::vector<ResampleCell> cells;
    std::vector<std::size_t> indices;  // resulting row-index multiset, ascending
};

// Per (subgroup, label) cell, grow or shrink to round(w*n) rows. Uniform mode
// draws duplicates/removals from the seeded generator; preferential mode
// duplicates or removes the most borderline rows first, ranked by
// |ranker - cutoff| ascending with row index as the tie break.
ResamplePlan resample(std::span<const std::string> group, std::span<const int> y_true,
                      ResampleMode mode, std::span<const double> ranker_scores = {},
                      double cutoff = 0.5, std::uint64_t seed = 42);

struct RepairedFeature {
    std::vector<double> values;
    double lambda = 0.0;
};

// Geometric repair: pulls each subgroup's empirical distribution toward the
// per-quantile median of all subgroup quantile functions, by degree lambda.
// Ranks within a subgroup are preserved; lambda=0 returns the input exactly.
RepairedFeature repair_feature(std::span<const double> feature,
                               std::span<const std::string> group, double lambda);

enum class PreProcessMethod { reweight, resample_uniform, resample_preferential,
                              disparate_impact_remover };

struct PreProcessParams {
    double lambda = 1.0;         // disparate impact remover
    std::string feature;         // disparate impact remover target column
    std::string ranker_label;    // preferential resampling score column
    double ranker_cutoff = 0.5;  // preferential resampling border
    std::uint64_t seed = 42;
};

// reweight -> same rows plus a "_weights_" column; resample -> rows
// materialized per plan; remover -> the named numeric feature replaced.
AuditDataset pre_process_data(const AuditDataset& d, PreProcessMethod method,
                              const PreProcessParams& params);

}  // namespace fairaudit
