#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

// Critical region is the open interval (cutoff - theta, cutoff + theta)
// intersected with [0,1].
struct PivotParams {
    double theta = 0.1;
    double cutoff = 0.5;
};

// Flips borderline scores to the other side of the cutoff, keeping the
// distance to the cutoff: privileged rows on the favorable side move down,
// unprivileged rows on the unfavorable side move up. A score exactly at the
// cutoff counts as the favorable side. Idempotent.
std::vector<double> roc_pivot(std::span<const double> scores,
                              std::span<const std::string> group, const ProtectedSpec& spec,
                              const PivotParams& params);

struct CutoffSearchResult {
    std::string subgroup;
    std::vector<double> grid;
    std::vector<std::vector<Maybe>> losses;  // [grid point][requested metric]
    std::vector<Maybe> cumulated;            // sum of defined entries, per grid point
    std::vector<int> skipped;                // undefined entries, per grid point
    double best_cutoff = 0.0;
    Maybe best_loss;
};

// 0.01, 0.02, ..., 0.99
std::vector<double> default_cutoff_grid();

// Exhaustive sweep of the chosen subgroup's cutoff with all other subgroups
// held at their current cutoffs. The argmin prefers grid points where every
// requested metric is defined (falling back to maximal defined count), with
// the smallest cutoff breaking ties.
CutoffSearchResult cutoff_search(const AuditDataset& d, const ProtectedSpec& spec,
                                 const std::string& model, const std::string& subgroup,
                                 std::span<const MetricId> metrics, std::span<const double> grid,
                                 const CutoffMap& base_cutoffs);

}  // namespace fairaudit
