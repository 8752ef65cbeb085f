#include "fairaudit/mitigate_post.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairaudit {

std::vector<double> roc_pivot(std::span<const double> scores,
                              std::span<const std::string> group, const ProtectedSpec& spec,
                              const PivotParams& params) {
    if (!(params.theta > 0.0 && params.theta < 1.0))
        throw std::invalid_argument("theta must lie strictly inside (0,1)");
    if (!(params.cutoff > 0.0 && params.cutoff < 1.0))
        throw std::invalid_argument("cutoff must lie strictly inside (0,1)");
    if (scores.size() != group.size())
        throw std::invalid_argument("scores and protected vectors differ in length");

    const double lo = params.cutoff - params.theta;
    const double hi = params.cutoff + params.theta;
    std::vector<double> out(scores.begin(), scores.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = out[i];
        if (!(s > lo && s < hi)) continue;
        const bool privileged = group[i] == spec.privileged;
        const bool favorable_side = s >= params.cutoff;
        if (privileged == favorable_side)  // privileged above, or unprivileged below
            out[i] = std::clamp(2.0 * params.cutoff - s, 0.0, 1.0);
    }
    return out;
}

std::vector<double> default_cutoff_grid() {
    std::vector<double> grid;
    grid.reserve(99);
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
    return grid;
}

CutoffSearchResult cutoff_search(const AuditDataset& d, const ProtectedSpec& spec,
                                 const std::string& model, const std::string& subgroup,
                                 std::span<const MetricId> metrics, std::span<const double> grid,
                                 const CutoffMap& base_cutoffs) {
    if (metrics.empty()) throw std::invalid_argument("cutoff search needs at least one metric");
    if (grid.empty()) throw std::invalid_argument("cutoff search needs a non-empty grid");
    for (double c : grid)
        if (!(c > 0.0 && c < 1.0))
            throw std::invalid_argument("grid cutoffs must lie strictly inside (0,1)");
    const auto levels = d.levels();
    if (std::find(levels.begin(), levels.end(), subgroup) == levels.end())
        throw std::runtime_error("unknown protected level '" + subgroup + "'");
    const ScoreColumn& sc = d.score(model);

    CutoffMap cutoffs = base_cutoffs;
    for (const auto& level : levels)
        if (!cutoffs.contains(level)) cutoffs.set(level, 0.5);

    CutoffSearchResult res;
    res.subgroup = subgroup;
    res.grid.assign(grid.begin(), grid.end());

    // audit view of a one-model dataset so the sweep reuses the metric table path
    AuditDataset view;
    view.y_true = d.y_true;
    view.group = d.group;
    view.scores.push_back(sc);
    view.label_name = d.label_name;
    view.group_name = d.group_name;

    int best_skipped = static_cast<int>(metrics.size()) + 1;
    for (double c : grid) {
        cutoffs.set(subgroup, c);
        const GroupMetricTable table = group_metric_table(view, cutoffs);
        std::vector<Maybe> row;
        double sum = 0.0;
        int undefined = 0;
        for (MetricId id : metrics) {
            Maybe loss = parity_loss(table, model, spec, id);
            if (loss) sum += *loss;
            else ++undefined;
            row.push_back(loss);
        }
        res.losses.push_back(std::move(row));
        res.skipped.push_back(undefined);
        if (undefined == static_cast<int>(metrics.size())) res.cumulated.push_back(std::nullopt);
        else res.cumulated.push_back(sum);

        const std::size_t at = res.cumulated.size() - 1;
        if (res.cumulated[at]) {
            const double cur = *res.cumulated[at];
            const bool better =
                undefined < best_skipped ||
                (undefined == best_skipped &&
                 (cur < *res.best_loss || (cur == *res.best_loss && c < res.best_cutoff)));
            if (better) {
                best_skipped = undefined;
                res.best_loss = cur;
                res.best_cutoff = c;
            }
        }
    }
    return res;
}

}  // namespace fairaudit
