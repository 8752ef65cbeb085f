#include "fairaudit/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fairaudit {

namespace {
constexpr const char* kMetricNames[12] = {"TPR", "TNR", "PPV", "NPV", "FNR", "FPR",
                                          "FDR", "FOR", "TS",  "STP", "ACC", "F1"};
}

std::string to_string(MetricId id) { return kMetricNames[static_cast<std::size_t>(id)]; }

std::optional<MetricId> metric_from_string(const std::string& name) {
    for (std::size_t i = 0; i < 12; ++i)
        if (name == kMetricNames[i]) return static_cast<MetricId>(i);
    return std::nullopt;
}

std::string check_name(MetricId id) {
    switch (id) {
        case MetricId::TPR: return "Equal opportunity";
        case MetricId::PPV: return "Predictive parity";
        case MetricId::FPR: return "Predictive equality";
        case MetricId::STP: return "Statistical parity";
        case MetricId::ACC: return "Accuracy equality";
        default: return to_string(id);
    }
}

void GroupMetricTable::add_model(const std::string& label,
                                 std::map<std::string, MetricArray> values) {
    if (values_.contains(label))
        throw std::runtime_error("model '" + label + "' already present in metric table");
    order_.push_back(label);
    values_.emplace(label, std::move(values));
}

const std::map<std::string, MetricArray>& GroupMetricTable::levels(const std::string& model) const {
    auto it = values_.find(model);
    if (it == values_.end()) throw std::runtime_error("unknown model label '" + model + "'");
    return it->second;
}

Maybe GroupMetricTable::value(const std::string& model, const std::string& level,
                              MetricId id) const {
    const auto& lv = levels(model);
    auto it = lv.find(level);
    if (it == lv.end())
        throw std::runtime_error("unknown protected level '" + level + "'");
    return metric_slot(it->second, id);
}

std::vector<int> classify(std::span<const double> scores, std::span<const std::string> group,
                          const CutoffMap& cutoffs) {
    if (scores.size() != group.size())
        throw std::invalid_argument("scores and protected vectors differ in length");
    std::vector<int> pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        pred[i] = scores[i] >= cutoffs.at(group[i]) ? 1 : 0;
    return pred;
}

SubgroupConfusion confusion_by_subgroup(
    std::span<const int> y_true, std::span<const int> y_pred,
    const std::map<std::string, std::vector<std::size_t>>& partition) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("y_true and y_pred differ in length");
    SubgroupConfusion out;
    for (const auto& [level, idx] : partition) {
        ConfusionCounts c;
        for (std::size_t i : idx) {
            if (y_true[i] == 1) {
                if (y_pred[i] == 1) ++c.tp;
                else ++c.fn;
            } else {
                if (y_pred[i] == 1) ++c.fp;
                else ++c.tn;
            }
        }
        out.emplace(level, c);
    }
    return out;
}

Maybe metric_from_counts(const ConfusionCounts& c, MetricId id) {
    auto frac = [](long long num, long long den) -> Maybe {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    // The four complement metrics share their counterpart's denominator; they
    // are computed as 1 - counterpart so the complement identities hold
    // bitwise, not just to the last rounding step.
    auto complement = [&](long long num, long long den) -> Maybe {
        const Maybe base = frac(num, den);
        if (!base) return std::nullopt;
        return 1.0 - *base;
    };
    switch (id) {
        case MetricId::TPR: return frac(c.tp, c.tp + c.fn);
        case MetricId::TNR: return frac(c.tn, c.tn + c.fp);
        case MetricId::PPV: return frac(c.tp, c.tp + c.fp);
        case MetricId::NPV: return frac(c.tn, c.tn + c.fn);
        case MetricId::FNR: return complement(c.tp, c.tp + c.fn);
        case MetricId::FPR: return complement(c.tn, c.tn + c.fp);
        case MetricId::FDR: return complement(c.tp, c.tp + c.fp);
        case MetricId::FOR: return complement(c.tn, c.tn + c.fn);
        case MetricId::TS: return frac(c.tp, c.tp + c.fn + c.fp);
        case MetricId::STP: return frac(c.tp + c.fp, c.total());
        case MetricId::ACC: return frac(c.tp + c.tn, c.total());
        case MetricId::F1: {
            Maybe ppv = frac(c.tp, c.tp + c.fp);
            Maybe tpr = frac(c.tp, c.tp + c.fn);
            if (!ppv || !tpr || *ppv + *tpr == 0.0) return std::nullopt;
            return 2.0 * *ppv * *tpr / (*ppv + *tpr);
        }
    }
    throw std::logic_error("unreachable metric id");
}

GroupMetricTable group_metric_table(const AuditDataset& d, const CutoffMap& cutoffs) {
    const auto partition = partition_subgroups(d);
    GroupMetricTable table;
    for (const auto& sc : d.scores) {
        const std::vector<int> pred = classify(sc.values, d.group, cutoffs);
        const SubgroupConfusion conf = confusion_by_subgroup(d.y_true, pred, partition);
        std::map<std::string, MetricArray> per_level;
        for (const auto& [level, counts] : conf) {
            MetricArray a;
            for (MetricId id : kAllMetrics) metric_slot(a, id) = metric_from_counts(counts, id);
            per_level.emplace(level, a);
        }
        table.add_model(sc.label, std::move(per_level));
    }
    return table;
}

std::map<std::string, Maybe> metric_ratios(const GroupMetricTable& t, const std::string& model,
                                           const ProtectedSpec& spec, MetricId id) {
    const Maybe priv = t.value(model, spec.privileged, id);
    std::map<std::string, Maybe> out;
    for (const auto& level : spec.unprivileged) {
        const Maybe unpriv = t.value(model, level, id);
        if (!priv || !unpriv || *priv == 0.0) out.emplace(level, std::nullopt);
        else out.emplace(level, *unpriv / *priv);
    }
    return out;
}

Maybe parity_loss(const GroupMetricTable& t, const std::string& model, const ProtectedSpec& spec,
                  MetricId id) {
    double sum = 0.0;
    for (const auto& [level, ratio] : metric_ratios(t, model, spec, id)) {
        if (!ratio || *ratio == 0.0) return std::nullopt;
        sum += std::fabs(std::log(*ratio));
    }
    return sum;
}

}  // namespace fairaudit
