#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

// A metric value is undefined when its denominator is zero; undefined is a
// value, not an error, and every consumer states its own policy for it.
using Maybe = std::optional<double>;

enum class MetricId : std::uint8_t { TPR, TNR, PPV, NPV, FNR, FPR, FDR, FOR, TS, STP, ACC, F1 };

inline constexpr std::array<MetricId, 12> kAllMetrics = {
    MetricId::TPR, MetricId::TNR, MetricId::PPV, MetricId::NPV,
    MetricId::FNR, MetricId::FPR, MetricId::FDR, MetricId::FOR,
    MetricId::TS,  MetricId::STP, MetricId::ACC, MetricId::F1};

// The five fairness-check criteria and the metric each one compares.
inline constexpr std::array<MetricId, 5> kCheckMetrics = {
    MetricId::TPR, MetricId::PPV, MetricId::FPR, MetricId::STP, MetricId::ACC};

std::string to_string(MetricId id);
std::optional<MetricId> metric_from_string(const std::string& name);
std::string check_name(MetricId id);  // e.g. TPR -> "Equal opportunity"

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

using SubgroupConfusion = std::map<std::string, ConfusionCounts>;

using MetricArray = std::array<Maybe, 12>;

inline Maybe& metric_slot(MetricArray& a, MetricId id) { return a[static_cast<std::size_t>(id)]; }
inline const Maybe& metric_slot(const MetricArray& a, MetricId id) {
    return a[static_cast<std::size_t>(id)];
}

// model -> protected level -> 12 metric values
class GroupMetricTable {
public:
    void add_model(const std::string& label, std::map<std::string, MetricArray> values);
    const std::vector<std::string>& models() const { return order_; }
    bool has_model(const std::string& label) const { return values_.contains(label); }
    const std::map<std::string, MetricArray>& levels(const std::string& model) const;
    Maybe value(const std::string& model, const std::string& level, MetricId id) const;

private:
    std::vector<std::string> order_;
    std::map<std::string, std::map<std::string, MetricArray>> values_;
};

// prediction = 1 iff score >= cutoff of the row's subgroup
std::vector<int> classify(std::span<const double> scores, std::span<const std::string> group,
                          const CutoffMap& cutoffs);

SubgroupConfusion confusion_by_subgroup(std::span<const int> y_true, std::span<const int> y_pred,
                                        const std::map<std::string, std::vector<std::size_t>>& partition);

// TPR=TP/(TP+FN)  TNR=TN/(TN+FP)  PPV=TP/(TP+FP)  NPV=TN/(TN+FN)
// FNR=FN/(FN+TP)  FPR=FP/(FP+TN)  FDR=FP/(FP+TP)  FOR=FN/(FN+TN)
// TS=TP/(TP+FN+FP)  STP=(TP+FP)/(TP+FP+TN+FN)  ACC=(TP+TN)/total
// F1=2*PPV*TPR/(PPV+TPR), undefined when PPV or TPR is undefined or their sum is 0
Maybe metric_from_counts(const ConfusionCounts& c, MetricId id);

GroupMetricTable group_metric_table(const AuditDataset& d, const CutoffMap& cutoffs);

// metric(unprivileged)/metric(privileged) per unprivileged level; undefined
// when either term is undefined or the privileged value is 0
std::map<std::string, Maybe> metric_ratios(const GroupMetricTable& t, const std::string& model,
                                           const ProtectedSpec& spec, MetricId id);

// sum over unprivileged levels of |ln(ratio)|; undefined if any ratio is
// undefined or zero
Maybe parity_loss(const GroupMetricTable& t, const std::string& model, const ProtectedSpec& spec,
                  MetricId id);

}  // namespace fairaudit
