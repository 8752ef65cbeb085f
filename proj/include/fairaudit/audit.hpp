#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

inline constexpr double kDefaultEpsilon = 0.8;  // the four-fifths rule

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// One of the five checks for one model: ratio and verdict per unprivileged
// level. A defined ratio passes iff epsilon < ratio < 1/epsilon, strictly.
// The check verdict is fail if any level fails, else inconclusive if any
// ratio is undefined, else pass.
struct CheckResult {
    std::map<std::string, Maybe> ratios;
    std::map<std::string, Verdict> verdicts;
    Verdict overall = Verdict::inconclusive;
};

struct ModelAudit {
    std::string label;
    CutoffMap cutoffs;          // cutoffs in effect when this model was audited
    std::vector<double> scores; // empty when restored from a serialized audit
    SubgroupConfusion confusion;
    std::map<MetricId, CheckResult> checks;  // the five check metrics
    MetricArray parity_losses;               // all 12 metrics
    double total_loss = 0.0;                 // defined parity losses over the five checks
    int skipped = 0;                         // undefined among the five
    int passed = 0;
    int failed = 0;
    int inconclusive = 0;

    bool has_scores() const { return !scores.empty(); }
    bool passes() const { return failed == 0 && inconclusive == 0; }
};

struct FairnessAudit {
    double epsilon = kDefaultEpsilon;
    ProtectedSpec spec;
    CutoffMap cutoffs;               // from the most recent check
    std::vector<int> y_true;
    std::vector<std::string> group;
    GroupMetricTable table;          // all models
    std::vector<ModelAudit> models;  // aggregation order

    const ModelAudit& model(const std::string& label) const;
    bool has_model(const std::string& label) const;
};

// Audits every model in the dataset and aggregates any prior audit's models.
// The prior must agree on privileged level, protected vector, and row count,
// and must not share model labels with the dataset.
FairnessAudit fairness_check(const AuditDataset& d, const ProtectedSpec& spec,
                             double epsilon = kDefaultEpsilon, const CutoffMap& cutoffs = {},
                             const FairnessAudit* prior = nullptr);

// Sum of defined parity losses over the five check metrics, plus how many of
// the five were undefined and skipped.
struct TotalLoss {
    double loss = 0.0;
    int skipped = 0;
};
TotalLoss total_loss(const FairnessAudit& a, const std::string& model);

std::string summarize_text(const FairnessAudit& a);

}  // namespace fairaudit
