#include "fairaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fairaudit {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    throw std::logic_error("unreachable verdict");
}

const ModelAudit& FairnessAudit::model(const std::string& label) const {
    for (const auto& m : models)
        if (m.label == label) return m;
    throw std::runtime_error("unknown model label '" + label + "'");
}

bool FairnessAudit::has_model(const std::string& label) const {
    return std::any_of(models.begin(), models.end(),
                       [&](const ModelAudit& m) { return m.label == label; });
}

namespace {

Verdict ratio_verdict(const Maybe& ratio, double epsilon) {
    if (!ratio) return Verdict::inconclusive;
    return (*ratio > epsilon && *ratio < 1.0 / epsilon) ? Verdict::pass : Verdict::fail;
}

ModelAudit audit_model(const GroupMetricTable& table, const std::string& label,
                       const ProtectedSpec& spec, double epsilon, const CutoffMap& cutoffs,
                       std::vector<double> scores, SubgroupConfusion confusion) {
    ModelAudit m;
    m.label = label;
    m.cutoffs = cutoffs;
    m.scores = std::move(scores);
    m.confusion = std::move(confusion);

    for (MetricId id : kAllMetrics)
        metric_slot(m.parity_losses, id) = parity_loss(table, label, spec, id);

    for (MetricId id : kCheckMetrics) {
        CheckResult check;
        check.ratios = metric_ratios(table, label, spec, id);
        bool any_fail = false, any_undefined = false;
        for (const auto& [level, ratio] : check.ratios) {
            Verdict v = ratio_verdict(ratio, epsilon);
            check.verdicts.emplace(level, v);
            any_fail |= v == Verdict::fail;
            any_undefined |= v == Verdict::inconclusive;
        }
        check.overall = any_fail         ? Verdict::fail
                        : any_undefined  ? Verdict::inconclusive
                                         : Verdict::pass;
        switch (check.overall) {
            case Verdict::pass: ++m.passed; break;
            case Verdict::fail: ++m.failed; break;
            case Verdict::inconclusive: ++m.inconclusive; break;
        }
        if (const Maybe& pl = metric_slot(m.parity_losses, id); pl) m.total_loss += *pl;
        else ++m.skipped;
        m.checks.emplace(id, std::move(check));
    }
    return m;
}

}  // namespace

FairnessAudit fairness_check(const AuditDataset& d, const ProtectedSpec& spec, double epsilon,
                             const CutoffMap& cutoffs, const FairnessAudit* prior) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon must lie in (0,1]");
    if (d.scores.empty() && (!prior || prior->models.empty()))
        throw std::invalid_argument("fairness check requires at least one model score column");

    // re-validate relative to this dataset; also catches a stale spec
    const ProtectedSpec checked = validate_protected_spec(d, spec.privileged);
    if (checked.unprivileged != spec.unprivileged)
        throw std::invalid_argument("protected spec does not match the dataset's levels");

    CutoffMap effective = cutoffs;
    for (const auto& level : d.levels())
        if (!effective.contains(level)) effective.set(level, 0.5);

    if (prior) {
        if (prior->spec.privileged != spec.privileged || prior->spec.unprivileged != spec.unprivileged)
            throw std::runtime_error("prior audit has a different protected spec");
        if (prior->group != d.group || prior->y_true != d.y_true)
            throw std::runtime_error(
                "prior audit was computed on different data (protected or label vector differs)");
        for (const auto& m : prior->models)
            if (d.has_score(m.label))
                throw std::runtime_error("aggregated models must have different labels; '" +
                                         m.label + "' appears twice");
    }

    FairnessAudit a;
    a.epsilon = epsilon;
    a.spec = spec;
    a.cutoffs = effective;
    a.y_true = d.y_true;
    a.group = d.group;

    if (prior) {
        for (const auto& label : prior->table.models())
            a.table.add_model(label, prior->table.levels(label));
        a.models = prior->models;
        if (prior->epsilon != epsilon) {
            // verdicts depend on epsilon; recompute prior records under the new one
            std::vector<ModelAudit> redone;
            for (const auto& m : prior->models)
                redone.push_back(audit_model(a.table, m.label, spec, epsilon, m.cutoffs, m.scores,
                                             m.confusion));
            a.models = std::move(redone);
        }
    }

    const auto partition = partition_subgroups(d);
    const GroupMetricTable fresh = group_metric_table(d, effective);
    for (const auto& sc : d.scores) {
        a.table.add_model(sc.label, fresh.levels(sc.label));
        const std::vector<int> pred = classify(sc.values, d.group, effective);
        a.models.push_back(audit_model(a.table, sc.label, spec, epsilon, effective, sc.values,
                                       confusion_by_subgroup(d.y_true, pred, partition)));
    }
    return a;
}

TotalLoss total_loss(const FairnessAudit& a, const std::string& model) {
    const ModelAudit& m = a.model(model);
    return {m.total_loss, m.skipped};
}

std::string summarize_text(const FairnessAudit& a) {
    std::ostringstream out;
    out << "Fairness check (epsilon = " << a.epsilon << ", privileged = '" << a.spec.privileged
        << "')\n";
    for (const auto& m : a.models) {
        out << "\nModel '" << m.label << "': " << m.passed << "/5 checks passed, " << m.failed
            << " failed, " << m.inconclusive << " inconclusive\n";
        for (MetricId id : kCheckMetrics) {
            const CheckResult& check = m.checks.at(id);
            out << "  " << std::left << std::setw(21) << check_name(id) << " (" << to_string(id)
                << ")";
            for (const auto& [level, ratio] : check.ratios) {
                out << "  " << level << "/" << a.spec.privileged << " = ";
                if (ratio) out << std::fixed << std::setprecision(6) << *ratio
                               << std::defaultfloat << std::setprecision(6);
                else out << "undefined";
            }
            out << "  [" << to_string(check.overall) << "]\n";
        }
        out << "  total loss: " << std::fixed << std::setprecision(6) << m.total_loss
            << std::defaultfloat << std::setprecision(6) << " (" << m.skipped
            << " metrics skipped)\n";
        out << "  verdict: "
            << (m.passes() ? "passes fairness check" : "does not pass fairness check") << "\n";
    }
    return out.str();
}

}  // namespace fairaudit
