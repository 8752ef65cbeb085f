#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairaudit/audit.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

using ordered_json = nlohmann::ordered_json;

enum class PlotKind {
    fairness_check_bars, metric_scores, radar, heatmap, pca, choose_metric,
    stack_metrics, group_metric, density, performance_and_fairness, all_cutoffs,
    ceteris_paribus_cutoff
};

inline constexpr std::array<PlotKind, 12> kAllPlotKinds = {
    PlotKind::fairness_check_bars, PlotKind::metric_scores, PlotKind::radar,
    PlotKind::heatmap, PlotKind::pca, PlotKind::choose_metric, PlotKind::stack_metrics,
    PlotKind::group_metric, PlotKind::density, PlotKind::performance_and_fairness,
    PlotKind::all_cutoffs, PlotKind::ceteris_paribus_cutoff};

std::string to_string(PlotKind k);
std::optional<PlotKind> plot_kind_from_string(const std::string& name);

struct AxisDesc {
    std::string name;
    std::string unit;
};

struct PlotPoint {
    std::map<std::string, std::string> labels;
    std::vector<double> values;  // empty iff missing
    bool missing = false;
};

// A pure function of (dataset, spec, cutoffs, epsilon, parameters); identical
// inputs serialize to identical bytes.
struct PlotSeries {
    PlotKind kind;
    std::vector<AxisDesc> axes;
    std::vector<PlotPoint> points;
    ordered_json annotations = ordered_json::object();
    ordered_json params = ordered_json::object();
};

ordered_json to_json(const PlotSeries& s);

struct ParityLossMatrix {
    std::vector<std::string> models;
    std::vector<MetricId> metrics;
    std::vector<std::vector<Maybe>> values;  // [model][metric]
};

ParityLossMatrix parity_loss_matrix(const FairnessAudit& a,
                                    std::span<const MetricId> metrics = kAllMetrics);

// ratio, bar height |ratio-1| and orientation per model, check metric, and
// unprivileged level, with the epsilon guide band
PlotSeries fairness_check_bars_view(const FairnessAudit& a);

PlotSeries metric_scores_view(const GroupMetricTable& t, const ProtectedSpec& spec,
                              std::span<const MetricId> metrics = kAllMetrics);

PlotSeries radar_view(const ParityLossMatrix& m);
PlotSeries heatmap_view(const ParityLossMatrix& m, bool normalize = false);
PlotSeries choose_metric_view(const ParityLossMatrix& m, MetricId metric);
PlotSeries stack_metrics_view(const ParityLossMatrix& m);

enum class PerfMetric { accuracy, auc, f1 };
std::string to_string(PerfMetric p);
std::optional<PerfMetric> perf_from_string(const std::string& name);

PlotSeries group_metric_view(const FairnessAudit& a, MetricId metric,
                             PerfMetric performance = PerfMetric::accuracy);

// top-2 principal directions of the mean-centered matrix; metrics with any
// undefined entry are dropped first
PlotSeries pca_projection(const ParityLossMatrix& m);

PlotSeries performance_vs_fairness(const FairnessAudit& a, PerfMetric performance,
                                   std::span<const MetricId> metrics);

PlotSeries score_density(const AuditDataset& d, const ProtectedSpec& spec,
                         const std::string& model, int bins = 20);

struct SweepTarget {
    bool all_subgroups = true;
    std::string subgroup;  // required when !all_subgroups (ceteris paribus)
};

PlotSeries cutoff_sweep(const AuditDataset& d, const ProtectedSpec& spec,
                        const std::string& model, std::span<const MetricId> metrics,
                        const SweepTarget& target, std::span<const double> grid,
                        bool cumulated, const CutoffMap& base_cutoffs = {});

struct EmittedFile {
    std::string file;
    std::string kind;
};

// One JSON document per series plus manifest.json; with render also one SVG
// per series.
std::vector<EmittedFile> emit_plot_bundle(std::span<const PlotSeries> series,
                                          const std::filesystem::path& dir, bool render);

std::string render_svg(const PlotSeries& s);

}  // namespace fairaudit
