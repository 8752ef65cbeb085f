#include "fairaudit/viz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "fairaudit/mitigate_post.hpp"
#include "fairaudit/trainer.hpp"

namespace fairaudit {

namespace {
constexpr const char* kKindNames[12] = {
    "fairness_check_bars", "metric_scores", "radar", "heatmap", "pca", "choose_metric",
    "stack_metrics", "group_metric", "density", "performance_and_fairness", "all_cutoffs",
    "ceteris_paribus_cutoff"};
}

std::string to_string(PlotKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<PlotKind> plot_kind_from_string(const std::string& name) {
    for (std::size_t i = 0; i < 12; ++i)
        if (name == kKindNames[i]) return static_cast<PlotKind>(i);
    return std::nullopt;
}

std::string to_string(PerfMetric p) {
    switch (p) {
        case PerfMetric::accuracy: return "accuracy";
        case PerfMetric::auc: return "auc";
        case PerfMetric::f1: return "f1";
    }
    throw std::logic_error("unreachable perf metric");
}

std::optional<PerfMetric> perf_from_string(const std::string& name) {
    if (name == "accuracy") return PerfMetric::accuracy;
    if (name == "auc") return PerfMetric::auc;
    if (name == "f1") return PerfMetric::f1;
    return std::nullopt;
}

ordered_json to_json(const PlotSeries& s) {
    ordered_json j;
    j["kind"] = to_string(s.kind);
    j["axes"] = ordered_json::array();
    for (const auto& a : s.axes) j["axes"].push_back({{"name", a.name}, {"unit", a.unit}});
    j["points"] = ordered_json::array();
    for (const auto& p : s.points) {
        ordered_json pt;
        pt["labels"] = ordered_json::object();
        for (const auto& [k, v] : p.labels) pt["labels"][k] = v;
        pt["values"] = p.values;
        pt["missing"] = p.missing;
        j["points"].push_back(std::move(pt));
    }
    j["annotations"] = s.annotations;
    j["params"] = s.params;
    return j;
}

ParityLossMatrix parity_loss_matrix(const FairnessAudit& a, std::span<const MetricId> metrics) {
    ParityLossMatrix m;
    m.metrics.assign(metrics.begin(), metrics.end());
    for (const auto& ma : a.models) {
        m.models.push_back(ma.label);
        std::vector<Maybe> row;
        for (MetricId id : metrics) row.push_back(metric_slot(ma.parity_losses, id));
        m.values.push_back(std::move(row));
    }
    return m;
}

PlotSeries fairness_check_bars_view(const FairnessAudit& a) {
    PlotSeries s;
    s.kind = PlotKind::fairness_check_bars;
    s.axes = {{"ratio", ""}, {"bar_height", ""}, {"orientation", ""}};
    for (const auto& m : a.models) {
        for (MetricId id : kCheckMetrics) {
            const CheckResult& check = m.checks.at(id);
            for (const auto& [level, ratio] : check.ratios) {
                PlotPoint p;
                p.labels = {{"model", m.label},
                            {"metric", to_string(id)},
                            {"check", check_name(id)},
                            {"level", level},
                            {"verdict", to_string(check.verdicts.at(level))}};
                if (ratio) {
                    const double r = *ratio;
                    const double diff = r - 1.0;
                    p.values = {r, std::fabs(diff), diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0)};
                } else {
                    p.missing = true;
                }
                s.points.push_back(std::move(p));
            }
        }
    }
    s.annotations["band"] = {a.epsilon, 1.0 / a.epsilon};
    s.params["epsilon"] = a.epsilon;
    return s;
}

PlotSeries metric_scores_view(const GroupMetricTable& t, const ProtectedSpec& spec,
                              std::span<const MetricId> metrics) {
    PlotSeries s;
    s.kind = PlotKind::metric_scores;
    s.axes = {{"score", ""}};
    for (const auto& model : t.models()) {
        for (MetricId id : metrics) {
            for (const auto& [level, values] : t.levels(model)) {
                PlotPoint p;
                p.labels = {{"model", model},
                            {"metric", to_string(id)},
                            {"level", level},
                            {"privileged", level == spec.privileged ? "true" : "false"}};
                const Maybe& v = metric_slot(values, id);
                if (v) p.values = {*v};
                else p.missing = true;
                s.points.push_back(std::move(p));
            }
        }
    }
    s.params["privileged"] = spec.privileged;
    return s;
}

namespace {

PlotSeries matrix_points(const ParityLossMatrix& m, PlotKind kind) {
    PlotSeries s;
    s.kind = kind;
    s.axes = {{"parity_loss", ""}};
    for (std::size_t r = 0; r < m.models.size(); ++r) {
        for (std::size_t c = 0; c < m.metrics.size(); ++c) {
            PlotPoint p;
            p.labels = {{"model", m.models[r]}, {"metric", to_string(m.metrics[c])}};
            if (m.values[r][c]) p.values = {*m.values[r][c]};
            else p.missing = true;
            s.points.push_back(std::move(p));
        }
    }
    return s;
}

}  // namespace

PlotSeries radar_view(const ParityLossMatrix& m) { return matrix_points(m, PlotKind::radar); }

PlotSeries heatmap_view(const ParityLossMatrix& m, bool normalize) {
    if (!normalize) {
        PlotSeries s = matrix_points(m, PlotKind::heatmap);
        s.params["normalize"] = false;
        return s;
    }
    // column z-scores over defined entries
    ParityLossMatrix z = m;
    for (std::size_t c = 0; c < m.metrics.size(); ++c) {
        std::vector<double> defined;
        for (std::size_t r = 0; r < m.models.size(); ++r)
            if (m.values[r][c]) defined.push_back(*m.values[r][c]);
        if (defined.empty()) continue;
        const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) /
                            static_cast<double>(defined.size());
        double ss = 0.0;
        for (double v : defined) ss += (v - mean) * (v - mean);
        const double sd = defined.size() > 1
                              ? std::sqrt(ss / static_cast<double>(defined.size() - 1))
                              : 0.0;
        for (std::size_t r = 0; r < m.models.size(); ++r)
            if (z.values[r][c]) z.values[r][c] = sd > 0.0 ? (*z.values[r][c] - mean) / sd : 0.0;
    }
    PlotSeries s = matrix_points(z, PlotKind::heatmap);
    s.params["normalize"] = true;
    return s;
}

PlotSeries choose_metric_view(const ParityLossMatrix& m, MetricId metric) {
    auto it = std::find(m.metrics.begin(), m.metrics.end(), metric);
    if (it == m.metrics.end())
        throw std::invalid_argument("metric " + to_string(metric) + " not present in the matrix");
    const std::size_t c = static_cast<std::size_t>(it - m.metrics.begin());
    PlotSeries s;
    s.kind = PlotKind::choose_metric;
    s.axes = {{"parity_loss", ""}};
    for (std::size_t r = 0; r < m.models.size(); ++r) {
        PlotPoint p;
        p.labels = {{"model", m.models[r]}, {"metric", to_string(metric)}};
        if (m.values[r][c]) p.values = {*m.values[r][c]};
        else p.missing = true;
        s.points.push_back(std::move(p));
    }
    s.params["metric"] = to_string(metric);
    return s;
}

PlotSeries stack_metrics_view(const ParityLossMatrix& m) {
    PlotSeries s = matrix_points(m, PlotKind::stack_metrics);
    ordered_json totals = ordered_json::object();
    ordered_json skipped = ordered_json::object();
    for (std::size_t r = 0; r < m.models.size(); ++r) {
        double sum = 0.0;
        int undef = 0;
        for (std::size_t c = 0; c < m.metrics.size(); ++c) {
            if (m.values[r][c]) sum += *m.values[r][c];
            else ++undef;
        }
        totals[m.models[r]] = sum;
        skipped[m.models[r]] = undef;
    }
    s.annotations["totals"] = std::move(totals);
    s.annotations["skipped"] = std::move(skipped);
    return s;
}

namespace {

Maybe pooled_performance(const FairnessAudit& a, const ModelAudit& m, PerfMetric perf) {
    ConfusionCounts pooled;
    for (const auto& [level, c] : m.confusion) {
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.tn += c.tn;
        pooled.fn += c.fn;
    }
    switch (perf) {
        case PerfMetric::accuracy: return metric_from_counts(pooled, MetricId::ACC);
        case PerfMetric::f1: return metric_from_counts(pooled, MetricId::F1);
        case PerfMetric::auc: {
            if (!m.has_scores())
                throw std::runtime_error("model '" + m.label +
                                         "' has no retained scores; auc needs them");
            return auc(m.scores, a.y_true);
        }
    }
    throw std::logic_error("unreachable perf metric");
}

}  // namespace

PlotSeries group_metric_view(const FairnessAudit& a, MetricId metric, PerfMetric performance) {
    PlotSeries s;
    s.kind = PlotKind::group_metric;
    s.axes = {{to_string(metric), ""}};
    for (const auto& m : a.models) {
        for (const auto& [level, values] : a.table.levels(m.label)) {
            PlotPoint p;
            p.labels = {{"model", m.label}, {"level", level}, {"metric", to_string(metric)}};
            const Maybe& v = metric_slot(values, metric);
            if (v) p.values = {*v};
            else p.missing = true;
            s.points.push_back(std::move(p));
        }
    }
    ordered_json perf = ordered_json::object();
    for (const auto& m : a.models) {
        const Maybe v = pooled_performance(a, m, performance);
        if (v) perf[m.label] = *v;
        else perf[m.label] = nullptr;
    }
    s.annotations["performance"] = std::move(perf);
    s.params["metric"] = to_string(metric);
    s.params["performance_metric"] = to_string(performance);
    return s;
}

namespace {

// cyclic Jacobi eigendecomposition of a symmetric matrix; returns
// eigenvalues and column eigenvectors sorted by descending eigenvalue
void jacobi_eigen(std::vector<double> a, std::size_t n, std::vector<double>& eigval,
                  std::vector<double>& eigvec) {
    eigvec.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigvec[i * n + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigvec[k * n + p], vkq = eigvec[k * n + q];
                    eigvec[k * n + p] = c * vkp - s * vkq;
                    eigvec[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eigval.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigval[i] = a[i * n + i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return eigval[x] > eigval[y]; });
    std::vector<double> sval(n), svec(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        sval[j] = eigval[order[j]];
        for (std::size_t i = 0; i < n; ++i) svec[i * n + j] = eigvec[i * n + order[j]];
    }
    eigval = std::move(sval);
    eigvec = std::move(svec);
}

// deterministic sign: the component with the largest magnitude is positive
void fix_sign(std::vector<double>& eigvec, std::size_t n, std::size_t col) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::fabs(eigvec[i * n + col]);
        if (m > best) { best = m; arg = i; }
    }
    if (eigvec[arg * n + col] < 0.0)
        for (std::size_t i = 0; i < n; ++i) eigvec[i * n + col] = -eigvec[i * n + col];
}

}  // namespace

PlotSeries pca_projection(const ParityLossMatrix& m) {
    const std::size_t n = m.models.size();
    if (n < 2) throw std::invalid_argument("pca needs at least 2 models");

    std::vector<std::size_t> keep;
    std::vector<std::string> dropped;
    for (std::size_t c = 0; c < m.metrics.size(); ++c) {
        bool all_defined = true;
        for (std::size_t r = 0; r < n; ++r)
            if (!m.values[r][c]) { all_defined = false; break; }
        if (all_defined) keep.push_back(c);
        else dropped.push_back(to_string(m.metrics[c]));
    }
    const std::size_t k = keep.size();
    if (k < 2) throw std::invalid_argument("pca needs at least 2 fully defined metric columns");

    // mean-center columns
    std::vector<double> x(n * k);
    for (std::size_t j = 0; j < k; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += *m.values[r][keep[j]];
        mean /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) x[r * k + j] = *m.values[r][keep[j]] - mean;
    }

    std::vector<double> cov(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += x[r * k + a] * x[r * k + b];
            cov[a * k + b] = cov[b * k + a] = s / static_cast<double>(n - 1);
        }

    std::vector<double> eigval, eigvec;
    jacobi_eigen(cov, k, eigval, eigvec);
    fix_sign(eigvec, k, 0);
    fix_sign(eigvec, k, 1);

    double total = 0.0;
    for (double v : eigval) total += std::max(v, 0.0);
    const double f1 = total > 0.0 ? std::max(eigval[0], 0.0) / total : 0.0;
    const double f2 = total > 0.0 ? std::max(eigval[1], 0.0) / total : 0.0;

    PlotSeries s;
    s.kind = PlotKind::pca;
    s.axes = {{"pc1", ""}, {"pc2", ""}};
    for (std::size_t r = 0; r < n; ++r) {
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            c1 += x[r * k + j] * eigvec[j * k + 0];
            c2 += x[r * k + j] * eigvec[j * k + 1];
        }
        PlotPoint p;
        p.labels = {{"model", m.models[r]}};
        p.values = {c1, c2};
        s.points.push_back(std::move(p));
    }
    s.annotations["explained_variance"] = {f1, f2};
    s.annotations["dropped_metrics"] = dropped;
    return s;
}

PlotSeries performance_vs_fairness(const FairnessAudit& a, PerfMetric performance,
                                   std::span<const MetricId> metrics) {
    PlotSeries s;
    s.kind = PlotKind::performance_and_fairness;
    s.axes = {{"inverted_parity_loss", ""}, {to_string(performance), ""}};
    ordered_json skipped = ordered_json::object();
    for (const auto& m : a.models) {
        double sum = 0.0;
        int undef = 0;
        for (MetricId id : metrics) {
            const Maybe& pl = metric_slot(m.parity_losses, id);
            if (pl) sum += *pl;
            else ++undef;
        }
        const Maybe perf = pooled_performance(a, m, performance);
        PlotPoint p;
        p.labels = {{"model", m.label}};
        if (perf) p.values = {-sum, *perf};
        else p.missing = true;
        s.points.push_back(std::move(p));
        if (undef > 0) skipped[m.label] = undef;
    }
    if (!skipped.empty()) s.annotations["skipped_metrics"] = std::move(skipped);
    s.params["performance_metric"] = to_string(performance);
    ordered_json names = ordered_json::array();
    for (MetricId id : metrics) names.push_back(to_string(id));
    s.params["fairness_metrics"] = std::move(names);
    s.params["inversion"] = "negation";
    return s;
}

PlotSeries score_density(const AuditDataset& d, const ProtectedSpec& spec,
                         const std::string& model, int bins) {
    if (bins < 2) throw std::invalid_argument("density needs at least 2 bins");
    const ScoreColumn& sc = d.score(model);
    const auto partition = partition_subgroups(d);

    PlotSeries s;
    s.kind = PlotKind::density;
    s.axes = {{"bin_low", ""}, {"bin_high", ""}, {"fraction", ""}};
    const double width = 1.0 / bins;
    for (const auto& [level, rows] : partition) {
        std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
        for (std::size_t i : rows) {
            const double v = sc.values[i];
            // first bin [0, w], later bins (lo, hi]
            int idx = v == 0.0 ? 0 : static_cast<int>(std::ceil(v * bins)) - 1;
            idx = std::clamp(idx, 0, bins - 1);
            ++counts[static_cast<std::size_t>(idx)];
        }
        for (int b = 0; b < bins; ++b) {
            PlotPoint p;
            p.labels = {{"model", model},
                        {"level", level},
                        {"privileged", level == spec.privileged ? "true" : "false"}};
            p.values = {b * width, (b + 1) * width,
                        static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                            static_cast<double>(rows.size())};
            s.points.push_back(std::move(p));
        }
    }
    s.params["model"] = model;
    s.params["bins"] = bins;
    return s;
}

PlotSeries cutoff_sweep(const AuditDataset& d, const ProtectedSpec& spec,
                        const std::string& model, std::span<const MetricId> metrics,
                        const SweepTarget& target, std::span<const double> grid, bool cumulated,
                        const CutoffMap& base_cutoffs) {
    if (metrics.empty()) throw std::invalid_argument("cutoff sweep needs at least one metric");
    if (grid.empty()) throw std::invalid_argument("cutoff sweep needs a non-empty grid");
    const ScoreColumn& sc = d.score(model);
    const auto levels = d.levels();
    if (!target.all_subgroups &&
        std::find(levels.begin(), levels.end(), target.subgroup) == levels.end())
        throw std::runtime_error("unknown protected level '" + target.subgroup + "'");

    CutoffMap cutoffs = base_cutoffs;
    for (const auto& level : levels)
        if (!cutoffs.contains(level)) cutoffs.set(level, 0.5);

    AuditDataset view;
    view.y_true = d.y_true;
    view.group = d.group;
    view.scores.push_back(sc);
    view.label_name = d.label_name;
    view.group_name = d.group_name;

    PlotSeries s;
    s.kind = target.all_subgroups ? PlotKind::all_cutoffs : PlotKind::ceteris_paribus_cutoff;
    if (cumulated) s.axes = {{"cutoff", ""}, {"parity_loss_sum", ""}, {"skipped_metrics", "count"}};
    else s.axes = {{"cutoff", ""}, {"parity_loss", ""}};

    for (double c : grid) {
        if (!(c > 0.0 && c < 1.0))
            throw std::invalid_argument("grid cutoffs must lie strictly inside (0,1)");
        if (target.all_subgroups)
            for (const auto& level : levels) cutoffs.set(level, c);
        else
            cutoffs.set(target.subgroup, c);
        const GroupMetricTable table = group_metric_table(view, cutoffs);

        if (cumulated) {
            double sum = 0.0;
            int undef = 0;
            for (MetricId id : metrics) {
                const Maybe loss = parity_loss(table, model, spec, id);
                if (loss) sum += *loss;
                else ++undef;
            }
            PlotPoint p;
            p.labels = {{"model", model}};
            if (!target.all_subgroups) p.labels.emplace("subgroup", target.subgroup);
            if (undef == static_cast<int>(metrics.size())) p.missing = true;
            else p.values = {c, sum, static_cast<double>(undef)};
            s.points.push_back(std::move(p));
        } else {
            for (MetricId id : metrics) {
                const Maybe loss = parity_loss(table, model, spec, id);
                PlotPoint p;
                p.labels = {{"model", model}, {"metric", to_string(id)}};
                if (!target.all_subgroups) p.labels.emplace("subgroup", target.subgroup);
                if (loss) p.values = {c, *loss};
                else p.missing = true;
                s.points.push_back(std::move(p));
            }
        }
    }

    s.params["model"] = model;
    ordered_json names = ordered_json::array();
    for (MetricId id : metrics) names.push_back(to_string(id));
    s.params["metrics"] = std::move(names);
    s.params["cumulated"] = cumulated;
    if (!target.all_subgroups) {
        s.params["subgroup"] = target.subgroup;
        // dashed-line marker: argmin of the cumulated sum over the grid
        const CutoffSearchResult best =
            cutoff_search(d, spec, model, target.subgroup, metrics, grid, base_cutoffs);
        if (best.best_loss) {
            s.annotations["argmin_cutoff"] = best.best_cutoff;
            s.annotations["argmin_loss"] = *best.best_loss;
        }
    }
    return s;
}

std::vector<EmittedFile> emit_plot_bundle(std::span<const PlotSeries> series,
                                          const std::filesystem::path& dir, bool render) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());

    auto write_file = [&](const std::filesystem::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
    };

    std::vector<EmittedFile> files;
    std::map<std::string, int> used;
    ordered_json manifest;
    manifest["version"] = "1";
    manifest["files"] = ordered_json::array();
    for (const auto& s : series) {
        std::string stem = to_string(s.kind);
        const int count = ++used[stem];
        if (count > 1) stem += "_" + std::to_string(count);

        const std::string json_name = stem + ".json";
        write_file(dir / json_name, to_json(s).dump(2) + "\n");
        files.push_back({json_name, to_string(s.kind)});
        manifest["files"].push_back({{"file", json_name}, {"kind", to_string(s.kind)}});

        if (render) {
            const std::string svg_name = stem + ".svg";
            write_file(dir / svg_name, render_svg(s));
            files.push_back({svg_name, to_string(s.kind)});
            manifest["files"].push_back({{"file", svg_name}, {"kind", to_string(s.kind)}});
        }
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return files;
}

}  // namespace fairaudit
