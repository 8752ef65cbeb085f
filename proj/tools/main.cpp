#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairaudit/audit.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/mitigate_post.hpp"
#include "fairaudit/mitigate_pre.hpp"
#include "fairaudit/trainer.hpp"
#include "fairaudit/viz.hpp"

namespace fs = std::filesystem;
using namespace fairaudit;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitError = 3;
constexpr int kExitUsage = 4;

struct SharedArgs {
    std::string input;
    std::string label_col;
    std::string protected_col;
    std::vector<std::string> score_flags;   // label=column
    std::string favorable;
    std::string privileged;
    double epsilon = kDefaultEpsilon;
    std::vector<std::string> cutoff_flags;  // level=value
    std::string out;
    std::uint64_t seed = 42;
};

void add_shared_options(CLI::App* cmd, SharedArgs& a, bool need_privileged) {
    cmd->add_option("--input", a.input, "input CSV file")->required();
    cmd->add_option("--label-col,--label", a.label_col, "true label column")->required();
    cmd->add_option("--protected-col,--protected", a.protected_col, "protected attribute column")
        ->required();
    cmd->add_option("--score", a.score_flags, "model score column as label=column (repeatable)");
    cmd->add_option("--favorable", a.favorable, "raw label value mapping to 1");
    auto* priv = cmd->add_option("--privileged", a.privileged, "privileged protected level");
    if (need_privileged) priv->required();
    cmd->add_option("--epsilon", a.epsilon, "acceptable ratio bound in (0,1]")
        ->default_val(kDefaultEpsilon);
    cmd->add_option("--cutoff", a.cutoff_flags, "per-subgroup cutoff as level=value (repeatable)");
    cmd->add_option("--out", a.out, "output file or directory")->required();
    cmd->add_option("--seed", a.seed, "seed for randomized methods")->default_val(42);
}

std::pair<std::string, std::string> split_pair(const std::string& s, const char* what) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw std::runtime_error(std::string("expected ") + what + " as name=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

ColumnSchema make_schema(const SharedArgs& a) {
    ColumnSchema schema;
    schema.label_column = a.label_col;
    schema.protected_column = a.protected_col;
    for (const auto& f : a.score_flags) schema.score_columns.push_back(split_pair(f, "--score"));
    if (!a.favorable.empty()) schema.favorable = a.favorable;
    return schema;
}

CutoffMap make_cutoffs(const SharedArgs& a, const AuditDataset& d) {
    CutoffMap m = CutoffMap::uniform(d.levels(), 0.5);
    for (const auto& f : a.cutoff_flags) {
        auto [level, value] = split_pair(f, "--cutoff");
        if (!m.contains(level))
            throw std::runtime_error("--cutoff names unknown protected level '" + level + "'");
        m.set(level, std::stod(value));
    }
    return m;
}

std::vector<double> make_grid(double step) {
    if (!(step > 0.0 && step < 0.5)) throw std::runtime_error("--grid-step must lie in (0, 0.5)");
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((1.0 - 1e-12) / step));
    for (int i = 1; i <= n; ++i) {
        const double c = i * step;
        if (c > 0.0 && c < 1.0) grid.push_back(c);
    }
    return grid;
}

std::vector<MetricId> parse_metric_list(const std::string& csv) {
    std::vector<MetricId> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        auto id = metric_from_string(cur);
        if (!id) throw std::runtime_error("unknown metric '" + cur + "'");
        out.push_back(*id);
    }
    if (out.empty()) throw std::runtime_error("empty metric list");
    return out;
}

ordered_json config_echo(const SharedArgs& a) {
    ordered_json j;
    j["input"] = a.input;
    j["label_col"] = a.label_col;
    j["protected_col"] = a.protected_col;
    j["score"] = a.score_flags;
    if (!a.favorable.empty()) j["favorable"] = a.favorable;
    if (!a.privileged.empty()) j["privileged"] = a.privileged;
    j["epsilon"] = a.epsilon;
    j["cutoff"] = a.cutoff_flags;
    j["seed"] = a.seed;
    return j;
}

ordered_json maybe_json(const Maybe& v) {
    if (v) return *v;
    return nullptr;
}

ordered_json audit_to_json(const FairnessAudit& a, const ordered_json& echo,
                           const std::vector<std::string>& warnings) {
    ordered_json j;
    j["version"] = "1";
    j["config_echo"] = echo;
    j["epsilon"] = a.epsilon;
    j["privileged"] = a.spec.privileged;
    j["unprivileged"] = a.spec.unprivileged;
    j["data"] = {{"row_count", a.y_true.size()},
                 {"y_true", a.y_true},
                 {"protected", a.group}};

    j["models"] = ordered_json::array();
    for (const auto& m : a.models) {
        ordered_json jm;
        jm["label"] = m.label;
        jm["cutoffs"] = ordered_json::object();
        for (const auto& [level, c] : m.cutoffs.entries()) jm["cutoffs"][level] = c;
        jm["confusion"] = ordered_json::object();
        for (const auto& [level, c] : m.confusion)
            jm["confusion"][level] = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
        jm["group_metrics"] = ordered_json::object();
        for (const auto& [level, values] : a.table.levels(m.label)) {
            ordered_json lv;
            for (MetricId id : kAllMetrics) lv[to_string(id)] = maybe_json(metric_slot(values, id));
            jm["group_metrics"][level] = std::move(lv);
        }
        jm["checks"] = ordered_json::object();
        for (MetricId id : kCheckMetrics) {
            const CheckResult& check = m.checks.at(id);
            ordered_json jc;
            jc["name"] = check_name(id);
            jc["ratios"] = ordered_json::object();
            for (const auto& [level, r] : check.ratios) jc["ratios"][level] = maybe_json(r);
            jc["verdicts"] = ordered_json::object();
            for (const auto& [level, v] : check.verdicts) jc["verdicts"][level] = to_string(v);
            jc["verdict"] = to_string(check.overall);
            jm["checks"][to_string(id)] = std::move(jc);
        }
        jm["parity_loss"] = ordered_json::object();
        for (MetricId id : kAllMetrics)
            jm["parity_loss"][to_string(id)] = maybe_json(metric_slot(m.parity_losses, id));
        jm["total_loss"] = m.total_loss;
        jm["skipped"] = m.skipped;
        jm["passed"] = m.passed;
        jm["failed"] = m.failed;
        jm["inconclusive"] = m.inconclusive;
        j["models"].push_back(std::move(jm));
    }
    j["warnings"] = warnings;
    return j;
}

FairnessAudit audit_from_json(const ordered_json& j) {
    FairnessAudit a;
    a.epsilon = j.at("epsilon").get<double>();
    a.spec.privileged = j.at("privileged").get<std::string>();
    a.spec.unprivileged = j.at("unprivileged").get<std::vector<std::string>>();
    a.y_true = j.at("data").at("y_true").get<std::vector<int>>();
    a.group = j.at("data").at("protected").get<std::vector<std::string>>();

    auto to_maybe = [](const ordered_json& v) -> Maybe {
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };

    for (const auto& jm : j.at("models")) {
        ModelAudit m;
        m.label = jm.at("label").get<std::string>();
        for (const auto& [level, c] : jm.at("cutoffs").items())
            m.cutoffs.set(level, c.get<double>());
        for (const auto& [level, c] : jm.at("confusion").items())
            m.confusion[level] = {c.at("tp").get<long long>(), c.at("fp").get<long long>(),
                                  c.at("tn").get<long long>(), c.at("fn").get<long long>()};
        std::map<std::string, MetricArray> table_levels;
        for (const auto& [level, lv] : jm.at("group_metrics").items()) {
            MetricArray arr;
            for (MetricId id : kAllMetrics)
                metric_slot(arr, id) = to_maybe(lv.at(to_string(id)));
            table_levels.emplace(level, arr);
        }
        a.table.add_model(m.label, std::move(table_levels));
        for (MetricId id : kCheckMetrics) {
            const auto& jc = jm.at("checks").at(to_string(id));
            CheckResult check;
            for (const auto& [level, r] : jc.at("ratios").items())
                check.ratios[level] = to_maybe(r);
            for (const auto& [level, v] : jc.at("verdicts").items()) {
                const std::string s = v.get<std::string>();
                check.verdicts[level] = s == "pass" ? Verdict::pass
                                        : s == "fail" ? Verdict::fail
                                                      : Verdict::inconclusive;
            }
            const std::string s = jc.at("verdict").get<std::string>();
            check.overall = s == "pass" ? Verdict::pass
                            : s == "fail" ? Verdict::fail
                                          : Verdict::inconclusive;
            m.checks.emplace(id, std::move(check));
        }
        for (MetricId id : kAllMetrics)
            metric_slot(m.parity_losses, id) = to_maybe(jm.at("parity_loss").at(to_string(id)));
        m.total_loss = jm.at("total_loss").get<double>();
        m.skipped = jm.at("skipped").get<int>();
        m.passed = jm.at("passed").get<int>();
        m.failed = jm.at("failed").get<int>();
        m.inconclusive = jm.at("inconclusive").get<int>();
        a.cutoffs = m.cutoffs;
        a.models.push_back(std::move(m));
    }
    return a;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ordered_json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    ordered_json j;
    in >> j;
    return j;
}

int verdict_exit_code(const FairnessAudit& a) {
    bool any_fail = false, any_inconclusive = false;
    for (const auto& m : a.models) {
        any_fail |= m.failed > 0;
        any_inconclusive |= m.inconclusive > 0;
    }
    if (any_fail) return kExitFail;
    if (any_inconclusive) return kExitInconclusive;
    return kExitPass;
}

std::vector<std::string> cutoff_warnings(const CutoffMap& cutoffs) {
    std::vector<std::string> w;
    if (!cutoffs.is_uniform())
        w.push_back("per-subgroup cutoffs differ; equally scored individuals in different "
                    "subgroups can receive different predictions");
    return w;
}

// ---------------------------------------------------------------- check ----

int cmd_check(const SharedArgs& args, const std::string& merge_path, bool render) {
    if (args.score_flags.empty())
        throw std::runtime_error("check requires at least one --score label=column");
    const AuditDataset d = load_dataset_file(args.input, make_schema(args));
    const ProtectedSpec spec = validate_protected_spec(d, args.privileged);
    const CutoffMap cutoffs = make_cutoffs(args, d);

    std::optional<FairnessAudit> prior;
    if (!merge_path.empty()) prior = audit_from_json(read_json_file(merge_path));
    const FairnessAudit audit =
        fairness_check(d, spec, args.epsilon, cutoffs, prior ? &*prior : nullptr);

    fs::create_directories(args.out);
    const std::vector<std::string> warnings = cutoff_warnings(cutoffs);
    write_text_file(fs::path(args.out) / "audit.json",
                    audit_to_json(audit, config_echo(args), warnings).dump(2) + "\n");
    const std::string summary = summarize_text(audit);
    write_text_file(fs::path(args.out) / "summary.txt", summary);
    std::cout << summary;

    std::vector<PlotSeries> series;
    series.push_back(fairness_check_bars_view(audit));
    series.push_back(metric_scores_view(audit.table, audit.spec));
    emit_plot_bundle(series, args.out, render);

    return verdict_exit_code(audit);
}

// ---------------------------------------------------------------- train ----

int cmd_train(const SharedArgs& args, const std::string& model_label,
              const std::string& features_csv, const std::string& weights_col,
              const std::string& score_data, double l2, int max_iter) {
    if (model_label.empty()) throw std::runtime_error("train requires --model-label");
    const AuditDataset d = load_dataset_file(args.input, make_schema(args));

    std::vector<FeatureColumn> feats;
    if (features_csv.empty()) {
        for (const auto& f : d.features)
            if (f.name != weights_col && f.name != "_weights_") feats.push_back(f);
    } else {
        std::istringstream in(features_csv);
        std::string name;
        while (std::getline(in, name, ',')) {
            if (name == weights_col)
                throw std::runtime_error("weight column '" + name + "' cannot be a feature");
            feats.push_back(d.feature(name));
        }
    }
    if (feats.empty()) throw std::runtime_error("no feature columns to train on");

    std::vector<double> weights;
    if (!weights_col.empty()) {
        const FeatureColumn& w = d.feature(weights_col);
        if (!w.is_numeric()) throw std::runtime_error("weight column must be numeric");
        weights = w.numeric();
    }

    std::vector<std::size_t> fit_rows(d.rows());
    std::iota(fit_rows.begin(), fit_rows.end(), 0);
    const Encoding enc = learn_encoding(feats, fit_rows);
    const DesignMatrix X = apply_encoding(enc, feats);

    FitOptions opt;
    opt.l2 = l2;
    opt.max_iter = max_iter;
    const LogisticModel model = fit_logistic(X, d.y_true, weights, opt);

    // score the application dataset (defaults to the training input)
    AuditDataset target = score_data.empty() ? d : load_dataset_file(score_data, make_schema(args));
    for (const auto& f : target.features)
        if (f.name == model_label)
            throw std::runtime_error("column '" + model_label + "' already exists in the data");
    for (const auto& s : target.scores)
        if (s.label == model_label || s.column == model_label)
            throw std::runtime_error("score label '" + model_label + "' already exists");

    std::vector<FeatureColumn> target_feats;
    for (const auto& fe : enc.features) target_feats.push_back(target.feature(fe.name));
    const DesignMatrix Xt = apply_encoding(enc, target_feats);
    ScoreColumn sc{model_label, model_label, predict_proba(model, Xt)};
    target.scores.push_back(std::move(sc));
    write_dataset_file(target, args.out);

    ordered_json report;
    report["version"] = "1";
    report["config_echo"] = config_echo(args);
    report["label"] = model_label;
    report["converged"] = model.converged;
    report["iterations"] = model.iterations;
    report["gradient_norm"] = model.grad_norm;
    report["loss"] = model.final_loss;
    report["coefficients"] = ordered_json::object();
    for (std::size_t c = 0; c < X.cols; ++c)
        report["coefficients"][X.column_names[c]] = model.coef[c];
    write_text_file(args.out + ".train.json", report.dump(2) + "\n");
    std::cout << "trained '" << model_label << "': " << (model.converged ? "converged" : "NOT converged")
              << " after " << model.iterations << " iterations (grad " << model.grad_norm << ")\n";
    return kExitPass;
}

// ------------------------------------------------------------- mitigate ----

int cmd_mitigate(const SharedArgs& args, const std::string& method, double lambda,
                 const std::string& feature, const std::string& ranker, double ranker_cutoff,
                 double theta, double pivot_cutoff, const std::string& score_label,
                 const std::string& subgroup, const std::string& metrics_csv, double grid_step) {
    const AuditDataset d = load_dataset_file(args.input, make_schema(args));

    PreProcessParams params;
    params.lambda = lambda;
    params.feature = feature;
    params.ranker_label = ranker;
    params.ranker_cutoff = ranker_cutoff;
    params.seed = args.seed;

    if (method == "reweight") {
        write_dataset_file(pre_process_data(d, PreProcessMethod::reweight, params), args.out);
    } else if (method == "resample-uniform") {
        write_dataset_file(pre_process_data(d, PreProcessMethod::resample_uniform, params),
                           args.out);
    } else if (method == "resample-preferential") {
        if (ranker.empty())
            throw std::runtime_error("resample-preferential requires --ranker <score label>");
        write_dataset_file(pre_process_data(d, PreProcessMethod::resample_preferential, params),
                           args.out);
    } else if (method == "dir") {
        if (feature.empty()) throw std::runtime_error("dir requires --feature <column>");
        write_dataset_file(
            pre_process_data(d, PreProcessMethod::disparate_impact_remover, params), args.out);
    } else if (method == "roc-pivot") {
        const ProtectedSpec spec = validate_protected_spec(d, args.privileged);
        std::string label = score_label;
        if (label.empty()) {
            if (d.scores.size() != 1)
                throw std::runtime_error("roc-pivot needs --score-label when several scores exist");
            label = d.scores.front().label;
        }
        d.score(label);  // throws on unknown label
        PivotParams pp{theta, pivot_cutoff};
        AuditDataset out = d;
        for (auto& s : out.scores)
            if (s.label == label) s.values = roc_pivot(s.values, d.group, spec, pp);
        write_dataset_file(out, args.out);
    } else if (method == "cutoff-search") {
        const ProtectedSpec spec = validate_protected_spec(d, args.privileged);
        if (subgroup.empty()) throw std::runtime_error("cutoff-search requires --subgroup");
        std::string label = score_label;
        if (label.empty()) {
            if (d.scores.size() != 1)
                throw std::runtime_error("cutoff-search needs --score-label when several scores exist");
            label = d.scores.front().label;
        }
        std::vector<MetricId> metrics(kCheckMetrics.begin(), kCheckMetrics.end());
        if (!metrics_csv.empty()) metrics = parse_metric_list(metrics_csv);
        const std::vector<double> grid = make_grid(grid_step);
        const CutoffMap cutoffs = make_cutoffs(args, d);
        const CutoffSearchResult res =
            cutoff_search(d, spec, label, subgroup, metrics, grid, cutoffs);

        fs::create_directories(args.out);
        SweepTarget target{false, subgroup};
        std::vector<PlotSeries> series;
        series.push_back(cutoff_sweep(d, spec, label, metrics, target, grid, true, cutoffs));
        emit_plot_bundle(series, args.out, false);

        ordered_json j;
        j["version"] = "1";
        j["config_echo"] = config_echo(args);
        j["model"] = label;
        j["subgroup"] = res.subgroup;
        j["best_cutoff"] = res.best_cutoff;
        j["best_loss"] = maybe_json(res.best_loss);
        j["warnings"] = cutoff_warnings(cutoffs);
        write_text_file(fs::path(args.out) / "cutoff_search.json", j.dump(2) + "\n");
        std::cout << "best cutoff for '" << subgroup << "': " << res.best_cutoff << " (loss "
                  << (res.best_loss ? std::to_string(*res.best_loss) : "undefined") << ")\n";
    } else {
        throw std::runtime_error(
            "unknown method '" + method +
            "'; expected reweight, resample-uniform, resample-preferential, dir, roc-pivot, "
            "or cutoff-search");
    }
    return kExitPass;
}

// --------------------------------------------------------------- report ----

int cmd_report(const SharedArgs& args, const std::string& plots_csv, const std::string& model_flag,
               const std::string& subgroup_flag, const std::string& metrics_csv,
               const std::string& perf_name, int bins, double grid_step, bool render) {
    if (args.score_flags.empty())
        throw std::runtime_error("report requires at least one --score label=column");
    const AuditDataset d = load_dataset_file(args.input, make_schema(args));
    const ProtectedSpec spec = validate_protected_spec(d, args.privileged);
    const CutoffMap cutoffs = make_cutoffs(args, d);
    const FairnessAudit audit = fairness_check(d, spec, args.epsilon, cutoffs);

    std::vector<PlotKind> kinds;
    if (plots_csv.empty()) {
        kinds.assign(kAllPlotKinds.begin(), kAllPlotKinds.end());
    } else {
        std::istringstream in(plots_csv);
        std::string name;
        while (std::getline(in, name, ',')) {
            auto k = plot_kind_from_string(name);
            if (!k) {
                std::string valid;
                for (PlotKind kk : kAllPlotKinds) valid += " " + to_string(kk);
                throw std::runtime_error("unknown plot kind '" + name + "'; valid kinds:" + valid);
            }
            kinds.push_back(*k);
        }
    }

    const std::string model = model_flag.empty() ? audit.models.front().label : model_flag;
    if (!audit.has_model(model)) throw std::runtime_error("unknown model label '" + model + "'");
    const std::string subgroup =
        subgroup_flag.empty() ? spec.unprivileged.front() : subgroup_flag;

    std::vector<MetricId> sweep_metrics(kCheckMetrics.begin(), kCheckMetrics.end());
    if (!metrics_csv.empty()) sweep_metrics = parse_metric_list(metrics_csv);
    PerfMetric perf = PerfMetric::accuracy;
    if (!perf_name.empty()) {
        auto p = perf_from_string(perf_name);
        if (!p) throw std::runtime_error("unknown performance metric '" + perf_name + "'");
        perf = *p;
    }

    const std::vector<double> grid = make_grid(grid_step);
    const ParityLossMatrix matrix = parity_loss_matrix(audit);

    std::vector<PlotSeries> series;
    std::vector<std::string> warnings;
    for (PlotKind k : kinds) {
        try {
            switch (k) {
                case PlotKind::fairness_check_bars:
                    series.push_back(fairness_check_bars_view(audit));
                    break;
                case PlotKind::metric_scores:
                    series.push_back(metric_scores_view(audit.table, spec));
                    break;
                case PlotKind::radar: series.push_back(radar_view(matrix)); break;
                case PlotKind::heatmap: series.push_back(heatmap_view(matrix)); break;
                case PlotKind::pca: series.push_back(pca_projection(matrix)); break;
                case PlotKind::choose_metric:
                    series.push_back(choose_metric_view(matrix, sweep_metrics.front()));
                    break;
                case PlotKind::stack_metrics: series.push_back(stack_metrics_view(matrix)); break;
                case PlotKind::group_metric:
                    series.push_back(group_metric_view(audit, MetricId::FPR, perf));
                    break;
                case PlotKind::density:
                    series.push_back(score_density(d, spec, model, bins));
                    break;
                case PlotKind::performance_and_fairness:
                    series.push_back(performance_vs_fairness(audit, perf, sweep_metrics));
                    break;
                case PlotKind::all_cutoffs:
                    series.push_back(
                        cutoff_sweep(d, spec, model, sweep_metrics, {true, ""}, grid, false, cutoffs));
                    break;
                case PlotKind::ceteris_paribus_cutoff:
                    series.push_back(cutoff_sweep(d, spec, model, sweep_metrics,
                                                  {false, subgroup}, grid, true, cutoffs));
                    break;
            }
        } catch (const std::exception& e) {
            if (!plots_csv.empty()) throw;  // explicitly requested kind must work
            warnings.push_back(to_string(k) + " skipped: " + e.what());
        }
    }

    emit_plot_bundle(series, args.out, render);
    {
        ordered_json j = read_json_file(fs::path(args.out) / "manifest.json");
        j["config_echo"] = config_echo(args);
        if (!warnings.empty()) j["warnings"] = warnings;
        write_text_file(fs::path(args.out) / "manifest.json", j.dump(2) + "\n");
        for (const auto& w : warnings) std::cerr << "note: " << w << "\n";
    }
    std::cout << "wrote " << series.size() << " series to " << args.out << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairaudit: group-fairness auditing and bias mitigation for binary classifiers"};
    app.require_subcommand(1);

    SharedArgs check_args, train_args, mitigate_args, report_args;

    auto* check = app.add_subcommand("check", "run the five-criterion fairness check");
    add_shared_options(check, check_args, true);
    std::string merge_path;
    bool check_render = false;
    check->add_option("--merge", merge_path, "previous audit.json to aggregate");
    check->add_flag("--render", check_render, "also write SVG plots");

    auto* train = app.add_subcommand("train", "fit the built-in logistic model, append scores");
    add_shared_options(train, train_args, false);
    std::string model_label, features_csv, weights_col, score_data;
    double l2 = 1e-6;
    int max_iter = 100;
    train->add_option("--model-label", model_label, "label for the new score column")->required();
    train->add_option("--features", features_csv, "comma list of feature columns (default: all)");
    train->add_option("--weights", weights_col, "numeric column with fit weights");
    train->add_option("--score-data", score_data, "dataset to score (default: the training input)");
    train->add_option("--l2", l2, "ridge strength")->default_val(1e-6);
    train->add_option("--max-iter", max_iter, "Newton iteration cap")->default_val(100);

    auto* mitigate = app.add_subcommand("mitigate", "bias mitigation methods");
    add_shared_options(mitigate, mitigate_args, false);
    std::string method, feature, ranker, score_label, subgroup, metrics_csv;
    double lambda = 1.0, ranker_cutoff = 0.5, theta = 0.1, pivot_cutoff = 0.5, grid_step = 0.01;
    mitigate->add_option("--method", method,
                         "reweight | resample-uniform | resample-preferential | dir | roc-pivot | "
                         "cutoff-search")
        ->required();
    mitigate->add_option("--lambda", lambda, "repair degree for dir")->default_val(1.0);
    mitigate->add_option("--feature", feature, "feature column for dir");
    mitigate->add_option("--ranker", ranker, "score label ranking borderline rows (preferential)");
    mitigate->add_option("--ranker-cutoff", ranker_cutoff, "border for preferential resampling")
        ->default_val(0.5);
    mitigate->add_option("--theta", theta, "critical region radius for roc-pivot")->default_val(0.1);
    mitigate->add_option("--pivot-cutoff", pivot_cutoff, "cutoff for roc-pivot")->default_val(0.5);
    mitigate->add_option("--score-label", score_label, "which score column to adjust");
    mitigate->add_option("--subgroup", subgroup, "subgroup whose cutoff is searched");
    mitigate->add_option("--metrics", metrics_csv, "comma list of metrics for cutoff-search");
    mitigate->add_option("--grid-step", grid_step, "cutoff grid step")->default_val(0.01);

    auto* report = app.add_subcommand("report", "emit plot data series (and optional SVGs)");
    add_shared_options(report, report_args, true);
    std::string plots_csv, rep_model, rep_subgroup, rep_metrics, perf_name;
    int bins = 20;
    double rep_grid_step = 0.01;
    bool rep_render = false;
    report->add_option("--plots", plots_csv, "comma list of plot kinds (default: all applicable)");
    report->add_option("--model", rep_model, "model for single-model kinds (default: first)");
    report->add_option("--subgroup", rep_subgroup,
                       "subgroup for ceteris_paribus_cutoff (default: first unprivileged)");
    report->add_option("--metrics", rep_metrics, "comma list of metrics for sweeps");
    report->add_option("--performance", perf_name, "accuracy | auc | f1")->default_val("accuracy");
    report->add_option("--bins", bins, "density histogram bins")->default_val(20);
    report->add_option("--grid-step", rep_grid_step, "cutoff grid step")->default_val(0.01);
    report->add_flag("--render", rep_render, "also write SVG plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(check_args, merge_path, check_render);
        if (train->parsed())
            return cmd_train(train_args, model_label, features_csv, weights_col, score_data, l2,
                             max_iter);
        if (mitigate->parsed())
            return cmd_mitigate(mitigate_args, method, lambda, feature, ranker, ranker_cutoff,
                                theta, pivot_cutoff, score_label, subgroup, metrics_csv, grid_step);
        if (report->parsed())
            return cmd_report(report_args, plots_csv, rep_model, rep_subgroup, rep_metrics,
                              perf_name, bins, rep_grid_step, rep_render);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
