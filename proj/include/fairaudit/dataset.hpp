#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fairaudit {

// A feature column is either numeric or categorical. The protected column is
// always carried as a categorical feature as well, so trained models may use it.
struct FeatureColumn {
    std::string name;
    std::variant<std::vector<double>, std::vector<std::string>> values;

    bool is_numeric() const { return std::holds_alternative<std::vector<double>>(values); }
    std::size_t size() const;
    const std::vector<double>& numeric() const { return std::get<std::vector<double>>(values); }
    const std::vector<std::string>& categorical() const { return std::get<std::vector<std::string>>(values); }

    bool operator==(const FeatureColumn&) const = default;
};

struct ScoreColumn {
    std::string label;   // model label
    std::string column;  // source column name
    std::vector<double> values;

    bool operator==(const ScoreColumn&) const = default;
};

// Rows of (binary label, protected level, per-model scores, optional features).
// 1 is the favorable outcome. Invariants are established by load_dataset /
// validate_dataset: equal column lengths, scores in [0,1], labels in {0,1},
// unique non-empty model labels, >= 2 protected levels each occurring at
// least once.
struct AuditDataset {
    std::vector<int> y_true;
    std::vector<std::string> group;  // protected level per row
    std::vector<ScoreColumn> scores;
    std::vector<FeatureColumn> features;  // original column order
    std::string label_name;
    std::string group_name;

    std::size_t rows() const { return y_true.size(); }
    const ScoreColumn& score(const std::string& label) const;  // throws on unknown label
    bool has_score(const std::string& label) const;
    const FeatureColumn& feature(const std::string& name) const;
    bool has_feature(const std::string& name) const;
    std::vector<std::string> levels() const;  // distinct protected levels, sorted

    bool operator==(const AuditDataset&) const = default;
};

void validate_dataset(const AuditDataset& d);

struct ColumnSchema {
    std::string label_column;
    std::string protected_column;
    std::vector<std::pair<std::string, std::string>> score_columns;  // model label -> column
    std::optional<std::string> favorable;  // raw label value mapping to 1
};

AuditDataset load_dataset(std::istream& source, const ColumnSchema& schema);
AuditDataset load_dataset_file(const std::string& path, const ColumnSchema& schema);

// Writes comma-delimited text with a header row; labels come out as 0/1 and
// reloading with the same schema yields an equal dataset.
void write_dataset(const AuditDataset& d, std::ostream& out);
void write_dataset_file(const AuditDataset& d, const std::string& path);

// Protected level -> ascending row indices; the lists partition 0..rows-1.
std::map<std::string, std::vector<std::size_t>> partition_subgroups(const AuditDataset& d);

struct ProtectedSpec {
    std::string privileged;
    std::vector<std::string> unprivileged;  // lexicographic

    bool operator==(const ProtectedSpec&) const = default;
};

ProtectedSpec validate_protected_spec(const AuditDataset& d, const std::string& privileged);

// Per-subgroup classification cutoff, default 0.5, all strictly inside (0,1).
class CutoffMap {
public:
    CutoffMap() = default;
    static CutoffMap uniform(const std::vector<std::string>& levels, double cutoff = 0.5);

    void set(const std::string& level, double cutoff);
    double at(const std::string& level) const;  // throws if the level has no cutoff
    bool contains(const std::string& level) const { return cutoffs_.contains(level); }
    const std::map<std::string, double>& entries() const { return cutoffs_; }
    bool is_uniform() const;

    bool operator==(const CutoffMap&) const = default;

private:
    std::map<std::string, double> cutoffs_;
};

}  // namespace fairaudit
