#include "fairaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairaudit {

std::size_t FeatureColumn::size() const {
    return is_numeric() ? numeric().size() : categorical().size();
}

const ScoreColumn& AuditDataset::score(const std::string& label) const {
    for (const auto& s : scores)
        if (s.label == label) return s;
    throw std::runtime_error("unknown model label '" + label + "'");
}

bool AuditDataset::has_score(const std::string& label) const {
    return std::any_of(scores.begin(), scores.end(),
                       [&](const ScoreColumn& s) { return s.label == label; });
}

const FeatureColumn& AuditDataset::feature(const std::string& name) const {
    for (const auto& f : features)
        if (f.name == name) return f;
    throw std::runtime_error("unknown feature column '" + name + "'");
}

bool AuditDataset::has_feature(const std::string& name) const {
    return std::any_of(features.begin(), features.end(),
                       [&](const FeatureColumn& f) { return f.name == name; });
}

std::vector<std::string> AuditDataset::levels() const {
    std::set<std::string> s(group.begin(), group.end());
    return {s.begin(), s.end()};
}

void validate_dataset(const AuditDataset& d) {
    const std::size_t n = d.rows();
    if (n == 0) throw std::runtime_error("dataset is empty");
    if (d.group.size() != n) throw std::runtime_error("protected column length mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (d.y_true[i] != 0 && d.y_true[i] != 1)
            throw std::runtime_error("row " + std::to_string(i + 1) + ": label outside {0,1}");

    std::set<std::string> labels;
    for (const auto& s : d.scores) {
        if (s.label.empty()) throw std::runtime_error("empty model label");
        if (!labels.insert(s.label).second)
            throw std::runtime_error("duplicate model label '" + s.label + "'");
        if (s.values.size() != n)
            throw std::runtime_error("score column '" + s.column + "' length mismatch");
        for (std::size_t i = 0; i < n; ++i)
            if (!(s.values[i] >= 0.0 && s.values[i] <= 1.0))
                throw std::runtime_error("row " + std::to_string(i + 1) + ": score '" +
                                         s.column + "' outside [0,1]");
    }
    for (const auto& f : d.features)
        if (f.size() != n)
            throw std::runtime_error("feature column '" + f.name + "' length mismatch");

    if (d.levels().size() < 2)
        throw std::runtime_error("protected column needs >=2 levels, got 1");
}

namespace {

// Minimal CSV: comma separated, optional double-quoting with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) return false;
    return std::isfinite(out);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

AuditDataset load_dataset(std::istream& source, const ColumnSchema& schema) {
    std::string line;
    if (!std::getline(source, line)) throw std::runtime_error("dataset is empty");
    const std::vector<std::string> header = split_csv_line(line);
    {
        std::set<std::string> seen;
        for (const auto& name : header)
            if (!seen.insert(name).second)
                throw std::runtime_error("schema error: duplicate column '" + name + "'");
    }

    auto column_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("schema error: column '" + name + "' not found");
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t label_idx = column_index(schema.label_column);
    const std::size_t group_idx = column_index(schema.protected_column);

    std::vector<std::size_t> score_idx;
    std::set<std::size_t> role_cols = {label_idx, group_idx};
    for (const auto& [label, col] : schema.score_columns) {
        std::size_t idx = column_index(col);
        score_idx.push_back(idx);
        role_cols.insert(idx);
    }

    // every remaining column (including the protected one) becomes a feature
    std::vector<std::size_t> feature_idx;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i == group_idx || !role_cols.contains(i)) feature_idx.push_back(i);

    std::vector<std::vector<std::string>> raw(header.size());
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        for (std::size_t i = 0; i < header.size(); ++i) raw[i].push_back(std::move(cells[i]));
    }
    if (row == 0) throw std::runtime_error("dataset is empty");

    AuditDataset d;
    d.label_name = schema.label_column;
    d.group_name = schema.protected_column;

    d.y_true.reserve(row);
    for (std::size_t i = 0; i < row; ++i)
        if (raw[label_idx][i].empty())
            throw std::runtime_error("row " + std::to_string(i + 1) + ": missing label");
    const bool use_favorable =
        schema.favorable &&
        std::find(raw[label_idx].begin(), raw[label_idx].end(), *schema.favorable) !=
            raw[label_idx].end();
    if (use_favorable) {
        std::string unfavorable;  // exactly one raw value besides the favorable one
        for (std::size_t i = 0; i < row; ++i) {
            const std::string& v = raw[label_idx][i];
            if (v == *schema.favorable) {
                d.y_true.push_back(1);
            } else {
                if (unfavorable.empty()) unfavorable = v;
                else if (v != unfavorable)
                    throw std::runtime_error("row " + std::to_string(i + 1) + ": label '" + v +
                                             "' outside the binary pair {" + *schema.favorable +
                                             ", " + unfavorable + "}");
                d.y_true.push_back(0);
            }
        }
    } else {
        // already-encoded column; a declared favorable value that never occurs
        // is moot (happens when reloading a file this tool wrote)
        for (std::size_t i = 0; i < row; ++i) {
            const std::string& v = raw[label_idx][i];
            if (v != "0" && v != "1")
                throw std::runtime_error(
                    "row " + std::to_string(i + 1) + ": label '" + v + "' outside {0,1}" +
                    (schema.favorable ? "" : " and no favorable value declared"));
            d.y_true.push_back(v == "1" ? 1 : 0);
        }
    }

    for (std::size_t i = 0; i < row; ++i)
        if (raw[group_idx][i].empty())
            throw std::runtime_error("row " + std::to_string(i + 1) + ": missing protected value");
    d.group = raw[group_idx];

    for (std::size_t k = 0; k < schema.score_columns.size(); ++k) {
        ScoreColumn sc;
        sc.label = schema.score_columns[k].first;
        sc.column = schema.score_columns[k].second;
        sc.values.reserve(row);
        for (std::size_t i = 0; i < row; ++i) {
            const std::string& v = raw[score_idx[k]][i];
            double x;
            if (!parse_double(v, x))
                throw std::runtime_error("row " + std::to_string(i + 1) + ": score '" +
                                         sc.column + "' is not numeric: '" + v + "'");
            if (x < 0.0 || x > 1.0)
                throw std::runtime_error("row " + std::to_string(i + 1) + ": score '" +
                                         sc.column + "' outside [0,1]: " + v);
            sc.values.push_back(x);
        }
        d.scores.push_back(std::move(sc));
    }

    for (std::size_t idx : feature_idx) {
        FeatureColumn f;
        f.name = header[idx];
        bool numeric = idx != group_idx;  // protected stays categorical
        std::vector<double> nums;
        if (numeric) {
            nums.reserve(row);
            for (const auto& v : raw[idx]) {
                double x;
                if (!parse_double(v, x)) { numeric = false; break; }
                nums.push_back(x);
            }
        }
        if (numeric) f.values = std::move(nums);
        else f.values = raw[idx];
        d.features.push_back(std::move(f));
    }

    validate_dataset(d);
    return d;
}

AuditDataset load_dataset_file(const std::string& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return load_dataset(in, schema);
}

void write_dataset(const AuditDataset& d, std::ostream& out) {
    out << csv_escape(d.label_name);
    bool group_in_features = std::any_of(d.features.begin(), d.features.end(),
                                         [&](const auto& f) { return f.name == d.group_name; });
    if (!group_in_features) out << ',' << csv_escape(d.group_name);
    for (const auto& f : d.features) out << ',' << csv_escape(f.name);
    for (const auto& s : d.scores) out << ',' << csv_escape(s.column);
    out << '\n';

    for (std::size_t i = 0; i < d.rows(); ++i) {
        out << d.y_true[i];
        if (!group_in_features) out << ',' << csv_escape(d.group[i]);
        for (const auto& f : d.features) {
            out << ',';
            if (f.is_numeric()) out << format_double(f.numeric()[i]);
            else out << csv_escape(f.categorical()[i]);
        }
        for (const auto& s : d.scores) out << ',' << format_double(s.values[i]);
        out << '\n';
    }
}

void write_dataset_file(const AuditDataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_dataset(d, out);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::map<std::string, std::vector<std::size_t>> partition_subgroups(const AuditDataset& d) {
    std::map<std::string, std::vector<std::size_t>> parts;
    for (std::size_t i = 0; i < d.rows(); ++i) parts[d.group[i]].push_back(i);
    return parts;
}

ProtectedSpec validate_protected_spec(const AuditDataset& d, const std::string& privileged) {
    std::vector<std::string> lv = d.levels();
    if (std::find(lv.begin(), lv.end(), privileged) == lv.end()) {
        std::string msg = "privileged level '" + privileged + "' not present; available:";
        for (const auto& l : lv) msg += " " + l;
        throw std::runtime_error(msg);
    }
    ProtectedSpec spec;
    spec.privileged = privileged;
    for (const auto& l : lv)
        if (l != privileged) spec.unprivileged.push_back(l);
    return spec;
}

CutoffMap CutoffMap::uniform(const std::vector<std::string>& levels, double cutoff) {
    CutoffMap m;
    for (const auto& l : levels) m.set(l, cutoff);
    return m;
}

void CutoffMap::set(const std::string& level, double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0))
        throw std::invalid_argument("cutoff for '" + level + "' must lie strictly inside (0,1)");
    cutoffs_[level] = cutoff;
}

double CutoffMap::at(const std::string& level) const {
    auto it = cutoffs_.find(level);
    if (it == cutoffs_.end())
        throw std::runtime_error("no cutoff for protected level '" + level + "'");
    return it->second;
}

bool CutoffMap::is_uniform() const {
    if (cutoffs_.size() <= 1) return true;
    double first = cutoffs_.begin()->second;
    return std::all_of(cutoffs_.begin(), cutoffs_.end(),
                       [&](const auto& kv) { return kv.second == first; });
}

}  // namespace fairaudit
