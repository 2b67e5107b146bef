#ifndef MSSC_DATASET_HPP
#define MSSC_DATASET_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mssc {

/// Input problems (malformed rows, bad cells, unknown columns) are reported
/// with the 1-based line number of the offending input line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& msg) : std::runtime_error(msg), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A point set with optional provider labels. Labels are opaque identifiers
/// in the input; internally they are re-indexed to 0..k_true-1 in first
/// appearance order, since every measure depends only on the partition.
struct Dataset {
    std::string name;
    Eigen::MatrixXd points;                       // n x m
    std::optional<std::vector<int>> truth_labels; // re-indexed, length n
    std::optional<int> k_true;
    std::vector<std::string> label_names;         // original label text per class index

    Eigen::Index n() const { return points.rows(); }
    Eigen::Index m() const { return points.cols(); }
};

struct GramMatrix {
    Eigen::MatrixXd W; // n x n, exactly symmetric
    double trace_w = 0.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool parse_double(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) return false;
    return std::isfinite(out);
}

/// RFC-4180-ish field split: quoted fields may contain commas and doubled
/// quotes. No multi-line fields (numeric data never needs them).
inline std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(cur);
    return fields;
}

inline void validate(const Dataset& d) {
    if (d.points.rows() < 1 || d.points.cols() < 1)
        throw ParseError("dataset must have at least one row and one column");
    if (!d.points.allFinite()) throw ParseError("dataset contains non-finite values");
    if (d.truth_labels) {
        if (static_cast<Eigen::Index>(d.truth_labels->size()) != d.points.rows())
            throw ParseError("label count does not match row count");
    }
}

}  // namespace detail

/// Parse a CSV stream with a mandatory header row. If `label_column` names a
/// header, that column becomes the ground-truth labels; all remaining columns
/// must be numeric.
inline Dataset parse_csv(std::istream& in, std::optional<std::string> label_column = std::nullopt,
                         std::string name = "csv") {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: missing header row", 1);
    const std::vector<std::string> header = detail::split_csv_row(line, 1);

    std::ptrdiff_t label_idx = -1;
    if (label_column) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (detail::trim(header[j]) == *label_column) label_idx = static_cast<std::ptrdiff_t>(j);
        if (label_idx < 0) throw ParseError("unknown label column '" + *label_column + "'", 1);
    }

    const std::size_t m = header.size() - (label_idx >= 0 ? 1 : 0);
    if (m == 0) throw ParseError("no feature columns", 1);

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t n = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_row(line, line_no);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (static_cast<std::ptrdiff_t>(j) == label_idx) {
                raw_labels.push_back(detail::trim(fields[j]));
                continue;
            }
            double v;
            if (!detail::parse_double(fields[j], v))
                throw ParseError("non-numeric cell '" + detail::trim(fields[j]) + "' in column '" +
                                     detail::trim(header[j]) + "'",
                                 line_no);
            values.push_back(v);
        }
        ++n;
    }
    if (n == 0) throw ParseError("no data rows", line_no);

    Dataset d;
    d.name = std::move(name);
    d.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            d.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * m + j];

    if (label_idx >= 0) {
        std::vector<int> labels(n);
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = index.try_emplace(raw_labels[i], static_cast<int>(d.label_names.size()));
            if (inserted) d.label_names.push_back(raw_labels[i]);
            labels[i] = it->second;
        }
        d.truth_labels = std::move(labels);
        d.k_true = static_cast<int>(d.label_names.size());
    }
    detail::validate(d);
    return d;
}

/// Minimal ARFF subset: numeric/real/integer attributes plus at most one
/// nominal attribute, which becomes the ground-truth class. Sparse data,
/// string/date attributes and missing values ('?') are rejected.
inline Dataset parse_arff(std::istream& in) {
    struct Attr {
        std::string name;
        bool nominal = false;
        std::vector<std::string> values; // nominal domain
    };
    std::vector<Attr> attrs;
    std::ptrdiff_t nominal_idx = -1;
    std::string relation = "arff";
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t n = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '%') continue;
        if (!in_data) {
            const std::string low = detail::lower(t);
            if (low.rfind("@relation", 0) == 0) {
                relation = detail::trim(t.substr(9));
                if (!relation.empty() && relation.front() == '\'' && relation.back() == '\'')
                    relation = relation.substr(1, relation.size() - 2);
            } else if (low.rfind("@attribute", 0) == 0) {
                std::string rest = detail::trim(t.substr(10));
                // attribute name may be quoted
                std::string attr_name;
                std::size_t pos = 0;
                if (!rest.empty() && rest[0] == '\'') {
                    std::size_t close = rest.find('\'', 1);
                    if (close == std::string::npos) throw ParseError("unterminated attribute name", line_no);
                    attr_name = rest.substr(1, close - 1);
                    pos = close + 1;
                } else {
                    pos = rest.find_first_of(" \t");
                    if (pos == std::string::npos) throw ParseError("attribute without a type", line_no);
                    attr_name = rest.substr(0, pos);
                }
                std::string type = detail::trim(rest.substr(pos));
                Attr a;
                a.name = attr_name;
                if (!type.empty() && type[0] == '{') {
                    if (type.back() != '}') throw ParseError("malformed nominal domain", line_no);
                    if (nominal_idx >= 0)
                        throw ParseError("more than one nominal attribute is not supported", line_no);
                    a.nominal = true;
                    std::string body = type.substr(1, type.size() - 2);
                    std::string item;
                    for (char c : body) {
                        if (c == ',') {
                            a.values.push_back(detail::trim(item));
                            item.clear();
                        } else {
                            item.push_back(c);
                        }
                    }
                    a.values.push_back(detail::trim(item));
                    nominal_idx = static_cast<std::ptrdiff_t>(attrs.size());
                } else {
                    const std::string lt = detail::lower(type);
                    if (lt != "numeric" && lt != "real" && lt != "integer")
                        throw ParseError("unsupported attribute type '" + type + "'", line_no);
                }
                attrs.push_back(std::move(a));
            } else if (low.rfind("@data", 0) == 0) {
                if (attrs.empty()) throw ParseError("@data before any @attribute", line_no);
                in_data = true;
            } else if (low.rfind("@", 0) == 0) {
                throw ParseError("unsupported directive '" + t + "'", line_no);
            } else {
                throw ParseError("unexpected content before @data", line_no);
            }
            continue;
        }
        if (t[0] == '{') throw ParseError("sparse ARFF rows are not supported", line_no);
        const std::vector<std::string> fields = detail::split_csv_row(t, line_no);
        if (fields.size() != attrs.size())
            throw ParseError("expected " + std::to_string(attrs.size()) + " values, got " +
                                 std::to_string(fields.size()),
                             line_no);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            std::string f = detail::trim(fields[j]);
            if (f == "?") throw ParseError("missing value '?'", line_no);
            if (static_cast<std::ptrdiff_t>(j) == nominal_idx) {
                if (!f.empty() && f.front() == '\'' && f.back() == '\'' && f.size() >= 2)
                    f = f.substr(1, f.size() - 2);
                const auto& dom = attrs[j].values;
                if (std::find(dom.begin(), dom.end(), f) == dom.end())
                    throw ParseError("value '" + f + "' outside declared nominal set", line_no);
                raw_labels.push_back(f);
            } else {
                double v;
                if (!detail::parse_double(f, v))
                    throw ParseError("non-numeric cell '" + f + "' in attribute '" + attrs[j].name + "'",
                                     line_no);
                values.push_back(v);
            }
        }
        ++n;
    }
    if (!in_data) throw ParseError("missing @data section", line_no);
    if (n == 0) throw ParseError("no data rows", line_no);

    const std::size_t m = attrs.size() - (nominal_idx >= 0 ? 1 : 0);
    if (m == 0) throw ParseError("no numeric attributes", line_no);

    Dataset d;
    d.name = relation;
    d.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            d.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * m + j];

    if (nominal_idx >= 0) {
        std::vector<int> labels(n);
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = index.try_emplace(raw_labels[i], static_cast<int>(d.label_names.size()));
            if (inserted) d.label_names.push_back(raw_labels[i]);
            labels[i] = it->second;
        }
        d.truth_labels = std::move(labels);
        d.k_true = static_cast<int>(d.label_names.size());
    }
    detail::validate(d);
    return d;
}

/// Full-precision CSV writer; parse_csv(write_csv(d)) reproduces the points
/// bit-exactly (shortest round-trip decimal via %.17g).
inline void write_csv(const Dataset& d, std::ostream& out) {
    const Eigen::Index n = d.n(), m = d.m();
    for (Eigen::Index j = 0; j < m; ++j) out << (j ? "," : "") << "x" << j;
    if (d.truth_labels) out << ",class";
    out << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", d.points(i, j));
            out << (j ? "," : "") << buf;
        }
        if (d.truth_labels) {
            const int c = (*d.truth_labels)[static_cast<std::size_t>(i)];
            if (c < static_cast<int>(d.label_names.size()))
                out << "," << d.label_names[static_cast<std::size_t>(c)];
            else
                out << "," << c;
        }
        out << "\n";
    }
}

/// Gram matrix W with W_ij = <p_i, p_j>, exactly symmetric by construction.
inline GramMatrix gram(const Dataset& d) {
    const Eigen::Index n = d.n();
    GramMatrix g;
    g.W.setZero(n, n);
    g.W.selfadjointView<Eigen::Lower>().rankUpdate(d.points);
    g.W.triangularView<Eigen::StrictlyUpper>() = g.W.transpose();
    g.trace_w = g.W.trace();
    return g;
}

}  // namespace mssc

#endif  // MSSC_DATASET_HPP
