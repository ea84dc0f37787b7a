#pragma once

// Minimal CSV and key=value I/O shared by the library modules.
// Numbers are written with 17 significant digits so doubles round-trip.

#include <Eigen/Dense>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrc/error.hpp"

namespace qrc::csv {

struct Table {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string &s) {
    // std::from_chars for double is available in libstdc++ 11.
    double v = 0.0;
    const auto *begin = s.data();
    const auto *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        detail::config_fail("not a number: '" + s + "'");
    }
    return v;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Writes `content` to a sibling temp file, then renames it over `path`.
inline void write_atomic(const std::filesystem::path &path,
                         const std::string &content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            detail::config_fail("cannot open for writing: " + tmp.string());
        }
        out << content;
        if (!out) {
            detail::config_fail("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string to_string(const Table &t) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        os << (i ? "," : "") << t.header[i];
    }
    os << '\n';
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
            os << (c ? "," : "") << t.values(r, c);
        }
        os << '\n';
    }
    return os.str();
}

inline void write(const std::filesystem::path &path, const Table &t) {
    if (static_cast<Eigen::Index>(t.header.size()) != t.values.cols()) {
        detail::config_fail("csv header/column count mismatch");
    }
    write_atomic(path, to_string(t));
}

inline Table parse(std::istream &in, const std::string &origin) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) {
        detail::config_fail("empty csv: " + origin);
    }
    t.header = split(line);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split(line);
        if (cells.size() != t.header.size()) {
            detail::config_fail(origin + ":" + std::to_string(line_no) +
                                ": expected " +
                                std::to_string(t.header.size()) + " columns");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto &c : cells) {
            row.push_back(parse_double(c));
        }
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            t.values(static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return t;
}

inline Table read(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        detail::config_fail("missing file: " + path.string());
    }
    return parse(in, path.string());
}

using KeyValues = std::map<std::string, std::string>;

/// Parses `key=value` lines; `#` starts a comment.
inline KeyValues parse_key_values(std::istream &in, const std::string &origin) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            detail::config_fail(origin + ":" + std::to_string(line_no) +
                                ": expected key=value");
        }
        kv[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
    }
    return kv;
}

inline KeyValues parse_key_values(const std::string &text) {
    std::istringstream in(text);
    return parse_key_values(in, "<string>");
}

inline KeyValues read_key_values(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        detail::config_fail("missing file: " + path.string());
    }
    return parse_key_values(in, path.string());
}

inline std::string to_string(const KeyValues &kv) {
    std::ostringstream os;
    for (const auto &[k, v] : kv) {
        os << k << '=' << v << '\n';
    }
    return os.str();
}

} // namespace qrc::csv
