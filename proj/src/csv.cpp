#include "cadlagqv/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "cadlagqv/errors.hpp"

namespace cadlag {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    if (!cur.empty()) lines.push_back(std::move(cur));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& field, std::size_t line_no) {
    const std::string tok = trimmed(field);
    if (tok.empty())
        throw format_error("line " + std::to_string(line_no) + ": empty field");
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size())
        throw format_error("line " + std::to_string(line_no) +
                           ": not a number: '" + tok + "'");
    if (!std::isfinite(v))
        throw format_error("line " + std::to_string(line_no) +
                           ": non-finite value '" + tok + "'");
    return v;
}

// Header `t,v` or `t,v1,...,vm`; returns m.
std::size_t parse_header(const std::string& line) {
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() < 2 || trimmed(fields[0]) != "t")
        throw format_error("header must be t,v or t,v1,...,vm");
    if (fields.size() == 2) {
        const std::string name = trimmed(fields[1]);
        if (name != "v" && name != "v1")
            throw format_error("header must be t,v or t,v1,...,vm");
        return 1;
    }
    for (std::size_t k = 1; k < fields.size(); ++k)
        if (trimmed(fields[k]) != "v" + std::to_string(k))
            throw format_error("header must be t,v or t,v1,...,vm");
    return fields.size() - 1;
}

struct Table {
    std::size_t columns = 0;          // value columns
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // one vector per column
};

Table parse_path_table(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw format_error("empty path file");
    Table table;
    table.columns = parse_header(lines[0]);
    table.values.resize(table.columns);
    std::size_t run = 0;  // consecutive rows sharing one time
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        const std::vector<std::string> fields = split_fields(lines[n]);
        if (fields.size() != table.columns + 1)
            throw format_error("line " + std::to_string(n + 1) + ": expected " +
                               std::to_string(table.columns + 1) + " fields");
        const double t = parse_double(fields[0], n + 1);
        if (!table.times.empty()) {
            if (t < table.times.back())
                throw format_error("line " + std::to_string(n + 1) +
                                   ": times must be sorted");
            run = t == table.times.back() ? run + 1 : 1;
            if (run > 2)
                throw format_error("line " + std::to_string(n + 1) +
                                   ": time repeated more than twice");
        } else {
            run = 1;
        }
        table.times.push_back(t);
        for (std::size_t k = 0; k < table.columns; ++k)
            table.values[k].push_back(parse_double(fields[k + 1], n + 1));
    }
    if (table.times.empty()) throw format_error("path file has no rows");
    return table;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CadlagPath read_path_csv(const std::string& text) {
    Table table = parse_path_table(text);
    if (table.columns != 1)
        throw format_error("expected a scalar path (header t,v), got " +
                           std::to_string(table.columns) + " value columns");
    const double horizon = table.times.back();
    try {
        return CadlagPath(std::move(table.times), std::move(table.values[0]),
                          horizon);
    } catch (const domain_error& e) {
        throw format_error(std::string("invalid path: ") + e.what());
    }
}

VectorCadlagPath read_vector_path_csv(const std::string& text) {
    Table table = parse_path_table(text);
    const double horizon = table.times.back();
    try {
        std::vector<CadlagPath> components;
        components.reserve(table.columns);
        for (std::size_t k = 0; k < table.columns; ++k)
            components.emplace_back(table.times, std::move(table.values[k]),
                                    horizon);
        return VectorCadlagPath(std::move(components));
    } catch (const domain_error& e) {
        throw format_error(std::string("invalid path: ") + e.what());
    }
}

std::string write_path_csv(const CadlagPath& x) {
    // The knot arrays already are the duplicated-time encoding. The horizon
    // is carried by the last row, so a path that goes flat early gets one
    // extra row there.
    std::string out = "t,v\n";
    for (std::size_t k = 0; k < x.times().size(); ++k)
        out += fmt(x.times()[k]) + "," + fmt(x.values()[k]) + "\n";
    if (x.times().back() < x.horizon())
        out += fmt(x.horizon()) + "," + fmt(x.values().back()) + "\n";
    return out;
}

std::string write_vector_path_csv(const VectorCadlagPath& x) {
    std::string out = "t";
    for (std::size_t k = 1; k <= x.dimension(); ++k)
        out += ",v" + std::to_string(k);
    out += "\n";

    std::vector<double> knots;
    for (const CadlagPath& c : x.components())
        knots.insert(knots.end(), c.times().begin(), c.times().end());
    knots.push_back(x.horizon());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    for (double u : knots) {
        bool jump = false;
        if (u > 0.0)
            for (const CadlagPath& c : x.components())
                if (c.left_limit(u) != c.evaluate(u)) jump = true;
        if (jump) {
            out += fmt(u);
            for (const CadlagPath& c : x.components())
                out += "," + fmt(c.left_limit(u));
            out += "\n";
        }
        out += fmt(u);
        for (const CadlagPath& c : x.components())
            out += "," + fmt(c.evaluate(u));
        out += "\n";
    }
    return out;
}

PartitionScheme read_scheme_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    std::vector<Partition> levels;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        const std::vector<std::string> fields = split_fields(lines[n]);
        std::vector<double> points;
        points.reserve(fields.size());
        for (const std::string& f : fields)
            points.push_back(parse_double(f, n + 1));
        try {
            levels.emplace_back(std::move(points));
        } catch (const domain_error& e) {
            throw format_error("line " + std::to_string(n + 1) +
                               ": invalid partition: " + e.what());
        }
    }
    if (levels.empty()) throw format_error("no partitions in scheme file");
    try {
        return PartitionScheme::from_levels(std::move(levels));
    } catch (const domain_error& e) {
        throw format_error(std::string("invalid scheme: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error("cannot create file: " + path);
    out << text;
    if (!out) throw format_error("cannot write file: " + path);
}

}  // namespace cadlag
