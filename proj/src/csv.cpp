#include "dgf/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dgf/errors.hpp"

namespace dgf::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error("csv table has no column '" + name + "'");
}

Table parse_numeric(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && !line.empty() && line.front() == '#') {
            t.comments.push_back(line);
            continue;
        }
        if (line.empty()) continue;
        if (!have_header) {
            t.header = split(line);
            have_header = true;
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw Error("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " cells, got " +
                        std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            const char* s = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw Error("csv line " + std::to_string(line_no) +
                            ": cannot parse '" + cell + "' as a number");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error("csv text has no header row");
    return t;
}

std::string format_numeric(const Table& t) {
    std::string out;
    for (const auto& c : t.comments) {
        out += c;
        out += '\n';
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ',';
        out += t.header[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.10g", row[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace dgf::csv
