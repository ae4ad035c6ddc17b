#pragma once

#include <string>
#include <vector>

namespace dgf::csv {

/// Parsed numeric CSV: leading `#` lines kept verbatim, one header row,
/// then all-numeric data rows.
struct Table {
    std::vector<std::string> comments;  ///< leading '#' lines, without newline
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  ///< throws if absent
};

/// Strict reader: every data cell must parse fully as a number, every row
/// must match the header width. Throws Error on malformed input.
Table parse_numeric(const std::string& text);

/// Canonical writer: comments, comma-joined header, then rows with each
/// value rendered as %.10g. parse_numeric(format_numeric(t)) reproduces t;
/// all CSV artifacts in this project are emitted in this same rendering, so
/// files survive a parse/format cycle byte-identically.
std::string format_numeric(const Table& t);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace dgf::csv
