#include "dmso/table.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dmso/io.hpp"

namespace dmso {

TableFormat parse_format(const std::string& name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json-lines") return TableFormat::json_lines;
    throw std::invalid_argument("unknown output format: " + name);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("table: empty header");
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("table: row width differs from header");
    rows_.push_back(std::move(row));
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string Table::render(TableFormat format) const {
    std::ostringstream os;
    if (format == TableFormat::csv) {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i]);
            os << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    } else {
        for (const auto& r : rows_) {
            nlohmann::ordered_json j;
            for (std::size_t i = 0; i < r.size(); ++i) j[header_[i]] = r[i];
            os << j.dump() << '\n';
        }
    }
    return os.str();
}

void Table::write(const std::string& path, TableFormat format) const { write_atomic(path, render(format)); }

}  // namespace dmso
