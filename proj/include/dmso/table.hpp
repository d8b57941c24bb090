#pragma once

#include <string>
#include <vector>

namespace dmso {

enum class TableFormat { csv, json_lines };
TableFormat parse_format(const std::string& name);

// Rows of string cells under a fixed header. Numbers are formatted by the
// caller (format_double keeps them round-trippable).
class Table {
public:
    explicit Table(std::vector<std::string> header);
    void add(std::vector<std::string> row);
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string render(TableFormat format) const;
    void write(const std::string& path, TableFormat format) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace dmso
