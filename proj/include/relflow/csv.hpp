#pragma once

#include <string>
#include <vector>

namespace relflow {

// RFC-4180 CSV, UTF-8. Fields containing separators, quotes or line breaks
// are quoted; quotes are escaped by doubling. An empty unquoted field decodes
// to an empty string (the "missing" marker at the schema level).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_file(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

std::string format_csv(const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

}  // namespace relflow
