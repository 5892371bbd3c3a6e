#include "relflow/csv.hpp"

#include <fstream>
#include <sstream>

#include "relflow/common.hpp"

namespace relflow {

namespace {

bool needs_quoting(const std::string& field) {
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
    }
    return false;
}

void append_field(std::string& out, const std::string& field) {
    if (!needs_quoting(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    size_t line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                    ++i;
                } else {
                    throw InputError(origin + ":" + std::to_string(line) +
                                     ": stray quote inside unquoted field");
                }
                break;
            case ',':
                end_field();
                ++i;
                break;
            case '\r':
                if (i + 1 < n && text[i + 1] == '\n') {
                    end_record();
                    ++line;
                    i += 2;
                } else {
                    throw InputError(origin + ":" + std::to_string(line) +
                                     ": bare carriage return");
                }
                break;
            case '\n':
                end_record();
                ++line;
                ++i;
                break;
            default:
                field += c;
                field_started = true;
                ++i;
        }
    }
    if (in_quotes) {
        throw InputError(origin + ": unterminated quoted field");
    }
    // Final record without trailing newline.
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }

    if (records.empty()) {
        throw InputError(origin + ": missing header row");
    }
    CsvTable table;
    table.header = std::move(records.front());
    const size_t width = table.header.size();
    for (size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw InputError(origin + ": row " + std::to_string(r + 1) + " has " +
                             std::to_string(records[r].size()) + " fields, expected " +
                             std::to_string(width));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open CSV file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path);
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    auto emit_row = [&out](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            append_field(out, row[i]);
        }
        out += '\n';
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write CSV file: " + path);
    out << format_csv(table);
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace relflow
