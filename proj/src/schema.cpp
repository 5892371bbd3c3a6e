#include "relflow/schema.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "relflow/common.hpp"
#include "relflow/csv.hpp"

namespace relflow {

using ordered_json = nlohmann::ordered_json;

const char* to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::primary_key: return "primary_key";
        case ColumnKind::foreign_key: return "foreign_key";
    }
    return "?";
}

int TableSpec::column_index(const std::string& col) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == col) return static_cast<int>(i);
    }
    return -1;
}

int TableSpec::primary_key_index() const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::primary_key) return static_cast<int>(i);
    }
    return -1;
}

std::vector<int> TableSpec::feature_columns() const {
    std::vector<int> out;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::continuous ||
            columns[i].kind == ColumnKind::categorical) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::vector<int> TableSpec::foreign_key_columns() const {
    std::vector<int> out;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::foreign_key) out.push_back(static_cast<int>(i));
    }
    return out;
}

int RelationalSchema::table_index(const std::string& name) const {
    for (size_t i = 0; i < tables.size(); ++i) {
        if (tables[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::string RelationalSchema::to_json_text() const {
    ordered_json root;
    root["tables"] = ordered_json::array();
    for (const auto& t : tables) {
        ordered_json jt;
        jt["name"] = t.name;
        jt["columns"] = ordered_json::array();
        for (const auto& c : t.columns) {
            ordered_json jc;
            jc["name"] = c.name;
            jc["kind"] = to_string(c.kind);
            if (c.kind == ColumnKind::foreign_key) jc["target_table"] = c.target_table;
            jt["columns"].push_back(jc);
        }
        root["tables"].push_back(jt);
    }
    return root.dump();
}

std::string RelationalSchema::structure_hash() const {
    return hex64(fnv1a64(to_json_text()));
}

namespace {

ColumnKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "primary_key") return ColumnKind::primary_key;
    if (s == "foreign_key") return ColumnKind::foreign_key;
    throw InputError(where + ": unknown kind \"" + s + "\"");
}

void check_schema(const RelationalSchema& schema) {
    std::set<std::string> table_names;
    for (const auto& t : schema.tables) {
        if (!table_names.insert(t.name).second) {
            throw InputError("schema: duplicate table \"" + t.name + "\"");
        }
        std::set<std::string> col_names;
        int pk_count = 0;
        for (const auto& c : t.columns) {
            if (!col_names.insert(c.name).second) {
                throw InputError("schema: table \"" + t.name + "\": duplicate column \"" +
                                 c.name + "\"");
            }
            if (c.kind == ColumnKind::primary_key) ++pk_count;
        }
        if (pk_count > 1) {
            throw InputError("schema: table \"" + t.name + "\" has more than one primary key");
        }
    }
    for (const auto& t : schema.tables) {
        for (const auto& c : t.columns) {
            if (c.kind != ColumnKind::foreign_key) continue;
            const std::string where = "schema: table \"" + t.name + "\" column \"" + c.name + "\"";
            int target = schema.table_index(c.target_table);
            if (target < 0) {
                throw InputError(where + ": unknown target table \"" + c.target_table + "\"");
            }
            if (schema.tables[target].primary_key_index() < 0) {
                throw InputError(where + ": target table \"" + c.target_table +
                                 "\" has no primary key");
            }
        }
    }
}

}  // namespace

RelationalSchema load_schema(const std::string& config_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(config_text);
    } catch (const std::exception& e) {
        throw InputError(std::string("schema: invalid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("tables") || !root["tables"].is_array()) {
        throw InputError("schema: expected top-level object with a \"tables\" array");
    }
    RelationalSchema schema;
    for (const auto& jt : root["tables"]) {
        TableSpec table;
        if (!jt.contains("name") || !jt["name"].is_string()) {
            throw InputError("schema: table entry missing \"name\"");
        }
        table.name = jt["name"].get<std::string>();
        if (!jt.contains("columns") || !jt["columns"].is_array()) {
            throw InputError("schema: table \"" + table.name + "\" missing \"columns\" array");
        }
        for (const auto& jc : jt["columns"]) {
            ColumnSpec col;
            const std::string where = "schema: table \"" + table.name + "\"";
            if (!jc.contains("name") || !jc["name"].is_string()) {
                throw InputError(where + ": column entry missing \"name\"");
            }
            col.name = jc["name"].get<std::string>();
            if (!jc.contains("kind") || !jc["kind"].is_string()) {
                throw InputError(where + " column \"" + col.name + "\": missing \"kind\"");
            }
            col.kind = parse_kind(jc["kind"].get<std::string>(),
                                  where + " column \"" + col.name + "\"");
            if (col.kind == ColumnKind::foreign_key) {
                if (!jc.contains("target_table") || !jc["target_table"].is_string()) {
                    throw InputError(where + " column \"" + col.name +
                                     "\": foreign_key requires \"target_table\"");
                }
                col.target_table = jc["target_table"].get<std::string>();
            } else if (jc.contains("target_table")) {
                throw InputError(where + " column \"" + col.name +
                                 "\": target_table is only valid on foreign_key columns");
            }
            table.columns.push_back(std::move(col));
        }
        schema.tables.push_back(std::move(table));
    }
    check_schema(schema);
    return schema;
}

RelationalSchema load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open schema file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_schema(ss.str());
}

namespace {

double parse_number(const std::string& text, const std::string& where) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw InputError(where + ": non-numeric value \"" + text + "\" in continuous column");
    }
    return value;
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

RelationalDataset ingest(const RelationalSchema& schema, const std::string& csv_dir) {
    check_schema(schema);
    RelationalDataset ds;
    ds.schema = schema;
    ds.tables.resize(schema.tables.size());

    // Raw key text per row, for primary keys (fk resolution) and fk references.
    std::vector<std::unordered_map<std::string, int64_t>> pk_maps(schema.tables.size());
    std::vector<std::vector<std::vector<std::string>>> fk_text(schema.tables.size());

    for (size_t k = 0; k < schema.tables.size(); ++k) {
        const TableSpec& spec = schema.tables[k];
        const std::string path =
            (std::filesystem::path(csv_dir) / (spec.name + ".csv")).string();
        if (!std::filesystem::exists(path)) {
            throw InputError("missing CSV file for table \"" + spec.name + "\": " + path);
        }
        CsvTable csv = read_csv_file(path);
        if (csv.header.size() != spec.columns.size()) {
            throw InputError(path + ": header has " + std::to_string(csv.header.size()) +
                             " columns, schema declares " + std::to_string(spec.columns.size()));
        }
        for (size_t c = 0; c < spec.columns.size(); ++c) {
            if (csv.header[c] != spec.columns[c].name) {
                throw InputError(path + ": header column " + std::to_string(c + 1) + " is \"" +
                                 csv.header[c] + "\", schema declares \"" +
                                 spec.columns[c].name + "\"");
            }
        }

        TableData& data = ds.tables[k];
        auto& categories = ds.schema.tables[k].columns;
        std::vector<std::unordered_map<std::string, int64_t>> cat_index(spec.columns.size());
        fk_text[k].resize(spec.columns.size());

        for (size_t r = 0; r < csv.rows.size(); ++r) {
            std::vector<Cell> row(spec.columns.size());
            for (size_t c = 0; c < spec.columns.size(); ++c) {
                const std::string& text = csv.rows[r][c];
                const std::string where = path + ": row " + std::to_string(r + 2) +
                                          ", column \"" + spec.columns[c].name + "\"";
                switch (spec.columns[c].kind) {
                    case ColumnKind::continuous:
                        row[c] = text.empty() ? Cell::none() : Cell::number(parse_number(text, where));
                        break;
                    case ColumnKind::categorical:
                        if (text.empty()) {
                            row[c] = Cell::none();
                        } else {
                            auto [it, inserted] = cat_index[c].try_emplace(
                                text, static_cast<int64_t>(categories[c].categories.size()));
                            if (inserted) categories[c].categories.push_back(text);
                            row[c] = Cell::index(it->second);
                        }
                        break;
                    case ColumnKind::primary_key: {
                        if (text.empty()) throw InputError(where + ": missing primary key");
                        auto [it, inserted] =
                            pk_maps[k].try_emplace(text, static_cast<int64_t>(r));
                        if (!inserted) {
                            throw InputError(where + ": duplicate primary key \"" + text + "\"");
                        }
                        row[c] = Cell::index(static_cast<int64_t>(r));
                        break;
                    }
                    case ColumnKind::foreign_key:
                        if (text.empty()) {
                            throw InputError(where + ": missing foreign key (optional links "
                                             "are not supported)");
                        }
                        fk_text[k][c].push_back(text);
                        row[c] = Cell::index(-1);  // resolved below
                        break;
                }
            }
            data.rows.push_back(std::move(row));
        }
    }

    // Second pass: resolve foreign keys now that every primary-key map exists.
    for (size_t k = 0; k < schema.tables.size(); ++k) {
        const TableSpec& spec = schema.tables[k];
        for (int c : spec.foreign_key_columns()) {
            int parent = schema.table_index(spec.columns[c].target_table);
            const auto& texts = fk_text[k][c];
            for (size_t r = 0; r < texts.size(); ++r) {
                auto it = pk_maps[parent].find(texts[r]);
                if (it == pk_maps[parent].end()) {
                    throw InputError("table \"" + spec.name + "\" row " + std::to_string(r + 1) +
                                     ", column \"" + spec.columns[c].name +
                                     "\": dangling foreign key \"" + texts[r] + "\"");
                }
                ds.tables[k].rows[r][c] = Cell::index(it->second);
                ds.edges.push_back({static_cast<int>(k), static_cast<int64_t>(r), c,
                                    parent, it->second});
            }
        }
    }

    auto problems = validate_dataset(ds);
    if (!problems.empty()) {
        throw InputError("ingest produced an inconsistent dataset: " + problems.front());
    }
    return ds;
}

void write_dataset(const RelationalDataset& ds, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (size_t k = 0; k < ds.schema.tables.size(); ++k) {
        const TableSpec& spec = ds.schema.tables[k];
        CsvTable csv;
        for (const auto& col : spec.columns) csv.header.push_back(col.name);
        for (const auto& row : ds.tables[k].rows) {
            std::vector<std::string> out(row.size());
            for (size_t c = 0; c < row.size(); ++c) {
                const Cell& cell = row[c];
                if (cell.missing) continue;  // empty field
                switch (spec.columns[c].kind) {
                    case ColumnKind::continuous:
                        out[c] = format_number(cell.num);
                        break;
                    case ColumnKind::categorical:
                        out[c] = spec.columns[c].categories.at(static_cast<size_t>(cell.idx));
                        break;
                    case ColumnKind::primary_key:
                    case ColumnKind::foreign_key:
                        out[c] = std::to_string(cell.idx);
                        break;
                }
            }
            csv.rows.push_back(std::move(out));
        }
        const std::string path =
            (std::filesystem::path(out_dir) / (spec.name + ".csv")).string();
        write_csv_file(path, csv);
    }
}

std::vector<std::string> validate_dataset(const RelationalDataset& ds) {
    std::vector<std::string> problems;
    if (ds.tables.size() != ds.schema.tables.size()) {
        problems.push_back("table count does not match schema");
        return problems;
    }
    int64_t fk_cells = 0;
    for (size_t k = 0; k < ds.schema.tables.size(); ++k) {
        const TableSpec& spec = ds.schema.tables[k];
        for (const auto& col : spec.columns) {
            if (col.kind != ColumnKind::categorical) continue;
            std::set<std::string> uniq(col.categories.begin(), col.categories.end());
            if (uniq.size() != col.categories.size()) {
                problems.push_back("table \"" + spec.name + "\" column \"" + col.name +
                                   "\": duplicate category labels");
            }
            for (const auto& label : col.categories) {
                if (label.empty()) {
                    problems.push_back("table \"" + spec.name + "\" column \"" + col.name +
                                       "\": empty category label");
                }
            }
        }
        for (size_t r = 0; r < ds.tables[k].rows.size(); ++r) {
            const auto& row = ds.tables[k].rows[r];
            if (row.size() != spec.columns.size()) {
                problems.push_back("table \"" + spec.name + "\" row " + std::to_string(r) +
                                   ": wrong cell count");
                continue;
            }
            for (size_t c = 0; c < row.size(); ++c) {
                const ColumnSpec& col = spec.columns[c];
                const Cell& cell = row[c];
                if (col.kind == ColumnKind::foreign_key) {
                    ++fk_cells;
                    int parent = ds.schema.table_index(col.target_table);
                    if (cell.missing || parent < 0 || cell.idx < 0 ||
                        cell.idx >= ds.tables[parent].row_count()) {
                        problems.push_back("table \"" + spec.name + "\" row " +
                                           std::to_string(r) + " column \"" + col.name +
                                           "\": foreign key does not resolve");
                    }
                } else if (col.kind == ColumnKind::categorical && !cell.missing) {
                    if (cell.idx < 0 ||
                        cell.idx >= static_cast<int64_t>(col.categories.size())) {
                        problems.push_back("table \"" + spec.name + "\" row " +
                                           std::to_string(r) + " column \"" + col.name +
                                           "\": category index out of range");
                    }
                } else if (col.kind == ColumnKind::continuous && !cell.missing &&
                           !std::isfinite(cell.num)) {
                    problems.push_back("table \"" + spec.name + "\" row " + std::to_string(r) +
                                       " column \"" + col.name + "\": non-finite value");
                }
            }
        }
    }
    if (fk_cells != static_cast<int64_t>(ds.edges.size())) {
        problems.push_back("edge count " + std::to_string(ds.edges.size()) +
                           " does not match foreign-key cell count " + std::to_string(fk_cells));
    }
    for (const auto& e : ds.edges) {
        if (e.child_table < 0 || e.child_table >= static_cast<int>(ds.tables.size()) ||
            e.parent_table < 0 || e.parent_table >= static_cast<int>(ds.tables.size()) ||
            e.child_row < 0 || e.child_row >= ds.tables[e.child_table].row_count() ||
            e.parent_row < 0 || e.parent_row >= ds.tables[e.parent_table].row_count()) {
            problems.push_back("edge references a row outside its table");
            break;
        }
    }
    return problems;
}

int64_t RelationalDataset::total_rows() const {
    int64_t n = 0;
    for (const auto& t : tables) n += t.row_count();
    return n;
}

}  // namespace relflow
