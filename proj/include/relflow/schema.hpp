#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relflow {

enum class ColumnKind { continuous, categorical, primary_key, foreign_key };

const char* to_string(ColumnKind k);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::string target_table;             // foreign_key only
    std::vector<std::string> categories;  // categorical only, discovered at ingest
};

struct TableSpec {
    std::string name;
    std::vector<ColumnSpec> columns;

    int column_index(const std::string& name) const;  // -1 if absent
    int primary_key_index() const;                    // -1 if none
    std::vector<int> feature_columns() const;         // continuous + categorical
    std::vector<int> foreign_key_columns() const;
};

// Declared tables in canonical (declaration) order. This ordering is the one
// every encoding and layout downstream derives from.
struct RelationalSchema {
    std::vector<TableSpec> tables;

    int table_index(const std::string& name) const;  // -1 if absent
    // Stable content hash of the declared structure (names, kinds, fk targets;
    // not the ingested categories).
    std::string structure_hash() const;
    std::string to_json_text() const;
};

RelationalSchema load_schema(const std::string& config_text);
RelationalSchema load_schema_file(const std::string& path);

// One record cell. Interpretation depends on the column kind: `num` for
// continuous, `idx` as category index for categorical and as parent row index
// for foreign keys. Primary-key cells hold the row's own index.
struct Cell {
    bool missing = true;
    double num = 0.0;
    int64_t idx = -1;

    static Cell none() { return {}; }
    static Cell number(double v) { return {false, v, -1}; }
    static Cell index(int64_t i) { return {false, 0.0, i}; }

    bool operator==(const Cell&) const = default;
};

struct TableData {
    std::vector<std::vector<Cell>> rows;  // row-major, one Cell per schema column
    int64_t row_count() const { return static_cast<int64_t>(rows.size()); }
};

struct Edge {
    int child_table;
    int64_t child_row;
    int fk_column;  // column index within the child table
    int parent_table;
    int64_t parent_row;

    bool operator==(const Edge&) const = default;
};

// The pair (X, G): record matrices per table plus the foreign-key edge list.
struct RelationalDataset {
    RelationalSchema schema;  // with categories filled in
    std::vector<TableData> tables;
    std::vector<Edge> edges;

    int64_t total_rows() const;
};

RelationalDataset ingest(const RelationalSchema& schema, const std::string& csv_dir);
void write_dataset(const RelationalDataset& ds, const std::string& out_dir);

// Referential-integrity / consistency check; returns human-readable problems,
// empty when the dataset is valid.
std::vector<std::string> validate_dataset(const RelationalDataset& ds);

}  // namespace relflow
