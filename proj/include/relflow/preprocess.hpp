#pragma once

#include <vector>

#include "relflow/schema.hpp"
#include "relflow/tensor.hpp"

namespace relflow {

// Maps a continuous column to a standard-normal marginal: empirical CDF over
// at most 1000 reference quantiles, linear interpolation between them, ranks
// clipped to [1e-7, 1-1e-7] before the inverse normal CDF.
struct ContinuousEncoder {
    int column = -1;
    std::vector<double> quantiles;  // sorted, length min(1000, N observed)
    double fill_value = 0.0;        // mean of observed values
    bool has_missing = false;       // true adds a missing-indicator slot

    double encode(double v) const;  // value -> z
    double decode(double z) const;  // z -> value (monotone inverse)
};

struct CategoricalEncoder {
    int column = -1;
    int base_categories = 0;  // categories discovered at ingest
    bool has_nan = false;     // missing values seen: extra "NaN" category
    int width() const { return base_categories + (has_nan ? 1 : 0); }
    int nan_index() const { return base_categories; }
};

// Encoded row layout for one table: continuous value slots first (schema
// order), then missing-indicator slots, then one-hot blocks.
struct TableLayout {
    int width = 0;
    int n_value_slots = 0;
    int n_indicator_slots = 0;
    std::vector<int> indicator_slot;  // per continuous encoder; -1 when absent
    struct CatBlock {
        int begin = 0;
        int width = 0;
    };
    std::vector<CatBlock> cat_blocks;  // aligned with the categorical encoders

    int n_cont_slots() const { return n_value_slots + n_indicator_slots; }
};

struct TableEncoding {
    std::vector<ContinuousEncoder> cont;
    std::vector<CategoricalEncoder> cats;
    TableLayout layout;
};

std::vector<TableEncoding> fit_encoders(const RelationalDataset& ds);

Tensor2 encode_table(const TableData& data, const TableSpec& spec, const TableEncoding& enc);

// Inverse of encode_table for the feature columns; key columns come back
// missing and are filled by the caller. Indicator slots above 0.5 decode to a
// missing cell, as does the "NaN" one-hot position.
std::vector<std::vector<Cell>> decode_table(const Tensor2& m, const TableSpec& spec,
                                            const TableEncoding& enc);

}  // namespace relflow
