#include "relflow/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "relflow/common.hpp"

namespace relflow {

namespace {

constexpr double kRankEps = 1e-7;
constexpr int kMaxQuantiles = 1000;

double interpolated_order_stat(const std::vector<double>& sorted, double position) {
    // position in [0, 1] over n-1 intervals, numpy-style linear interpolation.
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double x = position * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(std::floor(x));
    if (lo >= n - 1) return sorted[n - 1];
    double frac = x - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double ContinuousEncoder::encode(double v) const {
    const auto& q = quantiles;
    const size_t m = q.size();
    double rank;
    if (m == 1) {
        rank = v < q[0] ? 0.0 : (v > q[0] ? 1.0 : 0.5);
    } else if (v <= q.front()) {
        rank = 0.0;
        if (v == q.front()) {
            // exact hit on the lowest landmark: middle of its tied run
            size_t hi = static_cast<size_t>(std::upper_bound(q.begin(), q.end(), v) - q.begin());
            rank = 0.5 * (static_cast<double>(hi - 1) / static_cast<double>(m - 1));
        }
    } else if (v >= q.back()) {
        rank = 1.0;
        if (v == q.back()) {
            size_t lo = static_cast<size_t>(std::lower_bound(q.begin(), q.end(), v) - q.begin());
            rank = 0.5 * (static_cast<double>(lo) / static_cast<double>(m - 1) + 1.0);
        }
    } else {
        size_t a = static_cast<size_t>(std::lower_bound(q.begin(), q.end(), v) - q.begin());
        if (q[a] == v) {
            // exact landmark hit: midpoint of the tied run keeps the map invertible
            size_t b = static_cast<size_t>(std::upper_bound(q.begin(), q.end(), v) - q.begin());
            rank = 0.5 * (static_cast<double>(a) + static_cast<double>(b - 1)) /
                   static_cast<double>(m - 1);
        } else {
            size_t j = a - 1;  // q[j] < v < q[a]
            double pj = static_cast<double>(j) / static_cast<double>(m - 1);
            double pa = static_cast<double>(a) / static_cast<double>(m - 1);
            rank = pj + (v - q[j]) / (q[a] - q[j]) * (pa - pj);
        }
    }
    rank = std::clamp(rank, kRankEps, 1.0 - kRankEps);
    return inv_norm_cdf(rank);
}

double ContinuousEncoder::decode(double z) const {
    const auto& q = quantiles;
    const size_t m = q.size();
    double rank = norm_cdf(z);
    if (m == 1 || rank <= 0.0) return q.front();
    if (rank >= 1.0) return q.back();
    double x = rank * static_cast<double>(m - 1);
    size_t j = static_cast<size_t>(std::floor(x));
    if (j >= m - 1) return q.back();
    double frac = x - static_cast<double>(j);
    return q[j] + frac * (q[j + 1] - q[j]);
}

std::vector<TableEncoding> fit_encoders(const RelationalDataset& ds) {
    std::vector<TableEncoding> out;
    out.reserve(ds.schema.tables.size());
    for (size_t k = 0; k < ds.schema.tables.size(); ++k) {
        const TableSpec& spec = ds.schema.tables[k];
        const TableData& data = ds.tables[k];
        TableEncoding enc;
        for (size_t c = 0; c < spec.columns.size(); ++c) {
            const ColumnSpec& col = spec.columns[c];
            if (col.kind == ColumnKind::continuous) {
                std::vector<double> observed;
                bool missing = false;
                for (const auto& row : data.rows) {
                    if (row[c].missing) {
                        missing = true;
                    } else {
                        observed.push_back(row[c].num);
                    }
                }
                if (observed.empty()) {
                    throw InputError("table \"" + spec.name + "\" column \"" + col.name +
                                     "\": no observed values to fit a quantile transform");
                }
                std::sort(observed.begin(), observed.end());
                double sum = 0.0;
                for (double v : observed) sum += v;

                ContinuousEncoder ce;
                ce.column = static_cast<int>(c);
                ce.fill_value = sum / static_cast<double>(observed.size());
                ce.has_missing = missing;
                const int m = std::min<int>(kMaxQuantiles, static_cast<int>(observed.size()));
                ce.quantiles.resize(static_cast<size_t>(m));
                for (int i = 0; i < m; ++i) {
                    double pos = m == 1 ? 0.0
                                        : static_cast<double>(i) / static_cast<double>(m - 1);
                    ce.quantiles[static_cast<size_t>(i)] = interpolated_order_stat(observed, pos);
                }
                enc.cont.push_back(std::move(ce));
            } else if (col.kind == ColumnKind::categorical) {
                CategoricalEncoder ca;
                ca.column = static_cast<int>(c);
                ca.base_categories = static_cast<int>(col.categories.size());
                for (const auto& row : data.rows) {
                    if (row[c].missing) {
                        ca.has_nan = true;
                        break;
                    }
                }
                enc.cats.push_back(ca);
            }
        }

        TableLayout& lay = enc.layout;
        lay.n_value_slots = static_cast<int>(enc.cont.size());
        lay.indicator_slot.assign(enc.cont.size(), -1);
        int next = lay.n_value_slots;
        for (size_t i = 0; i < enc.cont.size(); ++i) {
            if (enc.cont[i].has_missing) lay.indicator_slot[i] = next++;
        }
        lay.n_indicator_slots = next - lay.n_value_slots;
        for (const auto& ca : enc.cats) {
            lay.cat_blocks.push_back({next, ca.width()});
            next += ca.width();
        }
        lay.width = next;
        out.push_back(std::move(enc));
    }
    return out;
}

Tensor2 encode_table(const TableData& data, const TableSpec& spec, const TableEncoding& enc) {
    const int n = static_cast<int>(data.rows.size());
    Tensor2 m(n, enc.layout.width);
    for (int r = 0; r < n; ++r) {
        const auto& row = data.rows[static_cast<size_t>(r)];
        for (size_t i = 0; i < enc.cont.size(); ++i) {
            const ContinuousEncoder& ce = enc.cont[i];
            const Cell& cell = row[static_cast<size_t>(ce.column)];
            double v = cell.missing ? ce.fill_value : cell.num;
            m.at(r, static_cast<int>(i)) = static_cast<float>(ce.encode(v));
            int ind = enc.layout.indicator_slot[i];
            if (ind >= 0) m.at(r, ind) = cell.missing ? 1.0f : 0.0f;
        }
        for (size_t i = 0; i < enc.cats.size(); ++i) {
            const CategoricalEncoder& ca = enc.cats[i];
            const Cell& cell = row[static_cast<size_t>(ca.column)];
            int index;
            if (cell.missing) {
                if (!ca.has_nan) {
                    throw InputError("table \"" + spec.name +
                                     "\": missing categorical value but the encoder was fit "
                                     "without a NaN category");
                }
                index = ca.nan_index();
            } else {
                index = static_cast<int>(cell.idx);
                if (index < 0 || index >= ca.width()) {
                    throw InputError("table \"" + spec.name + "\" column \"" +
                                     spec.columns[static_cast<size_t>(ca.column)].name +
                                     "\": category index " + std::to_string(index) +
                                     " out of range [0, " + std::to_string(ca.width()) + ")");
                }
            }
            m.at(r, enc.layout.cat_blocks[i].begin + index) = 1.0f;
        }
    }
    return m;
}

std::vector<std::vector<Cell>> decode_table(const Tensor2& m, const TableSpec& spec,
                                            const TableEncoding& enc) {
    if (m.cols != enc.layout.width) {
        throw InputError("decode_table: matrix width " + std::to_string(m.cols) +
                         " does not match layout width " + std::to_string(enc.layout.width));
    }
    std::vector<std::vector<Cell>> rows(static_cast<size_t>(m.rows));
    for (int r = 0; r < m.rows; ++r) {
        std::vector<Cell> row(spec.columns.size());
        for (size_t i = 0; i < enc.cont.size(); ++i) {
            const ContinuousEncoder& ce = enc.cont[i];
            int ind = enc.layout.indicator_slot[i];
            if (ind >= 0 && m.at(r, ind) > 0.5f) {
                row[static_cast<size_t>(ce.column)] = Cell::none();
            } else {
                row[static_cast<size_t>(ce.column)] =
                    Cell::number(ce.decode(static_cast<double>(m.at(r, static_cast<int>(i)))));
            }
        }
        for (size_t i = 0; i < enc.cats.size(); ++i) {
            const CategoricalEncoder& ca = enc.cats[i];
            const auto block = enc.layout.cat_blocks[i];
            int best = 0;
            float best_v = m.at(r, block.begin);
            for (int j = 1; j < block.width; ++j) {
                float v = m.at(r, block.begin + j);
                if (v > best_v) {
                    best_v = v;
                    best = j;
                }
            }
            if (ca.has_nan && best == ca.nan_index()) {
                row[static_cast<size_t>(ca.column)] = Cell::none();
            } else {
                row[static_cast<size_t>(ca.column)] = Cell::index(best);
            }
        }
        rows[static_cast<size_t>(r)] = std::move(row);
    }
    return rows;
}

}  // namespace relflow
