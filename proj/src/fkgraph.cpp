#include "relflow/fkgraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace relflow {

int64_t HeteroGraph::total_nodes() const {
    return std::accumulate(table_rows.begin(), table_rows.end(), int64_t{0});
}

std::vector<int64_t> HeteroGraph::table_offsets() const {
    std::vector<int64_t> off(table_rows.size() + 1, 0);
    for (size_t k = 0; k < table_rows.size(); ++k) off[k + 1] = off[k] + table_rows[k];
    return off;
}

int64_t HeteroGraph::node_id(int table, int64_t row) const {
    int64_t off = 0;
    for (int k = 0; k < table; ++k) off += table_rows[k];
    return off + row;
}

int64_t HeteroGraph::edge_count() const {
    int64_t n = 0;
    for (const auto& et : edge_types) n += static_cast<int64_t>(et.child_rows.size());
    return n;
}

HeteroGraph build_graph(const RelationalDataset& ds) {
    HeteroGraph g;
    for (const auto& t : ds.tables) g.table_rows.push_back(t.row_count());

    // One edge type per fk column, in schema order.
    std::map<std::pair<int, int>, int> type_of;  // (child table, fk col) -> index
    for (size_t k = 0; k < ds.schema.tables.size(); ++k) {
        const TableSpec& spec = ds.schema.tables[k];
        for (int c : spec.foreign_key_columns()) {
            EdgeType et;
            et.child_table = static_cast<int>(k);
            et.fk_column = c;
            et.parent_table = ds.schema.table_index(spec.columns[c].target_table);
            et.name = spec.name + "." + spec.columns[c].name + "->" +
                      spec.columns[c].target_table;
            type_of[{et.child_table, c}] = static_cast<int>(g.edge_types.size());
            g.edge_types.push_back(std::move(et));
        }
    }
    for (const auto& e : ds.edges) {
        EdgeType& et = g.edge_types[static_cast<size_t>(type_of.at({e.child_table, e.fk_column}))];
        et.child_rows.push_back(e.child_row);
        et.parent_rows.push_back(e.parent_row);
    }
    return g;
}

int64_t ComponentIndex::largest_size() const {
    int64_t best = 0;
    for (const auto& m : members) best = std::max(best, static_cast<int64_t>(m.size()));
    return best;
}

ComponentIndex connected_components(const HeteroGraph& g) {
    const int64_t n = g.total_nodes();
    const auto offsets = g.table_offsets();

    // Union-find over global node ids, with the smallest id as representative.
    std::vector<int64_t> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), int64_t{0});
    std::function<int64_t(int64_t)> find = [&](int64_t x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int64_t a, int64_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[static_cast<size_t>(b)] = a;
    };

    for (const auto& et : g.edge_types) {
        for (size_t e = 0; e < et.child_rows.size(); ++e) {
            unite(offsets[et.child_table] + et.child_rows[e],
                  offsets[et.parent_table] + et.parent_rows[e]);
        }
    }

    ComponentIndex idx;
    idx.component_of.resize(static_cast<size_t>(n));
    std::map<int64_t, int64_t> slot_of;  // representative -> dense slot, ordered by id
    for (int64_t i = 0; i < n; ++i) {
        int64_t rep = find(i);
        idx.component_of[static_cast<size_t>(i)] = rep;
        auto [it, inserted] = slot_of.try_emplace(rep, static_cast<int64_t>(idx.members.size()));
        if (inserted) idx.members.emplace_back();
        idx.members[static_cast<size_t>(it->second)].push_back(i);
    }
    return idx;
}

HeteroGraph resample_topology(const HeteroGraph& g, const ComponentIndex& comps,
                              RngStream& rng) {
    const int64_t n = g.total_nodes();
    if (n == 0) return g;
    if (comps.largest_size() * 2 > n) {
        return g;  // dominant component: keep the original topology
    }

    const auto offsets = g.table_offsets();
    const int n_tables = static_cast<int>(g.table_rows.size());
    auto table_of = [&](int64_t node) {
        int k = 0;
        while (k + 1 < n_tables && node >= offsets[k + 1]) ++k;
        return k;
    };

    const int64_t k_draws = comps.component_count();
    HeteroGraph out;
    out.table_rows.assign(static_cast<size_t>(n_tables), 0);
    for (const auto& et : g.edge_types) {
        EdgeType fresh;
        fresh.child_table = et.child_table;
        fresh.fk_column = et.fk_column;
        fresh.parent_table = et.parent_table;
        fresh.name = et.name;
        out.edge_types.push_back(std::move(fresh));
    }

    // Edges of the original graph bucketed by component, so each draw can be
    // re-instantiated by walking only its own edges.
    std::vector<std::vector<std::pair<int, size_t>>> comp_edges(
        static_cast<size_t>(comps.component_count()));
    std::map<int64_t, int64_t> comp_slot;
    for (size_t s = 0; s < comps.members.size(); ++s) {
        comp_slot[comps.members[s].front()] = static_cast<int64_t>(s);
    }
    for (size_t t = 0; t < g.edge_types.size(); ++t) {
        const auto& et = g.edge_types[t];
        for (size_t e = 0; e < et.child_rows.size(); ++e) {
            int64_t node = offsets[et.child_table] + et.child_rows[e];
            int64_t slot = comp_slot.at(comps.component_of[static_cast<size_t>(node)]);
            comp_edges[static_cast<size_t>(slot)].emplace_back(static_cast<int>(t), e);
        }
    }

    for (int64_t draw = 0; draw < k_draws; ++draw) {
        int64_t pick = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(k_draws)));
        const auto& members = comps.members[static_cast<size_t>(pick)];
        // Fresh per-table row ids for every node of the picked component.
        std::map<int64_t, int64_t> fresh_row;
        for (int64_t node : members) {
            int k = table_of(node);
            fresh_row[node] = out.table_rows[static_cast<size_t>(k)]++;
        }
        for (auto [t, e] : comp_edges[static_cast<size_t>(pick)]) {
            const auto& et = g.edge_types[static_cast<size_t>(t)];
            int64_t child = offsets[et.child_table] + et.child_rows[e];
            int64_t par = offsets[et.parent_table] + et.parent_rows[e];
            out.edge_types[static_cast<size_t>(t)].child_rows.push_back(fresh_row.at(child));
            out.edge_types[static_cast<size_t>(t)].parent_rows.push_back(fresh_row.at(par));
        }
    }
    return out;
}

}  // namespace relflow
