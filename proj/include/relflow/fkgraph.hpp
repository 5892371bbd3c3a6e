#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relflow/common.hpp"
#include "relflow/schema.hpp"

namespace relflow {

// One edge type per foreign-key column: all links (child row --fk--> parent
// row) sharing that column. Adjacency is kept in both directions so message
// passing can flow child->parent and parent->child.
struct EdgeType {
    int child_table;
    int fk_column;
    int parent_table;
    std::string name;  // "<child>.<fk column>-><parent>"

    std::vector<int64_t> child_rows;   // child_rows[e] -- parent_rows[e]
    std::vector<int64_t> parent_rows;
};

struct HeteroGraph {
    std::vector<int64_t> table_rows;  // node count per table
    std::vector<EdgeType> edge_types;

    int64_t total_nodes() const;
    // Global node id of (table, row) under the canonical table ordering.
    int64_t node_id(int table, int64_t row) const;
    std::vector<int64_t> table_offsets() const;
    int64_t edge_count() const;
};

HeteroGraph build_graph(const RelationalDataset& ds);

struct ComponentIndex {
    std::vector<int64_t> component_of;        // by global node id; ids are the
                                              // smallest contained global node id
    std::vector<std::vector<int64_t>> members;  // per component, sorted global ids
    int64_t component_count() const { return static_cast<int64_t>(members.size()); }
    int64_t largest_size() const;
};

ComponentIndex connected_components(const HeteroGraph& g);

// Topology resampling for generation. When one component holds more than half
// of all nodes the original graph is kept; otherwise the same number of
// components is drawn i.i.d. with replacement and re-instantiated with fresh
// node ids, preserving each component's internal edge structure.
HeteroGraph resample_topology(const HeteroGraph& g, const ComponentIndex& comps,
                              RngStream& rng);

}  // namespace relflow
