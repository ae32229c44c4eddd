#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hedg/errors.hpp"
#include "hedg/node_set.hpp"

namespace hedg {

// Label order used for every canonical form: runs of digits compare by value,
// so "v2" < "v10" and graphs with numbered nodes print in their natural order.
bool natural_less(std::string_view a, std::string_view b);

// Inclusion-maximal members of `sets`, dropping sets with fewer than
// `min_size` elements, deduplicated and sorted canonically.
std::vector<NodeSet> maximalize(std::vector<NodeSet> sets, std::size_t min_size = 2);

// Directed graph with hyperedges (V, E, H).
//
// Nodes are identified by labels and addressed by their index in canonical
// (natural) label order. Directed edges may include self-loops. Only the
// inclusion-maximal hyperedges with at least two members are stored; the
// singletons and the downward closure are implicit.
class Hedg {
public:
    using Edge = std::pair<std::string, std::string>;

    Hedg() = default;

    static Hedg from_labels(std::vector<std::string> nodes, const std::vector<Edge>& edges,
                            const std::vector<std::vector<std::string>>& hyperedges = {});

    // Index-based construction: `parents[i]` and `hyperedges` refer to positions
    // in `labels`, which may be in any order. The result is canonicalized.
    static Hedg build(std::vector<std::string> labels, const std::vector<NodeSet>& parents,
                      std::vector<NodeSet> hyperedges);

    std::size_t size() const { return labels_.size(); }
    NodeSet all() const { return NodeSet::range(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> find(std::string_view label) const;
    std::size_t index(std::string_view label) const;  // throws UnknownNode
    NodeSet set_of(const std::vector<std::string>& labels) const;
    std::vector<std::string> labels_of(const NodeSet& s) const;
    // Translates a node set of this graph into the indexing of `other` by label;
    // labels absent from `other` raise UnknownNode.
    NodeSet translate(const NodeSet& s, const Hedg& other) const;

    const NodeSet& pa(std::size_t v) const { return pa_.at(v); }
    const NodeSet& ch(std::size_t v) const { return ch_.at(v); }
    bool has_edge(std::size_t from, std::size_t to) const { return pa_.at(to).test(from); }
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;
    std::size_t edge_count() const;

    // Stored maximal hyperedges (size >= 2), canonical order.
    const std::vector<NodeSet>& hyperedges() const { return hyper_; }
    // H~: all maximal simplices including the implicit singletons.
    std::vector<NodeSet> maximal_hyperedges() const;
    // Membership in the simplicial complex H (downward closure plus singletons).
    bool in_complex(const NodeSet& s) const;
    // Nodes sharing a hyperedge with v (v excluded).
    NodeSet siblings(std::size_t v) const;

    void require_subset(const NodeSet& s) const;  // throws UnknownNode

    friend bool operator==(const Hedg&, const Hedg&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<NodeSet> pa_;
    std::vector<NodeSet> ch_;
    std::vector<NodeSet> hyper_;
};

// Simple undirected graph: the output type of moralization and skeletons.
class UGraph {
public:
    UGraph() = default;
    static UGraph from_labels(std::vector<std::string> nodes,
                              const std::vector<std::pair<std::string, std::string>>& edges);
    // `adj` is indexed like `labels` (any order); the result is canonicalized.
    static UGraph build(std::vector<std::string> labels, const std::vector<NodeSet>& adj);

    std::size_t size() const { return labels_.size(); }
    NodeSet all() const { return NodeSet::range(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    std::optional<std::size_t> find(std::string_view label) const;
    std::size_t index(std::string_view label) const;
    NodeSet set_of(const std::vector<std::string>& labels) const;
    std::vector<std::string> labels_of(const NodeSet& s) const;

    const NodeSet& adj(std::size_t v) const { return adj_.at(v); }
    bool has_edge(std::size_t a, std::size_t b) const { return adj_.at(a).test(b); }
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;  // a < b
    std::size_t edge_count() const;
    bool is_complete(const NodeSet& s) const;
    // True iff the edge set of this graph is contained in that of `other`
    // (nodes are matched by label; both graphs must have the same node labels).
    bool subgraph_of(const UGraph& other) const;

    void require_subset(const NodeSet& s) const;

    friend bool operator==(const UGraph&, const UGraph&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<NodeSet> adj_;
};

}  // namespace hedg
