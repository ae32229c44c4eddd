#pragma once

#include <functional>
#include <vector>

#include "hedg/graph.hpp"

namespace hedg {

// Relational queries on a HEDG. Every function raises UnknownNode when a node
// set argument reaches outside the graph.

NodeSet parents(const Hedg& g, const NodeSet& s);
NodeSet children(const Hedg& g, const NodeSet& s);
// Reflexive: s itself is included (trivial directed paths).
NodeSet ancestors(const Hedg& g, const NodeSet& s);
NodeSet descendants(const Hedg& g, const NodeSet& s);
NodeSet nondescendants(const Hedg& g, const NodeSet& s);

// Strongly connected component of v: Anc(v) ∩ Desc(v).
NodeSet scc(const Hedg& g, std::size_t v);
// SCC blocks ordered by their smallest member (Tarjan, linear time).
std::vector<NodeSet> scc_partition(const Hedg& g);
// For each node, the index of its block in scc_partition(g).
std::vector<std::size_t> scc_index(const Hedg& g, const std::vector<NodeSet>& blocks);

// Connected component of v under "shares a hyperedge".
NodeSet district(const Hedg& g, std::size_t v);
NodeSet district(const Hedg& g, const NodeSet& s);  // union of districts

// Sub-HEDG on a: edges restricted, hyperedges intersected with a and re-maximalized.
Hedg induced_subhedg(const Hedg& g, const NodeSet& a);
Hedg ancestral_closure(const Hedg& g, const NodeSet& s);
bool is_ancestral(const Hedg& g, const NodeSet& a);

// All node sets whose induced sub-HEDG is strongly connected (singletons always
// included). Ordered by size, then canonically. Raises SizeLimit when an SCC
// has more than `max_scc` members.
std::vector<NodeSet> loop_set(const Hedg& g, std::size_t max_scc = 20);
// True iff the induced sub-HEDG on s is strongly connected.
bool is_strongly_connected(const Hedg& g, const NodeSet& s);

struct GraphClass {
    bool is_dag = false;   // acyclic (no self-loops) and trivial H
    bool is_mdag = false;  // acyclic (no self-loops), arbitrary H
    bool is_dmg = false;   // every hyperedge has at most two members
    bool is_admg = false;  // acyclic and dmg
};
GraphClass classify(const Hedg& g);

// The DAG of strongly connected components, addressed by block id (the
// position in scc_partition).
struct Condensation {
    std::vector<NodeSet> blocks;
    std::vector<std::size_t> index;      // node -> block id
    std::vector<NodeSet> block_parents;  // over block ids, without self-references
    std::vector<std::size_t> topo;       // topological; ready blocks by smallest member
};
Condensation condense(const Hedg& g);

// Calls `visit` on every ancestral set A with base ⊆ A ⊆ within, i.e. on the
// down-sets of the condensation. Stops early (returning false) when `visit`
// returns false. Raises SizeLimit after `limit` sets.
bool for_each_ancestral_set(const Hedg& g, const NodeSet& base, const NodeSet& within, std::size_t limit,
                            const std::function<bool(const NodeSet&)>& visit);

// Connected component of v in an undirected graph restricted to `within`.
NodeSet ucomponent(const UGraph& g, std::size_t v, const NodeSet& within);

}  // namespace hedg
