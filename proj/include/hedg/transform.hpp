#pragma once

#include <string>
#include <vector>

#include "hedg/graph.hpp"

namespace hedg {

// Label given to the latent node that augmentation creates for the maximal
// hyperedge `f` of `g`: "e{" + member labels joined by "," + "}".
std::string latent_label(const Hedg& g, const NodeSet& f);

// Latent projection removing the nodes `u`. A surviving pair v1 -> v2 is joined
// iff some directed path from v1 to v2 has all intermediate nodes in `u`
// (self-loops arise when v1 = v2). Every maximal hyperedge F and every
// singleton {u}, u in `u`, contributes (F \ U) plus the survivors reachable from
// F ∩ U through `u`; the result is re-maximalized.
Hedg marginalize(const Hedg& g, const NodeSet& u);
// Convenience: keep exactly `keep`, i.e. marginalize out everything else.
Hedg marginalize_to(const Hedg& g, const NodeSet& keep);

// One explicit latent parent e_F per maximal hyperedge F (singletons included),
// trivial hyperedges. Latent labels come from latent_label().
Hedg augment(const Hedg& g);

// Generalized moralization: every district together with its parents becomes
// a clique.
UGraph moralize(const Hedg& g);
// Adjacency of moralize(induced_subhedg(g, a)) expressed in g's indexing
// (rows outside `a` are empty). Avoids building the intermediate graphs.
std::vector<NodeSet> moral_adjacency(const Hedg& g, const NodeSet& a);

// Undirected marginalization: drops `w` and joins two survivors whenever a path
// between them runs through `w` only.
UGraph undirected_marginalize(const UGraph& ug, const NodeSet& w);
UGraph induced_subugraph(const UGraph& ug, const NodeSet& a);
// Inclusion-maximal cliques of ug restricted to `within` (Bron–Kerbosch with
// pivoting), sorted canonically.
std::vector<NodeSet> maximal_cliques(const UGraph& ug, const NodeSet& within);

// Edges v -> w iff v ∉ Sc(w) and v is a parent of some member of Sc(w);
// hyperedges are the unions of strongly connected components over each F in H~,
// stored maximalized.
Hedg acyclify(const Hedg& g);

// Acyclification of the augmented graph with all hyperedges dropped: a DAG on
// observed plus latent nodes.
Hedg acyclic_augment(const Hedg& g);

// DAG of strongly connected components. Each block is represented by the
// label of its smallest member; self-loops vanish and hyperedges are lifted.
Hedg scc_quotient(const Hedg& g);

// Undirected skeleton: directed links (v != w) and hyperedge pairs, orientation dropped.
UGraph skeleton(const Hedg& g);
// Keeps edges and replaces hyperedges by all the pairs they contain.
Hedg induced_dmg(const Hedg& g);

}  // namespace hedg
