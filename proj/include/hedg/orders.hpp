#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hedg/graph.hpp"

namespace hedg {

// A total order on the nodes of a graph: order[k] is the node at position k.
using TotalOrder = std::vector<std::size_t>;

// Default bound on the number of ancestral sets examined per node by the
// perfect-elimination check.
inline constexpr std::size_t kAncestralSetLimit = std::size_t{1} << 16;
// Largest graph for which find_perfect_elimination runs its exact search.
inline constexpr std::size_t kEliminationSearchLimit = 16;

// Why an order failed one of the five kinds: the offending node and a set
// (the out-of-order parent/ancestors, the split component, or the ancestral
// predecessor set whose moral neighbourhood is incomplete).
struct OrderWitness {
    std::size_t node = 0;
    NodeSet set;
};

struct OrderReport {
    bool topological = false;
    bool pseudo_topological = false;
    bool assembling = false;
    bool perfect_elimination = false;
    bool quasi_topological = false;
    std::optional<OrderWitness> topological_witness;
    std::optional<OrderWitness> pseudo_topological_witness;
    std::optional<OrderWitness> assembling_witness;
    std::optional<OrderWitness> perfect_elimination_witness;
};

// Validates that `ord` is a permutation of the nodes of g (InvalidInput otherwise).
void require_order(const Hedg& g, const TotalOrder& ord);
TotalOrder order_from_labels(const Hedg& g, const std::vector<std::string>& labels);
std::vector<std::string> order_labels(const Hedg& g, const TotalOrder& ord);

// Predecessors of v (v included) carrying the marginalized structure.
Hedg pred_hedg(const Hedg& g, const TotalOrder& ord, std::size_t v);

OrderReport classify_order(const Hedg& g, const TotalOrder& ord, std::size_t limit = kAncestralSetLimit);

// Whether every ancestral A of `p` containing v has ∂(v) ∪ {v} complete in
// A's moralization; on failure, *witness receives such an A.
bool elimination_ok(const Hedg& p, std::size_t v, std::size_t limit = kAncestralSetLimit,
                    NodeSet* witness = nullptr);

// Strongly connected components in a topological order of the condensation,
// ready components taken by smallest member, members in label order.
TotalOrder find_pseudo_topological(const Hedg& g);

// A perfect elimination order, or nullopt if none exists. Exact up to
// kEliminationSearchLimit nodes (SizeLimit beyond when the sufficient
// condition does not already settle the question).
std::optional<TotalOrder> find_perfect_elimination(const Hedg& g, std::size_t limit = kAncestralSetLimit);

// The subsequence of `ord` on the nodes of g outside w, re-indexed for
// marginalize(g, w).
TotalOrder restrict_order(const Hedg& g, const TotalOrder& ord, const NodeSet& w);

}  // namespace hedg
