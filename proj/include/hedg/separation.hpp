#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hedg/graph.hpp"

namespace hedg {

struct SepQuery {
    NodeSet x, y, z;
};

// Kind of link between consecutive nodes of a path, read left to right.
enum class EdgeKind : std::uint8_t { Forward, Backward, Bidirected };

// An open path: nodes[i] and nodes[i+1] are linked by kinds[i].
struct SepWitness {
    std::vector<std::size_t> nodes;
    std::vector<EdgeKind> kinds;
};

struct PathVerdict {
    bool separated = true;
    std::optional<SepWitness> witness;  // present iff !separated
};

// Default node bound for the exhaustive path oracles.
inline constexpr std::size_t kPathOracleLimit = 14;

// Moral-graph algorithm on the ancestral closure of X ∪ Y ∪ Z.
bool d_separated(const Hedg& g, const SepQuery& q);
// Exhaustive enumeration of simple paths (oracle, bounded size).
PathVerdict d_separated_paths(const Hedg& g, const SepQuery& q, std::size_t limit = kPathOracleLimit);

// d-separation in the acyclification.
bool sigma_separated(const Hedg& g, const SepQuery& q);
// Node-level blocking rules over simple paths (oracle, bounded size).
PathVerdict sigma_separated_nodes(const Hedg& g, const SepQuery& q,
                                  std::size_t limit = kPathOracleLimit);
// Marginalize to X ∪ Y ∪ Z, cut edges leaving Z across components, take the
// skeleton and marginalize Z away; separated iff no X–Y edge remains.
bool sigma_separated_margcrit(const Hedg& g, const SepQuery& q);

// Every path from X to Y contains a node of Z (endpoints included).
bool u_separated(const UGraph& ug, const SepQuery& q);

// Human-readable path, e.g. "v1 -> v2 <-> v3 <- v4".
std::string format_witness(const Hedg& g, const SepWitness& w);

// ---------------------------------------------------------------- axioms

enum Axiom : unsigned {
    kIrrelevance = 1U << 0,
    kSymmetry = 1U << 1,
    kDecomposition = 1U << 2,
    kWeakUnion = 1U << 3,
    kContraction = 1U << 4,
    kIntersection = 1U << 5,
    kComposition = 1U << 6,
};
inline constexpr unsigned kSemiGraphoid =
    kIrrelevance | kSymmetry | kDecomposition | kWeakUnion | kContraction;

const char* axiom_name(Axiom a);

// A ternary relation over subsets of a ground set: oracle(X, Y, Z) == X ⫫ Y | Z.
using IndependenceOracle = std::function<bool(const NodeSet&, const NodeSet&, const NodeSet&)>;

struct AxiomViolation {
    Axiom axiom;
    NodeSet x, y, z, w;
};

struct AuditReport {
    unsigned checked = 0;
    std::vector<AxiomViolation> violations;
    bool passed() const { return violations.empty(); }
    std::size_t count(Axiom a) const;
};

// Quantifies every requested axiom over all subsets X, Y, Z, W of `ground`
// (intersection only over pairwise disjoint sets). The oracle is evaluated once
// per triple and memoized. Raises SizeLimit for more than `max_ground` nodes.
// At most `max_reported` violations are stored per axiom.
AuditReport independence_model_audit(const IndependenceOracle& oracle, const NodeSet& ground,
                                     unsigned axioms, std::size_t max_ground = 6,
                                     std::size_t max_reported = 16);

}  // namespace hedg
