#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hedg/dist.hpp"
#include "hedg/graph.hpp"
#include "hedg/orders.hpp"
#include "hedg/separation.hpp"

namespace hedg {

struct MissingOrder : Error {
    using Error::Error;
};
struct MissingWitness : Error {
    using Error::Error;
};
struct WitnessMarginalMismatch : Error {
    using Error::Error;
};

enum class PropertyKind {
    dGMP,
    gdGMP,
    dLMP,
    oLMP,
    rFP,
    auGMP,
    ruGMP,
    auLMP,
    ruLMP,
    auPMP,
    ruPMP,
    aFP_ipf,
    witness_mdGMP,
    witness_mgdGMP,
    witness_smgdGMP,
    witness_mdLMP,
};

const char* property_name(PropertyKind k);
std::optional<PropertyKind> property_from_name(const std::string& name);
const std::vector<PropertyKind>& all_properties();
bool needs_order(PropertyKind k);
bool needs_witness(PropertyKind k);

enum class Criterion { d, sigma };

// Every disjoint triple ({x}, {y}, Z) with x < y that the criterion separates.
// Raises SizeLimit above kImpliedSeparationLimit nodes.
inline constexpr std::size_t kImpliedSeparationLimit = 14;
std::vector<SepQuery> implied_separations(const Hedg& g, Criterion c);

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);

// One failed statement "{x} ⫫ y | z" (variable indices of the checked graph)
// together with its measured defect. `context` is the ancestral set, the
// subset W or the predecessor set the statement was derived from (empty for
// global properties). For the factorization check x holds the ancestral set,
// `defect` the total-variation gap left by iterative proportional fitting and
// `detail` the exact certificate.
struct MarkovViolation {
    NodeSet x, y, z;
    NodeSet context;
    std::size_t node = 0;
    double defect = 0.0;
    bool inconclusive = false;
    std::string detail;
};

struct MarkovReport {
    PropertyKind kind = PropertyKind::dGMP;
    Verdict verdict = Verdict::Pass;
    std::size_t checked = 0;   // statements examined
    double max_defect = 0.0;   // largest CI defect (or IPF TV gap for aFP_ipf)
    std::vector<MarkovViolation> violations;
    // Labels of the graph the statements refer to (augmented for witness kinds).
    std::vector<std::string> labels;
    bool passed() const { return violations.empty(); }
};

struct MarkovOptions {
    double ci_tol = 1e-9;
    // Exact factorization: residual at most factor_tol passes, above
    // factor_inconclusive fails, in between is reported as inconclusive.
    double factor_tol = 1e-9;
    double factor_inconclusive = 1e-6;
    double witness_tol = 1e-9;   // observed marginal of the witness vs p
    std::size_t max_reported = 32;
    std::size_t ancestral_limit = kAncestralSetLimit;
};

// Checks one property of (g, p). The variables of p must be exactly the nodes
// of g (any order; matched by name). oLMP and rFP need `ord`; the witness kinds
// need a joint over the nodes of augment(g) whose observed marginal equals p.
MarkovReport check(const Hedg& g, const FiniteDist& p, PropertyKind kind, const TotalOrder* ord = nullptr,
                   const FiniteDist* witness = nullptr, const MarkovOptions& opt = {});

// An implication between properties that the observed verdicts contradict.
struct HierarchyConflict {
    std::string premise, conclusion, condition;
};

struct HierarchyReport {
    std::map<PropertyKind, Verdict> verdicts;
    std::vector<HierarchyConflict> conflicts;
    bool consistent() const { return conflicts.empty(); }
};

// Runs every applicable check (order-based kinds only with `ord`, witness kinds
// only with `witness`) and tests the implications between Markov properties
// against the observed verdicts. Inconclusive verdicts never count as conflicts.
HierarchyReport hierarchy_audit(const Hedg& g, const FiniteDist& p, const TotalOrder* ord = nullptr,
                                const FiniteDist* witness = nullptr, const MarkovOptions& opt = {});

// The independence relation of p as an oracle over variable indices.
IndependenceOracle ci_oracle(const FiniteDist& p, double tol = 1e-9);

}  // namespace hedg
