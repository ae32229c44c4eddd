#include "hedg/markov.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "hedg/core.hpp"
#include "hedg/transform.hpp"

namespace hedg {

namespace {

struct KindInfo {
    PropertyKind kind;
    const char* name;
};

constexpr std::array<KindInfo, 16> kKinds{{
    {PropertyKind::dGMP, "dGMP"},
    {PropertyKind::gdGMP, "gdGMP"},
    {PropertyKind::dLMP, "dLMP"},
    {PropertyKind::oLMP, "oLMP"},
    {PropertyKind::rFP, "rFP"},
    {PropertyKind::auGMP, "auGMP"},
    {PropertyKind::ruGMP, "ruGMP"},
    {PropertyKind::auLMP, "auLMP"},
    {PropertyKind::ruLMP, "ruLMP"},
    {PropertyKind::auPMP, "auPMP"},
    {PropertyKind::ruPMP, "ruPMP"},
    {PropertyKind::aFP_ipf, "aFP_ipf"},
    {PropertyKind::witness_mdGMP, "witness_mdGMP"},
    {PropertyKind::witness_mgdGMP, "witness_mgdGMP"},
    {PropertyKind::witness_smgdGMP, "witness_smgdGMP"},
    {PropertyKind::witness_mdLMP, "witness_mdLMP"},
}};

// Every subset of `s`, the empty set first.
template <class F>
void for_each_subset(const NodeSet& s, F&& f) {
    const auto m = s.members();
    if (m.size() > 30) throw SizeLimit("subset enumeration over more than 30 nodes");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m.size()); ++mask) {
        NodeSet sub;
        for (std::size_t i = 0; i < m.size(); ++i)
            if ((mask >> i) & 1U) sub.set(m[i]);
        f(sub);
    }
}

// Same variables as g's nodes, in g's order.
FiniteDist align(const Hedg& g, const FiniteDist& p, const char* what) {
    if (p.size() != g.size())
        throw InvalidInput(std::string(what) + " has " + std::to_string(p.size()) + " variables but the graph has " +
                           std::to_string(g.size()) + " nodes");
    for (const auto& v : p.variables())
        if (!g.find(v.name)) throw InvalidInput(std::string(what) + " variable '" + v.name + "' is not a node");
    bool same = true;
    for (std::size_t i = 0; i < g.size(); ++i) same = same && p.variables()[i].name == g.label(i);
    return same ? p : reorder(p, g.labels());
}

struct TripleKey {
    NodeSet x, y, z;
    friend bool operator==(const TripleKey&, const TripleKey&) = default;
};
struct TripleHash {
    std::size_t operator()(const TripleKey& k) const {
        return k.x.hash() ^ (k.y.hash() * 31U) ^ (k.z.hash() * 1000003U);
    }
};

// Conditional-independence defects of one distribution, memoized per triple.
class CiCache {
public:
    explicit CiCache(const FiniteDist& p) : p_(p) {}
    double defect(NodeSet x, NodeSet y, const NodeSet& z) {
        x -= z;
        y -= z;
        if (x.empty() || y.empty()) return 0.0;
        if (y < x) std::swap(x, y);
        const TripleKey key{x, y, z};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const double d = ci_defect(p_, x, y, z);
        memo_.emplace(key, d);
        return d;
    }

private:
    const FiniteDist& p_;
    std::unordered_map<TripleKey, double, TripleHash> memo_;
};

// Collects statements into a report.
class Recorder {
public:
    Recorder(MarkovReport& r, const MarkovOptions& opt, CiCache& ci) : r_(r), opt_(opt), ci_(ci) {}
    void statement(const NodeSet& x, const NodeSet& y, const NodeSet& z, const NodeSet& context = {},
                   std::size_t node = 0) {
        ++r_.checked;
        const double d = ci_.defect(x, y, z);
        r_.max_defect = std::max(r_.max_defect, d);
        if (d > opt_.ci_tol) add({x, y, z, context, node, d, false, {}});
    }
    void add(const MarkovViolation& v) {
        if (!v.inconclusive) definite_ = true;
        if (r_.violations.size() < opt_.max_reported) r_.violations.push_back(v);
        else if (!v.inconclusive) truncated_definite_ = true;
    }
    void finish() {
        if (r_.violations.empty()) r_.verdict = Verdict::Pass;
        else if (definite_ || truncated_definite_) r_.verdict = Verdict::Fail;
        else r_.verdict = Verdict::Inconclusive;
    }

private:
    MarkovReport& r_;
    const MarkovOptions& opt_;
    CiCache& ci_;
    bool definite_ = false;
    bool truncated_definite_ = false;
};

bool u_separated_adj(const std::vector<NodeSet>& adj, const NodeSet& within, std::size_t x, std::size_t y,
                     const NodeSet& z) {
    NodeSet seen = NodeSet::single(x), frontier = seen;
    const NodeSet open = within - z;
    while (!frontier.empty()) {
        NodeSet next;
        frontier.for_each([&](std::size_t u) { next |= adj[u] & open; });
        next -= seen;
        if (next.test(y)) return false;
        seen |= next;
        frontier = next;
    }
    return true;
}

// ----------------------------------------------------------------- checks

void check_global(const Hedg& h, Criterion c, Recorder& rec) {
    for (const auto& q : implied_separations(h, c)) rec.statement(q.x, q.y, q.z);
}

// {v} ⫫ A∖S∖{v} | ∂ in the moralization of A marginalized over S.
void check_dlmp(const Hedg& h, Recorder& rec, std::size_t limit) {
    for (std::size_t v = 0; v < h.size(); ++v) {
        const NodeSet sc = scc(h, v);
        const NodeSet within = nondescendants(h, NodeSet::single(v)) | sc;
        for_each_ancestral_set(h, NodeSet::single(v), within, limit, [&](const NodeSet& a) {
            for_each_subset(sc - NodeSet::single(v), [&](const NodeSet& s) {
                const NodeSet keep = a - s;
                const Hedg m = marginalize_to(h, keep);
                const std::size_t vm = m.index(h.label(v));
                const NodeSet bd = m.translate(moral_adjacency(m, m.all())[vm], h);
                rec.statement(NodeSet::single(v), keep - NodeSet::single(v) - bd, bd, a, v);
            });
            return true;
        });
    }
}

void check_olmp(const Hedg& h, const TotalOrder& ord, Recorder& rec, std::size_t limit) {
    for (auto v : ord) {
        const Hedg p = pred_hedg(h, ord, v);
        const std::size_t vp = p.index(h.label(v));
        for_each_ancestral_set(p, NodeSet::single(vp), p.all(), limit, [&](const NodeSet& a) {
            const NodeSet bd = moral_adjacency(p, a)[vp];
            const NodeSet ah = p.translate(a, h);
            const NodeSet bh = p.translate(bd, h);
            rec.statement(NodeSet::single(v), ah - NodeSet::single(v) - bh, bh, ah, v);
            return true;
        });
    }
}

enum class Scope { Ancestral, Refined };
enum class Statement { Global, Local, Pairwise };

inline constexpr std::size_t kUndirectedLimit = 14;

// Runs `body(adj, within)` for every ancestral set (moralization of the induced
// sub-HEDG) or for every subset W (moralization of the marginalization), with
// adjacency expressed in h's indexing.
template <class F>
void for_each_moral_scope(const Hedg& h, Scope scope, std::size_t limit, F&& body) {
    if (h.size() > kUndirectedLimit)
        throw SizeLimit("undirected Markov checks are limited to " + std::to_string(kUndirectedLimit) + " nodes");
    if (scope == Scope::Ancestral) {
        for_each_ancestral_set(h, NodeSet{}, h.all(), limit, [&](const NodeSet& a) {
            if (!a.empty()) body(moral_adjacency(h, a), a);
            return true;
        });
        return;
    }
    for_each_subset(h.all(), [&](const NodeSet& w) {
        if (w.empty()) return;
        const Hedg m = marginalize_to(h, w);
        const auto madj = moral_adjacency(m, m.all());
        std::vector<NodeSet> adj(h.size());
        for (std::size_t i = 0; i < m.size(); ++i) adj[h.index(m.label(i))] = m.translate(madj[i], h);
        body(adj, w);
    });
}

void check_undirected(const Hedg& h, Scope scope, Statement st, Recorder& rec, std::size_t limit) {
    for_each_moral_scope(h, scope, limit, [&](const std::vector<NodeSet>& adj, const NodeSet& a) {
        const auto m = a.members();
        switch (st) {
            case Statement::Global:
                for (std::size_t i = 0; i < m.size(); ++i)
                    for (std::size_t j = i + 1; j < m.size(); ++j) {
                        const NodeSet rest = a - NodeSet::single(m[i]) - NodeSet::single(m[j]);
                        for_each_subset(rest, [&](const NodeSet& z) {
                            if (u_separated_adj(adj, a, m[i], m[j], z))
                                rec.statement(NodeSet::single(m[i]), NodeSet::single(m[j]), z, a, m[i]);
                        });
                    }
                break;
            case Statement::Local:
                for (auto v : m)
                    rec.statement(NodeSet::single(v), a - NodeSet::single(v) - adj[v], adj[v], a, v);
                break;
            case Statement::Pairwise:
                for (std::size_t i = 0; i < m.size(); ++i)
                    for (std::size_t j = i + 1; j < m.size(); ++j) {
                        if (adj[m[i]].test(m[j])) continue;
                        const NodeSet rest = a - NodeSet::single(m[i]) - NodeSet::single(m[j]);
                        rec.statement(NodeSet::single(m[i]), NodeSet::single(m[j]), rest, a, m[i]);
                    }
                break;
        }
    });
}

void check_afp(const Hedg& h, const FiniteDist& q, const MarkovOptions& opt, MarkovReport& r, Recorder& rec) {
    for_each_ancestral_set(h, NodeSet{}, h.all(), opt.ancestral_limit, [&](const NodeSet& a) {
        if (a.empty()) return true;
        ++r.checked;
        const auto adj = moral_adjacency(h, a);
        const UGraph ug = UGraph::build(h.labels(), adj);
        // Re-index cliques into the marginal's variable positions.
        const auto members = a.members();
        std::vector<std::size_t> pos(h.size(), 0);
        for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = i;
        std::vector<NodeSet> cliques;
        for (const auto& c : maximal_cliques(ug, a)) {
            NodeSet local;
            c.for_each([&](std::size_t v) { local.set(pos[v]); });
            cliques.push_back(local);
        }
        const FiniteDist qa = marginal(q, a);
        const IpfResult fit = ipf_fit(qa, cliques);
        r.max_defect = std::max(r.max_defect, fit.tv);
        const FactorizationResult exact = exact_factorization(qa, cliques, opt.factor_tol);
        if (exact.factorizes) return true;
        MarkovViolation v{a, {}, {}, a, 0, fit.tv, false, {}};
        if (exact.missing_cell) {
            const Assignment cell = qa.decode(*exact.missing_cell);
            std::string text = "p(";
            for (std::size_t i = 0; i < cell.size(); ++i)
                text += (i ? "," : "") + qa.variables()[i].name + "=" + std::to_string(cell[i]);
            v.detail = text + ") = 0 although every clique marginal is positive there";
        } else {
            v.detail = "log p is not additive over the cliques (residual " + std::to_string(exact.residual) + ")";
            v.inconclusive = exact.residual <= opt.factor_inconclusive;
        }
        rec.add(v);
        return true;
    });
}

}  // namespace

const char* property_name(PropertyKind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i.name;
    return "?";
}

std::optional<PropertyKind> property_from_name(const std::string& name) {
    for (const auto& i : kKinds)
        if (name == i.name) return i.kind;
    return std::nullopt;
}

const std::vector<PropertyKind>& all_properties() {
    static const std::vector<PropertyKind> all = [] {
        std::vector<PropertyKind> v;
        for (const auto& i : kKinds) v.push_back(i.kind);
        return v;
    }();
    return all;
}

bool needs_order(PropertyKind k) { return k == PropertyKind::oLMP || k == PropertyKind::rFP; }

bool needs_witness(PropertyKind k) {
    return k == PropertyKind::witness_mdGMP || k == PropertyKind::witness_mgdGMP ||
           k == PropertyKind::witness_smgdGMP || k == PropertyKind::witness_mdLMP;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<SepQuery> implied_separations(const Hedg& g, Criterion c) {
    if (g.size() > kImpliedSeparationLimit)
        throw SizeLimit("implied separations are enumerated for at most " +
                        std::to_string(kImpliedSeparationLimit) + " nodes");
    // σ-separation is d-separation in the acyclification; build it once.
    const Hedg h = c == Criterion::sigma ? acyclify(g) : g;
    std::vector<SepQuery> out;
    for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = x + 1; y < g.size(); ++y) {
            const NodeSet rest = g.all() - NodeSet::single(x) - NodeSet::single(y);
            for_each_subset(rest, [&](const NodeSet& z) {
                SepQuery q{NodeSet::single(x), NodeSet::single(y), z};
                if (d_separated(h, q)) out.push_back(q);
            });
        }
    return out;
}

namespace {

MarkovReport run_check(const Hedg& g, const FiniteDist& pg, PropertyKind kind, const TotalOrder* ord,
                       const FiniteDist* witness, const MarkovOptions& opt, CiCache& ci,
                       std::optional<CiCache>& witness_ci, std::optional<FiniteDist>& witness_aligned) {
    MarkovReport r;
    r.kind = kind;
    r.labels = g.labels();
    if (needs_order(kind)) {
        if (!ord) throw MissingOrder(std::string(property_name(kind)) + " needs a total order");
        require_order(g, *ord);
    }
    if (needs_witness(kind)) {
        if (!witness) throw MissingWitness(std::string(property_name(kind)) + " needs a latent witness distribution");
        const Hedg aug = augment(g);
        if (!witness_aligned) {
            witness_aligned = align(aug, *witness, "witness");
            const NodeSet observed = g.translate(g.all(), aug);
            const FiniteDist obs = marginal(*witness_aligned, observed);
            bool domains_match = true;
            for (std::size_t i = 0; i < g.size(); ++i)
                domains_match = domains_match && obs.variables()[i].domain == pg.variables()[i].domain;
            if (!domains_match || max_abs_difference(obs, pg) > opt.witness_tol)
                throw WitnessMarginalMismatch("the witness's observed marginal differs from the distribution");
            witness_ci.emplace(*witness_aligned);
        }
        Recorder rec(r, opt, *witness_ci);
        r.labels = aug.labels();
        switch (kind) {
            case PropertyKind::witness_mdGMP: check_global(aug, Criterion::d, rec); break;
            case PropertyKind::witness_mgdGMP: check_global(aug, Criterion::sigma, rec); break;
            case PropertyKind::witness_smgdGMP: check_global(acyclic_augment(g), Criterion::d, rec); break;
            default: check_dlmp(aug, rec, opt.ancestral_limit); break;
        }
        rec.finish();
        return r;
    }
    Recorder rec(r, opt, ci);
    switch (kind) {
        case PropertyKind::dGMP: check_global(g, Criterion::d, rec); break;
        case PropertyKind::gdGMP: check_global(g, Criterion::sigma, rec); break;
        case PropertyKind::dLMP: check_dlmp(g, rec, opt.ancestral_limit); break;
        case PropertyKind::oLMP:
        case PropertyKind::rFP: check_olmp(g, *ord, rec, opt.ancestral_limit); break;
        case PropertyKind::auGMP: check_undirected(g, Scope::Ancestral, Statement::Global, rec, opt.ancestral_limit); break;
        case PropertyKind::ruGMP: check_undirected(g, Scope::Refined, Statement::Global, rec, opt.ancestral_limit); break;
        case PropertyKind::auLMP: check_undirected(g, Scope::Ancestral, Statement::Local, rec, opt.ancestral_limit); break;
        case PropertyKind::ruLMP: check_undirected(g, Scope::Refined, Statement::Local, rec, opt.ancestral_limit); break;
        case PropertyKind::auPMP: check_undirected(g, Scope::Ancestral, Statement::Pairwise, rec, opt.ancestral_limit); break;
        case PropertyKind::ruPMP: check_undirected(g, Scope::Refined, Statement::Pairwise, rec, opt.ancestral_limit); break;
        case PropertyKind::aFP_ipf: check_afp(g, pg, opt, r, rec); break;
        default: break;
    }
    rec.finish();
    return r;
}

}  // namespace

MarkovReport check(const Hedg& g, const FiniteDist& p, PropertyKind kind, const TotalOrder* ord,
                   const FiniteDist* witness, const MarkovOptions& opt) {
    const FiniteDist pg = align(g, p, "distribution");
    CiCache ci(pg);
    std::optional<CiCache> witness_ci;
    std::optional<FiniteDist> witness_aligned;
    return run_check(g, pg, kind, ord, witness, opt, ci, witness_ci, witness_aligned);
}

HierarchyReport hierarchy_audit(const Hedg& g, const FiniteDist& p, const TotalOrder* ord,
                                const FiniteDist* witness, const MarkovOptions& opt) {
    const FiniteDist pg = align(g, p, "distribution");
    CiCache ci(pg);
    std::optional<CiCache> witness_ci;
    std::optional<FiniteDist> witness_aligned;
    HierarchyReport out;
    for (auto kind : all_properties()) {
        if (needs_order(kind) && !ord) continue;
        if (needs_witness(kind) && !witness) continue;
        out.verdicts[kind] = run_check(g, pg, kind, ord, witness, opt, ci, witness_ci, witness_aligned).verdict;
    }

    using K = PropertyKind;
    auto implies = [&](K a, K b, const std::string& condition = "") {
        auto ia = out.verdicts.find(a), ib = out.verdicts.find(b);
        if (ia == out.verdicts.end() || ib == out.verdicts.end()) return;
        if (ia->second == Verdict::Pass && ib->second == Verdict::Fail)
            out.conflicts.push_back({property_name(a), property_name(b), condition});
    };
    auto equivalent = [&](K a, K b) {
        implies(a, b);
        implies(b, a);
    };

    implies(K::dGMP, K::gdGMP);
    implies(K::dGMP, K::dLMP);
    implies(K::dGMP, K::oLMP);
    equivalent(K::dGMP, K::auGMP);
    equivalent(K::dGMP, K::ruGMP);
    equivalent(K::auGMP, K::ruGMP);
    equivalent(K::ruGMP, K::ruLMP);
    equivalent(K::ruLMP, K::ruPMP);
    implies(K::auGMP, K::auLMP);
    implies(K::ruLMP, K::auLMP);
    implies(K::auLMP, K::auPMP);
    implies(K::ruPMP, K::auPMP);
    implies(K::aFP_ipf, K::auGMP);
    implies(K::aFP_ipf, K::dGMP);
    equivalent(K::rFP, K::oLMP);
    implies(K::witness_mdGMP, K::dGMP);
    implies(K::witness_mdGMP, K::witness_mdLMP);
    implies(K::witness_mdGMP, K::witness_mgdGMP);
    implies(K::witness_smgdGMP, K::witness_mgdGMP);
    implies(K::witness_mgdGMP, K::gdGMP);

    const bool positive = pg.cells().size() == pg.space_size();
    if (positive) {
        implies(K::auPMP, K::auGMP, "strictly positive distribution");
        implies(K::dGMP, K::aFP_ipf, "strictly positive distribution");
    }
    if (ord) {
        const OrderReport o = classify_order(g, *ord, opt.ancestral_limit);
        if (o.perfect_elimination) implies(K::oLMP, K::dGMP, "perfect elimination order");
        if (o.assembling && o.pseudo_topological) implies(K::dLMP, K::oLMP, "assembling pseudo-topological order");
    }
    bool has_peo = false;
    try {
        has_peo = find_perfect_elimination(g, opt.ancestral_limit).has_value();
    } catch (const SizeLimit&) {
        has_peo = false;  // undecided: the conditional implication is skipped
    }
    if (has_peo) implies(K::dGMP, K::aFP_ipf, "perfect elimination order exists");

    bool sccs_in_hyperedges = true;
    for (const auto& block : scc_partition(g))
        for (auto v : block.members())
            for (auto w : block.members())
                if (v < w && !g.in_complex(NodeSet{v, w})) sccs_in_hyperedges = false;
    if (sccs_in_hyperedges) implies(K::gdGMP, K::dGMP, "every component pair lies in a hyperedge");
    if (classify(g).is_mdag) implies(K::witness_mgdGMP, K::witness_mdGMP, "acyclic graph");
    return out;
}

IndependenceOracle ci_oracle(const FiniteDist& p, double tol) {
    return [&p, tol](const NodeSet& x, const NodeSet& y, const NodeSet& z) { return is_ci(p, x, y, z, tol); };
}

}  // namespace hedg
