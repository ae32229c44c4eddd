#include "hedg/separation.hpp"

#include "hedg/core.hpp"
#include "hedg/transform.hpp"

namespace hedg {

namespace {

void require_query(const Hedg& g, const SepQuery& q) {
    g.require_subset(q.x);
    g.require_subset(q.y);
    g.require_subset(q.z);
}

// Undirected reachability from `from` to `to`, never entering `blocked`.
bool connected_avoiding(const std::vector<NodeSet>& adj, const NodeSet& from, const NodeSet& to,
                        const NodeSet& blocked) {
    NodeSet seen = from - blocked, frontier = seen;
    if (seen.intersects(to)) return true;
    while (!frontier.empty()) {
        NodeSet next;
        frontier.for_each([&](std::size_t v) { next |= adj[v]; });
        next -= blocked;
        frontier = next - seen;
        if (frontier.intersects(to)) return true;
        seen |= frontier;
    }
    return false;
}

bool has_arrowhead_at_right(EdgeKind k) { return k == EdgeKind::Forward || k == EdgeKind::Bidirected; }
bool has_arrowhead_at_left(EdgeKind k) { return k == EdgeKind::Backward || k == EdgeKind::Bidirected; }

// Depth-first search over simple paths starting in X \ Z. `interior_blocked`
// decides whether node v (between links `in` and `out`, with neighbours `prev`
// and `next`) blocks the path.
template <class Blocked>
PathVerdict search_paths(const Hedg& g, const SepQuery& q, std::size_t limit, Blocked interior_blocked) {
    require_query(g, q);
    if (g.size() > limit)
        throw SizeLimit("path oracle limited to " + std::to_string(limit) + " nodes; graph has " +
                        std::to_string(g.size()));
    const NodeSet targets = q.y - q.z;
    PathVerdict verdict;
    std::vector<NodeSet> sib(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) sib[v] = g.siblings(v);

    SepWitness path;
    NodeSet on_path;
    // Returns true once an open path has been found (left in `path`).
    auto dfs = [&](auto&& self) -> bool {
        const std::size_t v = path.nodes.back();
        auto try_step = [&](std::size_t w, EdgeKind k) -> bool {
            if (on_path.test(w)) return false;
            if (path.nodes.size() >= 2) {
                const std::size_t prev = path.nodes[path.nodes.size() - 2];
                if (interior_blocked(prev, path.kinds.back(), v, k, w)) return false;
            }
            path.nodes.push_back(w);
            path.kinds.push_back(k);
            on_path.set(w);
            if (targets.test(w) || self(self)) return true;
            on_path.reset(w);
            path.nodes.pop_back();
            path.kinds.pop_back();
            return false;
        };
        const NodeSet others = g.all() - NodeSet::single(v);
        for (auto w : (g.ch(v) & others).members())
            if (try_step(w, EdgeKind::Forward)) return true;
        for (auto w : (g.pa(v) & others).members())
            if (try_step(w, EdgeKind::Backward)) return true;
        for (auto w : sib[v].members())
            if (try_step(w, EdgeKind::Bidirected)) return true;
        return false;
    };

    for (auto x : (q.x - q.z).members()) {
        path = SepWitness{{x}, {}};
        on_path = NodeSet::single(x);
        if (targets.test(x) || dfs(dfs)) {
            verdict.separated = false;
            verdict.witness = path;
            return verdict;
        }
    }
    return verdict;
}

}  // namespace

bool d_separated(const Hedg& g, const SepQuery& q) {
    require_query(g, q);
    const NodeSet from = q.x - q.z, to = q.y - q.z;
    if (from.empty() || to.empty()) return true;
    if (from.intersects(to)) return false;
    const NodeSet a = ancestors(g, q.x | q.y | q.z);
    return !connected_avoiding(moral_adjacency(g, a), from, to, q.z);
}

PathVerdict d_separated_paths(const Hedg& g, const SepQuery& q, std::size_t limit) {
    require_query(g, q);
    const NodeSet anc_z = ancestors(g, q.z);
    return search_paths(g, q, limit,
                        [&](std::size_t, EdgeKind in, std::size_t v, EdgeKind out, std::size_t) {
                            const bool collider = has_arrowhead_at_right(in) && has_arrowhead_at_left(out);
                            return collider ? !anc_z.test(v) : q.z.test(v);
                        });
}

bool sigma_separated(const Hedg& g, const SepQuery& q) {
    require_query(g, q);
    return d_separated(acyclify(g), q);
}

PathVerdict sigma_separated_nodes(const Hedg& g, const SepQuery& q, std::size_t limit) {
    require_query(g, q);
    const NodeSet anc_z = ancestors(g, q.z);
    const auto blocks = scc_partition(g);
    const auto idx = scc_index(g, blocks);
    return search_paths(
        g, q, limit, [&](std::size_t prev, EdgeKind in, std::size_t v, EdgeKind out, std::size_t next) {
            const bool collider = has_arrowhead_at_right(in) && has_arrowhead_at_left(out);
            if (collider) return !anc_z.test(v);
            if (!q.z.test(v)) return false;
            const bool leaves_right = out == EdgeKind::Forward && idx[next] != idx[v];
            const bool leaves_left = in == EdgeKind::Backward && idx[prev] != idx[v];
            return leaves_right || leaves_left;
        });
}

bool sigma_separated_margcrit(const Hedg& g, const SepQuery& q) {
    require_query(g, q);
    const NodeSet from = q.x - q.z, to = q.y - q.z;
    if (from.empty() || to.empty()) return true;
    if (from.intersects(to)) return false;
    const Hedg w = marginalize_to(g, q.x | q.y | q.z);
    const NodeSet z = g.translate(q.z, w);
    const auto blocks = scc_partition(w);
    const auto idx = scc_index(w, blocks);
    std::vector<NodeSet> pa(w.size());
    for (std::size_t v = 0; v < w.size(); ++v) {
        pa[v] = w.pa(v);
        (w.pa(v) & z).for_each([&](std::size_t p) {
            if (idx[p] != idx[v]) pa[v].reset(p);
        });
    }
    const Hedg cut = Hedg::build(w.labels(), pa, w.hyperedges());
    const UGraph hat = undirected_marginalize(skeleton(cut), z);
    bool edge = false;
    for (const auto& xl : g.labels_of(from)) {
        const std::size_t xi = hat.index(xl);
        for (const auto& yl : g.labels_of(to))
            if (hat.has_edge(xi, hat.index(yl))) edge = true;
    }
    return !edge;
}

bool u_separated(const UGraph& ug, const SepQuery& q) {
    ug.require_subset(q.x);
    ug.require_subset(q.y);
    ug.require_subset(q.z);
    std::vector<NodeSet> adj(ug.size());
    for (std::size_t v = 0; v < ug.size(); ++v) adj[v] = ug.adj(v);
    return !connected_avoiding(adj, q.x - q.z, q.y - q.z, q.z);
}

std::string format_witness(const Hedg& g, const SepWitness& w) {
    std::string s;
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
        if (i > 0) {
            switch (w.kinds[i - 1]) {
                case EdgeKind::Forward: s += " -> "; break;
                case EdgeKind::Backward: s += " <- "; break;
                case EdgeKind::Bidirected: s += " <-> "; break;
            }
        }
        s += g.label(w.nodes[i]);
    }
    return s;
}

// ---------------------------------------------------------------- axioms

const char* axiom_name(Axiom a) {
    switch (a) {
        case kIrrelevance: return "irrelevance";
        case kSymmetry: return "symmetry";
        case kDecomposition: return "decomposition";
        case kWeakUnion: return "weak union";
        case kContraction: return "contraction";
        case kIntersection: return "intersection";
        case kComposition: return "composition";
    }
    return "unknown";
}

std::size_t AuditReport::count(Axiom a) const {
    std::size_t c = 0;
    for (const auto& v : violations)
        if (v.axiom == a) ++c;
    return c;
}

AuditReport independence_model_audit(const IndependenceOracle& oracle, const NodeSet& ground,
                                     unsigned axioms, std::size_t max_ground, std::size_t max_reported) {
    const auto members = ground.members();
    const std::size_t k = members.size();
    if (k > max_ground)
        throw SizeLimit("independence audit limited to " + std::to_string(max_ground) +
                        " ground elements; got " + std::to_string(k));
    const std::uint32_t full = (1U << k) - 1;
    std::vector<NodeSet> lift(std::size_t{1} << k);
    for (std::uint32_t m = 0; m <= full; ++m)
        for (std::size_t b = 0; b < k; ++b)
            if ((m >> b) & 1U) lift[m].set(members[b]);

    std::vector<std::int8_t> memo(std::size_t{1} << (3 * k), -1);
    auto ind = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z) {
        auto& slot = memo[x | (y << k) | (static_cast<std::size_t>(z) << (2 * k))];
        if (slot < 0) slot = oracle(lift[x], lift[y], lift[z]) ? 1 : 0;
        return slot == 1;
    };

    AuditReport report;
    report.checked = axioms;
    std::vector<std::size_t> reported(7, 0);
    auto violate = [&](Axiom a, std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t w) {
        const auto slot = static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(a)));
        if (reported[slot]++ < max_reported) report.violations.push_back({a, lift[x], lift[y], lift[z], lift[w]});
    };

    for (std::uint32_t x = 0; x <= full; ++x) {
        for (std::uint32_t y = 0; y <= full; ++y) {
            if ((axioms & kIrrelevance) && !ind(x, y, y)) violate(kIrrelevance, x, y, y, 0);
            for (std::uint32_t z = 0; z <= full; ++z) {
                if ((axioms & kSymmetry) && ind(x, y, z) && !ind(y, x, z)) violate(kSymmetry, x, y, z, 0);
                if (!(axioms & (kDecomposition | kWeakUnion | kContraction | kIntersection | kComposition)))
                    continue;
                for (std::uint32_t w = 0; w <= full; ++w) {
                    const std::uint32_t yw = y | w;
                    if (axioms & (kDecomposition | kWeakUnion)) {
                        if (ind(x, yw, z)) {
                            if ((axioms & kDecomposition) && !ind(x, y, z)) violate(kDecomposition, x, y, z, w);
                            if ((axioms & kWeakUnion) && !ind(x, y, w | z)) violate(kWeakUnion, x, y, z, w);
                        }
                    }
                    if ((axioms & kContraction) && ind(x, y, w | z) && ind(x, w, z) && !ind(x, yw, z))
                        violate(kContraction, x, y, z, w);
                    if ((axioms & kIntersection) && !(x & y) && !(x & z) && !(x & w) && !(y & z) && !(y & w) &&
                        !(z & w) && ind(x, y, w | z) && ind(x, w, y | z) && !ind(x, yw, z))
                        violate(kIntersection, x, y, z, w);
                    if ((axioms & kComposition) && ind(x, y, z) && ind(x, w, z) && !ind(x, yw, z))
                        violate(kComposition, x, y, z, w);
                }
            }
        }
    }
    return report;
}

}  // namespace hedg
