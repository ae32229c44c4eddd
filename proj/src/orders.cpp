#include "hedg/orders.hpp"

#include <algorithm>
#include <unordered_map>

#include "hedg/core.hpp"
#include "hedg/transform.hpp"

namespace hedg {

namespace {

std::vector<std::size_t> positions_of(const Hedg& g, const TotalOrder& ord) {
    std::vector<std::size_t> pos(g.size(), 0);
    for (std::size_t k = 0; k < ord.size(); ++k) pos[ord[k]] = k;
    return pos;
}

bool moral_neighbourhood_complete(const Hedg& p, std::size_t v, const NodeSet& a) {
    const auto adj = moral_adjacency(p, a);
    const NodeSet closed = adj[v] | NodeSet::single(v);
    bool complete = true;
    closed.for_each([&](std::size_t u) {
        if (!(closed - NodeSet::single(u)).subset_of(adj[u])) complete = false;
    });
    return complete;
}

// Every strongly connected component lies inside one district of the sub-HEDG
// induced on its ancestors.
bool every_component_in_one_district(const Hedg& g) {
    for (const auto& block : scc_partition(g)) {
        if (block.size() == 1) continue;
        const NodeSet anc = ancestors(g, block);
        const Hedg sub = induced_subhedg(g, anc);
        const NodeSet local = g.translate(block, sub);
        if (!local.subset_of(district(sub, local.first()))) return false;
    }
    return true;
}

}  // namespace

void require_order(const Hedg& g, const TotalOrder& ord) {
    if (ord.size() != g.size()) throw InvalidInput("order does not cover every node exactly once");
    NodeSet seen;
    for (auto v : ord) {
        if (v >= g.size()) throw UnknownNode("order refers to a node outside the graph");
        if (seen.test(v)) throw InvalidInput("order lists node '" + g.label(v) + "' twice");
        seen.set(v);
    }
}

TotalOrder order_from_labels(const Hedg& g, const std::vector<std::string>& labels) {
    TotalOrder ord;
    for (const auto& l : labels) ord.push_back(g.index(l));
    require_order(g, ord);
    return ord;
}

std::vector<std::string> order_labels(const Hedg& g, const TotalOrder& ord) {
    std::vector<std::string> out;
    for (auto v : ord) out.push_back(g.label(v));
    return out;
}

Hedg pred_hedg(const Hedg& g, const TotalOrder& ord, std::size_t v) {
    require_order(g, ord);
    const auto pos = positions_of(g, ord);
    NodeSet after;
    for (std::size_t k = pos.at(v) + 1; k < ord.size(); ++k) after.set(ord[k]);
    return marginalize(g, after);
}

bool elimination_ok(const Hedg& p, std::size_t v, std::size_t limit, NodeSet* witness) {
    return for_each_ancestral_set(p, NodeSet::single(v), p.all(), limit, [&](const NodeSet& a) {
        if (moral_neighbourhood_complete(p, v, a)) return true;
        if (witness) *witness = a;
        return false;
    });
}

OrderReport classify_order(const Hedg& g, const TotalOrder& ord, std::size_t limit) {
    require_order(g, ord);
    const auto pos = positions_of(g, ord);
    const auto blocks = scc_partition(g);
    const auto idx = scc_index(g, blocks);
    OrderReport r;

    r.topological = true;
    r.pseudo_topological = true;
    for (auto v : ord) {
        NodeSet late;
        g.pa(v).for_each([&](std::size_t w) {
            if (pos[w] >= pos[v]) late.set(w);
        });
        if (!late.empty() && r.topological) {
            r.topological = false;
            r.topological_witness = OrderWitness{v, late};
        }
        NodeSet late_anc;
        (ancestors(g, NodeSet::single(v)) - blocks[idx[v]]).for_each([&](std::size_t w) {
            if (pos[w] > pos[v]) late_anc.set(w);
        });
        if (!late_anc.empty() && r.pseudo_topological) {
            r.pseudo_topological = false;
            r.pseudo_topological_witness = OrderWitness{v, late_anc};
        }
    }

    r.assembling = true;
    for (const auto& block : blocks) {
        std::size_t lo = ord.size(), hi = 0;
        block.for_each([&](std::size_t v) {
            lo = std::min(lo, pos[v]);
            hi = std::max(hi, pos[v]);
        });
        if (hi - lo + 1 != block.size()) {
            r.assembling = false;
            r.assembling_witness = OrderWitness{block.first(), block};
            break;
        }
    }

    r.perfect_elimination = true;
    for (auto v : ord) {
        const Hedg p = pred_hedg(g, ord, v);
        NodeSet bad;
        if (!elimination_ok(p, p.index(g.label(v)), limit, &bad)) {
            r.perfect_elimination = false;
            r.perfect_elimination_witness = OrderWitness{v, p.translate(bad, g)};
            break;
        }
    }
    r.quasi_topological = r.pseudo_topological && r.perfect_elimination;
    return r;
}

TotalOrder find_pseudo_topological(const Hedg& g) {
    const Condensation c = condense(g);
    TotalOrder ord;
    for (auto b : c.topo) c.blocks[b].for_each([&](std::size_t v) { ord.push_back(v); });
    return ord;
}

std::optional<TotalOrder> find_perfect_elimination(const Hedg& g, std::size_t limit) {
    const TotalOrder candidate = find_pseudo_topological(g);
    if (every_component_in_one_district(g)) return candidate;
    if (classify_order(g, candidate, limit).perfect_elimination) return candidate;

    const std::size_t n = g.size();
    if (n > kEliminationSearchLimit)
        throw SizeLimit("perfect elimination search is exact only up to " +
                        std::to_string(kEliminationSearchLimit) + " nodes");
    // good(S): the nodes of S can be ordered so that each one, placed last
    // among its predecessors, passes the elimination test. The test for the
    // node placed last only depends on the predecessor set S.
    std::unordered_map<std::uint64_t, std::int64_t> memo;  // -1 = no, otherwise chosen last node
    auto good = [&](auto&& self, std::uint64_t s) -> bool {
        if (s == 0) return true;
        if (auto it = memo.find(s); it != memo.end()) return it->second >= 0;
        const NodeSet set = NodeSet::from_low_word(s);
        const Hedg p = marginalize_to(g, set);
        std::int64_t chosen = -1;
        for (std::size_t k = n; k-- > 0;) {
            if (!((s >> k) & 1U)) continue;
            if (!elimination_ok(p, p.index(g.label(k)), limit)) continue;
            if (self(self, s & ~(std::uint64_t{1} << k))) {
                chosen = static_cast<std::int64_t>(k);
                break;
            }
        }
        memo[s] = chosen;
        return chosen >= 0;
    };
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if (!good(good, full)) return std::nullopt;
    TotalOrder ord(n);
    std::uint64_t s = full;
    for (std::size_t k = n; k-- > 0;) {
        const auto v = static_cast<std::size_t>(memo.at(s));
        ord[k] = v;
        s &= ~(std::uint64_t{1} << v);
    }
    return ord;
}

TotalOrder restrict_order(const Hedg& g, const TotalOrder& ord, const NodeSet& w) {
    require_order(g, ord);
    g.require_subset(w);
    const Hedg m = marginalize(g, w);
    TotalOrder out;
    for (auto v : ord)
        if (!w.test(v)) out.push_back(m.index(g.label(v)));
    return out;
}

}  // namespace hedg
