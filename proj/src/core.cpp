#include "hedg/core.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace hedg {

namespace {

NodeSet reach(const std::vector<NodeSet>& next, NodeSet frontier, const NodeSet& within) {
    NodeSet seen = frontier;
    while (!frontier.empty()) {
        NodeSet grown;
        frontier.for_each([&](std::size_t v) { grown |= next[v]; });
        grown &= within;
        frontier = grown - seen;
        seen |= frontier;
    }
    return seen;
}

NodeSet reach_up(const Hedg& g, const NodeSet& s, const NodeSet& within) {
    NodeSet seen = s, frontier = s;
    while (!frontier.empty()) {
        NodeSet grown;
        frontier.for_each([&](std::size_t v) { grown |= g.pa(v); });
        grown &= within;
        frontier = grown - seen;
        seen |= frontier;
    }
    return seen;
}

NodeSet reach_down(const Hedg& g, const NodeSet& s, const NodeSet& within) {
    NodeSet seen = s, frontier = s;
    while (!frontier.empty()) {
        NodeSet grown;
        frontier.for_each([&](std::size_t v) { grown |= g.ch(v); });
        grown &= within;
        frontier = grown - seen;
        seen |= frontier;
    }
    return seen;
}

}  // namespace

NodeSet parents(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    NodeSet out;
    s.for_each([&](std::size_t v) { out |= g.pa(v); });
    return out;
}

NodeSet children(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    NodeSet out;
    s.for_each([&](std::size_t v) { out |= g.ch(v); });
    return out;
}

NodeSet ancestors(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    return reach_up(g, s, g.all());
}

NodeSet descendants(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    return reach_down(g, s, g.all());
}

NodeSet nondescendants(const Hedg& g, const NodeSet& s) { return g.all() - descendants(g, s); }

NodeSet scc(const Hedg& g, std::size_t v) {
    if (v >= g.size()) throw UnknownNode("node index " + std::to_string(v) + " out of range");
    const NodeSet s = NodeSet::single(v);
    return reach_up(g, s, g.all()) & reach_down(g, s, g.all());
}

std::vector<NodeSet> scc_partition(const Hedg& g) {
    // Iterative Tarjan.
    const std::size_t n = g.size();
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnset), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<NodeSet> blocks;
    std::size_t counter = 0;
    struct Frame {
        std::size_t v;
        std::vector<std::size_t> succ;
        std::size_t pos;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        std::vector<Frame> call;
        auto push = [&](std::size_t v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            call.push_back(Frame{v, g.ch(v).members(), 0});
        };
        push(root);
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.pos < f.succ.size()) {
                const std::size_t w = f.succ[f.pos++];
                if (index[w] == kUnset) {
                    push(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::size_t v = f.v;
            if (low[v] == index[v]) {
                NodeSet block;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    block.set(w);
                } while (w != v);
                blocks.push_back(block);
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const NodeSet& a, const NodeSet& b) { return a.first() < b.first(); });
    return blocks;
}

std::vector<std::size_t> scc_index(const Hedg& g, const std::vector<NodeSet>& blocks) {
    std::vector<std::size_t> out(g.size(), 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b].for_each([&](std::size_t v) { out[v] = b; });
    return out;
}

NodeSet district(const Hedg& g, std::size_t v) {
    if (v >= g.size()) throw UnknownNode("node index " + std::to_string(v) + " out of range");
    std::vector<NodeSet> sib(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) sib[u] = g.siblings(u);
    return reach(sib, NodeSet::single(v), g.all());
}

NodeSet district(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    std::vector<NodeSet> sib(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) sib[u] = g.siblings(u);
    return reach(sib, s, g.all());
}

Hedg induced_subhedg(const Hedg& g, const NodeSet& a) {
    g.require_subset(a);
    const auto keep = a.members();
    std::vector<std::size_t> pos(g.size(), 0);
    for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = k;
    auto project = [&](const NodeSet& s) {
        NodeSet out;
        (s & a).for_each([&](std::size_t v) { out.set(pos[v]); });
        return out;
    };
    std::vector<std::string> labels;
    std::vector<NodeSet> pa;
    for (auto v : keep) {
        labels.push_back(g.label(v));
        pa.push_back(project(g.pa(v)));
    }
    std::vector<NodeSet> hyper;
    for (const auto& f : g.hyperedges()) hyper.push_back(project(f));
    return Hedg::build(std::move(labels), pa, std::move(hyper));
}

Hedg ancestral_closure(const Hedg& g, const NodeSet& s) { return induced_subhedg(g, ancestors(g, s)); }

bool is_ancestral(const Hedg& g, const NodeSet& a) {
    g.require_subset(a);
    return parents(g, a).subset_of(a);
}

bool is_strongly_connected(const Hedg& g, const NodeSet& s) {
    g.require_subset(s);
    if (s.empty()) return false;
    const NodeSet start = NodeSet::single(s.first());
    return reach_down(g, start, s) == s && reach_up(g, start, s) == s;
}

std::vector<NodeSet> loop_set(const Hedg& g, std::size_t max_scc) {
    std::vector<NodeSet> out;
    for (const auto& block : scc_partition(g)) {
        const auto members = block.members();
        if (members.size() > max_scc)
            throw SizeLimit("strongly connected component of size " + std::to_string(members.size()) +
                            " exceeds the loop enumeration limit " + std::to_string(max_scc));
        if (members.size() > 63) throw SizeLimit("strongly connected component too large");
        const std::uint64_t total = std::uint64_t{1} << members.size();
        for (std::uint64_t mask = 1; mask < total; ++mask) {
            NodeSet s;
            for (std::size_t k = 0; k < members.size(); ++k)
                if ((mask >> k) & 1U) s.set(members[k]);
            if (s.size() == 1 || is_strongly_connected(g, s)) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end(), [](const NodeSet& a, const NodeSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

GraphClass classify(const Hedg& g) {
    GraphClass c;
    bool acyclic = true;
    for (const auto& block : scc_partition(g)) {
        if (block.size() > 1) acyclic = false;
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        if (g.has_edge(v, v)) acyclic = false;
    bool dmg = true;
    for (const auto& f : g.hyperedges())
        if (f.size() > 2) dmg = false;
    c.is_mdag = acyclic;
    c.is_dag = acyclic && g.hyperedges().empty();
    c.is_dmg = dmg;
    c.is_admg = acyclic && dmg;
    return c;
}

Condensation condense(const Hedg& g) {
    Condensation c;
    c.blocks = scc_partition(g);
    c.index = scc_index(g, c.blocks);
    const std::size_t m = c.blocks.size();
    c.block_parents.assign(m, NodeSet{});
    std::vector<std::size_t> indeg(m, 0);
    std::vector<NodeSet> block_children(m);
    for (std::size_t b = 0; b < m; ++b) {
        parents(g, c.blocks[b]).for_each([&](std::size_t p) {
            const std::size_t pb = c.index[p];
            if (pb != b) c.block_parents[b].set(pb);
        });
        indeg[b] = c.block_parents[b].size();
        c.block_parents[b].for_each([&](std::size_t pb) { block_children[pb].set(b); });
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t b = 0; b < m; ++b)
        if (indeg[b] == 0) ready.push(b);
    while (!ready.empty()) {
        const std::size_t b = ready.top();
        ready.pop();
        c.topo.push_back(b);
        block_children[b].for_each([&](std::size_t cb) {
            if (--indeg[cb] == 0) ready.push(cb);
        });
    }
    return c;
}

bool for_each_ancestral_set(const Hedg& g, const NodeSet& base, const NodeSet& within, std::size_t limit,
                            const std::function<bool(const NodeSet&)>& visit) {
    g.require_subset(base);
    g.require_subset(within);
    const NodeSet start = ancestors(g, base);
    if (!start.subset_of(within)) return true;  // no ancestral set fits
    const Condensation c = condense(g);
    NodeSet start_blocks;
    start.for_each([&](std::size_t u) { start_blocks.set(c.index[u]); });
    std::vector<std::size_t> optional;
    for (auto b : c.topo)
        if (!start_blocks.test(b) && c.blocks[b].subset_of(within)) optional.push_back(b);

    std::size_t visited = 0;
    auto walk = [&](auto&& self, std::size_t k, const NodeSet& nodes, const NodeSet& blocks) -> bool {
        if (k == optional.size()) {
            if (++visited > limit)
                throw SizeLimit("more than " + std::to_string(limit) + " ancestral sets to examine");
            return visit(nodes);
        }
        const std::size_t b = optional[k];
        if (!self(self, k + 1, nodes, blocks)) return false;
        if (c.block_parents[b].subset_of(blocks)) {
            NodeSet with_blocks = blocks;
            with_blocks.set(b);
            if (!self(self, k + 1, nodes | c.blocks[b], with_blocks)) return false;
        }
        return true;
    };
    return walk(walk, 0, start, start_blocks);
}

NodeSet ucomponent(const UGraph& g, std::size_t v, const NodeSet& within) {
    if (v >= g.size()) throw UnknownNode("node index " + std::to_string(v) + " out of range");
    std::vector<NodeSet> adj(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) adj[u] = g.adj(u);
    return reach(adj, NodeSet::single(v), within);
}

}  // namespace hedg
