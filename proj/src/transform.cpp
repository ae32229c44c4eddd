#include "hedg/transform.hpp"

#include <algorithm>

#include "hedg/core.hpp"

namespace hedg {

namespace {

// Survivors reachable from `start` by directed paths of length >= 1 whose
// intermediate nodes all lie in `u`.
NodeSet reach_through(const Hedg& g, const NodeSet& start, const NodeSet& u) {
    NodeSet hit, seen = start & u, frontier = start;
    while (!frontier.empty()) {
        NodeSet next;
        frontier.for_each([&](std::size_t v) { next |= g.ch(v); });
        hit |= next - u;
        frontier = (next & u) - seen;
        seen |= frontier;
    }
    return hit;
}

std::vector<std::size_t> positions(const NodeSet& keep, std::size_t n) {
    std::vector<std::size_t> pos(n, 0);
    std::size_t k = 0;
    keep.for_each([&](std::size_t v) { pos[v] = k++; });
    return pos;
}

NodeSet project(const NodeSet& s, const NodeSet& keep, const std::vector<std::size_t>& pos) {
    NodeSet out;
    (s & keep).for_each([&](std::size_t v) { out.set(pos[v]); });
    return out;
}

}  // namespace

std::string latent_label(const Hedg& g, const NodeSet& f) {
    std::string s = "e{";
    bool first = true;
    f.for_each([&](std::size_t v) {
        if (!first) s += ',';
        s += g.label(v);
        first = false;
    });
    s += '}';
    return s;
}

Hedg marginalize(const Hedg& g, const NodeSet& u) {
    g.require_subset(u);
    if (u.empty()) return g;
    const NodeSet keep = g.all() - u;
    const auto pos = positions(keep, g.size());
    std::vector<std::string> labels;
    std::vector<NodeSet> pa;
    std::vector<NodeSet> reach(g.size());
    keep.for_each([&](std::size_t v) { reach[v] = reach_through(g, NodeSet::single(v), u); });
    keep.for_each([&](std::size_t v) {
        labels.push_back(g.label(v));
        NodeSet p;
        keep.for_each([&](std::size_t w) {
            if (reach[w].test(v)) p.set(pos[w]);
        });
        pa.push_back(p);
    });
    std::vector<NodeSet> hyper;
    auto lift = [&](const NodeSet& f) {
        const NodeSet marg = (f - u) | reach_through(g, f & u, u);
        hyper.push_back(project(marg, keep, pos));
    };
    for (const auto& f : g.hyperedges()) lift(f);
    u.for_each([&](std::size_t x) { lift(NodeSet::single(x)); });
    return Hedg::build(std::move(labels), pa, std::move(hyper));
}

Hedg marginalize_to(const Hedg& g, const NodeSet& keep) {
    g.require_subset(keep);
    return marginalize(g, g.all() - keep);
}

Hedg augment(const Hedg& g) {
    const auto comps = g.maximal_hyperedges();
    const std::size_t n = g.size();
    std::vector<std::string> labels = g.labels();
    std::vector<NodeSet> pa(n + comps.size());
    for (std::size_t v = 0; v < n; ++v) pa[v] = g.pa(v);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        std::string name = latent_label(g, comps[k]);
        if (g.find(name)) throw InvalidInput("latent label '" + name + "' collides with an observed node");
        labels.push_back(std::move(name));
        comps[k].for_each([&](std::size_t v) { pa[v].set(n + k); });
    }
    return Hedg::build(std::move(labels), pa, {});
}

std::vector<NodeSet> moral_adjacency(const Hedg& g, const NodeSet& a) {
    std::vector<NodeSet> sib(g.size());
    for (const auto& f : g.hyperedges()) {
        const NodeSet part = f & a;
        if (part.size() < 2) continue;
        part.for_each([&](std::size_t v) { sib[v] |= part; });
    }
    std::vector<NodeSet> adj(g.size());
    NodeSet done;
    a.for_each([&](std::size_t v) {
        if (done.test(v)) return;
        NodeSet dist = NodeSet::single(v), frontier = dist;
        while (!frontier.empty()) {
            NodeSet next;
            frontier.for_each([&](std::size_t w) { next |= sib[w]; });
            frontier = next - dist;
            dist |= frontier;
        }
        done |= dist;
        NodeSet clique = dist;
        dist.for_each([&](std::size_t w) { clique |= g.pa(w) & a; });
        clique.for_each([&](std::size_t w) { adj[w] |= clique; });
    });
    for (std::size_t v = 0; v < g.size(); ++v) adj[v].reset(v);
    return adj;
}

UGraph moralize(const Hedg& g) {
    const std::size_t n = g.size();
    std::vector<NodeSet> adj(n);
    NodeSet done;
    for (std::size_t v = 0; v < n; ++v) {
        if (done.test(v)) continue;
        const NodeSet dist = district(g, v);
        done |= dist;
        const NodeSet clique = dist | parents(g, dist);
        clique.for_each([&](std::size_t a) { adj[a] |= clique - NodeSet::single(a); });
    }
    return UGraph::build(g.labels(), adj);
}

UGraph undirected_marginalize(const UGraph& ug, const NodeSet& w) {
    ug.require_subset(w);
    const NodeSet keep = ug.all() - w;
    std::vector<NodeSet> adj(ug.size());
    for (std::size_t v = 0; v < ug.size(); ++v) adj[v] = ug.adj(v) & keep;
    NodeSet done;
    w.for_each([&](std::size_t x) {
        if (done.test(x)) return;
        NodeSet comp = NodeSet::single(x), frontier = comp;
        while (!frontier.empty()) {
            NodeSet next;
            frontier.for_each([&](std::size_t y) { next |= ug.adj(y); });
            next &= w;
            frontier = next - comp;
            comp |= frontier;
        }
        done |= comp;
        NodeSet boundary;
        comp.for_each([&](std::size_t y) { boundary |= ug.adj(y); });
        boundary &= keep;
        boundary.for_each([&](std::size_t a) { adj[a] |= boundary - NodeSet::single(a); });
    });
    const auto pos = positions(keep, ug.size());
    std::vector<std::string> labels;
    std::vector<NodeSet> out;
    keep.for_each([&](std::size_t v) {
        labels.push_back(ug.label(v));
        out.push_back(project(adj[v], keep, pos));
    });
    return UGraph::build(std::move(labels), out);
}

UGraph induced_subugraph(const UGraph& ug, const NodeSet& a) {
    ug.require_subset(a);
    const auto pos = positions(a, ug.size());
    std::vector<std::string> labels;
    std::vector<NodeSet> out;
    a.for_each([&](std::size_t v) {
        labels.push_back(ug.label(v));
        out.push_back(project(ug.adj(v), a, pos));
    });
    return UGraph::build(std::move(labels), out);
}

std::vector<NodeSet> maximal_cliques(const UGraph& ug, const NodeSet& within) {
    ug.require_subset(within);
    std::vector<NodeSet> out;
    auto expand = [&](auto&& self, const NodeSet& r, NodeSet p, NodeSet x) -> void {
        if (p.empty()) {
            if (x.empty()) out.push_back(r);
            return;
        }
        // Pivot: the candidate with most neighbours in p.
        std::size_t pivot = (p | x).first(), best = 0;
        (p | x).for_each([&](std::size_t u) {
            const std::size_t d = (p & ug.adj(u)).size();
            if (d >= best) {
                best = d;
                pivot = u;
            }
        });
        (p - ug.adj(pivot)).for_each([&](std::size_t v) {
            NodeSet rv = r;
            rv.set(v);
            self(self, rv, p & ug.adj(v), x & ug.adj(v));
            p.reset(v);
            x.set(v);
        });
    };
    expand(expand, NodeSet{}, within, NodeSet{});
    std::sort(out.begin(), out.end());
    return out;
}

Hedg acyclify(const Hedg& g) {
    const auto blocks = scc_partition(g);
    const auto idx = scc_index(g, blocks);
    std::vector<NodeSet> pa(g.size());
    for (std::size_t w = 0; w < g.size(); ++w) {
        const NodeSet& sc = blocks[idx[w]];
        pa[w] = parents(g, sc) - sc;
    }
    std::vector<NodeSet> hyper;
    for (const auto& f : g.maximal_hyperedges()) {
        NodeSet grown;
        f.for_each([&](std::size_t v) { grown |= blocks[idx[v]]; });
        hyper.push_back(grown);
    }
    return Hedg::build(g.labels(), pa, std::move(hyper));
}

Hedg acyclic_augment(const Hedg& g) {
    const Hedg acy = acyclify(augment(g));
    std::vector<NodeSet> pa(acy.size());
    for (std::size_t v = 0; v < acy.size(); ++v) pa[v] = acy.pa(v);
    return Hedg::build(acy.labels(), pa, {});
}

Hedg scc_quotient(const Hedg& g) {
    const auto blocks = scc_partition(g);
    const auto idx = scc_index(g, blocks);
    std::vector<std::string> labels;
    std::vector<NodeSet> pa(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        labels.push_back(g.label(blocks[b].first()));
        parents(g, blocks[b]).for_each([&](std::size_t p) {
            if (idx[p] != b) pa[b].set(idx[p]);
        });
    }
    std::vector<NodeSet> hyper;
    for (const auto& f : g.hyperedges()) {
        NodeSet lifted;
        f.for_each([&](std::size_t v) { lifted.set(idx[v]); });
        hyper.push_back(lifted);
    }
    return Hedg::build(std::move(labels), pa, std::move(hyper));
}

UGraph skeleton(const Hedg& g) {
    std::vector<NodeSet> adj(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        adj[v] |= (g.pa(v) | g.ch(v) | g.siblings(v)) - NodeSet::single(v);
    }
    return UGraph::build(g.labels(), adj);
}

Hedg induced_dmg(const Hedg& g) {
    std::vector<NodeSet> pa(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) pa[v] = g.pa(v);
    std::vector<NodeSet> hyper;
    for (const auto& f : g.hyperedges()) {
        const auto m = f.members();
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j) hyper.push_back(NodeSet{m[i], m[j]});
    }
    return Hedg::build(g.labels(), pa, std::move(hyper));
}

}  // namespace hedg
