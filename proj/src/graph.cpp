#include "hedg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace hedg {

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            // Compare digit runs by value: strip leading zeros, then length, then text.
            std::size_t ia = i, jb = j;
            while (ia + 1 < ie && a[ia] == '0') ++ia;
            while (jb + 1 < je && b[jb] == '0') ++jb;
            const auto ra = a.substr(ia, ie - ia), rb = b.substr(jb, je - jb);
            if (ra.size() != rb.size()) return ra.size() < rb.size();
            if (ra != rb) return ra < rb;
            if ((ie - i) != (je - j)) return (ie - i) < (je - j);
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
            ++i;
            ++j;
        }
    }
    return (a.size() - i) < (b.size() - j);
}

std::vector<NodeSet> maximalize(std::vector<NodeSet> sets, std::size_t min_size) {
    std::vector<NodeSet> kept;
    std::sort(sets.begin(), sets.end(),
              [](const NodeSet& a, const NodeSet& b) { return a.size() > b.size(); });
    for (const auto& s : sets) {
        if (s.size() < min_size) continue;
        bool covered = false;
        for (const auto& k : kept) {
            if (s.subset_of(k)) {
                covered = true;
                break;
            }
        }
        if (!covered) kept.push_back(s);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

// Sorts labels canonically and returns, for each original position, its new index.
std::vector<std::size_t> canonical_permutation(std::vector<std::string>& labels) {
    if (labels.size() > kMaxNodes)
        throw SizeLimit("graph has " + std::to_string(labels.size()) + " nodes; the limit is " +
                        std::to_string(kMaxNodes));
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return natural_less(labels[a], labels[b]);
    });
    std::vector<std::size_t> new_index(labels.size());
    std::vector<std::string> sorted;
    sorted.reserve(labels.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        new_index[order[k]] = k;
        sorted.push_back(std::move(labels[order[k]]));
    }
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k].empty()) throw InvalidInput("node labels must be non-empty");
        if (k > 0 && sorted[k] == sorted[k - 1])
            throw InvalidInput("duplicate node label '" + sorted[k] + "'");
    }
    labels = std::move(sorted);
    return new_index;
}

NodeSet remap(const NodeSet& s, const std::vector<std::size_t>& new_index) {
    NodeSet out;
    s.for_each([&](std::size_t i) {
        if (i >= new_index.size()) throw UnknownNode("node index " + std::to_string(i) + " out of range");
        out.set(new_index[i]);
    });
    return out;
}

bool is_identity(const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

std::optional<std::size_t> find_label(const std::vector<std::string>& labels, std::string_view label) {
    auto it = std::lower_bound(labels.begin(), labels.end(), label,
                               [](const std::string& a, std::string_view b) { return natural_less(a, b); });
    if (it != labels.end() && *it == label) return static_cast<std::size_t>(it - labels.begin());
    return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- Hedg

Hedg Hedg::from_labels(std::vector<std::string> nodes, const std::vector<Edge>& edges,
                       const std::vector<std::vector<std::string>>& hyperedges) {
    Hedg shell;
    canonical_permutation(nodes);
    shell.labels_ = nodes;
    std::vector<NodeSet> parents(nodes.size());
    for (const auto& [from, to] : edges) parents[shell.index(to)].set(shell.index(from));
    std::vector<NodeSet> hyper;
    for (const auto& f : hyperedges) hyper.push_back(shell.set_of(f));
    return build(std::move(nodes), parents, std::move(hyper));
}

Hedg Hedg::build(std::vector<std::string> labels, const std::vector<NodeSet>& parents,
                 std::vector<NodeSet> hyperedges) {
    if (parents.size() != labels.size()) throw InvalidInput("parent list does not match node count");
    Hedg g;
    auto perm = canonical_permutation(labels);
    const std::size_t n = labels.size();
    g.labels_ = std::move(labels);
    g.pa_.assign(n, NodeSet{});
    g.ch_.assign(n, NodeSet{});
    const bool ident = is_identity(perm);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeSet p = ident ? parents[i] : remap(parents[i], perm);
        if (!p.subset_of(NodeSet::range(n))) throw UnknownNode("edge endpoint out of range");
        g.pa_[perm[i]] = p;
    }
    for (std::size_t v = 0; v < n; ++v) g.pa_[v].for_each([&](std::size_t u) { g.ch_[u].set(v); });
    for (auto& f : hyperedges) {
        if (!ident) f = remap(f, perm);
        if (!f.subset_of(NodeSet::range(n))) throw UnknownNode("hyperedge member out of range");
    }
    g.hyper_ = maximalize(std::move(hyperedges));
    return g;
}

std::optional<std::size_t> Hedg::find(std::string_view label) const { return find_label(labels_, label); }

std::size_t Hedg::index(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw UnknownNode("unknown node '" + std::string(label) + "'");
}

NodeSet Hedg::set_of(const std::vector<std::string>& labels) const {
    NodeSet s;
    for (const auto& l : labels) s.set(index(l));
    return s;
}

std::vector<std::string> Hedg::labels_of(const NodeSet& s) const {
    std::vector<std::string> out;
    s.for_each([&](std::size_t i) { out.push_back(label(i)); });
    return out;
}

NodeSet Hedg::translate(const NodeSet& s, const Hedg& other) const {
    NodeSet out;
    s.for_each([&](std::size_t i) { out.set(other.index(label(i))); });
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Hedg::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < size(); ++u) ch_[u].for_each([&](std::size_t v) { out.emplace_back(u, v); });
    return out;
}

std::size_t Hedg::edge_count() const {
    std::size_t c = 0;
    for (const auto& p : pa_) c += p.size();
    return c;
}

std::vector<NodeSet> Hedg::maximal_hyperedges() const {
    std::vector<NodeSet> out = hyper_;
    NodeSet covered;
    for (const auto& f : hyper_) covered |= f;
    for (std::size_t v = 0; v < size(); ++v)
        if (!covered.test(v)) out.push_back(NodeSet::single(v));
    std::sort(out.begin(), out.end());
    return out;
}

bool Hedg::in_complex(const NodeSet& s) const {
    if (!s.subset_of(all())) return false;
    if (s.size() <= 1) return true;
    for (const auto& f : hyper_)
        if (s.subset_of(f)) return true;
    return false;
}

NodeSet Hedg::siblings(std::size_t v) const {
    NodeSet out;
    for (const auto& f : hyper_)
        if (f.test(v)) out |= f;
    out.reset(v);
    return out;
}

void Hedg::require_subset(const NodeSet& s) const {
    if (!s.subset_of(all())) throw UnknownNode("node set refers to nodes outside the graph");
}

// ---------------------------------------------------------------- UGraph

UGraph UGraph::from_labels(std::vector<std::string> nodes,
                           const std::vector<std::pair<std::string, std::string>>& edges) {
    UGraph shell;
    canonical_permutation(nodes);
    shell.labels_ = nodes;
    std::vector<NodeSet> adj(nodes.size());
    for (const auto& [a, b] : edges) {
        const auto i = shell.index(a), j = shell.index(b);
        if (i == j) throw InvalidInput("undirected self-loop at '" + a + "'");
        adj[i].set(j);
        adj[j].set(i);
    }
    return build(std::move(nodes), adj);
}

UGraph UGraph::build(std::vector<std::string> labels, const std::vector<NodeSet>& adj) {
    if (adj.size() != labels.size()) throw InvalidInput("adjacency list does not match node count");
    UGraph g;
    auto perm = canonical_permutation(labels);
    const std::size_t n = labels.size();
    g.labels_ = std::move(labels);
    g.adj_.assign(n, NodeSet{});
    for (std::size_t i = 0; i < n; ++i) {
        NodeSet a = is_identity(perm) ? adj[i] : remap(adj[i], perm);
        a.for_each([&](std::size_t j) {
            if (j >= n) throw UnknownNode("edge endpoint out of range");
            if (j != perm[i]) {
                g.adj_[perm[i]].set(j);
                g.adj_[j].set(perm[i]);
            }
        });
    }
    return g;
}

std::optional<std::size_t> UGraph::find(std::string_view label) const { return find_label(labels_, label); }

std::size_t UGraph::index(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw UnknownNode("unknown node '" + std::string(label) + "'");
}

NodeSet UGraph::set_of(const std::vector<std::string>& labels) const {
    NodeSet s;
    for (const auto& l : labels) s.set(index(l));
    return s;
}

std::vector<std::string> UGraph::labels_of(const NodeSet& s) const {
    std::vector<std::string> out;
    s.for_each([&](std::size_t i) { out.push_back(label(i)); });
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> UGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < size(); ++a)
        adj_[a].for_each([&](std::size_t b) {
            if (a < b) out.emplace_back(a, b);
        });
    return out;
}

std::size_t UGraph::edge_count() const {
    std::size_t c = 0;
    for (const auto& a : adj_) c += a.size();
    return c / 2;
}

bool UGraph::is_complete(const NodeSet& s) const {
    bool ok = true;
    s.for_each([&](std::size_t v) {
        if (!(s - NodeSet::single(v)).subset_of(adj_[v])) ok = false;
    });
    return ok;
}

bool UGraph::subgraph_of(const UGraph& other) const {
    if (labels_ != other.labels_) throw InvalidInput("subgraph comparison needs identical node labels");
    for (std::size_t v = 0; v < size(); ++v)
        if (!adj_[v].subset_of(other.adj_[v])) return false;
    return true;
}

void UGraph::require_subset(const NodeSet& s) const {
    if (!s.subset_of(all())) throw UnknownNode("node set refers to nodes outside the graph");
}

}  // namespace hedg
