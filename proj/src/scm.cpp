#include "hedg/scm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hedg/core.hpp"
#include "hedg/transform.hpp"

namespace hedg {

namespace {

std::string set_text(const Hedg& g, const NodeSet& s) {
    std::string out = "{";
    for (const auto& l : g.labels_of(s)) out += (out.size() > 1 ? "," : "") + l;
    return out + "}";
}

void check_distribution(const std::vector<double>& probs, const std::string& what) {
    if (probs.empty()) throw InvalidInput(what + " has an empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput(what + " has a negative or non-finite probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput(what + " does not sum to 1");
}

// Odometer over the mixed-radix space `radix`; returns false after the last
// assignment (values wrap to zero).
bool advance(std::vector<std::uint32_t>& digits, const std::vector<std::uint32_t>& radix) {
    for (std::size_t k = digits.size(); k-- > 0;) {
        if (++digits[k] < radix[k]) return true;
        digits[k] = 0;
    }
    return false;
}

std::uint64_t product(const std::vector<std::uint32_t>& radix) {
    std::uint64_t p = 1;
    for (auto r : radix) {
        if (r != 0 && p > (std::uint64_t{1} << 62) / r) throw SizeLimit("enumeration space overflows");
        p *= r;
    }
    return p;
}

struct SolveOutcome {
    std::size_t count = 0;  // 0, 1 or 2 (= at least two)
    std::vector<std::uint32_t> first, second;
};

// Finds all x_S (members listed) with x_v = f_v(x, e) for v in S, keeping the
// other coordinates of x fixed. On a unique solution x holds it afterwards.
SolveOutcome solve_members(const DiscreteMscm& m, const std::vector<std::size_t>& members,
                           std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& e) {
    SolveOutcome out;
    std::vector<std::uint32_t> radix, digits(members.size(), 0);
    for (auto v : members) radix.push_back(static_cast<std::uint32_t>(m.domains[v]));
    do {
        for (std::size_t i = 0; i < members.size(); ++i) x[members[i]] = digits[i];
        bool ok = true;
        for (std::size_t i = 0; i < members.size() && ok; ++i) ok = m.eval(members[i], x, e) == digits[i];
        if (ok) {
            if (out.count == 0) out.first = digits;
            else out.second = digits;
            if (++out.count == 2) break;
        }
    } while (advance(digits, radix));
    if (out.count == 1)
        for (std::size_t i = 0; i < members.size(); ++i) x[members[i]] = out.first[i];
    return out;
}

[[noreturn]] void raise_solution_error(const DiscreteMscm& m, const NodeSet& s, const SolveOutcome& o,
                                       std::vector<std::uint32_t> input) {
    if (o.count == 0)
        throw NoSolution("loop " + set_text(m.graph, s) + " has no solution for some input", s, std::move(input));
    throw MultipleSolutions("loop " + set_text(m.graph, s) + " has several solutions for some input", s,
                            std::move(input), o.first, o.second);
}

std::vector<std::size_t> used_components(const DiscreteMscm& m, const NodeSet& s) {
    std::vector<std::size_t> out;
    s.for_each([&](std::size_t v) {
        for (auto c : m.mechanisms[v].components) out.push_back(c);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Canonically smallest element of `tilde` containing `image` (tilde sorted).
std::size_t smallest_superset(const std::vector<NodeSet>& tilde, const NodeSet& image) {
    for (std::size_t i = 0; i < tilde.size(); ++i)
        if (image.subset_of(tilde[i])) return i;
    throw InvalidInput("no hyperedge contains the image of an error space");
}

}  // namespace

// ------------------------------------------------------------------ model

void DiscreteMscm::validate() const {
    const std::size_t n = graph.size();
    if (domains.size() != n) throw InvalidInput("one domain per node is required");
    for (std::size_t v = 0; v < n; ++v)
        if (domains[v] == 0) throw InvalidInput("node '" + graph.label(v) + "' has an empty domain");
    for (std::size_t c = 0; c < components.size(); ++c)
        check_distribution(components[c].probs, "error component " + std::to_string(c));
    const auto tilde = graph.maximal_hyperedges();
    if (errors.size() != tilde.size()) throw InvalidInput("one error space per maximal hyperedge is required");
    std::vector<int> owner(components.size(), -1);
    for (std::size_t f = 0; f < tilde.size(); ++f) {
        if (errors[f].hyperedge != tilde[f])
            throw InvalidInput("error space " + std::to_string(f) + " does not match hyperedge " +
                               set_text(graph, tilde[f]));
        for (auto c : errors[f].components) {
            if (c >= components.size()) throw InvalidInput("error space refers to a missing component");
            if (owner[c] >= 0) throw InvalidInput("error component " + std::to_string(c) + " has two owners");
            owner[c] = static_cast<int>(f);
        }
    }
    if (mechanisms.size() != n) throw InvalidInput("one mechanism per node is required");
    for (std::size_t v = 0; v < n; ++v) {
        const Mechanism& mech = mechanisms[v];
        const std::string who = "mechanism of '" + graph.label(v) + "'";
        if (mech.parents != graph.pa(v)) throw InvalidInput(who + " does not take exactly the parents as inputs");
        std::uint64_t size = 1;
        mech.parents.for_each([&](std::size_t p) { size *= domains[p]; });
        for (auto c : mech.components) {
            if (c >= components.size() || owner[c] < 0) throw InvalidInput(who + " uses an unknown error component");
            if (!tilde[static_cast<std::size_t>(owner[c])].test(v))
                throw InvalidInput(who + " uses an error of a hyperedge not containing the node");
            size *= components[c].size();
        }
        if (mech.table.size() != size)
            throw InvalidInput(who + " has " + std::to_string(mech.table.size()) + " entries, expected " +
                               std::to_string(size));
        for (auto value : mech.table)
            if (value >= domains[v]) throw InvalidInput(who + " yields a value outside the domain");
    }
}

std::uint32_t DiscreteMscm::eval(std::size_t v, const std::vector<std::uint32_t>& x,
                                 const std::vector<std::uint32_t>& e) const {
    const Mechanism& mech = mechanisms[v];
    std::uint64_t k = 0;
    mech.parents.for_each([&](std::size_t p) { k = k * domains[p] + x[p]; });
    for (auto c : mech.components) k = k * components[c].size() + e[c];
    return mech.table[k];
}

std::uint64_t DiscreteMscm::error_domain(std::size_t f) const {
    std::uint64_t d = 1;
    for (auto c : errors.at(f).components) d *= components[c].size();
    return d;
}

// ------------------------------------------------------------------ loops

LoopSolutions derive_loop_solutions(const DiscreteMscm& m) {
    m.validate();
    LoopSolutions out;
    const std::size_t n = m.graph.size();
    for (const auto& s : loop_set(m.graph)) {
        LoopTable t;
        t.loop = s;
        t.inputs = parents(m.graph, s) - s;
        t.components = used_components(m, s);
        const auto in_nodes = t.inputs.members();
        const auto members = s.members();
        std::vector<std::uint32_t> radix;
        for (auto v : in_nodes) radix.push_back(static_cast<std::uint32_t>(m.domains[v]));
        for (auto c : t.components) radix.push_back(static_cast<std::uint32_t>(m.components[c].size()));
        const std::uint64_t inputs = product(radix);
        std::uint64_t candidates = 1;
        for (auto v : members) candidates *= m.domains[v];
        if (inputs > kLoopEnumerationLimit / std::max<std::uint64_t>(candidates, 1))
            throw SizeLimit("loop " + set_text(m.graph, s) + " has too many inputs to enumerate");
        t.solution.reserve(inputs);
        std::vector<std::uint32_t> digits(radix.size(), 0), x(n, 0), e(m.components.size(), 0);
        do {
            for (std::size_t i = 0; i < in_nodes.size(); ++i) x[in_nodes[i]] = digits[i];
            for (std::size_t i = 0; i < t.components.size(); ++i) e[t.components[i]] = digits[in_nodes.size() + i];
            const SolveOutcome o = solve_members(m, members, x, e);
            if (o.count != 1) raise_solution_error(m, s, o, digits);
            std::uint64_t key = 0;
            for (auto v : members) key = key * m.domains[v] + x[v];
            t.solution.push_back(static_cast<std::uint32_t>(key));
        } while (advance(digits, radix));
        out.push_back(std::move(t));
    }
    return out;
}

bool loop_solutions_compatible(const DiscreteMscm& m, const LoopSolutions& sols) {
    const std::size_t n = m.graph.size();
    auto lookup = [&](const LoopTable& t, const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& e) {
        std::uint64_t k = 0;
        t.inputs.for_each([&](std::size_t v) { k = k * m.domains[v] + x[v]; });
        for (auto c : t.components) k = k * m.components[c].size() + e[c];
        return t.solution.at(k);
    };
    for (const auto& big : sols) {
        const auto in_nodes = big.inputs.members();
        const auto members = big.loop.members();
        std::vector<std::uint32_t> radix;
        for (auto v : in_nodes) radix.push_back(static_cast<std::uint32_t>(m.domains[v]));
        for (auto c : big.components) radix.push_back(static_cast<std::uint32_t>(m.components[c].size()));
        std::vector<std::uint32_t> digits(radix.size(), 0), x(n, 0), e(m.components.size(), 0);
        do {
            for (std::size_t i = 0; i < in_nodes.size(); ++i) x[in_nodes[i]] = digits[i];
            for (std::size_t i = 0; i < big.components.size(); ++i) e[big.components[i]] = digits[in_nodes.size() + i];
            std::uint64_t key = lookup(big, x, e);
            for (std::size_t i = members.size(); i-- > 0;) {
                x[members[i]] = static_cast<std::uint32_t>(key % m.domains[members[i]]);
                key /= m.domains[members[i]];
            }
            for (const auto& small : sols) {
                if (small.loop == big.loop || !small.loop.subset_of(big.loop)) continue;
                std::uint64_t expect = 0;
                small.loop.for_each([&](std::size_t v) { expect = expect * m.domains[v] + x[v]; });
                if (lookup(small, x, e) != expect) return false;
            }
        } while (advance(digits, radix));
    }
    return true;
}

// ------------------------------------------------------------------ joints

namespace {

// Enumerates every configuration of `comps` with its probability and solves
// the observed variables component by component in topological order.
template <class F>
void for_each_solution(const DiscreteMscm& m, const std::vector<std::size_t>& comps, F&& visit) {
    m.validate();
    const Condensation c = condense(m.graph);
    std::vector<std::vector<std::size_t>> order;
    for (auto b : c.topo) order.push_back(c.blocks[b].members());
    std::vector<std::uint32_t> radix;
    for (auto k : comps) radix.push_back(static_cast<std::uint32_t>(m.components[k].size()));
    if (product(radix) > kLoopEnumerationLimit) throw SizeLimit("too many error configurations to enumerate");
    std::vector<std::uint32_t> digits(radix.size(), 0), x(m.graph.size(), 0), e(m.components.size(), 0);
    do {
        double pr = 1.0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            e[comps[i]] = digits[i];
            pr *= m.components[comps[i]].probs[digits[i]];
        }
        if (pr == 0.0) continue;
        for (std::size_t b = 0; b < order.size(); ++b) {
            const SolveOutcome o = solve_members(m, order[b], x, e);
            if (o.count != 1) {
                std::vector<std::uint32_t> input;
                NodeSet block;
                for (auto v : order[b]) block.set(v);
                (parents(m.graph, block) - block).for_each([&](std::size_t v) { input.push_back(x[v]); });
                for (auto k : used_components(m, block)) input.push_back(e[k]);
                raise_solution_error(m, block, o, std::move(input));
            }
        }
        visit(x, e, pr);
    } while (advance(digits, radix));
}

std::vector<Variable> observed_variables(const DiscreteMscm& m) {
    std::vector<Variable> vars;
    for (std::size_t v = 0; v < m.graph.size(); ++v) vars.push_back({m.graph.label(v), m.domains[v], {}});
    return vars;
}

}  // namespace

FiniteDist exact_joint(const DiscreteMscm& m) {
    const auto vars = observed_variables(m);
    const FiniteDist shape = FiniteDist::from_keys(vars, {{0, 1.0}});
    std::map<std::uint64_t, double> cells;
    for_each_solution(m, used_components(m, m.graph.all()),
                      [&](const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>&, double pr) {
                          std::uint64_t k = 0;
                          for (std::size_t v = 0; v < x.size(); ++v) k += x[v] * shape.stride(v);
                          cells[k] += pr;
                      });
    return FiniteDist::from_keys(vars, std::move(cells), 1e-9);
}

FiniteDist exact_augmented_joint(const DiscreteMscm& m) {
    m.validate();
    const Hedg aug = augment(m.graph);
    const auto tilde = m.graph.maximal_hyperedges();
    // Position of each observed node and each error space in aug's order.
    std::vector<std::size_t> node_pos(m.graph.size()), space_pos(tilde.size());
    std::vector<Variable> vars(aug.size());
    for (std::size_t v = 0; v < m.graph.size(); ++v) {
        node_pos[v] = aug.index(m.graph.label(v));
        vars[node_pos[v]] = {m.graph.label(v), m.domains[v], {}};
    }
    for (std::size_t f = 0; f < tilde.size(); ++f) {
        const std::string label = latent_label(m.graph, tilde[f]);
        space_pos[f] = aug.index(label);
        vars[space_pos[f]] = {label, static_cast<std::size_t>(m.error_domain(f)), {}};
    }
    const FiniteDist shape = FiniteDist::from_keys(vars, {{0, 1.0}});
    std::vector<std::size_t> all(m.components.size());
    std::iota(all.begin(), all.end(), 0);
    std::map<std::uint64_t, double> cells;
    for_each_solution(m, all, [&](const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& e, double pr) {
        std::uint64_t k = 0;
        for (std::size_t v = 0; v < x.size(); ++v) k += x[v] * shape.stride(node_pos[v]);
        for (std::size_t f = 0; f < tilde.size(); ++f) {
            std::uint64_t ef = 0;
            for (auto c : m.errors[f].components) ef = ef * m.components[c].size() + e[c];
            k += ef * shape.stride(space_pos[f]);
        }
        cells[k] += pr;
    });
    return FiniteDist::from_keys(vars, std::move(cells), 1e-9);
}

std::vector<Assignment> sample_mscm(const DiscreteMscm& m, std::size_t n, std::uint64_t seed) {
    m.validate();
    const Condensation c = condense(m.graph);
    std::vector<std::vector<std::size_t>> order;
    for (auto b : c.topo) order.push_back(c.blocks[b].members());
    std::vector<std::discrete_distribution<std::uint32_t>> draw;
    for (const auto& comp : m.components) draw.emplace_back(comp.probs.begin(), comp.probs.end());
    std::mt19937_64 rng(seed);
    std::vector<Assignment> out;
    out.reserve(n);
    std::vector<std::uint32_t> x(m.graph.size(), 0), e(m.components.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < draw.size(); ++i) e[i] = draw[i](rng);
        for (const auto& block : order) {
            const SolveOutcome o = solve_members(m, block, x, e);
            if (o.count != 1) {
                NodeSet s;
                for (auto v : block) s.set(v);
                raise_solution_error(m, s, o, {});
            }
        }
        out.push_back(x);
    }
    return out;
}

// ------------------------------------------------------------------ operations

DiscreteMscm intervene(const DiscreteMscm& m, const InterventionSpec& spec) {
    m.validate();
    m.graph.require_subset(spec.targets);
    const auto targets = spec.targets.members();
    if (spec.replacement.size() != targets.size())
        throw InvalidInput("one replacement distribution per intervention target is required");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        check_distribution(spec.replacement[i], "replacement for '" + m.graph.label(targets[i]) + "'");
        if (spec.replacement[i].size() != m.domains[targets[i]])
            throw InvalidInput("replacement for '" + m.graph.label(targets[i]) + "' does not match its domain");
    }
    const Hedg& g = m.graph;
    const NodeSet& iset = spec.targets;
    std::vector<NodeSet> pa(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) pa[v] = iset.test(v) ? NodeSet{} : g.pa(v);
    std::vector<NodeSet> hyper;
    for (const auto& f : g.hyperedges()) hyper.push_back(f - iset);
    for (auto v : targets) hyper.push_back(NodeSet::single(v));
    DiscreteMscm out;
    out.graph = Hedg::build(g.labels(), pa, hyper);
    out.domains = m.domains;
    const auto old_tilde = g.maximal_hyperedges();
    const auto tilde = out.graph.maximal_hyperedges();
    out.errors.resize(tilde.size());
    for (std::size_t f = 0; f < tilde.size(); ++f) out.errors[f].hyperedge = tilde[f];

    std::vector<std::int64_t> remap(m.components.size(), -1);
    for (std::size_t f = 0; f < old_tilde.size(); ++f) {
        const NodeSet rest = old_tilde[f] - iset;
        if (rest.empty()) continue;  // the error of a fully intervened hyperedge disappears
        const std::size_t target = smallest_superset(tilde, rest);
        for (auto c : m.errors[f].components) {
            remap[c] = static_cast<std::int64_t>(out.components.size());
            out.components.push_back(m.components[c]);
            out.errors[target].components.push_back(static_cast<std::size_t>(remap[c]));
        }
    }
    out.mechanisms.resize(g.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::size_t v = targets[i];
        const std::size_t c = out.components.size();
        out.components.push_back({spec.replacement[i]});
        out.errors[smallest_superset(tilde, NodeSet::single(v))].components.push_back(c);
        Mechanism& mech = out.mechanisms[v];
        mech.components = {c};
        mech.table.resize(m.domains[v]);
        std::iota(mech.table.begin(), mech.table.end(), 0U);
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (iset.test(v)) continue;
        Mechanism mech = m.mechanisms[v];
        for (auto& c : mech.components) c = static_cast<std::size_t>(remap[c]);
        out.mechanisms[v] = std::move(mech);
    }
    for (auto& es : out.errors) std::sort(es.components.begin(), es.components.end());
    out.validate();
    return out;
}

DiscreteMscm marginalize_mscm(const DiscreteMscm& m, const NodeSet& w) {
    m.validate();
    const Hedg& g = m.graph;
    g.require_subset(w);
    if (w.empty()) return m;
    const Hedg mg = marginalize(g, w);
    const NodeSet keep = g.all() - w;

    DiscreteMscm out;
    out.graph = mg;
    out.components = m.components;
    out.domains.resize(mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) out.domains[i] = m.domains[g.index(mg.label(i))];
    const auto tilde = mg.maximal_hyperedges();
    out.errors.resize(tilde.size());
    for (std::size_t f = 0; f < tilde.size(); ++f) out.errors[f].hyperedge = tilde[f];

    // Survivors reachable from `start` through removed nodes only.
    auto reach = [&](const NodeSet& start) {
        NodeSet seen = start & w, frontier = seen, hit;
        while (!frontier.empty()) {
            NodeSet next;
            frontier.for_each([&](std::size_t u) { next |= g.ch(u); });
            hit |= next & keep;
            next = (next & w) - seen;
            seen |= next;
            frontier = next;
        }
        return hit;
    };
    const auto old_tilde = g.maximal_hyperedges();
    if (!tilde.empty()) {
        for (std::size_t f = 0; f < old_tilde.size(); ++f) {
            const NodeSet image = g.translate((old_tilde[f] & keep) | reach(old_tilde[f]), mg);
            const std::size_t target = smallest_superset(tilde, image);
            for (auto c : m.errors[f].components) out.errors[target].components.push_back(c);
        }
    }
    for (auto& es : out.errors) std::sort(es.components.begin(), es.components.end());

    out.mechanisms.resize(mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) {
        const std::size_t v = g.index(mg.label(i));
        // Removed nodes feeding v through removed nodes only.
        NodeSet r, frontier = g.pa(v) & w;
        while (!frontier.empty()) {
            r |= frontier;
            NodeSet next;
            frontier.for_each([&](std::size_t u) { next |= g.pa(u) & w; });
            frontier = next - r;
        }
        const NodeSet inputs = (g.pa(v) & keep) | (parents(g, r) & keep);
        const auto in_nodes = inputs.members();
        const auto r_nodes = r.members();
        std::vector<std::size_t> comps = m.mechanisms[v].components;
        for (auto c : used_components(m, r)) comps.push_back(c);
        std::sort(comps.begin(), comps.end());
        comps.erase(std::unique(comps.begin(), comps.end()), comps.end());

        Mechanism mech;
        mech.parents = g.translate(inputs, mg);
        if (mech.parents != mg.pa(i))
            throw InvalidInput("internal: substituted inputs of '" + mg.label(i) + "' differ from its parents");
        mech.components = comps;
        std::vector<std::uint32_t> radix;
        for (auto u : in_nodes) radix.push_back(static_cast<std::uint32_t>(m.domains[u]));
        for (auto c : comps) radix.push_back(static_cast<std::uint32_t>(m.components[c].size()));
        mech.table.reserve(product(radix));
        std::vector<std::uint32_t> digits(radix.size(), 0), x(g.size(), 0), e(m.components.size(), 0);
        do {
            for (std::size_t k = 0; k < in_nodes.size(); ++k) x[in_nodes[k]] = digits[k];
            for (std::size_t k = 0; k < comps.size(); ++k) e[comps[k]] = digits[in_nodes.size() + k];
            if (!r_nodes.empty()) {
                const SolveOutcome o = solve_members(m, r_nodes, x, e);
                if (o.count != 1) raise_solution_error(m, r, o, digits);
            }
            mech.table.push_back(m.eval(v, x, e));
        } while (advance(digits, radix));
        out.mechanisms[i] = std::move(mech);
    }
    out.validate();
    return out;
}

// ------------------------------------------------------------------ generator

namespace {

// Determinant of a small matrix over GF(p) by elimination.
bool invertible_mod(std::vector<std::vector<int>> a, int p) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] % p == 0) ++piv;
        if (piv == n) return false;
        std::swap(a[piv], a[col]);
        int inv = 1;
        while ((a[col][col] * inv) % p != 1) ++inv;
        for (std::size_t r = col + 1; r < n; ++r) {
            const int f = (a[r][col] * inv) % p;
            for (std::size_t k = col; k < n; ++k) a[r][k] = ((a[r][k] - f * a[col][k]) % p + p) % p;
        }
    }
    return true;
}

}  // namespace

DiscreteMscm random_mscm(std::mt19937_64& rng, const MscmGeneratorOptions& opt, std::size_t* attempts) {
    if (opt.min_nodes < 1 || opt.max_nodes < opt.min_nodes || opt.max_domain < 2 || opt.max_error < 1)
        throw InvalidInput("invalid generator options");
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t attempt = 1; attempt <= 100000; ++attempt) {
        const std::size_t n = uniform(opt.min_nodes, opt.max_nodes);
        std::vector<std::string> labels;
        for (std::size_t i = 1; i <= n; ++i) labels.push_back("X" + std::to_string(i));
        std::vector<NodeSet> pa(n);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t u = 0; u < n; ++u)
                if (unit(rng) < (u == v ? opt.self_loop_probability : opt.edge_probability)) pa[v].set(u);
        std::vector<NodeSet> hyper;
        if (n >= 2) {
            const std::size_t k = uniform(0, opt.max_hyperedges);
            for (std::size_t h = 0; h < k; ++h) {
                NodeSet f;
                const std::size_t size = uniform(2, std::min<std::size_t>(3, n));
                while (f.size() < size) f.set(uniform(0, n - 1));
                hyper.push_back(f);
            }
        }
        DiscreteMscm m;
        m.graph = Hedg::build(labels, pa, hyper);
        const Hedg& g = m.graph;
        const auto tilde = g.maximal_hyperedges();

        // Domains: cyclic components share a prime.
        const auto blocks = scc_partition(g);
        const auto idx = scc_index(g, blocks);
        std::vector<int> prime(blocks.size(), 0);
        m.domains.assign(n, 2);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const std::size_t first = blocks[b].first();
            const bool cyclic = blocks[b].size() > 1 || g.has_edge(first, first);
            if (cyclic) {
                prime[b] = opt.max_domain >= 3 && unit(rng) < 0.5 ? 3 : 2;
                blocks[b].for_each([&](std::size_t v) { m.domains[v] = static_cast<std::size_t>(prime[b]); });
            } else {
                m.domains[first] = uniform(2, opt.max_domain);
            }
        }
        // Errors: one component per element of H~.
        m.errors.resize(tilde.size());
        for (std::size_t f = 0; f < tilde.size(); ++f) {
            std::vector<double> w(uniform(std::min<std::size_t>(2, opt.max_error), opt.max_error));
            double sum = 0.0;
            for (auto& x : w) sum += (x = 0.2 + unit(rng));
            for (auto& x : w) x /= sum;
            m.errors[f] = {tilde[f], {m.components.size()}};
            m.components.push_back({w});
        }
        // Affine coefficients inside cyclic components; check every loop's
        // system is invertible before building tables.
        std::vector<std::vector<int>> coef(n, std::vector<int>(n, 0));
        for (std::size_t v = 0; v < n; ++v)
            if (prime[idx[v]])
                (g.pa(v) & blocks[idx[v]]).for_each([&](std::size_t u) {
                    coef[v][u] = static_cast<int>(uniform(1, static_cast<std::size_t>(prime[idx[v]]) - 1));
                });
        bool solvable = true;
        for (const auto& loop : loop_set(g)) {
            const int p = prime[idx[loop.first()]];
            if (!p) continue;
            const auto mem = loop.members();
            std::vector<std::vector<int>> a(mem.size(), std::vector<int>(mem.size(), 0));
            for (std::size_t i = 0; i < mem.size(); ++i)
                for (std::size_t j = 0; j < mem.size(); ++j)
                    a[i][j] = (((i == j) ? 1 : 0) - coef[mem[i]][mem[j]] % p + p) % p;
            if (!invertible_mod(a, p)) {
                solvable = false;
                break;
            }
        }
        if (!solvable) continue;
        m.mechanisms.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            Mechanism& mech = m.mechanisms[v];
            mech.parents = g.pa(v);
            for (std::size_t f = 0; f < tilde.size(); ++f)
                if (tilde[f].test(v))
                    for (auto c : m.errors[f].components) mech.components.push_back(c);
            std::sort(mech.components.begin(), mech.components.end());
            const auto pm = mech.parents.members();
            std::vector<std::uint32_t> radix;
            for (auto u : pm) radix.push_back(static_cast<std::uint32_t>(m.domains[u]));
            for (auto c : mech.components) radix.push_back(static_cast<std::uint32_t>(m.components[c].size()));
            // Random offset table over the inputs from outside v's component.
            std::map<std::uint64_t, std::uint32_t> offset;
            std::vector<std::uint32_t> digits(radix.size(), 0);
            const int p = prime[idx[v]];
            do {
                std::uint64_t outside = 0;
                int inside = 0;
                for (std::size_t k = 0; k < radix.size(); ++k) {
                    if (k < pm.size() && p && idx[pm[k]] == idx[v]) inside += coef[v][pm[k]] * static_cast<int>(digits[k]);
                    else outside = outside * radix[k] + digits[k];
                }
                auto it = offset.find(outside);
                if (it == offset.end())
                    it = offset.emplace(outside, static_cast<std::uint32_t>(uniform(0, m.domains[v] - 1))).first;
                mech.table.push_back(p ? static_cast<std::uint32_t>((inside + static_cast<int>(it->second)) % p)
                                       : it->second);
            } while (advance(digits, radix));
        }
        try {
            derive_loop_solutions(m);
        } catch (const NoSolution&) {
            continue;
        } catch (const MultipleSolutions&) {
            continue;
        }
        if (attempts) *attempts = attempt;
        return m;
    }
    throw Error("random_mscm: no uniquely solvable model found");
}

// ------------------------------------------------------------------ Gaussian

void GaussianLinearSem::validate() const {
    const auto n = static_cast<Eigen::Index>(graph.size());
    if (b.rows() != n || b.cols() != n || lambda.rows() != n || lambda.cols() != n)
        throw InvalidInput("coefficient and covariance matrices must be square over the nodes");
    for (Eigen::Index v = 0; v < n; ++v)
        for (Eigen::Index w = 0; w < n; ++w) {
            const auto vi = static_cast<std::size_t>(v), wi = static_cast<std::size_t>(w);
            if (b(v, w) != 0.0 && !graph.has_edge(wi, vi))
                throw InvalidInput("coefficient " + graph.label(vi) + " <- " + graph.label(wi) + " without an edge");
            if (std::abs(lambda(v, w) - lambda(w, v)) > 1e-12) throw InvalidInput("error covariance is not symmetric");
            if (v != w && lambda(v, w) != 0.0 && !graph.in_complex(NodeSet{vi, wi}))
                throw InvalidInput("error covariance between " + graph.label(vi) + " and " + graph.label(wi) +
                                   " without a shared hyperedge");
        }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - b;
    if (n > 0 && std::abs(a.determinant()) < kSingularTol) throw SingularSystem("I - B is singular");
}

Eigen::MatrixXd gaussian_covariance(const GaussianLinearSem& s) {
    s.validate();
    const auto n = static_cast<Eigen::Index>(s.graph.size());
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(n, n) - s.b).partialPivLu().inverse();
    return inv * s.lambda * inv.transpose();
}

Eigen::MatrixXd conditional_cross_covariance(const Eigen::MatrixXd& sigma, const NodeSet& x, const NodeSet& y,
                                             const NodeSet& z) {
    auto idx = [](const NodeSet& s) {
        std::vector<Eigen::Index> out;
        s.for_each([&](std::size_t v) { out.push_back(static_cast<Eigen::Index>(v)); });
        return out;
    };
    const auto xi = idx(x), yi = idx(y), zi = idx(z);
    for (const auto* s : {&xi, &yi, &zi})
        for (auto v : *s)
            if (v >= sigma.rows()) throw UnknownNode("query index outside the covariance matrix");
    Eigen::MatrixXd sxy = sigma(xi, yi);
    if (zi.empty()) return sxy;
    const Eigen::MatrixXd szz = sigma(zi, zi);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(szz);
    lu.setThreshold(1e-12);
    if (lu.rank() < static_cast<Eigen::Index>(zi.size()))
        throw SingularConditioning("covariance of the conditioning set is singular");
    return sxy - sigma(xi, zi) * lu.solve(Eigen::MatrixXd(sigma(zi, yi)));
}

double gaussian_ci_defect(const GaussianLinearSem& s, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    const Eigen::MatrixXd c = conditional_cross_covariance(gaussian_covariance(s), x, y, z);
    return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
}

bool gaussian_ci(const GaussianLinearSem& s, const NodeSet& x, const NodeSet& y, const NodeSet& z, double tol) {
    return gaussian_ci_defect(s, x, y, z) < tol;
}

GaussianLinearSem random_gaussian_sem(std::mt19937_64& rng, std::size_t n, double edge_probability,
                                      std::size_t max_hyperedges, double min_det) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i) labels.push_back("v" + std::to_string(i));
    std::vector<NodeSet> pa(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u)
            if (u != v && unit(rng) < edge_probability) pa[v].set(u);
    std::vector<NodeSet> hyper;
    if (n >= 2) {
        const auto k = std::uniform_int_distribution<std::size_t>(0, max_hyperedges)(rng);
        for (std::size_t h = 0; h < k; ++h) {
            NodeSet f;
            const std::size_t size = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(3, n))(rng);
            while (f.size() < size) f.set(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
            hyper.push_back(f);
        }
    }
    GaussianLinearSem s;
    s.graph = Hedg::build(labels, pa, hyper);
    const auto dim = static_cast<Eigen::Index>(n);
    s.b = Eigen::MatrixXd::Zero(dim, dim);
    for (auto [from, to] : s.graph.edges()) {
        const double mag = 0.2 + 0.8 * unit(rng);
        s.b(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = unit(rng) < 0.5 ? -mag : mag;
    }
    while (std::abs((Eigen::MatrixXd::Identity(dim, dim) - s.b).determinant()) < min_det) s.b *= 0.5;
    s.lambda = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index v = 0; v < dim; ++v) s.lambda(v, v) = 0.5 + unit(rng);
    for (const auto& f : s.graph.hyperedges()) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
        f.for_each([&](std::size_t v) { c(static_cast<Eigen::Index>(v)) = (unit(rng) < 0.5 ? -1 : 1) * (0.3 + 0.7 * unit(rng)); });
        s.lambda += c * c.transpose();
    }
    return s;
}

// ------------------------------------------------------------------ sampling

std::size_t Samples::index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw UnknownVariable("no sampled variable '" + name + "'");
}

Samples cyclic_example(CyclicExample kind, std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Samples s;
    s.names = {"W", "X", "Y", "Z"};
    s.columns.assign(4, std::vector<double>(n));
    const std::size_t max_trips = n / 10000;
    for (std::size_t k = 0; k < n; ++k) {
        const double ew = normal(rng), ex = normal(rng), ey = normal(rng), ez = normal(rng);
        double w, x, y, z;
        if (kind == CyclicExample::Nonlinear) {
            const double denom = 1.0 - ex * ez;
            if (std::abs(denom) < 1e-9) {
                if (++s.guard_trips > max_trips)
                    throw DegenerateSample("too many draws near the singularity E_X E_Z = 1");
                --k;
                continue;
            }
            w = (ew + ey * ez) / denom;
            x = w * ex;
            y = (ex * ew + ey) / denom;
            z = y * ez;
        } else {
            w = (4.0 / 3.0) * (ew + 0.5 * ex + 0.5 * ey + ez);
            x = 0.5 * w + ex;
            y = x + ey;
            z = 0.5 * y + ez;
        }
        s.columns[0][k] = w;
        s.columns[1][k] = x;
        s.columns[2][k] = y;
        s.columns[3][k] = z;
    }
    return s;
}

double CmiResult::quantile(double q) const {
    if (null.empty()) return 0.0;
    const double pos = std::ceil(q * static_cast<double>(null.size())) - 1.0;
    const auto i = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(null.size() - 1)));
    return null[i];
}

namespace {

std::vector<std::uint32_t> equal_frequency_bins(const std::vector<double>& col, std::size_t bins) {
    const std::size_t n = col.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    std::vector<std::uint32_t> out(n);
    for (std::size_t r = 0; r < n; ++r) out[order[r]] = static_cast<std::uint32_t>(r * bins / n);
    return out;
}

double stratified_mi(const std::vector<std::uint32_t>& bx, const std::vector<std::uint32_t>& by,
                     const std::vector<std::uint32_t>& stratum, std::size_t strata, std::size_t bins) {
    std::vector<double> joint(strata * bins * bins, 0.0), mx(strata * bins, 0.0), my(strata * bins, 0.0),
        ms(strata, 0.0);
    for (std::size_t k = 0; k < bx.size(); ++k) {
        const std::size_t s = stratum[k];
        joint[(s * bins + bx[k]) * bins + by[k]] += 1;
        mx[s * bins + bx[k]] += 1;
        my[s * bins + by[k]] += 1;
        ms[s] += 1;
    }
    double mi = 0.0;
    for (std::size_t s = 0; s < strata; ++s)
        for (std::size_t a = 0; a < bins; ++a)
            for (std::size_t b = 0; b < bins; ++b) {
                const double c = joint[(s * bins + a) * bins + b];
                if (c > 0) mi += c * std::log(c * ms[s] / (mx[s * bins + a] * my[s * bins + b]));
            }
    return mi / static_cast<double>(bx.size());
}

}  // namespace

CmiResult cmi_estimate(const Samples& s, std::size_t x, std::size_t y, const std::vector<std::size_t>& z,
                       std::size_t bins, std::size_t permutations, std::uint64_t seed, std::size_t z_bins) {
    if (z_bins == 0) z_bins = bins;
    if (bins < 2 || z_bins < 2) throw InvalidInput("at least two bins are required");
    const std::size_t n = s.size();
    if (n == 0) throw InvalidInput("no samples");
    for (auto v : z)
        if (v >= s.columns.size()) throw UnknownVariable("conditioning variable out of range");
    if (x >= s.columns.size() || y >= s.columns.size()) throw UnknownVariable("variable out of range");
    const auto bx = equal_frequency_bins(s.columns[x], bins);
    auto by = equal_frequency_bins(s.columns[y], bins);
    std::vector<std::uint32_t> stratum(n, 0);
    std::size_t strata = 1;
    for (auto v : z) {
        const auto bz = equal_frequency_bins(s.columns[v], z_bins);
        for (std::size_t k = 0; k < n; ++k) stratum[k] = static_cast<std::uint32_t>(stratum[k] * z_bins + bz[k]);
        strata *= z_bins;
    }
    CmiResult r;
    r.statistic = stratified_mi(bx, by, stratum, strata, bins);

    // Group draws by stratum so y can be shuffled within each stratum.
    std::vector<std::vector<std::size_t>> members(strata);
    for (std::size_t k = 0; k < n; ++k) members[stratum[k]].push_back(k);
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> permuted(n), values;
    std::size_t exceed = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        for (const auto& group : members) {
            values.clear();
            for (auto k : group) values.push_back(by[k]);
            std::shuffle(values.begin(), values.end(), rng);
            for (std::size_t i = 0; i < group.size(); ++i) permuted[group[i]] = values[i];
        }
        const double stat = stratified_mi(bx, permuted, stratum, strata, bins);
        if (stat >= r.statistic) ++exceed;
        r.null.push_back(stat);
    }
    std::sort(r.null.begin(), r.null.end());
    r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + permutations);
    return r;
}

}  // namespace hedg
