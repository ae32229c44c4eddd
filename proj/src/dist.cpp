#include "hedg/dist.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>

namespace hedg {

namespace {

void check_variables(const std::vector<Variable>& vars) {
    if (vars.size() > kMaxNodes) throw SizeLimit("too many variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name.empty()) throw InvalidInput("variable names must be non-empty");
        if (vars[i].domain == 0) throw InvalidInput("variable '" + vars[i].name + "' has an empty domain");
        if (!vars[i].values.empty() && vars[i].values.size() != vars[i].domain)
            throw InvalidInput("variable '" + vars[i].name + "' has value labels not matching its domain");
        for (std::size_t j = 0; j < i; ++j)
            if (vars[j].name == vars[i].name) throw InvalidInput("duplicate variable '" + vars[i].name + "'");
    }
}

// Key of the assignment restricted to `keep` (other coordinates zeroed).
std::uint64_t project_key(const FiniteDist& p, std::uint64_t key, const NodeSet& keep) {
    std::uint64_t out = 0;
    keep.for_each([&](std::size_t v) { out += p.digit(key, v) * p.stride(v); });
    return out;
}

}  // namespace

void FiniteDist::init_strides() {
    stride_.assign(vars_.size(), 1);
    space_ = 1;
    for (std::size_t k = vars_.size(); k-- > 0;) {
        stride_[k] = space_;
        if (space_ > (std::uint64_t{1} << 62) / vars_[k].domain)
            throw SizeLimit("joint state space exceeds 2^62 cells");
        space_ *= vars_[k].domain;
    }
}

FiniteDist::FiniteDist(std::vector<Variable> vars, const std::vector<std::pair<Assignment, double>>& cells,
                       double sum_tol) {
    check_variables(vars);
    vars_ = std::move(vars);
    init_strides();
    std::map<std::uint64_t, double> table;
    for (const auto& [a, p] : cells) table[key(a)] += p;
    *this = from_keys(vars_, std::move(table), sum_tol);
}

FiniteDist FiniteDist::from_keys(std::vector<Variable> vars, std::map<std::uint64_t, double> cells,
                                 double sum_tol) {
    check_variables(vars);
    FiniteDist d;
    d.vars_ = std::move(vars);
    d.init_strides();
    double sum = 0.0;
    for (const auto& [k, p] : cells) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("probabilities must be finite and non-negative");
        if (k >= d.space_) throw InvalidInput("cell index outside the joint state space");
        sum += p;
        if (p > 0.0) d.cells_.emplace(k, p);
    }
    if (std::abs(sum - 1.0) > sum_tol)
        throw InvalidInput("probabilities sum to " + std::to_string(sum) + ", not 1");
    return d;
}

FiniteDist FiniteDist::uniform(std::vector<Variable> vars) {
    check_variables(vars);
    FiniteDist d;
    d.vars_ = std::move(vars);
    d.init_strides();
    if (d.space_ > kDenseCellLimit) throw SizeLimit("uniform table too large");
    const double p = 1.0 / static_cast<double>(d.space_);
    for (std::uint64_t k = 0; k < d.space_; ++k) d.cells_.emplace_hint(d.cells_.end(), k, p);
    return d;
}

std::size_t FiniteDist::index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    throw UnknownVariable("unknown variable '" + name + "'");
}

NodeSet FiniteDist::set_of(const std::vector<std::string>& names) const {
    NodeSet s;
    for (const auto& n : names) s.set(index(n));
    return s;
}

std::vector<std::string> FiniteDist::names_of(const NodeSet& s) const {
    std::vector<std::string> out;
    s.for_each([&](std::size_t i) { out.push_back(vars_.at(i).name); });
    return out;
}

std::uint64_t FiniteDist::key(const Assignment& a) const {
    if (a.size() != vars_.size()) throw InvalidInput("assignment length does not match the variable count");
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] >= vars_[i].domain)
            throw InvalidInput("value " + std::to_string(a[i]) + " outside the domain of '" + vars_[i].name + "'");
        k += a[i] * stride_[i];
    }
    return k;
}

Assignment FiniteDist::decode(std::uint64_t key) const {
    Assignment a(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) a[i] = digit(key, i);
    return a;
}

double FiniteDist::prob(const Assignment& a) const {
    auto it = cells_.find(key(a));
    return it == cells_.end() ? 0.0 : it->second;
}

double FiniteDist::total() const {
    double s = 0.0;
    for (const auto& [k, p] : cells_) s += p;
    return s;
}

FiniteDist marginal(const FiniteDist& p, const NodeSet& keep) {
    if (!keep.subset_of(p.all())) throw UnknownVariable("marginal over variables outside the distribution");
    std::vector<Variable> vars;
    keep.for_each([&](std::size_t v) { vars.push_back(p.variables()[v]); });
    const auto kept = keep.members();
    FiniteDist shape = FiniteDist::from_keys(vars, {{0, 1.0}});
    std::map<std::uint64_t, double> cells;
    for (const auto& [k, pr] : p.cells()) {
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) out += p.digit(k, kept[i]) * shape.stride(i);
        cells[out] += pr;
    }
    return FiniteDist::from_keys(std::move(vars), std::move(cells), 1e-6);
}

FiniteDist reorder(const FiniteDist& p, const std::vector<std::string>& order) {
    if (order.size() != p.size()) throw InvalidInput("reorder needs every variable exactly once");
    std::vector<std::size_t> src;
    std::vector<Variable> vars;
    for (const auto& n : order) {
        src.push_back(p.index(n));
        vars.push_back(p.variables()[src.back()]);
    }
    FiniteDist shape = FiniteDist::from_keys(vars, {{0, 1.0}});
    std::map<std::uint64_t, double> cells;
    for (const auto& [k, pr] : p.cells()) {
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < src.size(); ++i) out += p.digit(k, src[i]) * shape.stride(i);
        cells[out] += pr;
    }
    return FiniteDist::from_keys(std::move(vars), std::move(cells), 1e-6);
}

namespace {
void require_same_variables(const FiniteDist& p, const FiniteDist& q) {
    if (p.size() != q.size()) throw InvalidInput("distributions have different variables");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.variables()[i].name != q.variables()[i].name || p.variables()[i].domain != q.variables()[i].domain)
            throw InvalidInput("distributions have different variables");
}
}  // namespace

double max_abs_difference(const FiniteDist& p, const FiniteDist& q) {
    require_same_variables(p, q);
    double m = 0.0;
    for (const auto& [k, pr] : p.cells()) {
        auto it = q.cells().find(k);
        m = std::max(m, std::abs(pr - (it == q.cells().end() ? 0.0 : it->second)));
    }
    for (const auto& [k, pr] : q.cells())
        if (!p.cells().count(k)) m = std::max(m, pr);
    return m;
}

double tv_distance(const FiniteDist& p, const FiniteDist& q) {
    require_same_variables(p, q);
    double s = 0.0;
    for (const auto& [k, pr] : p.cells()) {
        auto it = q.cells().find(k);
        s += std::abs(pr - (it == q.cells().end() ? 0.0 : it->second));
    }
    for (const auto& [k, pr] : q.cells())
        if (!p.cells().count(k)) s += pr;
    return 0.5 * s;
}

double ci_defect(const FiniteDist& p, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    for (const NodeSet* s : {&x, &y, &z})
        if (!s->subset_of(p.all())) throw UnknownVariable("CI query names variables outside the distribution");
    const NodeSet xz = x | z, yz = y | z, xyz = x | y | z;
    std::unordered_map<std::uint64_t, double> pxyz, pxz, pyz, pz;
    for (const auto& [k, pr] : p.cells()) {
        pxyz[project_key(p, k, xyz)] += pr;
        pxz[project_key(p, k, xz)] += pr;
        pyz[project_key(p, k, yz)] += pr;
        pz[project_key(p, k, z)] += pr;
    }
    // Group the xz- and yz-marginal supports by their z-part.
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> xs_by_z, ys_by_z;
    for (const auto& [k, pr] : pxz) xs_by_z[project_key(p, k, z)].push_back(k);
    for (const auto& [k, pr] : pyz) ys_by_z[project_key(p, k, z)].push_back(k);
    const NodeSet shared = (x & y) - z;
    double worst = 0.0;
    for (const auto& [zk, przk] : pz) {
        for (auto xk : xs_by_z[zk]) {
            for (auto yk : ys_by_z[zk]) {
                double joint = 0.0;
                if (project_key(p, xk, shared) == project_key(p, yk, shared)) {
                    const std::uint64_t jk = project_key(p, xk, xz) + project_key(p, yk, y - x - z);
                    auto it = pxyz.find(jk);
                    if (it != pxyz.end()) joint = it->second;
                }
                worst = std::max(worst, std::abs(joint * przk - pxz[xk] * pyz[yk]));
            }
        }
    }
    return worst;
}

bool is_ci(const FiniteDist& p, const NodeSet& x, const NodeSet& y, const NodeSet& z, double tol) {
    return ci_defect(p, x, y, z) <= tol;
}

Factor conditional_factor(const FiniteDist& p, std::size_t child, const NodeSet& parents) {
    if (child >= p.size() || !parents.subset_of(p.all())) throw UnknownVariable("factor scope outside distribution");
    NodeSet scope_set = parents;
    scope_set.set(child);
    Factor f;
    f.scope = scope_set.members();
    const FiniteDist joint = marginal(p, scope_set);
    const FiniteDist par = marginal(p, parents);
    std::uint64_t size = 1;
    for (auto v : f.scope) size *= p.variables()[v].domain;
    f.table.assign(size, 0.0);
    for (const auto& [k, pr] : joint.cells()) {
        // Parent key inside `par`: drop the child's digit.
        std::uint64_t pk = 0;
        std::size_t pi = 0;
        for (std::size_t i = 0; i < f.scope.size(); ++i) {
            if (f.scope[i] == child) continue;
            pk += joint.digit(k, i) * par.stride(pi++);
        }
        auto it = par.cells().find(pk);
        const double denom = it == par.cells().end() ? 0.0 : it->second;
        f.table[k] = denom > 0 ? pr / denom : 0.0;
    }
    return f;
}

bool factor_product_check(const FiniteDist& p, const FactorSet& fs, double tol) {
    if (p.space_size() > kDenseCellLimit) throw SizeLimit("factor check over a too large state space");
    for (const auto& f : fs) {
        std::uint64_t size = 1;
        for (auto v : f.scope) {
            if (v >= p.size()) throw UnknownVariable("factor scope outside distribution");
            size *= p.variables()[v].domain;
        }
        if (f.table.size() != size) throw InvalidInput("factor table size does not match its scope");
    }
    for (std::uint64_t k = 0; k < p.space_size(); ++k) {
        double prod = 1.0;
        for (const auto& f : fs) {
            std::uint64_t fk = 0;
            for (auto v : f.scope) fk = fk * p.variables()[v].domain + p.digit(k, v);
            prod *= f.table[fk];
        }
        auto it = p.cells().find(k);
        const double target = it == p.cells().end() ? 0.0 : it->second;
        if (std::abs(prod - target) > tol) return false;
    }
    return true;
}

namespace {

// For each clique, the clique-cell index of every full cell (mixed radix over
// the ascending clique members, last fastest).
std::vector<std::vector<std::uint32_t>> clique_cells(const FiniteDist& p, const std::vector<NodeSet>& cliques,
                                                     std::vector<std::uint64_t>& sizes) {
    const std::uint64_t n = p.space_size();
    std::vector<std::vector<std::uint32_t>> cell_of(cliques.size());
    sizes.assign(cliques.size(), 1);
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        if (!cliques[c].subset_of(p.all())) throw UnknownVariable("clique outside the distribution");
        const auto members = cliques[c].members();
        for (auto v : members) sizes[c] *= p.variables()[v].domain;
        cell_of[c].resize(n);
        for (std::uint64_t k = 0; k < n; ++k) {
            std::uint64_t ck = 0;
            for (auto v : members) ck = ck * p.variables()[v].domain + p.digit(k, v);
            cell_of[c][k] = static_cast<std::uint32_t>(ck);
        }
    }
    return cell_of;
}

}  // namespace

FactorizationResult exact_factorization(const FiniteDist& p, const std::vector<NodeSet>& cliques, double tol) {
    const std::uint64_t n = p.space_size();
    if (n > kDenseCellLimit) throw SizeLimit("factorization check over a too large state space");
    std::vector<std::uint64_t> sizes;
    const auto cell_of = clique_cells(p, cliques, sizes);
    FactorizationResult r;

    // Clique projections of the support.
    std::vector<std::vector<char>> seen(cliques.size());
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        seen[c].assign(sizes[c], 0);
        for (const auto& [k, pr] : p.cells()) seen[c][cell_of[c][k]] = 1;
    }
    for (std::uint64_t k = 0; k < n; ++k) {
        if (p.cells().count(k)) continue;
        bool inside = true;
        for (std::size_t c = 0; c < cliques.size() && inside; ++c) inside = seen[c][cell_of[c][k]] != 0;
        if (inside) {
            r.missing_cell = k;
            return r;
        }
    }

    // log p(x) = sum_C theta_C(x_C) on the support, solved in the least-squares sense.
    std::vector<std::vector<std::int64_t>> column(cliques.size());
    Eigen::Index unknowns = 0;
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        column[c].assign(sizes[c], -1);
        for (std::uint64_t ck = 0; ck < sizes[c]; ++ck)
            if (seen[c][ck]) column[c][ck] = unknowns++;
    }
    const auto rows = static_cast<Eigen::Index>(p.cells().size());
    if (rows > 4096 || unknowns > 4096) throw SizeLimit("factorization check with too large a support");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, std::max<Eigen::Index>(unknowns, 1));
    Eigen::VectorXd b(rows);
    Eigen::Index row = 0;
    for (const auto& [k, pr] : p.cells()) {
        for (std::size_t c = 0; c < cliques.size(); ++c) a(row, column[c][cell_of[c][k]]) = 1.0;
        b(row++) = std::log(pr);
    }
    const Eigen::VectorXd theta = a.completeOrthogonalDecomposition().solve(b);
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        Factor f{cliques[c].members(), std::vector<double>(sizes[c], 0.0)};
        for (std::uint64_t ck = 0; ck < sizes[c]; ++ck)
            if (column[c][ck] >= 0) f.table[ck] = std::exp(theta(column[c][ck]));
        r.factors.push_back(std::move(f));
    }
    for (std::uint64_t k = 0; k < n; ++k) {
        double prod = 1.0;
        for (std::size_t c = 0; c < cliques.size(); ++c) prod *= r.factors[c].table[cell_of[c][k]];
        auto it = p.cells().find(k);
        r.residual = std::max(r.residual, std::abs(prod - (it == p.cells().end() ? 0.0 : it->second)));
    }
    r.factorizes = r.residual <= tol;
    if (!r.factorizes) r.factors.clear();
    return r;
}

IpfResult ipf_fit(const FiniteDist& p, const std::vector<NodeSet>& cliques, std::size_t max_iters, double tol) {
    const std::uint64_t n = p.space_size();
    if (n > kDenseCellLimit) throw SizeLimit("IPF over a too large state space");
    NodeSet covered;
    for (const auto& c : cliques) {
        if (!c.subset_of(p.all())) throw UnknownVariable("clique outside the distribution");
        covered |= c;
    }
    if (covered != p.all()) throw InvalidInput("IPF cliques must cover every variable");

    std::vector<double> target(n, 0.0), fit(n, 1.0 / static_cast<double>(n)), prev;
    for (const auto& [k, pr] : p.cells()) target[k] = pr;
    // Per clique: map from cell to clique-cell, and the target clique marginal.
    std::vector<std::uint64_t> sizes;
    const auto cell_of = clique_cells(p, cliques, sizes);
    std::vector<std::vector<double>> goal(cliques.size());
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        goal[c].assign(sizes[c], 0.0);
        for (std::uint64_t k = 0; k < n; ++k) goal[c][cell_of[c][k]] += target[k];
    }
    IpfResult r;
    std::vector<double> current;
    for (r.iterations = 1; r.iterations <= max_iters; ++r.iterations) {
        prev = fit;
        for (std::size_t c = 0; c < cliques.size(); ++c) {
            current.assign(goal[c].size(), 0.0);
            for (std::uint64_t k = 0; k < n; ++k) current[cell_of[c][k]] += fit[k];
            for (std::uint64_t k = 0; k < n; ++k) {
                const double have = current[cell_of[c][k]];
                fit[k] = have > 0 ? fit[k] * goal[c][cell_of[c][k]] / have : 0.0;
            }
        }
        double change = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) change += std::abs(fit[k] - prev[k]);
        if (0.5 * change < tol) {
            r.converged = true;
            break;
        }
    }
    if (!r.converged) r.iterations = max_iters;
    std::map<std::uint64_t, double> cells;
    double sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) sum += fit[k];
    for (std::uint64_t k = 0; k < n; ++k)
        if (fit[k] > 0) cells.emplace_hint(cells.end(), k, fit[k] / sum);
    r.fit = FiniteDist::from_keys(p.variables(), std::move(cells), 1e-6);
    r.tv = tv_distance(r.fit, p);
    return r;
}

}  // namespace hedg
