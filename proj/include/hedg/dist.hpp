#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hedg/errors.hpp"
#include "hedg/node_set.hpp"

namespace hedg {

struct UnknownVariable : Error {
    using Error::Error;
};

struct Variable {
    std::string name;
    std::size_t domain = 2;            // values are 0 .. domain-1
    std::vector<std::string> values;   // optional display labels
    friend bool operator==(const Variable&, const Variable&) = default;
};

using Assignment = std::vector<std::uint32_t>;

// Exact joint distribution over finitely many discrete variables. Cells are
// stored sparsely, keyed by the mixed-radix index of the assignment (the last
// variable varies fastest), so iteration order is lexicographic.
class FiniteDist {
public:
    FiniteDist() = default;
    // Validates: non-negative probabilities, assignments inside the domains,
    // total mass 1 within `sum_tol`. Zero cells are dropped.
    FiniteDist(std::vector<Variable> vars, const std::vector<std::pair<Assignment, double>>& cells,
               double sum_tol = 1e-9);
    static FiniteDist from_keys(std::vector<Variable> vars, std::map<std::uint64_t, double> cells,
                                double sum_tol = 1e-9);
    static FiniteDist uniform(std::vector<Variable> vars);

    const std::vector<Variable>& variables() const { return vars_; }
    std::size_t size() const { return vars_.size(); }
    std::size_t index(const std::string& name) const;  // throws UnknownVariable
    NodeSet set_of(const std::vector<std::string>& names) const;
    std::vector<std::string> names_of(const NodeSet& s) const;
    NodeSet all() const { return NodeSet::range(vars_.size()); }

    // Number of cells of the full product space.
    std::uint64_t space_size() const { return space_; }
    std::uint64_t key(const Assignment& a) const;
    Assignment decode(std::uint64_t key) const;
    std::uint32_t digit(std::uint64_t key, std::size_t var) const {
        return static_cast<std::uint32_t>((key / stride_[var]) % vars_[var].domain);
    }
    std::uint64_t stride(std::size_t var) const { return stride_[var]; }

    const std::map<std::uint64_t, double>& cells() const { return cells_; }
    double prob(const Assignment& a) const;
    double total() const;

    friend bool operator==(const FiniteDist&, const FiniteDist&) = default;

private:
    void init_strides();
    std::vector<Variable> vars_;
    std::vector<std::uint64_t> stride_;
    std::uint64_t space_ = 1;
    std::map<std::uint64_t, double> cells_;
};

// Marginal on the variables in `keep` (original variable order preserved).
FiniteDist marginal(const FiniteDist& p, const NodeSet& keep);
// Same distribution with variables listed in `order` (a permutation of the names).
FiniteDist reorder(const FiniteDist& p, const std::vector<std::string>& order);

// Largest |p - q| over cells; both must have identical variable lists.
double max_abs_difference(const FiniteDist& p, const FiniteDist& q);
double tv_distance(const FiniteDist& p, const FiniteDist& q);

// Largest conditional-independence defect |p(x,y,z) p(z) - p(x,z) p(y,z)| over
// all joint values; overlapping sets are handled literally.
double ci_defect(const FiniteDist& p, const NodeSet& x, const NodeSet& y, const NodeSet& z);
bool is_ci(const FiniteDist& p, const NodeSet& x, const NodeSet& y, const NodeSet& z, double tol = 1e-9);

// A nonnegative table over `scope` (variable indices, ascending), laid out
// mixed-radix with the last scope variable fastest.
struct Factor {
    std::vector<std::size_t> scope;
    std::vector<double> table;
};
using FactorSet = std::vector<Factor>;

// Conditional table p(child | parents) as a factor (0 where p(parents) = 0).
Factor conditional_factor(const FiniteDist& p, std::size_t child, const NodeSet& parents);
bool factor_product_check(const FiniteDist& p, const FactorSet& f, double tol = 1e-9);

// Exact decision whether p is a product of nonnegative functions of the
// clique variables. A factorization exists iff the support of p is closed under
// recombining clique projections and log p is additive over the cliques on the
// support; `missing_cell` certifies a failure of the first condition.
struct FactorizationResult {
    bool factorizes = false;
    std::optional<std::uint64_t> missing_cell;  // in the clique closure, but p = 0 there
    double residual = 0.0;                      // max |product - p| of the best log-linear fit
    FactorSet factors;                          // present iff factorizes
};
FactorizationResult exact_factorization(const FiniteDist& p, const std::vector<NodeSet>& cliques,
                                        double tol = 1e-9);

inline constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 22;

struct IpfResult {
    FiniteDist fit;
    double tv = 0.0;          // TV(fit, p)
    std::size_t iterations = 0;
    bool converged = false;   // false = max_iters reached (NonConvergence)
};

// Iterative proportional fitting from the uniform table, cycling the clique
// marginals of p, until successive sweeps differ by less than `tol` in total
// variation. Cliques must cover all variables.
IpfResult ipf_fit(const FiniteDist& p, const std::vector<NodeSet>& cliques, std::size_t max_iters = 20000,
                  double tol = 1e-10);

}  // namespace hedg
