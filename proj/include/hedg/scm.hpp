#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hedg/dist.hpp"
#include "hedg/graph.hpp"

namespace hedg {

// ------------------------------------------------------------------ discrete

// A loop system with no solution, or with two, for some input.
struct NoSolution : Error {
    NoSolution(std::string what, NodeSet loop_, std::vector<std::uint32_t> input_)
        : Error(std::move(what)), loop(loop_), input(std::move(input_)) {}
    NodeSet loop;
    std::vector<std::uint32_t> input;  // parent values then error values (see LoopTable)
};
struct MultipleSolutions : Error {
    MultipleSolutions(std::string what, NodeSet loop_, std::vector<std::uint32_t> input_,
                      std::vector<std::uint32_t> first_, std::vector<std::uint32_t> second_)
        : Error(std::move(what)), loop(loop_), input(std::move(input_)), first(std::move(first_)),
          second(std::move(second_)) {}
    NodeSet loop;
    std::vector<std::uint32_t> input, first, second;  // two solutions, values of the loop members
};

// An independent error coordinate with a finite distribution.
struct ErrorComponent {
    std::vector<double> probs;  // P(e = k), k = 0 .. size-1
    std::size_t size() const { return probs.size(); }
};

// The error variable E_F of one element F of H~: the product of the components
// it owns (possibly none, then E_F is constant). Its value is the mixed-radix
// index of the owned component values, last component fastest.
struct ErrorSpace {
    NodeSet hyperedge;
    std::vector<std::size_t> components;
};

// x_v = table[parents..., components...]: mixed radix over the parents in
// ascending node order followed by the listed components, last fastest.
struct Mechanism {
    NodeSet parents;
    std::vector<std::size_t> components;
    std::vector<std::uint32_t> table;
};

// Finite-domain modular structural causal model. `errors` has one entry per
// element of graph.maximal_hyperedges(), in the same order; each component is
// owned by exactly one error space; the mechanism of v may use only components
// owned by error spaces whose hyperedge contains v, and exactly Pa(v) as parents.
struct DiscreteMscm {
    Hedg graph;
    std::vector<std::size_t> domains;  // per node
    std::vector<ErrorComponent> components;
    std::vector<ErrorSpace> errors;
    std::vector<Mechanism> mechanisms;  // per node

    // Throws InvalidInput describing the first broken invariant.
    void validate() const;
    std::uint32_t eval(std::size_t v, const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& e) const;
    // Product of the component sizes owned by error space f.
    std::uint64_t error_domain(std::size_t f) const;
};

// Unique solutions of one loop S: for every input (values of Pa(S)∖S in
// ascending node order, then the values of `components`, mixed radix, last
// fastest) the solution x_S, encoded mixed radix over the members of S.
struct LoopTable {
    NodeSet loop;
    NodeSet inputs;
    std::vector<std::size_t> components;
    std::vector<std::uint32_t> solution;
};
using LoopSolutions = std::vector<LoopTable>;

inline constexpr std::uint64_t kLoopEnumerationLimit = std::uint64_t{1} << 24;

// Enumerates every loop and every input; raises NoSolution / MultipleSolutions
// at the first input without a unique solution.
LoopSolutions derive_loop_solutions(const DiscreteMscm& m);
// For all loops S' ⊆ S and all inputs, the S-solution restricted to S' equals
// the S'-solution for the induced inputs.
bool loop_solutions_compatible(const DiscreteMscm& m, const LoopSolutions& sols);

// Distribution of the observed variables (raises the solution errors).
FiniteDist exact_joint(const DiscreteMscm& m);
// Joint of observed variables and one latent variable per element of H~,
// labelled as in augment(graph); observed marginal equals exact_joint(m).
FiniteDist exact_augmented_joint(const DiscreteMscm& m);

// n independent draws of the observed variables (values in node order),
// deterministic given the seed.
std::vector<Assignment> sample_mscm(const DiscreteMscm& m, std::size_t n, std::uint64_t seed);

// Stochastic intervention on `targets`: one replacement distribution per
// target (in ascending node order).
struct InterventionSpec {
    NodeSet targets;
    std::vector<std::vector<double>> replacement;
};
DiscreteMscm intervene(const DiscreteMscm& m, const InterventionSpec& spec);

// Removes the nodes in w. Mechanisms of the survivors absorb the removed nodes
// by solving their equations; the components of each F move to the
// canonically smallest element of the new H~ containing its image.
DiscreteMscm marginalize_mscm(const DiscreteMscm& m, const NodeSet& w);

struct MscmGeneratorOptions {
    std::size_t min_nodes = 2;
    std::size_t max_nodes = 5;
    std::size_t max_domain = 3;
    std::size_t max_error = 3;
    std::size_t max_hyperedges = 2;
    double edge_probability = 0.35;
    double self_loop_probability = 0.05;
};
// Random model whose loops are all uniquely solvable: each cyclic component
// shares a prime domain and combines its members affinely, with random tables
// for everything entering from outside. Rejection-samples until
// derive_loop_solutions succeeds; `attempts` receives the number of tries.
DiscreteMscm random_mscm(std::mt19937_64& rng, const MscmGeneratorOptions& opt = {},
                         std::size_t* attempts = nullptr);

// ------------------------------------------------------------------ Gaussian

struct SingularSystem : Error {
    using Error::Error;
};
struct SingularConditioning : Error {
    using Error::Error;
};

// X = B X + E with Cov(E) = Lambda: B(v, w) is the coefficient of x_w in the
// equation of v (nonzero only for edges w -> v), Lambda is supported on the
// diagonal and on pairs sharing a hyperedge.
struct GaussianLinearSem {
    Hedg graph;
    Eigen::MatrixXd b;
    Eigen::MatrixXd lambda;
    void validate() const;  // supports, symmetry, and invertibility of I - B
};

inline constexpr double kSingularTol = 1e-12;

// (I - B)^{-1} Lambda (I - B)^{-T}.
Eigen::MatrixXd gaussian_covariance(const GaussianLinearSem& s);
// Sigma_xy - Sigma_xz Sigma_zz^{-1} Sigma_zy.
Eigen::MatrixXd conditional_cross_covariance(const Eigen::MatrixXd& sigma, const NodeSet& x, const NodeSet& y,
                                             const NodeSet& z);
double gaussian_ci_defect(const GaussianLinearSem& s, const NodeSet& x, const NodeSet& y, const NodeSet& z);
bool gaussian_ci(const GaussianLinearSem& s, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                 double tol = 1e-8);

// Random cyclic SEM on `n` nodes (labels v1..vn): random edges without
// self-loops, coefficients of magnitude uniform in [0.2, 1] with random sign,
// all halved until |det(I - B)| >= min_det; Lambda = diagonal in [0.5, 1.5]
// plus one random rank-one term per stored hyperedge.
GaussianLinearSem random_gaussian_sem(std::mt19937_64& rng, std::size_t n, double edge_probability = 0.35,
                                      std::size_t max_hyperedges = 2, double min_det = 1e-3);

// ------------------------------------------------------------------ sampling

struct DegenerateSample : Error {
    using Error::Error;
};

struct Samples {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // columns[i][k]: variable i, draw k
    std::size_t guard_trips = 0;               // redrawn near-singular error draws
    std::size_t size() const { return columns.empty() ? 0 : columns[0].size(); }
    std::size_t index(const std::string& name) const;
};

enum class CyclicExample { Nonlinear, Linear };

// Draws (W, X, Y, Z) from the four-node feedback loop W <- Z <- Y <- X <- W with
// independent standard normal errors.
//   Nonlinear: W = Z + E_W, X = W·E_X, Y = X + E_Y, Z = Y·E_Z, solved in
//              closed form; draws with |1 - E_X E_Z| < 1e-9 are redrawn and
//              more than 0.01% of such draws raise DegenerateSample.
//   Linear:    W = Z + E_W, X = W/2 + E_X, Y = X + E_Y, Z = Y/2 + E_Z.
Samples cyclic_example(CyclicExample kind, std::uint64_t seed, std::size_t n);

struct CmiResult {
    double statistic = 0.0;
    std::vector<double> null;  // sorted permutation statistics
    double quantile(double q) const;
    double p_value = 1.0;      // (1 + #null >= statistic) / (1 + #null)
};

// Plug-in conditional mutual information (nats) of x and y given z after
// equal-frequency discretization (`bins` bins for x and y, `z_bins` for each
// conditioning variable; 0 means `bins`), with a null distribution from
// permuting y within the strata of z.
CmiResult cmi_estimate(const Samples& s, std::size_t x, std::size_t y, const std::vector<std::size_t>& z,
                       std::size_t bins, std::size_t permutations, std::uint64_t seed, std::size_t z_bins = 0);

}  // namespace hedg
