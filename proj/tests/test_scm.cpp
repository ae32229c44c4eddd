// Structural causal models: loop solving, joints, interventions,
// marginalization, the Gaussian oracle and the sampling harness.

#include <random>

#include "check.hpp"
#include "hedg/core.hpp"
#include "hedg/markov.hpp"
#include "hedg/scm.hpp"
#include "hedg/transform.hpp"

using namespace hedg;
using hedg_test::fixture_text;
using hedg_test::nodes;

namespace {

DiscreteMscm model(const std::string& name) { return parse_mscm(fixture_text(name)); }

// a -> b -> c over {0,1,2} with binary errors.
DiscreteMscm chain_model() {
    return parse_mscm(R"({
      "graph": {"nodes": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]},
      "domains": {"a": 3, "b": 3, "c": 3},
      "components": [[0.2, 0.3, 0.5], [0.5, 0.5], [0.9, 0.1]],
      "errors": [{"hyperedge": ["a"], "components": [0]},
                 {"hyperedge": ["b"], "components": [1]},
                 {"hyperedge": ["c"], "components": [2]}],
      "mechanisms": [{"node": "a", "components": [0], "table": [0, 1, 2]},
                     {"node": "b", "components": [1], "table": [1, 2, 0, 0, 2, 2]},
                     {"node": "c", "components": [2], "table": [0, 1, 2, 2, 1, 1]}]})");
}

GaussianLinearSem sem(const Hedg& g, Eigen::MatrixXd b, Eigen::MatrixXd lambda) {
    GaussianLinearSem s{g, std::move(b), std::move(lambda)};
    s.validate();
    return s;
}

}  // namespace

TEST_CASE(loop_solutions) {
    const DiscreteMscm acyclic = chain_model();
    const LoopSolutions sols = derive_loop_solutions(acyclic);
    EXPECT(sols.size() == 3);
    for (const auto& t : sols) {
        REQUIRE(t.loop.size() == 1);
        EXPECT(t.solution == acyclic.mechanisms[t.loop.first()].table);
    }
    const DiscreteMscm copy = model("twocycle_copy_mscm.json");
    bool multiple = false;
    try {
        derive_loop_solutions(copy);
    } catch (const MultipleSolutions& e) {
        multiple = e.loop == copy.graph.all();
    }
    EXPECT(multiple);
    const DiscreteMscm unique = model("twocycle_unique_mscm.json");
    const LoopSolutions us = derive_loop_solutions(unique);
    EXPECT(us.size() == 3);
    EXPECT(loop_solutions_compatible(unique, us));
}

TEST_CASE(exact_joints) {
    const DiscreteMscm coin = model("threecoin_mscm.json");
    const FiniteDist p = exact_joint(coin);
    EXPECT(p.cells().size() == 2);
    EXPECT_NEAR(p.prob({0, 0, 0}), 0.5, 1e-15);
    EXPECT_NEAR(p.prob({1, 1, 1}), 0.5, 1e-15);
    const FiniteDist aug = exact_augmented_joint(coin);
    EXPECT(aug.size() == 4);
    EXPECT(aug.cells().size() == 2);
    EXPECT(max_abs_difference(reorder(marginal(aug, aug.set_of(coin.graph.labels())), coin.graph.labels()), p) < 1e-15);
    EXPECT(check(coin.graph, p, PropertyKind::witness_smgdGMP, nullptr, &aug).verdict == Verdict::Pass);

    // Point-mass errors give a point mass.
    InterventionSpec all{coin.graph.all(), {{0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}};
    const FiniteDist point = exact_joint(intervene(coin, all));
    EXPECT(point.cells().size() == 1);
    EXPECT_NEAR(point.prob({1, 0, 1}), 1.0, 1e-15);

    const DiscreteMscm cyc = model("fourcycle_mscm.json");
    const FiniteDist pc = exact_joint(cyc);
    EXPECT(check(cyc.graph, pc, PropertyKind::gdGMP).verdict == Verdict::Pass);
    const FiniteDist ac = exact_augmented_joint(cyc);
    EXPECT(check(cyc.graph, pc, PropertyKind::witness_smgdGMP, nullptr, &ac).verdict == Verdict::Pass);
}

TEST_CASE(interventions) {
    const DiscreteMscm cyc = model("fourcycle_mscm.json");
    const DiscreteMscm done = intervene(cyc, {nodes(cyc.graph, "X2"), {{1.0 / 3, 1.0 / 3, 1.0 / 3}}});
    const Hedg& g = done.graph;
    EXPECT(!g.has_edge(g.index("X3"), g.index("X2")));
    EXPECT(classify(g).is_mdag);
    const FiniteDist p = exact_joint(done);
    EXPECT(check(g, p, PropertyKind::dGMP).verdict == Verdict::Pass);
    EXPECT(implied_separations(g, Criterion::d).size() == implied_separations(g, Criterion::sigma).size());

    const DiscreteMscm coin = model("threecoin_mscm.json");
    const DiscreteMscm fair = intervene(coin, {nodes(coin.graph, "X1"), {{0.5, 0.5}}});
    EXPECT(fair.graph.hyperedges().size() == 1);
    const FiniteDist q = exact_joint(fair);
    EXPECT(is_ci(q, q.set_of({"X1"}), q.set_of({"X2", "X3"}), NodeSet{}));
    EXPECT(!is_ci(q, q.set_of({"X2"}), q.set_of({"X3"}), NodeSet{}));
    EXPECT_THROWS_AS(intervene(coin, {NodeSet{9}, {{0.5, 0.5}}}), UnknownNode);
}

TEST_CASE(model_marginalization) {
    const DiscreteMscm chain = chain_model();
    EXPECT(serialize_mscm(marginalize_mscm(chain, NodeSet{})) == serialize_mscm(chain));
    const DiscreteMscm ac = marginalize_mscm(chain, nodes(chain.graph, "b"));
    EXPECT(ac.graph == marginalize(chain.graph, nodes(chain.graph, "b")));
    const FiniteDist full = exact_joint(chain);
    EXPECT(max_abs_difference(exact_joint(ac), marginal(full, full.set_of({"a", "c"}))) < 1e-12);

    const DiscreteMscm cyc = model("fourcycle_mscm.json");
    const FiniteDist pc = exact_joint(cyc);
    for (const char* w : {"X1", "X2,X3", "X1,X3", "X4"}) {
        const NodeSet ws = nodes(cyc.graph, w);
        const DiscreteMscm m = marginalize_mscm(cyc, ws);
        EXPECT(m.graph == marginalize(cyc.graph, ws));
        EXPECT(max_abs_difference(exact_joint(m), marginal(pc, pc.all() - ws)) < 1e-12);
    }
}

TEST_CASE(random_models) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20; ++i) {
        const DiscreteMscm m = random_mscm(rng);
        EXPECT(loop_solutions_compatible(m, derive_loop_solutions(m)));
        const FiniteDist p = exact_joint(m);
        EXPECT(check(m.graph, p, PropertyKind::gdGMP).verdict == Verdict::Pass);
    }
}

TEST_CASE(sampling_matches_exact_joint) {
    const DiscreteMscm cyc = model("fourcycle_mscm.json");
    const FiniteDist p = exact_joint(cyc);
    const std::size_t n = 200000;
    const auto draws = sample_mscm(cyc, n, 5);
    REQUIRE(draws.size() == n);
    std::map<std::uint64_t, double> freq;
    for (const auto& a : draws) freq[p.key(a)] += 1.0 / static_cast<double>(n);
    for (const auto& [k, pr] : p.cells()) EXPECT_NEAR(freq[k], pr, 0.01);
    EXPECT(sample_mscm(cyc, 10, 5) == sample_mscm(cyc, 10, 5));
}

TEST_CASE(gaussian_covariances) {
    const Hedg two = Hedg::from_labels({"a", "b"}, {});
    const GaussianLinearSem id = sem(two, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
    EXPECT((gaussian_covariance(id) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
    EXPECT(gaussian_ci(id, NodeSet{0}, NodeSet{1}, NodeSet{}));

    const Hedg self = Hedg::from_labels({"w"}, {{"w", "w"}});
    const GaussianLinearSem loop = sem(self, Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Identity(1, 1));
    EXPECT_NEAR(gaussian_covariance(loop)(0, 0), 4.0, 1e-12);
    EXPECT_THROWS_AS(sem(self, Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Identity(1, 1)),
                     SingularSystem);

    // a -> b -> c with coefficients 2 and 3: path products.
    const Hedg chain = Hedg::from_labels({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
    b(1, 0) = 2.0;
    b(2, 1) = 3.0;
    const Eigen::MatrixXd s = gaussian_covariance(sem(chain, b, Eigen::MatrixXd::Identity(3, 3)));
    EXPECT_NEAR(s(1, 1), 5.0, 1e-12);
    EXPECT_NEAR(s(0, 2), 6.0, 1e-12);
    EXPECT_NEAR(s(1, 2), 15.0, 1e-12);
    EXPECT_NEAR(s(2, 2), 46.0, 1e-12);

    const Hedg edge = Hedg::from_labels({"a", "b"}, {{"a", "b"}});
    Eigen::MatrixXd be = Eigen::MatrixXd::Zero(2, 2);
    be(1, 0) = 0.7;
    EXPECT(!gaussian_ci(sem(edge, be, Eigen::MatrixXd::Identity(2, 2)), NodeSet{0}, NodeSet{1}, NodeSet{}));

    // Conditioning on a deterministic copy is singular.
    const Hedg copy = Hedg::from_labels({"a", "b", "c"}, {{"a", "b"}});
    Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(3, 3);
    bc(1, 0) = 1.0;
    Eigen::MatrixXd lc = Eigen::MatrixXd::Identity(3, 3);
    lc(1, 1) = 0.0;
    EXPECT_THROWS_AS(gaussian_ci(sem(copy, bc, lc), NodeSet{2}, NodeSet{0}, NodeSet{0, 1}), SingularConditioning);
}

TEST_CASE(linear_feedback_variant) {
    const GaussianLinearSem s = parse_sem(fixture_text("nomarg_linear_sem.json"));
    const Hedg& g = s.graph;
    EXPECT(gaussian_ci_defect(s, nodes(g, "X"), nodes(g, "Z"), nodes(g, "W,Y")) < 1e-10);
    EXPECT(!gaussian_ci(s, nodes(g, "X"), nodes(g, "Z"), nodes(g, "-")));

    // The self-loop form equals the form W = Z + E_W.
    const Hedg plain = Hedg::from_labels({"W", "X", "Y", "Z"}, {{"Z", "W"}, {"W", "X"}, {"X", "Y"}, {"Y", "Z"}});
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
    b(plain.index("W"), plain.index("Z")) = 1.0;
    b(plain.index("X"), plain.index("W")) = 0.5;
    b(plain.index("Y"), plain.index("X")) = 1.0;
    b(plain.index("Z"), plain.index("Y")) = 0.5;
    const Eigen::MatrixXd direct = gaussian_covariance(sem(plain, b, Eigen::MatrixXd::Identity(4, 4)));
    EXPECT((gaussian_covariance(s) - direct).cwiseAbs().maxCoeff() < 1e-12);

    // Sample covariance of the sampler agrees with the closed form.
    const Samples smp = cyclic_example(CyclicExample::Linear, 3, 200000);
    for (const char* a : {"W", "X", "Y", "Z"})
        for (const char* c : {"W", "X", "Y", "Z"}) {
            const auto& xa = smp.columns[smp.index(a)];
            const auto& xc = smp.columns[smp.index(c)];
            double acc = 0.0;
            for (std::size_t k = 0; k < xa.size(); ++k) acc += xa[k] * xc[k];
            const double expected = direct(plain.index(a), plain.index(c));
            EXPECT_NEAR(acc / static_cast<double>(xa.size()), expected, 0.03 * std::max(1.0, std::fabs(expected)));
        }
}

TEST_CASE(cmi_null_calibration) {
    Samples s;
    s.names = {"A", "B"};
    s.columns.assign(2, std::vector<double>(100000));
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (auto& col : s.columns)
        for (auto& v : col) v = normal(rng);
    const CmiResult r = cmi_estimate(s, 0, 1, {}, 2, 100, 23);
    EXPECT(r.statistic < r.quantile(0.95));
    EXPECT(r.null.size() == 100);
    EXPECT(std::is_sorted(r.null.begin(), r.null.end()));
}

TEST_CASE(nonlinear_sampler_guard) {
    const Samples s = cyclic_example(CyclicExample::Nonlinear, 1, 100000);
    EXPECT(s.size() == 100000);
    EXPECT(s.guard_trips <= 10);
    EXPECT(s.names == (std::vector<std::string>{"W", "X", "Y", "Z"}));
}

TEST_MAIN()
