// Relational queries, SCCs, districts, loops and graph classes.

#include "check.hpp"
#include "hedg/core.hpp"

using namespace hedg;
using hedg_test::fixture_graph;
using hedg_test::nodes;

namespace {

Hedg chain() { return Hedg::from_labels({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}); }

}  // namespace

TEST_CASE(parents_and_children) {
    const Hedg cyc = fixture_graph("fourcycle.json");
    const Hedg mg = fixture_graph("margfig.json");
    EXPECT(parents(cyc, nodes(cyc, "X1")) == nodes(cyc, "X2"));
    EXPECT(parents(cyc, NodeSet{}).empty());
    EXPECT(parents(mg, nodes(mg, "v5")) == nodes(mg, "v4,v6"));
    EXPECT(children(cyc, nodes(cyc, "X2")) == nodes(cyc, "X1"));
    EXPECT(children(cyc, NodeSet{}).empty());
    EXPECT(children(mg, nodes(mg, "v2")) == nodes(mg, "v1,v3,v4"));
}

TEST_CASE(ancestors_and_descendants) {
    const Hedg cyc = fixture_graph("fourcycle.json");
    const Hedg mg = fixture_graph("margfig.json");
    EXPECT(ancestors(cyc, nodes(cyc, "X1")) == cyc.all());
    EXPECT(ancestors(cyc, NodeSet{}).empty());
    EXPECT(ancestors(mg, nodes(mg, "v5")) == nodes(mg, "v1,v2,v4,v5,v6,v7"));
    EXPECT(descendants(cyc, nodes(cyc, "X1")) == cyc.all());
    EXPECT(descendants(mg, mg.all()) == mg.all());
    const Hedg c = chain();
    EXPECT(nondescendants(c, nodes(c, "b")) == nodes(c, "a"));
    // Union property of the reflexive closure.
    for (std::size_t v = 0; v < mg.size(); ++v)
        for (std::size_t w = 0; w < mg.size(); ++w)
            EXPECT(ancestors(mg, NodeSet{v, w}) == (ancestors(mg, NodeSet{v}) | ancestors(mg, NodeSet{w})));
}

TEST_CASE(strongly_connected_components) {
    const Hedg acy = fixture_graph("acyfig.json");
    const std::vector<NodeSet> expected = {nodes(acy, "v1"), nodes(acy, "v2,v3,v4"), nodes(acy, "v5,v6"),
                                           nodes(acy, "v7,v8")};
    EXPECT(scc_partition(acy) == expected);
    const Hedg edgeless = Hedg::from_labels({"a", "b", "c"}, {});
    EXPECT(scc_partition(edgeless).size() == 3);
    const Hedg cyc = fixture_graph("fourcycle.json");
    REQUIRE(scc_partition(cyc).size() == 1);
    EXPECT(scc_partition(cyc)[0] == cyc.all());
    for (std::size_t v = 0; v < acy.size(); ++v)
        EXPECT(scc(acy, v) == (ancestors(acy, NodeSet{v}) & descendants(acy, NodeSet{v})));
}

TEST_CASE(districts) {
    const Hedg mg = fixture_graph("margfig.json");
    EXPECT(district(mg, mg.index("v4")) == nodes(mg, "v4,v5,v7"));
    const Hedg c = chain();
    EXPECT(district(c, c.index("b")) == nodes(c, "b"));
    const Hedg coin = fixture_graph("threecoin.json");
    EXPECT(district(coin, coin.index("X1")) == coin.all());
    for (std::size_t v = 0; v < mg.size(); ++v)
        for (std::size_t w = 0; w < mg.size(); ++w)
            EXPECT(district(mg, v).test(w) == district(mg, w).test(v));
}

TEST_CASE(induced_subgraphs_and_ancestral_sets) {
    const Hedg acy = fixture_graph("acyfig.json");
    EXPECT(induced_subhedg(acy, acy.all()) == acy);
    const Hedg sub = induced_subhedg(acy, nodes(acy, "v5,v6,v7"));
    const Hedg expected =
        Hedg::from_labels({"v5", "v6", "v7"}, {{"v5", "v6"}, {"v6", "v5"}}, {{"v6", "v7"}});
    EXPECT(sub == expected);
    EXPECT(induced_subhedg(acy, NodeSet{}).size() == 0);

    const Hedg mg = fixture_graph("margfig.json");
    EXPECT(is_ancestral(mg, mg.all()));
    EXPECT(ancestral_closure(mg, nodes(mg, "v3")).labels() == (std::vector<std::string>{"v1", "v2", "v3", "v7"}));
    const Hedg cyc = fixture_graph("fourcycle.json");
    EXPECT(!is_ancestral(cyc, nodes(cyc, "X1")));
}

TEST_CASE(loop_sets) {
    const Hedg cyc = fixture_graph("fourcycle.json");
    const auto loops = loop_set(cyc);
    EXPECT(loops.size() == 5);
    EXPECT(loops.back() == cyc.all());
    const Hedg c = chain();
    EXPECT(loop_set(c).size() == 3);
    const Hedg acy = fixture_graph("acyfig.json");
    const auto acy_loops = loop_set(acy);
    std::vector<NodeSet> expected;
    for (std::size_t v = 0; v < acy.size(); ++v) expected.push_back(NodeSet{v});
    expected.push_back(nodes(acy, "v5,v6"));
    expected.push_back(nodes(acy, "v7,v8"));
    expected.push_back(nodes(acy, "v2,v3,v4"));
    EXPECT(acy_loops.size() == expected.size());
    for (const auto& s : expected) EXPECT(std::find(acy_loops.begin(), acy_loops.end(), s) != acy_loops.end());
    // Every loop lies inside one strongly connected component.
    for (const auto& s : acy_loops) EXPECT(s.subset_of(scc(acy, s.first())));
}

TEST_CASE(graph_classes) {
    const auto cyc = classify(fixture_graph("fourcycle.json"));
    EXPECT(!cyc.is_dag);
    EXPECT(!cyc.is_mdag);
    EXPECT(cyc.is_dmg);
    const auto coin = classify(fixture_graph("threecoin.json"));
    EXPECT(coin.is_mdag);
    EXPECT(!coin.is_dmg);
    const auto c = classify(chain());
    EXPECT(c.is_dag && c.is_mdag && c.is_dmg && c.is_admg);
    const Hedg self = Hedg::from_labels({"a"}, {{"a", "a"}});
    EXPECT(!classify(self).is_mdag);
}

TEST_CASE(unknown_nodes_are_rejected) {
    const Hedg c = chain();
    EXPECT_THROWS_AS(c.index("zzz"), UnknownNode);
    EXPECT_THROWS_AS(parents(c, NodeSet{7}), UnknownNode);
    EXPECT_THROWS_AS(Hedg::from_labels({"a", "a"}, {}), InvalidInput);
}

TEST_MAIN()
