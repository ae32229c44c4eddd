// File formats, canonical serialization and DOT export.

#include <filesystem>

#include "check.hpp"

using namespace hedg;

TEST_CASE(probability_literals) {
    EXPECT(parse_probability_text("1/8") == 0.125);
    EXPECT(parse_probability_text("0.25") == 0.25);
    EXPECT_THROWS_AS(parse_probability_text("1/0"), ParseError);
    EXPECT_THROWS_AS(parse_probability_text("abc"), ParseError);
    EXPECT(format_double(1.0) == "1.0");
    EXPECT(format_double(0.1) == "0.1");
}

TEST_CASE(fixture_round_trips) {
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(HEDG_FIXTURE_DIR)) {
        const std::string text = read_text_file(entry.path().string());
        std::string again;
        if (text.find("\"mechanisms\"") != std::string::npos) {
            again = serialize_mscm(parse_mscm(text));
            EXPECT(serialize_mscm(parse_mscm(again)) == again);
        } else if (text.find("\"error_covariance\"") != std::string::npos) {
            again = serialize_sem(parse_sem(text));
        } else if (text.find("\"variables\"") != std::string::npos) {
            const FiniteDist p = parse_dist(text);
            again = serialize_dist(p);
            EXPECT(parse_dist(again) == p);
        } else if (is_ugraph_document(text)) {
            const UGraph g = parse_ugraph(text);
            again = serialize_ugraph(g);
            EXPECT(parse_ugraph(again) == g);
        } else {
            const Hedg g = parse_graph(text);
            again = serialize_graph(g);
            EXPECT(parse_graph(again) == g);
        }
        if (again != text) std::cerr << "  not canonical: " << entry.path() << "\n";
        EXPECT(again == text);
        ++seen;
    }
    EXPECT(seen >= 20);
}

TEST_CASE(graph_documents) {
    const Hedg g = parse_graph(R"({"nodes": ["v10", "v2", "v1"], "edges": [["v1", "v10"]],
                                  "hyperedges": [["v1"], ["v1", "v2"], ["v1", "v2", "v10"]]})");
    EXPECT(g.labels() == (std::vector<std::string>{"v1", "v2", "v10"}));
    EXPECT(g.hyperedges().size() == 1);
    EXPECT_THROWS_AS(parse_graph(R"({"nodes": ["a"], "edges": [["a", "b"]]})"), UnknownNode);
    EXPECT_THROWS_AS(parse_graph("{not json"), ParseError);
    EXPECT_THROWS_AS(parse_graph(R"({"edges": []})"), ParseError);
    EXPECT_THROWS_AS(parse_dist(R"({"variables": [{"name": "a", "domain": 2}], "cells": [[[0], "1/3"]]})"),
                     InvalidInput);
}

TEST_CASE(dot_export) {
    const Hedg edge = Hedg::from_labels({"a", "b"}, {{"a", "b"}});
    EXPECT(to_dot(edge) == "digraph G {\n  \"a\";\n  \"b\";\n  \"a\" -> \"b\";\n}\n");
    EXPECT(to_dot(Hedg{}) == "digraph G {\n}\n");
    const std::string coin = to_dot(hedg_test::fixture_graph("threecoin.json"));
    EXPECT(coin.find("shape=point") != std::string::npos);
    std::size_t arrows = 0;
    for (std::size_t pos = coin.find("->"); pos != std::string::npos; pos = coin.find("->", pos + 1)) ++arrows;
    EXPECT(arrows == 3);
    const UGraph u = UGraph::from_labels({"a", "b"}, {{"a", "b"}});
    EXPECT(to_dot(u).find("\"a\" -- \"b\";") != std::string::npos);
}

TEST_MAIN()
