#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hedg/dist.hpp"
#include "hedg/graph.hpp"
#include "hedg/scm.hpp"

namespace hedg {

// A document that is not valid JSON or does not have the expected fields.
struct ParseError : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Probability literal: a JSON number, or a string holding a decimal ("0.125")
// or a rational ("1/8").
double parse_probability_text(std::string_view text);

// Graph document:
//   {"nodes": [...], "edges": [[from, to], ...], "hyperedges": [[...], ...]}
// Hyperedges are re-maximalized on load; singletons may be listed and are
// dropped. Undirected graphs use "uedges" instead of "edges"/"hyperedges".
Hedg parse_graph(std::string_view text);
UGraph parse_ugraph(std::string_view text);
bool is_ugraph_document(std::string_view text);
// Canonical, byte-stable text (natural label order, two-space indent,
// trailing newline).
std::string serialize_graph(const Hedg& g);
std::string serialize_ugraph(const UGraph& g);

// Distribution document:
//   {"variables": [{"name": "X1", "domain": 2}, ...],
//    "cells": [[[0, 1], 0.25], [[1, 0], "3/4"], ...]}
FiniteDist parse_dist(std::string_view text);
std::string serialize_dist(const FiniteDist& p);

// Model document:
//   {"graph": {...},
//    "domains": {"X1": 2, ...},
//    "components": [[0.5, 0.5], ...],
//    "errors": [{"hyperedge": ["X1", "X2"], "components": [0]}, ...],
//    "mechanisms": [{"node": "X1", "components": [0], "table": [...]}, ...]}
// Error spaces are matched to the maximal hyperedges (singletons included);
// spaces without components may be omitted. Mechanism tables range over the
// node's parents in canonical order, then the listed components, last fastest.
DiscreteMscm parse_mscm(std::string_view text);
std::string serialize_mscm(const DiscreteMscm& m);

// Linear Gaussian model document:
//   {"graph": {...},
//    "coefficients": [[from, to, b], ...],          // b = B(to, from)
//    "error_covariance": [[v, w, lambda], ...]}     // symmetric entries
GaussianLinearSem parse_sem(std::string_view text);
std::string serialize_sem(const GaussianLinearSem& s);

// Deterministic DOT. Every stored hyperedge becomes a point-shaped synthetic
// node with arrows to its members.
std::string to_dot(const Hedg& g);
std::string to_dot(const UGraph& g);

// Whole file as text; throws InvalidInput when it cannot be read.
std::string read_text_file(const std::string& path);

// Comma-separated labels; "-" (or an empty string) is the empty set.
std::vector<std::string> split_labels(std::string_view text);

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

}  // namespace hedg
