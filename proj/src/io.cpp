#include "hedg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace hedg {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

const json& field(const json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
    return doc.at(name);
}

const json& array_field(const json& doc, const char* name, bool optional = false) {
    static const json empty = json::array();
    if (optional && (!doc.is_object() || !doc.contains(name))) return empty;
    const json& a = field(doc, name);
    if (!a.is_array()) throw ParseError(std::string("field \"") + name + "\" must be a list");
    return a;
}

std::string label_of(const json& j) {
    if (!j.is_string()) throw ParseError("node labels must be strings");
    std::string s = j.get<std::string>();
    if (s.empty()) throw ParseError("node labels must be non-empty");
    return s;
}

std::vector<std::string> labels_of_json(const json& j) {
    if (!j.is_array()) throw ParseError("expected a list of labels");
    std::vector<std::string> out;
    for (const auto& x : j) out.push_back(label_of(x));
    return out;
}

std::size_t count_of(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError(std::string(what) + " must be a non-negative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

double probability_of(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_probability_text(j.get<std::string>());
    throw ParseError("probabilities must be numbers or strings such as \"1/8\"");
}

double number_of(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_probability_text(j.get<std::string>());
    throw ParseError("expected a number");
}

std::string quote(const std::string& s) { return json(s).dump(); }

std::string inline_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
    return out + "]";
}

std::vector<std::string> quoted(const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (const auto& l : labels) out.push_back(quote(l));
    return out;
}

// A list with one row per line, or "[]" when empty.
std::string block_list(const std::vector<std::string>& rows, const std::string& indent) {
    if (rows.empty()) return "[]";
    std::string out = "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out += indent + "  " + rows[i] + (i + 1 < rows.size() ? ",\n" : "\n");
    return out + indent + "]";
}

Hedg graph_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("a graph must be a JSON object");
    auto nodes = labels_of_json(array_field(doc, "nodes"));
    std::vector<Hedg::Edge> edges;
    for (const auto& e : array_field(doc, "edges", true)) {
        if (!e.is_array() || e.size() != 2) throw ParseError("edges must be [from, to] pairs");
        edges.emplace_back(label_of(e[0]), label_of(e[1]));
    }
    std::vector<std::vector<std::string>> hyper;
    for (const auto& h : array_field(doc, "hyperedges", true)) hyper.push_back(labels_of_json(h));
    return Hedg::from_labels(std::move(nodes), edges, hyper);
}

std::string graph_text(const Hedg& g, const std::string& indent) {
    std::vector<std::string> edges, hyper;
    for (auto [a, b] : g.edges()) edges.push_back(inline_list({quote(g.label(a)), quote(g.label(b))}));
    for (const auto& h : g.hyperedges()) hyper.push_back(inline_list(quoted(g.labels_of(h))));
    const std::string in = indent + "  ";
    return "{\n" + in + "\"nodes\": " + inline_list(quoted(g.labels())) + ",\n" + in +
           "\"edges\": " + block_list(edges, in) + ",\n" + in + "\"hyperedges\": " + block_list(hyper, in) + "\n" +
           indent + "}";
}

std::string doubles_text(const std::vector<double>& xs) {
    std::vector<std::string> items;
    for (double x : xs) items.push_back(format_double(x));
    return inline_list(items);
}

template <class T>
std::string ints_text(const std::vector<T>& xs) {
    std::vector<std::string> items;
    for (auto x : xs) items.push_back(std::to_string(x));
    return inline_list(items);
}

}  // namespace

double parse_probability_text(std::string_view text) {
    auto number = [&](std::string_view part) {
        double v = 0.0;
        const char* first = part.data();
        const char* last = part.data() + part.size();
        while (first < last && *first == ' ') ++first;
        while (last > first && last[-1] == ' ') --last;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || first == last)
            throw ParseError("malformed number \"" + std::string(text) + "\"");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return number(text);
    const double den = number(text.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    return number(text.substr(0, slash)) / den;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw Error("cannot format number");
    std::string s(buf, ptr);
    // Keep integral values recognisably real ("1.0" rather than "1").
    if (s.find_first_of(".eE") == std::string::npos && std::isfinite(x)) s += ".0";
    return s;
}

// ------------------------------------------------------------------ graphs

Hedg parse_graph(std::string_view text) { return graph_from_json(parse_json(text)); }

bool is_ugraph_document(std::string_view text) {
    const json doc = parse_json(text);
    return doc.is_object() && doc.contains("uedges");
}

UGraph parse_ugraph(std::string_view text) {
    const json doc = parse_json(text);
    auto nodes = labels_of_json(array_field(doc, "nodes"));
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : array_field(doc, "uedges", true)) {
        if (!e.is_array() || e.size() != 2) throw ParseError("uedges must be [a, b] pairs");
        edges.emplace_back(label_of(e[0]), label_of(e[1]));
    }
    return UGraph::from_labels(std::move(nodes), edges);
}

std::string serialize_graph(const Hedg& g) { return graph_text(g, "") + "\n"; }

std::string serialize_ugraph(const UGraph& g) {
    std::vector<std::string> edges;
    for (auto [a, b] : g.edges()) edges.push_back(inline_list({quote(g.label(a)), quote(g.label(b))}));
    return "{\n  \"nodes\": " + inline_list(quoted(g.labels())) + ",\n  \"uedges\": " + block_list(edges, "  ") +
           "\n}\n";
}

// ------------------------------------------------------------------ distributions

FiniteDist parse_dist(std::string_view text) {
    const json doc = parse_json(text);
    std::vector<Variable> vars;
    for (const auto& v : array_field(doc, "variables")) {
        Variable var;
        var.name = label_of(field(v, "name"));
        var.domain = count_of(field(v, "domain"), "domain");
        if (v.contains("values")) var.values = labels_of_json(v.at("values"));
        vars.push_back(std::move(var));
    }
    std::vector<std::pair<Assignment, double>> cells;
    for (const auto& c : array_field(doc, "cells")) {
        if (!c.is_array() || c.size() != 2 || !c[0].is_array())
            throw ParseError("cells must be [[values...], probability] pairs");
        Assignment a;
        for (const auto& x : c[0]) a.push_back(static_cast<std::uint32_t>(count_of(x, "cell values")));
        cells.emplace_back(std::move(a), probability_of(c[1]));
    }
    return FiniteDist(std::move(vars), cells);
}

std::string serialize_dist(const FiniteDist& p) {
    std::vector<std::string> vars, cells;
    for (const auto& v : p.variables()) {
        std::string row = "{\"name\": " + quote(v.name) + ", \"domain\": " + std::to_string(v.domain);
        if (!v.values.empty()) row += ", \"values\": " + inline_list(quoted(v.values));
        vars.push_back(row + "}");
    }
    for (const auto& [key, prob] : p.cells())
        cells.push_back("[" + ints_text(p.decode(key)) + ", " + format_double(prob) + "]");
    return "{\n  \"variables\": " + block_list(vars, "  ") + ",\n  \"cells\": " + block_list(cells, "  ") + "\n}\n";
}

// ------------------------------------------------------------------ models

DiscreteMscm parse_mscm(std::string_view text) {
    const json doc = parse_json(text);
    DiscreteMscm m;
    m.graph = graph_from_json(field(doc, "graph"));
    const Hedg& g = m.graph;
    const json& domains = field(doc, "domains");
    if (!domains.is_object()) throw ParseError("\"domains\" must map node labels to sizes");
    m.domains.assign(g.size(), 0);
    for (auto it = domains.begin(); it != domains.end(); ++it) m.domains[g.index(it.key())] = count_of(it.value(), "domain");
    for (std::size_t v = 0; v < g.size(); ++v)
        if (m.domains[v] == 0) throw ParseError("missing domain for node '" + g.label(v) + "'");
    for (const auto& c : array_field(doc, "components")) {
        if (!c.is_array()) throw ParseError("each error component is a list of probabilities");
        ErrorComponent comp;
        for (const auto& x : c) comp.probs.push_back(probability_of(x));
        m.components.push_back(std::move(comp));
    }
    const auto tilde = g.maximal_hyperedges();
    m.errors.resize(tilde.size());
    for (std::size_t f = 0; f < tilde.size(); ++f) m.errors[f].hyperedge = tilde[f];
    for (const auto& e : array_field(doc, "errors", true)) {
        const NodeSet h = g.set_of(labels_of_json(field(e, "hyperedge")));
        std::size_t f = 0;
        while (f < tilde.size() && tilde[f] != h) ++f;
        if (f == tilde.size()) throw ParseError("error space for a set that is not a maximal hyperedge");
        if (!m.errors[f].components.empty()) throw ParseError("duplicate error space");
        for (const auto& c : array_field(e, "components")) m.errors[f].components.push_back(count_of(c, "component index"));
    }
    m.mechanisms.resize(g.size());
    std::vector<bool> seen(g.size(), false);
    for (const auto& mech : array_field(doc, "mechanisms")) {
        const std::size_t v = g.index(label_of(field(mech, "node")));
        if (seen[v]) throw ParseError("duplicate mechanism for '" + g.label(v) + "'");
        seen[v] = true;
        Mechanism& out = m.mechanisms[v];
        out.parents = g.pa(v);
        for (const auto& c : array_field(mech, "components", true)) out.components.push_back(count_of(c, "component index"));
        for (const auto& x : array_field(mech, "table")) out.table.push_back(static_cast<std::uint32_t>(count_of(x, "table entry")));
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        if (!seen[v]) throw ParseError("missing mechanism for '" + g.label(v) + "'");
    m.validate();
    return m;
}

std::string serialize_mscm(const DiscreteMscm& m) {
    const Hedg& g = m.graph;
    std::vector<std::string> domains, comps, errors, mechs;
    for (std::size_t v = 0; v < g.size(); ++v) domains.push_back(quote(g.label(v)) + ": " + std::to_string(m.domains[v]));
    for (const auto& c : m.components) comps.push_back(doubles_text(c.probs));
    for (const auto& e : m.errors) {
        if (e.components.empty()) continue;
        errors.push_back("{\"hyperedge\": " + inline_list(quoted(g.labels_of(e.hyperedge))) +
                         ", \"components\": " + ints_text(e.components) + "}");
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        const Mechanism& mech = m.mechanisms[v];
        mechs.push_back("{\"node\": " + quote(g.label(v)) + ", \"components\": " + ints_text(mech.components) +
                        ", \"table\": " + ints_text(mech.table) + "}");
    }
    std::string dom = "{";
    for (std::size_t i = 0; i < domains.size(); ++i) dom += (i ? ", " : "") + domains[i];
    dom += "}";
    return "{\n  \"graph\": " + graph_text(g, "  ") + ",\n  \"domains\": " + dom +
           ",\n  \"components\": " + block_list(comps, "  ") + ",\n  \"errors\": " + block_list(errors, "  ") +
           ",\n  \"mechanisms\": " + block_list(mechs, "  ") + "\n}\n";
}

GaussianLinearSem parse_sem(std::string_view text) {
    const json doc = parse_json(text);
    GaussianLinearSem s;
    s.graph = graph_from_json(field(doc, "graph"));
    const auto n = static_cast<Eigen::Index>(s.graph.size());
    s.b = Eigen::MatrixXd::Zero(n, n);
    s.lambda = Eigen::MatrixXd::Zero(n, n);
    for (const auto& c : array_field(doc, "coefficients", true)) {
        if (!c.is_array() || c.size() != 3) throw ParseError("coefficients must be [from, to, value] triples");
        const auto from = static_cast<Eigen::Index>(s.graph.index(label_of(c[0])));
        const auto to = static_cast<Eigen::Index>(s.graph.index(label_of(c[1])));
        s.b(to, from) = number_of(c[2]);
    }
    for (const auto& c : array_field(doc, "error_covariance")) {
        if (!c.is_array() || c.size() != 3) throw ParseError("error_covariance entries must be [v, w, value] triples");
        const auto v = static_cast<Eigen::Index>(s.graph.index(label_of(c[0])));
        const auto w = static_cast<Eigen::Index>(s.graph.index(label_of(c[1])));
        s.lambda(v, w) = s.lambda(w, v) = number_of(c[2]);
    }
    s.validate();
    return s;
}

std::string serialize_sem(const GaussianLinearSem& s) {
    const Hedg& g = s.graph;
    std::vector<std::string> coef, cov;
    for (auto [from, to] : g.edges()) {
        const double b = s.b(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
        if (b != 0.0) coef.push_back(inline_list({quote(g.label(from)), quote(g.label(to)), format_double(b)}));
    }
    for (std::size_t v = 0; v < g.size(); ++v)
        for (std::size_t w = v; w < g.size(); ++w) {
            const double l = s.lambda(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w));
            if (l != 0.0) cov.push_back(inline_list({quote(g.label(v)), quote(g.label(w)), format_double(l)}));
        }
    return "{\n  \"graph\": " + graph_text(g, "  ") + ",\n  \"coefficients\": " + block_list(coef, "  ") +
           ",\n  \"error_covariance\": " + block_list(cov, "  ") + "\n}\n";
}

// ------------------------------------------------------------------ DOT

std::string to_dot(const Hedg& g) {
    std::string out = "digraph G {\n";
    for (const auto& l : g.labels()) out += "  " + quote(l) + ";\n";
    for (auto [a, b] : g.edges()) out += "  " + quote(g.label(a)) + " -> " + quote(g.label(b)) + ";\n";
    std::size_t k = 0;
    for (const auto& h : g.hyperedges()) {
        const std::string name = quote("hyperedge " + std::to_string(++k));
        out += "  " + name + " [shape=point, color=red];\n";
        for (const auto& l : g.labels_of(h)) out += "  " + name + " -> " + quote(l) + " [color=red];\n";
    }
    return out + "}\n";
}

std::string to_dot(const UGraph& g) {
    std::string out = "graph G {\n";
    for (const auto& l : g.labels()) out += "  " + quote(l) + ";\n";
    for (auto [a, b] : g.edges()) out += "  " + quote(g.label(a)) + " -- " + quote(g.label(b)) + ";\n";
    return out + "}\n";
}

// ------------------------------------------------------------------ helpers

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_labels(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty() || text == "-") return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        std::string item(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) throw ParseError("empty label in list \"" + std::string(text) + "\"");
        out.push_back(item.substr(b, e - b + 1));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace hedg
