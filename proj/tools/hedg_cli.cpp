// Command-line front end: graph queries, transformations, orders, Markov
// checks, structural causal models and DOT export.
//
// Exit codes: 0 = holds / success, 1 = separation or property fails,
// 2 = usage or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hedg/core.hpp"
#include "hedg/dist.hpp"
#include "hedg/io.hpp"
#include "hedg/markov.hpp"
#include "hedg/orders.hpp"
#include "hedg/scm.hpp"
#include "hedg/separation.hpp"
#include "hedg/transform.hpp"

namespace {

using namespace hedg;
using nlohmann::json;

struct Options {
    std::string format = "text";
    std::string graph, dist, model, sem, witness, order, output;
    std::string x = "-", y = "-", z = "-", u = "-";
    std::string method, property, example, cmi, require;
    std::vector<std::string> targets;
    std::size_t samples = 1000, bins = 2, z_bins = 64, permutations = 100, max_report = 32;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    bool perfect = false;
};

struct Result {
    std::string text;
    json report;
    int code = 0;
};

std::string set_text(const std::vector<std::string>& labels) {
    std::string out = "{";
    for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? "," : "") + labels[i];
    return out + "}";
}

std::string set_text(const Hedg& g, const NodeSet& s) { return set_text(g.labels_of(s)); }

std::string set_text(const std::vector<std::string>& names, const NodeSet& s) {
    std::vector<std::string> labels;
    s.for_each([&](std::size_t i) { labels.push_back(names.at(i)); });
    return set_text(labels);
}

Hedg load_graph(const Options& o) { return parse_graph(read_text_file(o.graph)); }

SepQuery load_query(const Hedg& g, const Options& o) {
    return {g.set_of(split_labels(o.x)), g.set_of(split_labels(o.y)), g.set_of(split_labels(o.z))};
}

// ------------------------------------------------------------------ query

Result run_query(const Options& o, bool sigma) {
    const Hedg g = load_graph(o);
    const SepQuery q = load_query(g, o);
    std::string method = o.method.empty() ? (sigma ? "acyclify" : "moral") : o.method;
    bool separated = false;
    std::optional<SepWitness> witness;
    if (!sigma && method == "moral") {
        separated = d_separated(g, q);
    } else if (!sigma && method == "paths") {
        auto v = d_separated_paths(g, q);
        separated = v.separated;
        witness = v.witness;
    } else if (sigma && method == "acyclify") {
        separated = sigma_separated(g, q);
    } else if (sigma && method == "nodes") {
        auto v = sigma_separated_nodes(g, q);
        separated = v.separated;
        witness = v.witness;
    } else if (sigma && method == "margcrit") {
        separated = sigma_separated_margcrit(g, q);
    } else {
        throw InvalidInput("unknown method '" + method + "' for this criterion");
    }
    const std::string name = sigma ? "sigma-separated" : "d-separated";
    Result r;
    r.text = (separated ? "" : "NOT ") + name + "\n";
    if (witness) r.text += "open path: " + format_witness(g, *witness) + "\n";
    r.report = {{"criterion", sigma ? "sigma" : "d"},
                {"method", method},
                {"x", g.labels_of(q.x)},
                {"y", g.labels_of(q.y)},
                {"z", g.labels_of(q.z)},
                {"separated", separated}};
    if (witness) r.report["witness"] = format_witness(g, *witness);
    r.code = separated ? 0 : 1;
    return r;
}

// ------------------------------------------------------------------ transform

Result graph_result(const Hedg& g) {
    Result r;
    r.text = serialize_graph(g);
    r.report = json::parse(r.text);
    return r;
}

Result run_transform(const Options& o, const std::string& op) {
    const Hedg g = load_graph(o);
    if (op == "marginalize") return graph_result(marginalize(g, g.set_of(split_labels(o.u))));
    if (op == "augment") return graph_result(augment(g));
    if (op == "acyclify") return graph_result(acyclify(g));
    if (op == "acag") return graph_result(acyclic_augment(g));
    if (op == "quotient") return graph_result(scc_quotient(g));
    if (op == "dmg") return graph_result(induced_dmg(g));
    Result r;
    r.text = serialize_ugraph(moralize(g));
    r.report = json::parse(r.text);
    return r;
}

// ------------------------------------------------------------------ order

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

Result run_order_find(const Options& o) {
    const Hedg g = load_graph(o);
    Result r;
    if (o.perfect) {
        const auto ord = find_perfect_elimination(g);
        if (!ord) {
            r.text = "no perfect elimination order\n";
            r.report = {{"kind", "perfect_elimination"}, {"order", nullptr}};
            r.code = 1;
            return r;
        }
        r.text = join(order_labels(g, *ord)) + "\n";
        r.report = {{"kind", "perfect_elimination"}, {"order", order_labels(g, *ord)}};
        return r;
    }
    const auto ord = find_pseudo_topological(g);
    r.text = join(order_labels(g, ord)) + "\n";
    r.report = {{"kind", "pseudo_topological"}, {"order", order_labels(g, ord)}};
    return r;
}

Result run_order_check(const Options& o) {
    const Hedg g = load_graph(o);
    const TotalOrder ord = order_from_labels(g, split_labels(o.order));
    const OrderReport rep = classify_order(g, ord);
    struct Row {
        const char* name;
        bool value;
        const std::optional<OrderWitness>* witness;
    };
    const std::optional<OrderWitness> none;
    const Row rows[] = {{"topological", rep.topological, &rep.topological_witness},
                        {"pseudo_topological", rep.pseudo_topological, &rep.pseudo_topological_witness},
                        {"assembling", rep.assembling, &rep.assembling_witness},
                        {"perfect_elimination", rep.perfect_elimination, &rep.perfect_elimination_witness},
                        {"quasi_topological", rep.quasi_topological, &none}};
    Result r;
    r.report = {{"order", order_labels(g, ord)}};
    bool required_ok = o.require.empty();
    for (const auto& row : rows) {
        r.text += std::string(row.name) + ": " + (row.value ? "yes" : "no");
        r.report[row.name] = row.value;
        if (*row.witness) {
            r.text += " (node " + g.label((*row.witness)->node) + ", set " + set_text(g, (*row.witness)->set) + ")";
            r.report[std::string(row.name) + "_witness"] = {{"node", g.label((*row.witness)->node)},
                                                            {"set", g.labels_of((*row.witness)->set)}};
        }
        r.text += "\n";
        if (o.require == row.name) required_ok = row.value;
    }
    if (!o.require.empty() && std::none_of(std::begin(rows), std::end(rows), [&](const Row& row) {
            return o.require == row.name;
        }))
        throw InvalidInput("unknown order kind '" + o.require + "'");
    r.code = required_ok ? 0 : 1;
    return r;
}

// ------------------------------------------------------------------ markov

struct MarkovInputs {
    Hedg g;
    FiniteDist p;
    std::optional<TotalOrder> ord;
    std::optional<FiniteDist> witness;
};

MarkovInputs load_markov(const Options& o) {
    MarkovInputs in{load_graph(o), parse_dist(read_text_file(o.dist)), std::nullopt, std::nullopt};
    if (!o.order.empty()) in.ord = order_from_labels(in.g, split_labels(o.order));
    if (!o.witness.empty()) in.witness = parse_dist(read_text_file(o.witness));
    return in;
}

json violation_json(const MarkovReport& rep, const MarkovViolation& v) {
    json j = {{"x", json::array()}, {"y", json::array()}, {"z", json::array()}, {"defect", v.defect}};
    auto names = [&](const NodeSet& s) {
        json a = json::array();
        s.for_each([&](std::size_t i) { a.push_back(rep.labels.at(i)); });
        return a;
    };
    j["x"] = names(v.x);
    j["y"] = names(v.y);
    j["z"] = names(v.z);
    if (!v.context.empty()) j["context"] = names(v.context);
    if (v.inconclusive) j["inconclusive"] = true;
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

Result run_markov_check(const Options& o) {
    const auto kind = property_from_name(o.property);
    if (!kind) throw InvalidInput("unknown property '" + o.property + "'");
    const MarkovInputs in = load_markov(o);
    MarkovOptions opt;
    opt.max_reported = o.max_report;
    const MarkovReport rep = check(in.g, in.p, *kind, in.ord ? &*in.ord : nullptr,
                                   in.witness ? &*in.witness : nullptr, opt);
    Result r;
    std::ostringstream head;
    head << property_name(*kind) << ": " << verdict_name(rep.verdict) << " (" << rep.checked
         << " statements checked, max defect " << format_double(rep.max_defect) << ")\n";
    r.text = head.str();
    r.report = {{"property", property_name(*kind)},
                {"verdict", verdict_name(rep.verdict)},
                {"checked", rep.checked},
                {"max_defect", rep.max_defect},
                {"violations", json::array()}};
    for (const auto& v : rep.violations) {
        if (*kind == PropertyKind::aFP_ipf) {
            r.text += "  ancestral set " + set_text(rep.labels, v.x) + ": no factorization over the moral cliques, IPF gap " +
                      format_double(v.defect);
        } else {
            r.text += "  " + set_text(rep.labels, v.x) + " _||_ " + set_text(rep.labels, v.y) + " | " +
                      set_text(rep.labels, v.z);
            if (!v.context.empty()) r.text += "  [within " + set_text(rep.labels, v.context) + "]";
            r.text += "  defect " + format_double(v.defect);
        }
        r.text += std::string(v.inconclusive ? " (inconclusive)" : "") + "\n";
        if (!v.detail.empty()) r.text += "    " + v.detail + "\n";
        r.report["violations"].push_back(violation_json(rep, v));
    }
    r.code = rep.verdict == Verdict::Pass ? 0 : 1;
    return r;
}

Result run_markov_audit(const Options& o) {
    const MarkovInputs in = load_markov(o);
    const HierarchyReport rep =
        hierarchy_audit(in.g, in.p, in.ord ? &*in.ord : nullptr, in.witness ? &*in.witness : nullptr);
    Result r;
    r.report = {{"verdicts", json::object()}, {"conflicts", json::array()}, {"consistent", rep.consistent()}};
    for (auto kind : all_properties()) {
        const auto it = rep.verdicts.find(kind);
        if (it == rep.verdicts.end()) continue;
        r.text += std::string(property_name(kind)) + ": " + verdict_name(it->second) + "\n";
        r.report["verdicts"][property_name(kind)] = verdict_name(it->second);
    }
    for (const auto& c : rep.conflicts) {
        r.text += "conflict: " + c.premise + " => " + c.conclusion + (c.condition.empty() ? "" : " [" + c.condition + "]") + "\n";
        r.report["conflicts"].push_back({{"premise", c.premise}, {"conclusion", c.conclusion}, {"condition", c.condition}});
    }
    r.text += rep.consistent() ? "consistent\n" : "INCONSISTENT\n";
    r.code = rep.consistent() ? 0 : 1;
    return r;
}

// ------------------------------------------------------------------ scm

DiscreteMscm load_mscm(const Options& o) { return parse_mscm(read_text_file(o.model)); }

Result text_document(std::string text) {
    Result r;
    r.report = json::parse(text);
    r.text = std::move(text);
    return r;
}

Result run_scm_joint(const Options& o) { return text_document(serialize_dist(exact_joint(load_mscm(o)))); }

Result run_scm_sample(const Options& o) {
    Result r;
    if (!o.example.empty()) {
        CyclicExample kind;
        if (o.example == "nonlinear") kind = CyclicExample::Nonlinear;
        else if (o.example == "linear") kind = CyclicExample::Linear;
        else throw InvalidInput("unknown example '" + o.example + "' (nonlinear or linear)");
        const Samples s = cyclic_example(kind, o.seed, o.samples);
        if (!o.cmi.empty()) {
            // "X;Z|Y,W"
            const auto semi = o.cmi.find(';');
            const auto bar = o.cmi.find('|');
            if (semi == std::string::npos) throw InvalidInput("--cmi expects \"x;y|z1,z2\"");
            const std::string xs = o.cmi.substr(0, semi);
            const std::string ys = o.cmi.substr(semi + 1, bar == std::string::npos ? std::string::npos : bar - semi - 1);
            std::vector<std::size_t> zs;
            if (bar != std::string::npos)
                for (const auto& l : split_labels(o.cmi.substr(bar + 1))) zs.push_back(s.index(l));
            const CmiResult c = cmi_estimate(s, s.index(xs), s.index(ys), zs, o.bins, o.permutations, o.seed + 1, o.z_bins);
            std::ostringstream out;
            out << "statistic " << format_double(c.statistic) << "\nnull q95 " << format_double(c.quantile(0.95))
                << "\nnull q99 " << format_double(c.quantile(0.99)) << "\np-value " << format_double(c.p_value)
                << "\n" << (c.p_value < 0.05 ? "dependent" : "no dependence detected") << "\n";
            r.text = out.str();
            r.report = {{"statistic", c.statistic},
                        {"q95", c.quantile(0.95)},
                        {"q99", c.quantile(0.99)},
                        {"p_value", c.p_value},
                        {"guard_trips", s.guard_trips}};
            r.code = c.p_value < 0.05 ? 1 : 0;
            return r;
        }
        r.text = "W,X,Y,Z\n";
        r.report = json::array();
        for (std::size_t k = 0; k < s.size(); ++k) {
            r.text += format_double(s.columns[0][k]) + "," + format_double(s.columns[1][k]) + "," +
                      format_double(s.columns[2][k]) + "," + format_double(s.columns[3][k]) + "\n";
            r.report.push_back({s.columns[0][k], s.columns[1][k], s.columns[2][k], s.columns[3][k]});
        }
        return r;
    }
    const DiscreteMscm m = load_mscm(o);
    const auto rows = sample_mscm(m, o.samples, o.seed);
    r.text = join(m.graph.labels()) + "\n";
    r.report = json::array();
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + std::to_string(row[i]);
        r.text += line + "\n";
        r.report.push_back(row);
    }
    return r;
}

Result run_scm_intervene(const Options& o) {
    const DiscreteMscm m = load_mscm(o);
    std::map<std::size_t, std::vector<double>> repl;
    for (const auto& t : o.targets) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw InvalidInput("--target expects NODE=p0,p1,...");
        const std::size_t v = m.graph.index(t.substr(0, eq));
        std::vector<double> probs;
        std::stringstream ss(t.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) probs.push_back(parse_probability_text(item));
        if (!repl.emplace(v, std::move(probs)).second) throw InvalidInput("node targeted twice");
    }
    InterventionSpec spec;
    for (auto& [v, probs] : repl) {
        spec.targets.set(v);
        spec.replacement.push_back(std::move(probs));
    }
    return text_document(serialize_mscm(intervene(m, spec)));
}

Result run_scm_marginalize(const Options& o) {
    const DiscreteMscm m = load_mscm(o);
    return text_document(serialize_mscm(marginalize_mscm(m, m.graph.set_of(split_labels(o.u)))));
}

Result run_scm_gaussian_ci(const Options& o) {
    const GaussianLinearSem s = parse_sem(read_text_file(o.sem));
    const SepQuery q = load_query(s.graph, o);
    const double defect = gaussian_ci_defect(s, q.x, q.y, q.z);
    const bool ci = defect < o.tol;
    Result r;
    r.text = std::string(ci ? "" : "NOT ") + "conditionally independent (max |conditional cross-covariance| " +
             format_double(defect) + ")\n";
    r.report = {{"independent", ci}, {"defect", defect}, {"tol", o.tol}};
    r.code = ci ? 0 : 1;
    return r;
}

// ------------------------------------------------------------------ export

Result run_export_dot(const Options& o) {
    const std::string text = read_text_file(o.graph);
    Result r;
    r.text = is_ugraph_document(text) ? to_dot(parse_ugraph(text)) : to_dot(parse_graph(text));
    r.report = {{"dot", r.text}};
    return r;
}

// Canonical re-serialization of any supported document.
Result run_export_json(const Options& o) {
    const std::string text = read_text_file(o.graph);
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("expected a JSON object");
    if (doc.contains("mechanisms")) return text_document(serialize_mscm(parse_mscm(text)));
    if (doc.contains("error_covariance")) return text_document(serialize_sem(parse_sem(text)));
    if (doc.contains("variables")) return text_document(serialize_dist(parse_dist(text)));
    if (doc.contains("uedges")) return text_document(serialize_ugraph(parse_ugraph(text)));
    return text_document(serialize_graph(parse_graph(text)));
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Directed graphs with hyperedges: separation, transformations, orders, Markov properties, "
                 "structural causal models"};
    app.require_subcommand(1);
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("-o,--output", o.output, "Write the result to this file instead of standard output");
    std::function<Result()> action;

    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::function<Result()> f) {
        CLI::App* sub = parent->add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&action, f] { action = f; });
        return sub;
    };
    auto graph_opt = [&](CLI::App* sub) { sub->add_option("-g,--graph", o.graph, "Graph file")->required(); };
    auto query_opts = [&](CLI::App* sub) {
        sub->add_option("-x", o.x, "First node set (comma-separated, '-' = empty)")->required();
        sub->add_option("-y", o.y, "Second node set")->required();
        sub->add_option("-z", o.z, "Conditioning set (default empty)");
    };

    CLI::App* query = app.add_subcommand("query", "Separation queries");
    query->require_subcommand(1);
    query->fallthrough();
    for (bool sigma : {false, true}) {
        auto* sub = leaf(query, sigma ? "ssep" : "dsep", sigma ? "sigma-separation" : "d-separation",
                         [&o, sigma] { return run_query(o, sigma); });
        graph_opt(sub);
        query_opts(sub);
        sub->add_option("--method", o.method,
                        sigma ? "acyclify (default), nodes or margcrit" : "moral (default) or paths");
    }

    CLI::App* transform = app.add_subcommand("transform", "Graph transformations");
    transform->require_subcommand(1);
    transform->fallthrough();
    for (const char* op : {"marginalize", "moralize", "augment", "acyclify", "acag", "quotient", "dmg"}) {
        const std::string name = op;
        auto* sub = leaf(transform, name, "Apply " + name, [&o, name] { return run_transform(o, name); });
        graph_opt(sub);
        if (name == "marginalize") sub->add_option("-u", o.u, "Nodes to marginalize out")->required();
    }

    CLI::App* order = app.add_subcommand("order", "Total orders");
    order->require_subcommand(1);
    order->fallthrough();
    {
        auto* find = leaf(order, "find", "Find an assembling pseudo-topological order", [&o] { return run_order_find(o); });
        graph_opt(find);
        find->add_flag("--perfect", o.perfect, "Search for a perfect elimination order instead");
        auto* chk = leaf(order, "check", "Classify a total order", [&o] { return run_order_check(o); });
        graph_opt(chk);
        chk->add_option("--order", o.order, "Comma-separated node order")->required();
        chk->add_option("--require", o.require, "Exit 1 unless this kind holds");
    }

    CLI::App* markov = app.add_subcommand("markov", "Markov properties");
    markov->require_subcommand(1);
    markov->fallthrough();
    {
        auto* chk = leaf(markov, "check", "Check one Markov property", [&o] { return run_markov_check(o); });
        graph_opt(chk);
        chk->add_option("-p,--dist", o.dist, "Distribution file")->required();
        chk->add_option("--property", o.property, "Property name, e.g. dGMP")->required();
        chk->add_option("--order", o.order, "Total order (oLMP, rFP)");
        chk->add_option("--witness", o.witness, "Joint over the augmented graph (witness kinds)");
        chk->add_option("--max-report", o.max_report, "Maximum number of violations listed");
        auto* audit = leaf(markov, "audit", "Check all properties and their implications", [&o] { return run_markov_audit(o); });
        graph_opt(audit);
        audit->add_option("-p,--dist", o.dist, "Distribution file")->required();
        audit->add_option("--order", o.order, "Total order");
        audit->add_option("--witness", o.witness, "Joint over the augmented graph");
    }

    CLI::App* scm = app.add_subcommand("scm", "Structural causal models");
    scm->require_subcommand(1);
    scm->fallthrough();
    {
        auto* joint = leaf(scm, "joint", "Exact observational distribution", [&o] { return run_scm_joint(o); });
        joint->add_option("-m,--model", o.model, "Model file")->required();
        auto* sample = leaf(scm, "sample", "Draw samples", [&o] { return run_scm_sample(o); });
        sample->add_option("-m,--model", o.model, "Model file");
        sample->add_option("--example", o.example, "Built-in feedback loop: nonlinear or linear");
        sample->add_option("-n", o.samples, "Number of draws");
        sample->add_option("--seed", o.seed, "Random seed");
        sample->add_option("--cmi", o.cmi, "Estimate CMI \"x;y|z1,z2\" instead of printing samples (examples only)");
        sample->add_option("--bins", o.bins, "Bins for x and y");
        sample->add_option("--z-bins", o.z_bins, "Bins per conditioning variable");
        sample->add_option("--permutations", o.permutations, "Permutations for the null distribution");
        auto* iv = leaf(scm, "intervene", "Stochastic intervention", [&o] { return run_scm_intervene(o); });
        iv->add_option("-m,--model", o.model, "Model file")->required();
        iv->add_option("-t,--target", o.targets, "NODE=p0,p1,... (repeatable)")->required();
        auto* marg = leaf(scm, "marginalize", "Marginalize nodes out of the model", [&o] { return run_scm_marginalize(o); });
        marg->add_option("-m,--model", o.model, "Model file")->required();
        marg->add_option("-u", o.u, "Nodes to marginalize out")->required();
        auto* gci = leaf(scm, "gaussian-ci", "Conditional independence in a linear Gaussian model",
                         [&o] { return run_scm_gaussian_ci(o); });
        gci->add_option("-s,--sem", o.sem, "Linear model file")->required();
        query_opts(gci);
        gci->add_option("--tol", o.tol, "Tolerance on the conditional cross-covariance");
    }

    CLI::App* exp = app.add_subcommand("export", "Export");
    exp->require_subcommand(1);
    exp->fallthrough();
    {
        auto* dot = leaf(exp, "dot", "Graphviz DOT", [&o] { return run_export_dot(o); });
        graph_opt(dot);
        auto* js = leaf(exp, "json", "Canonical JSON of a graph, distribution or model file",
                        [&o] { return run_export_json(o); });
        js->add_option("-i,--input", o.graph, "Input document")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!action) {
        std::cerr << "error: no command given\n";
        return 2;
    }
    try {
        const Result r = action();
        const std::string out = o.format == "json" ? r.report.dump(2) + "\n" : r.text;
        if (o.output.empty()) {
            std::cout << out;
        } else {
            std::ofstream f(o.output, std::ios::binary);
            if (!f) throw InvalidInput("cannot write '" + o.output + "'");
            f << out;
        }
        return r.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
