#pragma once

// Command-line surface: subcommand dispatch, CSV/JSON argument decoding and
// the payload schemas. Everything here is a thin shell over the library;
// payloads are emitted with sorted keys so identical inputs give identical
// bytes.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <osrep/equivalence.hpp>
#include <osrep/families.hpp>
#include <osrep/functors.hpp>
#include <osrep/root_lattice.hpp>

namespace osrep {

struct CommandResult {
    bool ok = true;
    nlohmann::json payload;
    std::vector<std::string> diagnostics;
};

namespace cli_detail {

inline std::vector<long long> parse_csv_longs(const std::string& csv) {
    std::vector<long long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stoll(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "'" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty vector");
    return out;
}

inline GVec parse_vector(const Quiver& q, const std::string& csv) {
    GVec x = parse_csv_longs(csv);
    check_indexing(q, x);
    return x;
}

// Bound spellings: "delta", "<k>delta" (e.g. "2delta"), a single integer used
// at every vertex, or a full comma-separated vector.
inline GVec parse_bound(const Quiver& q, const std::string& spec) {
    auto delta_pos = spec.find("delta");
    if (delta_pos != std::string::npos) {
        if (!q.has_delta())
            throw Error(ErrorCode::NoDelta, "graph " + q.name + " has no delta");
        long long k = 1;
        std::string prefix = spec.substr(0, delta_pos);
        if (!prefix.empty()) {
            try {
                k = std::stoll(prefix);
            } catch (const std::exception&) {
                throw Error(ErrorCode::ParseError, "bad delta multiple '" + prefix + "'");
            }
        }
        if (k < 1 || delta_pos + 5 != spec.size())
            throw Error(ErrorCode::ParseError, "bad bound '" + spec + "'");
        GVec b = q.delta;
        for (long long& v : b) v *= k;
        return b;
    }
    std::vector<long long> nums = parse_csv_longs(spec);
    if (nums.size() == 1) return GVec(q.size(), nums[0]);
    check_indexing(q, nums);
    return nums;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

inline nlohmann::json vertex_map(const Quiver& q, const std::vector<int>& vals) {
    nlohmann::json j = nlohmann::json::object();
    for (int v = 0; v < q.size(); ++v) j[q.vertex_ids[v]] = vals[v];
    return j;
}

inline nlohmann::json character_map(const Quiver& q, const Character& chi) {
    nlohmann::json j = nlohmann::json::object();
    for (int v = 0; v < q.size(); ++v) j[q.vertex_ids[v]] = chi.values[v];
    return j;
}

inline Parity parse_parity(const std::string& s) {
    if (s == "even") return Parity::Even;
    if (s == "odd") return Parity::Odd;
    throw Error(ErrorCode::ParseError, "parity must be 'even' or 'odd', got '" + s + "'");
}

inline std::string csv_of(const Quiver& q, const GVec& x) {
    std::string s;
    for (int v = 0; v < q.size(); ++v) {
        if (v) s += ",";
        s += std::to_string(x[v]);
    }
    return s;
}

}  // namespace cli_detail

// --- subcommand bodies -----------------------------------------------------

inline CommandResult cmd_roots(const std::string& graph, const std::string& classify,
                               const std::string& bound) {
    Quiver q = parse_graph_name(graph);
    if (classify.empty() == bound.empty())
        throw Error(ErrorCode::ParseError, "roots needs exactly one of --classify or --bound");
    CommandResult res;
    if (!classify.empty()) {
        RootClass rc = classify_vector(q, cli_detail::parse_vector(q, classify));
        res.payload = root_class_to_json(rc);
        return res;
    }
    GVec box = cli_detail::parse_bound(q, bound);
    auto rows = enumerate_positive_roots(q, box);
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& [x, rc] : rows) {
        nlohmann::json row = root_class_to_json(rc);
        row["vector"] = cli_detail::csv_of(q, x);
        jrows.push_back(std::move(row));
    }
    res.payload = {{"graph", q.name},
                   {"order", q.vertex_ids},
                   {"count", jrows.size()},
                   {"roots", std::move(jrows)}};
    return res;
}

inline CommandResult cmd_construct(const std::string& family, const std::string& params_text,
                                   bool have_seed, std::uint64_t seed, const std::string& out_file,
                                   double tol) {
    if (params_text.empty() && !have_seed)
        throw Error(ErrorCode::ParseError, "construct needs --params or an explicit --seed");
    ParameterPoint pt;
    Representation rep;
    if (!params_text.empty()) {
        nlohmann::json j;
        if (!params_text.empty() && params_text[0] == '@') {
            j = cli_detail::read_json_file(params_text.substr(1));
        } else {
            try {
                j = nlohmann::json::parse(params_text);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::ParseError, std::string("bad --params: ") + e.what());
            }
        }
        pt = parameter_point_from_json(j);
        if (pt.family.empty()) pt.family = family;
        if (pt.family != family && !family.empty())
            throw Error(ErrorCode::ParseError,
                        "--family " + family + " conflicts with params family " + pt.family);
        try {
            rep = construct_delta_family(pt, tol);
        } catch (const Error& e) {
            // A free-coordinate-only point is fine: fill in the dependent
            // parameters first, then build.
            if (e.code() != ErrorCode::ParseError) throw;
            pt = solve_family_constraint(pt.family, pt.params);
            rep = construct_delta_family(pt, tol);
        }
    } else {
        FamilySample s = construct_family_seeded(family, seed);
        pt = std::move(s.point);
        rep = std::move(s.rep);
    }
    OrthoReport report = orthoscalarity_report(rep);
    CommandResult res;
    res.payload = {{"family", pt.family},
                   {"params", pt.params},
                   {"dims", cli_detail::vertex_map(rep.quiver, rep.dims)},
                   {"character", cli_detail::character_map(rep.quiver, report.character)},
                   {"defect", report.defect},
                   {"schur", is_schur(rep)}};
    if (!out_file.empty()) {
        cli_detail::write_json_file(out_file, rep_to_json(rep, report.character));
        res.payload["written"] = out_file;
    }
    return res;
}

inline CommandResult cmd_verify(const std::string& rep_file, double tol) {
    auto [rep, chi] = rep_from_json(cli_detail::read_json_file(rep_file));
    OrthoReport report = orthoscalarity_report(rep);
    CommandResult res;
    res.payload = {{"orthoscalar", report.defect <= tol},
                   {"defect", report.defect},
                   {"character", cli_detail::character_map(rep.quiver, report.character)},
                   {"schur", is_schur(rep)}};
    return res;
}

inline CommandResult cmd_functor(const std::string& rep_file, const std::string& parity, int k,
                                 const std::string& out_file, double tol) {
    auto [rep, chi] = rep_from_json(cli_detail::read_json_file(rep_file));
    Character c = chi ? *chi : orthoscalarity_report(rep).character;
    FunctorResult fr = functor_chain(rep, c, k, cli_detail::parse_parity(parity), tol);
    OrthoReport report = orthoscalarity_report(fr.rep);
    CommandResult res;
    res.payload = {{"start_parity", parity},
                   {"k", k},
                   {"dims_before", cli_detail::vertex_map(rep.quiver, rep.dims)},
                   {"dims", cli_detail::vertex_map(fr.rep.quiver, fr.rep.dims)},
                   {"character", cli_detail::character_map(fr.rep.quiver, fr.character)},
                   {"defect", report.defect},
                   {"schur", is_schur(fr.rep)}};
    if (!out_file.empty()) {
        cli_detail::write_json_file(out_file, rep_to_json(fr.rep, fr.character));
        res.payload["written"] = out_file;
    }
    return res;
}

inline CommandResult cmd_decompose(const std::string& rep_file, const std::string& out_prefix,
                                   double tol, std::uint64_t seed) {
    auto [rep, chi] = rep_from_json(cli_detail::read_json_file(rep_file));
    std::vector<Representation> parts = split_decomposition(rep, tol, seed);
    nlohmann::json jparts = nlohmann::json::array();
    for (size_t i = 0; i < parts.size(); ++i) {
        OrthoReport report = orthoscalarity_report(parts[i]);
        nlohmann::json jp = {{"dims", cli_detail::vertex_map(parts[i].quiver, parts[i].dims)},
                             {"defect", report.defect},
                             {"schur", is_schur(parts[i])}};
        if (!out_prefix.empty()) {
            std::string path = out_prefix + "." + std::to_string(i) + ".json";
            cli_detail::write_json_file(path, rep_to_json(parts[i], report.character));
            jp["written"] = path;
        }
        jparts.push_back(std::move(jp));
    }
    CommandResult res;
    res.payload = {{"count", parts.size()}, {"summands", std::move(jparts)}};
    return res;
}

inline CommandResult cmd_reduce(const std::string& graph, const std::string& vector_csv) {
    Quiver q = parse_graph_name(graph);
    GVec d = cli_detail::parse_vector(q, vector_csv);
    ReflectionPath path = singular_reduction_path(q, d);
    CommandResult res;
    res.payload = path_to_json(q, path);
    res.payload["graph"] = q.name;
    res.payload["replay_ok"] = apply_path(q, path) == d;
    return res;
}

inline CommandResult cmd_graphs(const std::string& graph) {
    CommandResult res;
    if (!graph.empty()) {
        res.payload = quiver_to_json(parse_graph_name(graph));
        return res;
    }
    res.payload = {{"catalog",
                    {{{"name", "A<n>"}, {"constraint", "n >= 1"}, {"extended", false}},
                     {{"name", "D<n>"}, {"constraint", "n >= 4"}, {"extended", false}},
                     {{"name", "E6"}, {"extended", false}},
                     {{"name", "E7"}, {"extended", false}},
                     {{"name", "E8"}, {"extended", false}},
                     {{"name", "A~<n>"}, {"constraint", "n even >= 4"}, {"extended", true}},
                     {{"name", "D~<n>"}, {"constraint", "n >= 4"}, {"extended", true}},
                     {{"name", "E6~"}, {"extended", true}},
                     {{"name", "E7~"}, {"extended", true}},
                     {{"name", "E8~"}, {"extended", true}}}}};
    return res;
}

// --- rendering ---------------------------------------------------------------

namespace cli_detail {

inline std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Root listings become aligned rows; everything else prints one "key: value"
// line per top-level payload key.
inline void render_table(const nlohmann::json& payload, std::ostream& out) {
    if (payload.is_object() && payload.contains("roots")) {
        out << "vector\tclass\tq\tL\n";
        for (const auto& row : payload.at("roots")) {
            out << row.at("vector").get<std::string>() << "\t"
                << row.at("class").get<std::string>() << "\t" << row.at("q").dump() << "\t"
                << (row.contains("L") ? row.at("L").dump() : "-") << "\n";
        }
        return;
    }
    if (payload.is_object()) {
        for (const auto& [k, v] : payload.items()) out << k << ": " << scalar_text(v) << "\n";
        return;
    }
    out << payload.dump(2) << "\n";
}

}  // namespace cli_detail

// Exit codes: 0 success, 2 for anything wrong with the request itself,
// 1 for internal numerical failures.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"root lattices and locally scalar quiver representations"};
    app.require_subcommand(1);
    app.fallthrough();

    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::string format = "json";
    app.add_option("--tol", tol, "numerical tolerance")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "table"}));

    std::string graph, classify, bound;
    auto* roots = app.add_subcommand("roots", "classify a vector or list roots in a box");
    roots->add_option("--graph", graph, "catalog graph name")->required();
    roots->add_option("--classify", classify, "comma-separated vector in catalog order");
    roots->add_option("--bound", bound, "delta, <k>delta, one integer, or a full vector");

    std::string family, params_text, out_file;
    auto* construct = app.add_subcommand("construct", "build a delta-family representation");
    construct->add_option("--family", family, "extended graph name")->required();
    construct->add_option("--params", params_text, "parameter JSON (inline or @file)");
    construct->add_option("-o,--output", out_file, "write the representation JSON here");

    std::string verify_file;
    auto* verify = app.add_subcommand("verify", "orthoscalarity and Schur report");
    verify->add_option("file", verify_file, "representation JSON file")->required();

    std::string functor_file, parity;
    int chain_k = 1;
    std::string functor_out;
    auto* functor = app.add_subcommand("functor", "apply an alternating reflection chain");
    functor->add_option("file", functor_file, "representation JSON file")->required();
    functor->add_option("--parity", parity, "parity of the first sweep")->required();
    functor->add_option("--k", chain_k, "chain length")->check(CLI::NonNegativeNumber);
    functor->add_option("-o,--output", functor_out, "write the result here");

    std::string decompose_file, out_prefix;
    auto* decompose = app.add_subcommand("decompose", "split into Schur summands");
    decompose->add_option("file", decompose_file, "representation JSON file")->required();
    decompose->add_option("-o,--output", out_prefix, "summand file prefix");

    std::string reduce_graph, reduce_vector;
    auto* reduce = app.add_subcommand("reduce", "sweep a singular root down to a simple one");
    reduce->add_option("--graph", reduce_graph, "catalog graph name")->required();
    reduce->add_option("--vector", reduce_vector, "comma-separated vector")->required();

    std::string graphs_name;
    auto* graphs = app.add_subcommand("graphs", "catalog naming rules or one graph's layout");
    graphs->add_option("--graph", graphs_name, "catalog graph name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        CommandResult res;
        if (*roots)
            res = cmd_roots(graph, classify, bound);
        else if (*construct)
            res = cmd_construct(family, params_text, seed_opt->count() > 0, seed, out_file, tol);
        else if (*verify)
            res = cmd_verify(verify_file, tol);
        else if (*functor)
            res = cmd_functor(functor_file, parity, chain_k, functor_out, tol);
        else if (*decompose)
            res = cmd_decompose(decompose_file, out_prefix, tol, seed);
        else if (*reduce)
            res = cmd_reduce(reduce_graph, reduce_vector);
        else
            res = cmd_graphs(graphs_name);
        if (format == "table")
            cli_detail::render_table(res.payload, out);
        else
            out << res.payload.dump(2) << "\n";
        return 0;
    } catch (const Error& e) {
        nlohmann::json j{{"error", error_code_name(e.code())}, {"message", e.what()}};
        err << j.dump(2) << "\n";
        return is_input_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        nlohmann::json j{{"error", "Internal"}, {"message", e.what()}};
        err << j.dump(2) << "\n";
        return 1;
    }
}

}  // namespace osrep
