// Command-line surface: identity verification, relation discovery,
// expression evaluation, contraction-scheme enumeration and vertex-table
// export. Exit codes: 0 all asserted checks pass, 1 identity failure,
// 2 usage or input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ewgeom/plan.hpp"
#include "ewgeom/report.hpp"

namespace {

using namespace ewgeom;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(cat("cannot open output file '", path, "'"));
    out << text;
}

int run_verify(const std::string& suite, const std::string& stat, int samples,
               std::uint64_t seed, double tol, const std::string& out_file) {
    SuiteConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.identity_tol = tol;
    cfg.bosonic = stat == "bosonic" || stat == "both";
    cfg.fermionic = stat == "fermionic" || stat == "both";
    if (suite != "all") cfg.suites = {suite};

    SuiteResults res = run_identity_suite(cfg);
    for (const CheckResult& c : res.checks) {
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name;
        if (c.statistics != "n/a") std::cout << " (" << c.statistics << ")";
        std::cout << "  max-rel " << c.max_rel_residual;
        if (!c.asserted) std::cout << "  [reported only]";
        std::cout << "\n";
    }
    for (const RelationResult& r : res.relations) {
        std::cout << "[relations] family " << r.family << " (" << r.statistics
                  << "): nullspace dimension " << r.nullspace_dim << "\n";
        for (const auto& v : r.basis) {
            std::cout << "    [";
            for (std::size_t i = 0; i < v.size(); ++i)
                std::cout << (i ? ", " : "") << v[i];
            std::cout << "]\n";
        }
    }
    if (!out_file.empty()) write_text(out_file, report_document(res, cfg).dump(2) + "\n");
    return res.all_asserted_pass() ? 0 : 1;
}

ScalarFamily family_by_name(const std::string& name, const std::string& stat) {
    Parity p = stat == "fermionic" ? Parity::Odd : Parity::Even;
    if (name == "I") return family_I();
    if (name == "J") return family_J();
    if (name == "IJ") return family_IJ();
    if (name == "S") return family_S(p);
    if (name == "Sfootnote") return family_S_footnote(p);
    if (name == "Sprime") return family_Sprime(p);
    if (name == "T18") return family_T18(p);
    if (name == "phi4") return family_phi4_routes();
    if (name == "mixed") return family_mixed(p);
    if (name == "threeleg") return family_threeleg();
    throw Error(cat("unknown family '", name,
                    "'; expected one of I, J, IJ, S, Sfootnote, Sprime, T18, phi4, "
                    "mixed, threeleg"));
}

int run_relations(const std::string& family, const std::string& stat, int samples,
                  std::uint64_t seed, const std::string& out_file) {
    std::vector<std::string> stats;
    bool stat_sensitive =
        family == "S" || family == "Sfootnote" || family == "Sprime" || family == "T18" ||
        family == "mixed";
    if (!stat_sensitive)
        stats = {"bosonic"};
    else if (stat == "both")
        stats = {"bosonic", "fermionic"};
    else
        stats = {stat};

    SuiteConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    SuiteResults res;
    for (const std::string& st : stats) {
        ScalarFamily fam = family_by_name(family, st);
        RelationBasis rb = find_linear_relations(fam, samples, seed);
        RelationResult rr;
        rr.family = fam.name;
        rr.statistics = fam.statistics;
        rr.nullspace_dim = rb.nullspace_dim;
        rr.basis = rb.basis;
        res.relations.push_back(rr);
        std::cout << "family " << fam.name << " (" << fam.statistics
                  << "): nullspace dimension " << rb.nullspace_dim << "\n";
        for (const auto& v : rb.basis) {
            std::cout << "  [";
            for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << v[i];
            std::cout << "]\n";
        }
    }
    if (!out_file.empty()) write_text(out_file, report_document(res, cfg).dump(2) + "\n");
    return 0;
}

Slot parse_slot(const ordered_json& j) {
    std::string sp = j.at(0).get<std::string>();
    std::string va = j.at(1).get<std::string>();
    Slot s{};
    if (sp == "spacetime") s.species = Species::Spacetime;
    else if (sp == "spinor") s.species = Species::Spinor;
    else if (sp == "spinor-dotted" || sp == "dotted") s.species = Species::SpinorDotted;
    else if (sp == "isospin") s.species = Species::Isospin;
    else throw Error(cat("unknown species '", sp, "'"));
    if (va == "up") s.variance = Variance::Up;
    else if (va == "down") s.variance = Variance::Down;
    else throw Error(cat("unknown variance '", va, "'"));
    return s;
}

struct BindingSetup {
    SymbolTable table;
    Bindings bindings;
};

// Bindings file: {"free_indices": [...], "symbols": {name: {"slots":
// [[species, variance], ...], "parity": "even"|"odd", "data": spec}}}
// where spec is "metric", "epsilon", "delta", "random", "conj:<name>" or a
// flat [re, im] entry array in row-major slot order.
BindingSetup load_bindings(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw Error(cat("cannot open bindings file '", path, "'"));
    ordered_json doc = ordered_json::parse(in);

    BindingSetup setup;
    if (doc.contains("free_indices"))
        for (const auto& ix : doc["free_indices"])
            setup.table.free_indices.insert(ix.get<std::string>());

    GeneratorPool pool;
    std::vector<std::pair<std::string, std::string>> conj_later;
    for (const auto& [name, spec] : doc.at("symbols").items()) {
        SymbolDecl decl;
        for (const auto& js : spec.at("slots")) decl.slots.push_back(parse_slot(js));
        std::string parity = spec.value("parity", "even");
        decl.parity = parity == "odd" ? Parity::Odd : Parity::Even;
        setup.table.symbols[name] = decl;

        const auto& data = spec.at("data");
        if (data.is_string()) {
            std::string d = data.get<std::string>();
            if (d.rfind("conj:", 0) == 0) {
                conj_later.emplace_back(name, d.substr(5));
                continue;
            }
            if (d == "metric") {
                if (decl.slots.size() != 2 || decl.slots[0].species != Species::Spacetime)
                    throw Error(cat("'", name, "': metric data needs two spacetime slots"));
                setup.bindings.emplace(
                    name, decl.slots[0].variance == Variance::Up ? metric_upper()
                                                                 : metric_lower());
            } else if (d == "epsilon") {
                if (decl.slots.size() != 2)
                    throw Error(cat("'", name, "': epsilon data needs two slots"));
                setup.bindings.emplace(
                    name, decl.slots[0].variance == Variance::Up
                              ? epsilon_upper(decl.slots[0].species)
                              : epsilon_lower(decl.slots[0].species));
            } else if (d == "delta") {
                if (decl.slots.size() != 2)
                    throw Error(cat("'", name, "': delta data needs two slots"));
                setup.bindings.emplace(name, delta(decl.slots[0].species));
            } else if (d == "random") {
                RngStream rng = RngStream::keyed(seed, cat("cli-bind-", name), 0);
                setup.bindings.emplace(
                    name, sample_random(decl.slots, decl.parity, rng,
                                        decl.parity == Parity::Odd ? &pool : nullptr));
            } else {
                throw Error(cat("'", name, "': unknown data spec '", d, "'"));
            }
        } else if (data.is_array()) {
            Tensor t(decl.slots, decl.parity);
            std::vector<int> idx(decl.slots.size(), 0);
            if (data.size() != t.size())
                throw Error(cat("'", name, "': expected ", t.size(), " entries, found ",
                                data.size()));
            for (std::size_t flat = 0; flat < t.size(); ++flat) {
                t.unflatten(flat, idx);
                const auto& e = data[flat];
                t.set(idx, GrassmannElement(cplx{e.at(0).get<double>(),
                                                 e.at(1).get<double>()}));
            }
            setup.bindings.emplace(name, std::move(t));
        } else {
            throw Error(cat("'", name, "': bad data spec"));
        }
    }
    for (const auto& [name, src] : conj_later) {
        auto it = setup.bindings.find(src);
        if (it == setup.bindings.end())
            throw Error(cat("'", name, "': conj source '", src, "' has no data"));
        Tensor c = it->second.conjugate();
        if (c.slots() != setup.table.symbols[name].slots)
            throw Error(cat("'", name, "': conjugate slots do not match its declaration"));
        setup.bindings.emplace(name, std::move(c));
    }
    return setup;
}

ordered_json tensor_to_json(const Tensor& t) {
    ordered_json out;
    ordered_json slots = ordered_json::array();
    for (const Slot& s : t.slots())
        slots.push_back({species_name(s.species), variance_name(s.variance)});
    out["slots"] = slots;
    ordered_json entries = ordered_json::array();
    std::vector<int> idx(t.rank(), 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        t.unflatten(flat, idx);
        const GrassmannElement& g = t[flat];
        if (g.is_zero()) continue;
        ordered_json je;
        je["index"] = idx;
        ordered_json terms = ordered_json::array();
        for (const auto& [key, c] : g.terms()) {
            ordered_json jt;
            std::vector<int> gens;
            for (int b = 0; b < 64; ++b)
                if (key & (GrassmannElement::Key{1} << b)) gens.push_back(b);
            jt["generators"] = gens;
            jt["re"] = c.real();
            jt["im"] = c.imag();
            terms.push_back(jt);
        }
        je["terms"] = terms;
        entries.push_back(je);
    }
    out["entries"] = entries;
    return out;
}

int run_eval(const std::string& expr_arg, const std::string& bind_file, std::uint64_t seed) {
    BindingSetup setup = load_bindings(bind_file, seed);
    std::vector<std::string> lines;
    {
        std::ifstream in(expr_arg);
        if (in) {
            std::string line;
            while (std::getline(in, line)) {
                auto hash = line.find('#');
                if (hash != std::string::npos) line = line.substr(0, hash);
                bool blank = true;
                for (char c : line)
                    if (c != ' ' && c != '\t' && c != '\r') blank = false;
                if (!blank) lines.push_back(line);
            }
        } else {
            lines.push_back(expr_arg);
        }
    }
    ordered_json results = ordered_json::array();
    for (const std::string& text : lines) {
        ExpressionAST ast = parse_expression(text, setup.table);
        ContractionPlan plan = plan_contraction(ast, setup.table);
        Tensor value = evaluate_plan(plan, ast, setup.table, setup.bindings);
        ordered_json jr;
        jr["expression"] = text;
        jr["plan_flops"] = plan.total_flops();
        jr["value"] = tensor_to_json(value);
        results.push_back(jr);
    }
    std::cout << results.dump(2) << "\n";
    return 0;
}

int run_enumerate(const std::string& spec) {
    // SPEC: comma-separated groups "species[+-]:count"; '-' (down) is the
    // default variance.
    std::vector<Slot> slots;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        std::string group = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
        pos = comma == std::string::npos ? spec.size() : comma + 1;
        auto colon = group.find(':');
        if (colon == std::string::npos)
            throw Error(cat("bad slot group '", group, "'; expected species[+-]:count"));
        std::string sp = group.substr(0, colon);
        int count = std::stoi(group.substr(colon + 1));
        Variance v = Variance::Down;
        if (!sp.empty() && (sp.back() == '+' || sp.back() == '-')) {
            v = sp.back() == '+' ? Variance::Up : Variance::Down;
            sp.pop_back();
        }
        Species species;
        if (sp == "spacetime") species = Species::Spacetime;
        else if (sp == "spinor") species = Species::Spinor;
        else if (sp == "spinor-dotted" || sp == "dotted") species = Species::SpinorDotted;
        else if (sp == "isospin") species = Species::Isospin;
        else throw Error(cat("unknown species '", sp, "'"));
        for (int i = 0; i < count; ++i) slots.push_back({species, v});
    }
    auto schemes = enumerate_pair_contractions(slots);
    std::cout << "slots:";
    for (std::size_t i = 0; i < slots.size(); ++i) std::cout << " " << i << "=" << slots[i].str();
    std::cout << "\n" << schemes.size() << " scheme(s)\n";
    for (std::size_t i = 0; i < schemes.size(); ++i)
        std::cout << "scheme " << i << ": " << schemes[i].str() << "\n";
    return 0;
}

ordered_json vertex_table_json(const VertexTable& table) {
    ordered_json doc;
    doc["term"] = table.term;
    ordered_json entries = ordered_json::array();
    for (const VertexEntry& e : table.entries) {
        std::string legs;
        for (std::size_t i = 0; i < e.legs.size(); ++i) {
            if (i) legs += "*";
            legs += leg_name(e.legs[i]);
        }
        if (legs.empty()) legs = "1";
        for (const auto& [k, c] : e.coeff.terms) {
            auto row = [&](const Rational& r, int ipow) {
                if (r.is_zero()) return;
                ordered_json je;
                je["legs"] = legs;
                je["coeff_num"] = r.num;
                je["coeff_den"] = r.den;
                je["i_power"] = ipow;
                je["trig_tags"] = k.str();
                je["structure"] = e.tag;
                entries.push_back(je);
            };
            row(c.re, 0);
            row(c.im, 1);
        }
    }
    doc["entries"] = entries;
    return doc;
}

int run_vertices(const std::string& term, double theta, double q, double m, double lambda,
                 const std::string& out_file, const std::string& json_file) {
    EWParams p{q, theta, m, lambda};
    p.validate();
    VertexTable table = extract_vertices(term);
    VertexCheckResult check = validate_vertex_table(table, p, 42, 3);
    std::string csv = vertex_table_csv(table);
    if (!out_file.empty())
        write_text(out_file, csv);
    else if (json_file.empty())
        std::cout << csv;
    if (!json_file.empty()) write_text(json_file, vertex_table_json(table).dump(2) + "\n");
    std::cerr << "validated " << check.monomials_checked
              << " leg groups against numerical differentiation; max relative deviation "
              << check.max_rel_deviation << "\n";
    return check.max_rel_deviation <= 1e-8 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-spinor / electroweak tensor identity laboratory"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run identity suites and write a report");
    std::string v_suite = "all", v_stat = "both", v_out;
    int v_samples = 100;
    std::uint64_t v_seed = 42;
    double v_tol = 1e-10;
    verify->add_option("--suite", v_suite, "all|qed|geometry|ew|I|J|S|Sprime|T18|phi4|mixed")
        ->check(CLI::IsMember(
            {"all", "qed", "geometry", "ew", "I", "J", "S", "Sprime", "T18", "phi4", "mixed"}));
    verify->add_option("--stat", v_stat, "bosonic|fermionic|both")
        ->check(CLI::IsMember({"bosonic", "fermionic", "both"}));
    verify->add_option("--samples", v_samples, "samples per check")->check(CLI::PositiveNumber);
    verify->add_option("--seed", v_seed, "RNG seed");
    verify->add_option("--tol", v_tol, "relative tolerance for identity checks");
    verify->add_option("--out", v_out, "write the JSON report here");

    auto* relations = app.add_subcommand("relations", "discover linear relations in a family");
    std::string r_family, r_stat = "both", r_out;
    int r_samples = 100;
    std::uint64_t r_seed = 42;
    relations->add_option("--family", r_family, "I|J|IJ|S|Sfootnote|Sprime|T18|phi4|mixed|threeleg")
        ->required();
    relations->add_option("--stat", r_stat, "bosonic|fermionic|both")
        ->check(CLI::IsMember({"bosonic", "fermionic", "both"}));
    relations->add_option("--samples", r_samples, "sample count")->check(CLI::PositiveNumber);
    relations->add_option("--seed", r_seed, "RNG seed");
    relations->add_option("--out", r_out, "write the JSON report here");

    auto* eval = app.add_subcommand("eval", "evaluate index-notation expressions");
    std::string e_expr, e_bind;
    std::uint64_t e_seed = 42;
    eval->add_option("--expr", e_expr, "expression file or literal expression")->required();
    eval->add_option("--bind", e_bind, "bindings JSON file")->required();
    eval->add_option("--seed", e_seed, "RNG seed for random bindings");

    auto* enumerate = app.add_subcommand("enumerate", "print pair-contraction schemes");
    std::string n_slots;
    enumerate->add_option("--slots", n_slots, "e.g. spinor-:4,dotted-:4")->required();

    auto* vertices = app.add_subcommand("vertices", "extract and export a vertex table");
    std::string x_term, x_out, x_json;
    double x_theta = 0.5, x_q = 0.65, x_m = 1.0, x_lambda = 0.13;
    vertices->add_option("--term", x_term, "higgs-kinetic|higgs-potential|yukawa")
        ->required()
        ->check(CLI::IsMember({"higgs-kinetic", "higgs-potential", "yukawa"}));
    vertices->add_option("--theta", x_theta, "mixing angle");
    vertices->add_option("--q", x_q, "gauge coupling");
    vertices->add_option("--m", x_m, "vacuum magnitude");
    vertices->add_option("--lambda", x_lambda, "quartic coupling");
    vertices->add_option("--out", x_out, "write the CSV table here");
    vertices->add_option("--json", x_json, "write the table as JSON here");

    try {
        app.parse(argc, argv);
        if (*verify) return run_verify(v_suite, v_stat, v_samples, v_seed, v_tol, v_out);
        if (*relations) return run_relations(r_family, r_stat, r_samples, r_seed, r_out);
        if (*eval) return run_eval(e_expr, e_bind, e_seed);
        if (*enumerate) return run_enumerate(n_slots);
        if (*vertices)
            return run_vertices(x_term, x_theta, x_q, x_m, x_lambda, x_out, x_json);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
