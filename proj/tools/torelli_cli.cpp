// Command-line surface: cocycle/johnson/skew evaluations on automorphism
// specs, coefficient-module structure reports, character-theoretic torsion
// verdicts, and the built-in demonstrations.
//
// Exit codes: 0 success, 1 failed check or uncertified verdict, 2 schema or
// usage errors. Diagnostics go to stderr; reports go to stdout.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torelli/chartab.hpp"
#include "torelli/endo.hpp"
#include "torelli/errors.hpp"
#include "torelli/io.hpp"
#include "torelli/johnson.hpp"
#include "torelli/magnus.hpp"
#include "torelli/padic.hpp"
#include "torelli/verdicts.hpp"

namespace {

using nlohmann::json;
using namespace torelli;

struct GlobalOptions {
    std::string prime = "2";
    int precision = 16;
    int degree = 3;
    std::uint64_t seed = 0; // reserved for randomized subcommands
    bool json_output = false;

    io::ContextDefaults context_defaults() const {
        io::ContextDefaults d;
        d.prime = mpz_class(prime);
        d.precision = precision;
        d.degree = degree;
        return d;
    }
};

std::string context_line(const magnus::RingContext& ctx) {
    std::ostringstream out;
    if (ctx.is_surface())
        out << "surface genus " << ctx.genus();
    else
        out << "free rank " << ctx.generator_count();
    out << ", l = " << ctx.prime().get_str() << ", N = " << ctx.precision() << ", degree "
        << ctx.degree();
    return out.str();
}

json context_json(const magnus::RingContext& ctx) {
    json j;
    if (ctx.is_surface())
        j["kind"] = json{{"surface", ctx.genus()}};
    else
        j["kind"] = json{{"free", ctx.generator_count()}};
    j["prime"] = ctx.prime().get_str();
    j["precision"] = ctx.precision();
    j["degree"] = ctx.degree();
    return j;
}

/// Balanced display of a residue (values above l^N/2 print negatively).
std::string balanced(const mpz_class& r, const padic::Context& scalars) {
    mpz_class half = scalars.modulus() / 2;
    return (r > half ? mpz_class(r - scalars.modulus()) : r).get_str();
}

json module_structure_json(const padic::ModuleStructure& s) {
    json j;
    j["free_rank"] = std::to_string(s.free_rank);
    json torsion = json::array();
    for (int e : s.torsion_exponents)
        torsion.push_back(std::to_string(e));
    j["torsion_exponents"] = torsion;
    j["precision"] = s.precision_note;
    return j;
}

std::string module_structure_line(const padic::ModuleStructure& s, const mpz_class& prime) {
    std::ostringstream out;
    out << "free rank " << s.free_rank;
    if (s.torsion_exponents.empty()) {
        out << ", no torsion below precision";
    } else {
        out << ", torsion:";
        for (int e : s.torsion_exponents)
            out << " Z/" << prime.get_str() << "^" << e;
    }
    return out.str();
}

int run_cocycle(const GlobalOptions& opts, const std::string& path) {
    io::AutoSpec spec = io::load_autospec(io::read_json_file(path), opts.context_defaults());
    johnson::CocycleValue value = johnson::md_cocycle(spec.endo);
    const auto basis = magnus::degree2_basis(*spec.ctx);
    const auto& scalars = *spec.ctx->scalars();

    if (opts.json_output) {
        json doc;
        doc["context"] = context_json(*spec.ctx);
        json rows = json::array();
        for (const auto& w : basis)
            rows.push_back(magnus::word_name(w));
        doc["rows"] = rows;
        json cols = json::array();
        for (int j = 0; j < spec.ctx->generator_count(); ++j)
            cols.push_back(magnus::generator_name(j));
        doc["columns"] = cols;
        json entries = json::array();
        for (int r = 0; r < value.matrix.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < value.matrix.cols(); ++c)
                row.push_back(value.matrix.at(r, c).get_str());
            entries.push_back(std::move(row));
        }
        doc["entries"] = entries;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    std::cout << "cocycle value on " << context_line(*spec.ctx) << "\n";
    std::cout << "  columns: generator images; rows: degree-2 basis\n";
    for (int r = 0; r < value.matrix.rows(); ++r) {
        std::cout << "  [" << magnus::word_name(basis[static_cast<size_t>(r)]) << "]";
        for (int c = 0; c < value.matrix.cols(); ++c)
            std::cout << " " << balanced(value.matrix.at(r, c), scalars);
        std::cout << "\n";
    }
    if (value.is_zero())
        std::cout << "  (zero cocycle value)\n";
    return 0;
}

int run_johnson(const GlobalOptions& opts, const std::string& path) {
    io::AutoSpec spec = io::load_autospec(io::read_json_file(path), opts.context_defaults());
    johnson::ModuleA a = johnson::module_A(spec.ctx);
    johnson::CocycleValue value = johnson::md_cocycle(spec.endo);
    johnson::JohnsonValue reduced = johnson::johnson_reduce(value, a);
    const auto& scalars = *spec.ctx->scalars();

    if (opts.json_output) {
        json doc;
        doc["context"] = context_json(*spec.ctx);
        doc["a_structure"] = module_structure_json(a.structure());
        json coords = json::array();
        for (size_t i = 0; i < reduced.coordinates.size(); ++i) {
            if (reduced.exponents[i] == 0)
                continue; // dead coordinate
            coords.push_back(json{{"value", reduced.coordinates[i].get_str()},
                                  {"modulus_exponent", reduced.exponents[i]}});
        }
        doc["coordinates"] = coords;
        doc["is_zero"] = reduced.is_zero();
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    std::cout << "Johnson reduction on " << context_line(*spec.ctx) << "\n";
    std::cout << "  A(G): " << module_structure_line(a.structure(), spec.ctx->prime()) << "\n";
    std::cout << "  coordinates (live rows only):";
    for (size_t i = 0; i < reduced.coordinates.size(); ++i) {
        if (reduced.exponents[i] == 0)
            continue;
        std::cout << " " << balanced(reduced.coordinates[i], scalars);
    }
    std::cout << "\n";
    std::cout << "  value is " << (reduced.is_zero() ? "zero" : "nonzero") << " in A(G)\n";
    return 0;
}

int run_ag_structure(const GlobalOptions& opts, int free_rank, int surface_genus) {
    auto defaults = opts.context_defaults();
    magnus::RingContextPtr ctx;
    if (free_rank > 0)
        ctx = magnus::RingContext::free_group(free_rank, defaults.prime, defaults.precision,
                                              defaults.degree);
    else
        ctx = magnus::RingContext::surface_group(surface_genus, defaults.prime,
                                                 defaults.precision, defaults.degree);

    johnson::ModuleA a = johnson::module_A(ctx);
    johnson::WSubmodule w = johnson::submodule_W(ctx);
    padic::ModuleStructure aw = johnson::module_A_W(ctx);

    if (opts.json_output) {
        json doc;
        doc["context"] = context_json(*ctx);
        doc["a_structure"] = module_structure_json(a.structure());
        doc["w_rank"] = std::to_string(w.rank());
        doc["a_w_structure"] = module_structure_json(aw);
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    std::cout << "coefficient modules on " << context_line(*ctx) << "\n";
    std::cout << "  A(G):   " << module_structure_line(a.structure(), ctx->prime()) << "\n";
    std::cout << "  W:      rank " << w.rank() << "\n";
    std::cout << "  A_W(G): " << module_structure_line(aw, ctx->prime()) << "\n";
    return 0;
}

int run_skew_check(const GlobalOptions& opts, const std::string& path) {
    io::AutoSpec spec = io::load_autospec(io::read_json_file(path), opts.context_defaults());
    if (!endo::in_torelli(spec.endo))
        throw NotTorelli("skew-check requires a Torelli automorphism spec");
    johnson::SkewReport report = johnson::skew_check(spec.endo);

    if (opts.json_output) {
        json doc;
        doc["context"] = context_json(*spec.ctx);
        doc["pairs_ok"] = report.pairs_ok;
        doc["diagonals_ok"] = report.diagonals_ok;
        doc["delta_witness_zero"] = report.delta_witness_zero;
        json flagged = json::array();
        for (const auto& [i, k] : report.flagged_diagonals)
            flagged.push_back(json{{"generator", i + 1}, {"index", k + 1}});
        doc["flagged_diagonals"] = flagged;
        doc["ok"] = report.ok();
        if (!report.first_failure.empty())
            doc["first_failure"] = report.first_failure;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "skew check on " << context_line(*spec.ctx) << "\n";
        std::cout << "  off-diagonal pairs cancel: " << (report.pairs_ok ? "yes" : "NO") << "\n";
        std::cout << "  doubled diagonals vanish:  " << (report.diagonals_ok ? "yes" : "NO")
                  << "\n";
        std::cout << "  comultiplication witness:  "
                  << (report.delta_witness_zero ? "zero" : "NONZERO") << "\n";
        for (const auto& [i, k] : report.flagged_diagonals)
            std::cout << "  flagged: b_" << (i + 1) << "^{" << (k + 1) << (k + 1)
                      << "} = l^(N-1), kept by 2b = 0 at l = 2\n";
        if (!report.first_failure.empty())
            std::cout << "  first failure: " << report.first_failure << "\n";
        std::cout << "  result: " << (report.ok() ? "pass" : "fail") << "\n";
    }
    return report.ok() ? 0 : 1;
}

int run_char_check(const GlobalOptions& opts, const std::string& path,
                   const std::string& action) {
    chartab::CharacterTable table = io::load_character_table(io::read_json_file(path));
    chartab::ActionCharacter chi_v = io::parse_action(table, action);
    verdicts::TorsionVerdict verdict = verdicts::torsion_verdict(chi_v, table.order());

    if (opts.json_output) {
        json doc;
        doc["table"] = table.name();
        doc["order"] = table.order().get_str();
        doc["action"] = action;
        doc["verdict"] = verdict.to_json();
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "torsion criterion for " << table.name() << " (order "
                  << table.order().get_str() << "), action " << action << "\n";
        std::cout << "  invariant dimension <chi_V chi_V, chi_V> = "
                  << verdict.invariant_dim.get_str() << "\n";
        if (verdict.certified())
            std::cout << "  verdict: torsion, order divides " << verdict.bound.get_str()
                      << "  (bound " << verdict.bound.get_str() << ")\n";
        else
            std::cout << "  verdict: not certified (invariants remain)\n";
        for (const std::string& c : verdict.caveats)
            std::cout << "  caveat: " << c << "\n";
    }
    return verdict.certified() ? 0 : 1;
}

int emit_report(const GlobalOptions& opts, const verdicts::Report& report) {
    if (opts.json_output)
        std::cout << report.data.dump(2) << "\n";
    else
        std::cout << report.text;
    return report.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    GlobalOptions opts;
    CLI::App app{"exact cocycle and torsion-certificate calculator for pro-l group rings"};
    app.require_subcommand(1);
    app.add_option("--prime", opts.prime, "prime l for the scalar ring")->capture_default_str();
    app.add_option("--precision", opts.precision, "work modulo l^N")->capture_default_str();
    app.add_option("--degree", opts.degree, "word-length truncation degree")
        ->capture_default_str();
    app.add_option("--seed", opts.seed, "seed for randomized subcommands")
        ->capture_default_str();
    app.add_flag("--json", opts.json_output, "machine-readable output");

    std::string spec_path, table_path, action;
    int free_rank = 0, surface_genus = 0, genus = 2;

    CLI::App* cocycle = app.add_subcommand("cocycle", "evaluate the cocycle on an automorphism spec");
    cocycle->add_option("spec", spec_path, "automorphism spec JSON file")->required();

    CLI::App* johnson_cmd =
        app.add_subcommand("johnson", "reduce the cocycle value into A(G)");
    johnson_cmd->add_option("spec", spec_path, "automorphism spec JSON file")->required();

    CLI::App* ag = app.add_subcommand("ag-structure", "structure of A(G), W and A_W(G)");
    auto* free_opt = ag->add_option("--free", free_rank, "free group of this rank");
    auto* surface_opt = ag->add_option("--surface", surface_genus, "surface group of this genus");
    free_opt->excludes(surface_opt);

    CLI::App* skew = app.add_subcommand("skew-check", "skew-symmetry of a Torelli spec");
    skew->add_option("spec", spec_path, "automorphism spec JSON file")->required();

    CLI::App* char_check = app.add_subcommand("char-check", "torsion verdict from a character table");
    char_check->add_option("table", table_path, "character table JSON file")->required();
    char_check->add_option("--action", action, "action character, e.g. \"2*chi_2\"")->required();

    CLI::App* demo = app.add_subcommand("demo", "built-in demonstrations");
    demo->require_subcommand(1);
    CLI::App* demo_fm = demo->add_subcommand("fricke-macbeath", "the genus-7 PSL(2,8) curve");
    CLI::App* demo_hyp = demo->add_subcommand("hyperelliptic", "the hyperelliptic involution");
    demo_hyp->add_option("--genus", genus, "genus of the curve")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cocycle->parsed())
            return run_cocycle(opts, spec_path);
        if (johnson_cmd->parsed())
            return run_johnson(opts, spec_path);
        if (ag->parsed()) {
            if ((free_rank > 0) == (surface_genus > 0))
                throw SchemaError("ag-structure needs exactly one of --free or --surface");
            return run_ag_structure(opts, free_rank, surface_genus);
        }
        if (skew->parsed())
            return run_skew_check(opts, spec_path);
        if (char_check->parsed())
            return run_char_check(opts, table_path, action);
        if (demo->parsed()) {
            if (demo_fm->parsed())
                return emit_report(opts, verdicts::demo_fricke_macbeath());
            if (demo_hyp->parsed())
                return emit_report(opts, verdicts::demo_hyperelliptic(genus));
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const NotTorelli& e) {
        std::cerr << "error: NotTorelli: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
