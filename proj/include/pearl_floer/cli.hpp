/**
 * Command dispatch for the pearl_floer tool.  Kept in a header so tests
 * can drive every subcommand in-process.
 *
 * Exit codes: 0 success, 1 validation failure, 2 I/O, parse or usage error.
 */
#ifndef PEARL_FLOER_CLI_HPP
#define PEARL_FLOER_CLI_HPP

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "datum_io.hpp"
#include "errors.hpp"
#include "floer_complex.hpp"
#include "gf2.hpp"
#include "immersion.hpp"
#include "models.hpp"
#include "random.hpp"
#include "sphere_example.hpp"

namespace pearl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig
{
    std::string command;
    std::string input;  // --in
    std::string model;  // --model
    std::string target; // --target, second datum for verify-map
    std::string map;    // --map
    std::string output; // --out
    int dim = 2;
    int resolution = kDefaultResolution;
    std::optional<double> tol_frame;
    std::optional<double> tol_exact;
    std::optional<double> tol_index;
    bool require_strong = false;
    std::string format = "text";
    std::uint64_t seed = 1;
    int random = 0; // spectral: number of random property trials
    int r_max = 3;
};

namespace cli_detail {

inline std::string num(double x, int precision = 10)
{
    if (std::abs(x) < 1e-300)
        x = 0.0;
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

inline std::string ranks_line(const std::map<int, int>& ranks, const std::vector<int>& degrees)
{
    std::ostringstream os;
    bool first = true;
    for (int k : degrees) {
        auto it = ranks.find(k);
        os << (first ? "" : "  ") << "H^" << k << " = " << (it == ranks.end() ? 0 : it->second);
        first = false;
    }
    if (degrees.empty())
        os << "(no generators)";
    return os.str();
}

inline Json ranks_json(const std::map<int, int>& ranks, const std::vector<int>& degrees)
{
    Json j = Json::object();
    for (int k : degrees) {
        auto it = ranks.find(k);
        j[std::to_string(k)] = it == ranks.end() ? 0 : it->second;
    }
    return j;
}

inline void validate_config(const RunConfig& c)
{
    auto positive = [](const std::optional<double>& t, const char* name) {
        if (t && !(*t > 0.0))
            throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
    };
    positive(c.tol_frame, "--tol-frame");
    positive(c.tol_exact, "--tol-exact");
    positive(c.tol_index, "--tol-index");
    if (c.format != "text" && c.format != "json")
        throw Error(ErrorKind::InvalidArgument, "--format must be text or json");
    if (c.dim < 1)
        throw Error(ErrorKind::InvalidArgument, "--dim must be >= 1");
    if (c.resolution < kMinResolution)
        throw Error(ErrorKind::InvalidArgument, "--resolution must be >= " + std::to_string(kMinResolution));
    if (c.r_max < 0)
        throw Error(ErrorKind::InvalidArgument, "--pages must be non-negative");
}

// Datum from --in, or from --model for the models that carry one.
inline FloerDatum datum_source(const RunConfig& c, std::vector<std::string>& notes)
{
    if (!c.input.empty() && !c.model.empty())
        throw Error(ErrorKind::InvalidArgument, "give exactly one of --in and --model");
    if (!c.input.empty())
        return read_datum(c.input);
    if (c.model == "sphere") {
        auto s = sphere_datum(c.dim);
        notes = s.notes;
        return s.datum;
    }
    if (c.model == "embedded") {
        FloerDatum d;
        d.ambient_dim = c.dim;
        for (const auto& crit : sphere_morse_preset(c.dim).criticals)
            d.generators.push_back({crit.id, GeneratorKind::Crit, crit.index, std::nullopt, std::nullopt});
        return d;
    }
    if (c.model.empty())
        throw Error(ErrorKind::InvalidArgument, "give --in FILE or --model sphere|embedded");
    throw Error(ErrorKind::InvalidArgument, "model '" + c.model + "' has no built-in datum; use --in");
}

inline void print_violations(std::ostream& out, const ValidationReport& r)
{
    out << "validation: FAIL (" << r.violations.size() << " violation" << (r.violations.size() == 1 ? "" : "s")
        << ")\n";
    for (const auto& v : r.violations)
        out << "  [" << v.code << "] " << v.message << "\n";
}

inline Json violations_json(const ValidationReport& r)
{
    Json a = Json::array();
    for (const auto& v : r.violations)
        a.push_back({{"code", v.code}, {"message", v.message}});
    return a;
}

// ---------------------------------------------------------------------------

struct PipelineResult
{
    ImmersionMesh mesh;
    std::vector<DoublePointRecord> records;
    FloerDatum datum;
};

inline PipelineResult run_pipeline(const RunConfig& c)
{
    if (c.model.empty())
        throw Error(ErrorKind::InvalidArgument, "analyze needs --model (one of sphere, figure-eight, circle, annulus, flat)");
    if (!c.input.empty())
        throw Error(ErrorKind::InvalidArgument, "analyze reads built-in models only; --in is not accepted");
    auto model = make_model(c.model, c.dim, c.resolution);
    if (c.tol_frame)
        model.spec.tol_frame = *c.tol_frame;
    PipelineResult r;
    r.mesh = sample_immersion(std::move(model.spec));
    r.mesh = compute_primitive(std::move(r.mesh), 0, c.tol_exact.value_or(kTolExact));
    r.mesh = compute_grading(std::move(r.mesh), 0);
    DoublePointOptions opt;
    if (c.tol_index)
        opt.tol_index = *c.tol_index;
    r.records = find_double_points(r.mesh, opt);
    r.datum = emit_datum(r.mesh, r.records, model.morse);
    return r;
}

inline int cmd_analyze(const RunConfig& c, std::ostream& out)
{
    const auto r = run_pipeline(c);
    const int n = r.mesh.spec->dim();
    const auto strong = check_positivity(r.datum, PositivityMode::Strong);
    const auto weak = check_positivity(r.datum, PositivityMode::Weak);
    if (!c.output.empty())
        write_datum(c.output, r.datum);

    if (c.format == "json") {
        Json j;
        j["model"] = c.model;
        j["n"] = n;
        j["resolution"] = c.resolution;
        j["samples"] = r.mesh.samples.size();
        j["edges"] = r.mesh.edges.size();
        j["exactness_residual"] = r.mesh.max_exactness_residual;
        j["double_point_count"] = geometric_count(r.records);
        Json recs = Json::array();
        for (const auto& rec : r.records) {
            Json e;
            e["id"] = rec.id;
            e["partner"] = rec.partner_id;
            e["p"] = rec.p_id;
            e["q"] = rec.q_id;
            e["point_norm"] = rec.point.norm();
            e["action"] = rec.action;
            e["angle"] = rec.angles.total;
            e["alphas"] = rec.angles.alphas;
            e["index_raw"] = rec.index_raw;
            e["index"] = rec.index;
            e["residual"] = rec.residual;
            recs.push_back(std::move(e));
        }
        j["records"] = std::move(recs);
        j["strong_positivity"] = strong.pass;
        j["weak_positivity"] = weak.pass;
        out << j.dump(2) << "\n";
    } else {
        out << "model " << c.model << ", n = " << n << ", resolution " << c.resolution << "\n";
        out << "mesh: " << r.mesh.samples.size() << " samples, " << r.mesh.edges.size() << " edges, "
            << r.mesh.loop_count << " loops\n";
        out << "exactness: max loop residual " << num(r.mesh.max_exactness_residual, 3) << "\n";
        out << "grading: ok\n";
        out << "double points: " << geometric_count(r.records) << "\n";
        out << std::left << "  " << std::setw(8) << "id" << std::setw(14) << "|z|" << std::setw(16) << "action"
            << std::setw(12) << "angle" << std::setw(18) << "raw index" << std::setw(7) << "index"
            << "residual\n";
        for (const auto& rec : r.records)
            out << "  " << std::setw(8) << rec.id << std::setw(14) << num(rec.point.norm(), 3) << std::setw(16)
                << num(rec.action) << std::setw(12) << num(rec.angles.total) << std::setw(18)
                << num(rec.index_raw, 12) << std::setw(7) << rec.index << num(rec.residual, 3) << "\n";
        out << std::right;
        out << "weak positivity: " << (weak.pass ? "PASS" : "FAIL") << " (threshold 3)\n";
        out << "strong positivity: " << (strong.pass ? "PASS" : "FAIL") << " (threshold "
            << num(positivity_threshold(PositivityMode::Strong, n)) << ")\n";
    }
    return c.require_strong && !strong.pass ? kExitValidation : kExitOk;
}

inline int cmd_homology(const RunConfig& c, std::ostream& out)
{
    std::vector<std::string> notes;
    const auto d = datum_source(c, notes);
    const auto report = validate_datum(d);
    if (!report.ok()) {
        if (c.format == "json")
            out << Json{{"ok", false}, {"violations", violations_json(report)}}.dump(2) << "\n";
        else
            print_violations(out, report);
        return kExitValidation;
    }
    const auto complex = detail::build_complex(d);
    const auto sq = verify_square_zero(complex);
    if (!sq.ok) {
        const auto& labels = complex.labels();
        const std::string gen = labels[sq.witness->first];
        const std::string comp = labels[sq.witness->second];
        if (c.format == "json")
            out << Json{{"ok", false}, {"square_zero", false}, {"witness", {{"generator", gen}, {"component", comp}}}}
                       .dump(2)
                << "\n";
        else
            out << "d^2 != 0: d(d(" << gen << ")) contains " << comp << "\n";
        return kExitValidation;
    }
    const auto ranks = cohomology_ranks(complex);
    const auto degrees = complex.degree_set();
    const int total = total_rank(ranks);
    if (c.format == "json") {
        Json j{{"ok", true}, {"square_zero", true}, {"ranks", ranks_json(ranks, degrees)}, {"total", total}};
        j["notes"] = notes;
        out << j.dump(2) << "\n";
    } else {
        for (const auto& note : notes)
            out << note << "\n";
        out << "generators: " << d.generators.size() << ", entries: " << complex.differential().count_nonzero()
            << "\n";
        out << "d^2 = 0: ok\n";
        out << ranks_line(ranks, degrees) << "\n";
        out << "total rank: " << total << (total == 0 ? " (all ranks 0)" : "") << "\n";
    }
    return kExitOk;
}

inline std::string page_table(const PageRanks& page)
{
    if (page.empty())
        return "    0\n";
    std::ostringstream os;
    for (const auto& [pq, rank] : page)
        os << "    E^{" << pq.first << "," << pq.second << "} = " << rank << "\n";
    return os.str();
}

inline Json page_json(const PageRanks& page)
{
    Json a = Json::array();
    for (const auto& [pq, rank] : page)
        a.push_back({{"p", pq.first}, {"q", pq.second}, {"rank", rank}});
    return a;
}

// Sum over p of E_infinity^{p, k-p} against rank H^k, every k.
inline bool converges(const SpectralTable& t, const std::map<int, int>& ranks, const std::vector<int>& degrees)
{
    std::map<int, int> by_degree;
    for (const auto& [pq, rank] : t.infinity)
        by_degree[pq.first + pq.second] += rank;
    for (int k : degrees) {
        const int a = by_degree.count(k) ? by_degree[k] : 0;
        const int b = ranks.count(k) ? ranks.at(k) : 0;
        if (a != b)
            return false;
    }
    for (const auto& [k, rank] : by_degree)
        if (rank != 0 && std::find(degrees.begin(), degrees.end(), k) == degrees.end())
            return false;
    return true;
}

inline int cmd_spectral_random(const RunConfig& c, std::ostream& out)
{
    std::mt19937_64 rng(c.seed);
    int inequality_failures = 0;
    int convergence_failures = 0;
    for (int trial = 0; trial < c.random; ++trial) {
        const auto d = random_valid_datum(rng);
        const auto r = rank_inequality_report(d, 1);
        if (!r.holds)
            ++inequality_failures;
        const auto f = random_filtered_complex(rng);
        const auto table = spectral_pages(f, 1);
        if (!converges(table, cohomology_ranks(f.complex()), f.complex().degree_set()))
            ++convergence_failures;
    }
    if (c.format == "json")
        out << Json{{"trials", c.random},
                    {"seed", c.seed},
                    {"rank_inequality_failures", inequality_failures},
                    {"convergence_failures", convergence_failures}}
                   .dump(2)
            << "\n";
    else
        out << "random trials: " << c.random << " (seed " << c.seed << ")\n"
            << "rank inequality: " << (c.random - inequality_failures) << "/" << c.random << " hold\n"
            << "spectral convergence: " << (c.random - convergence_failures) << "/" << c.random << " agree\n";
    return inequality_failures + convergence_failures == 0 ? kExitOk : kExitValidation;
}

inline int cmd_spectral(const RunConfig& c, std::ostream& out)
{
    if (c.random > 0) {
        if (!c.input.empty() || !c.model.empty())
            throw Error(ErrorKind::InvalidArgument, "--random runs take no input");
        return cmd_spectral_random(c, out);
    }
    std::vector<std::string> notes;
    const auto d = datum_source(c, notes);
    const auto validation = validate_datum(d);
    if (!validation.ok()) {
        if (c.format == "json")
            out << Json{{"ok", false}, {"violations", violations_json(validation)}}.dump(2) << "\n";
        else
            print_violations(out, validation);
        return kExitValidation;
    }
    const auto r = rank_inequality_report(d, c.r_max);
    const auto degrees = detail::build_complex(d).degree_set();
    const bool conv = converges(r.pages, r.floer_ranks, degrees);
    if (c.format == "json") {
        Json j;
        j["ok"] = true;
        Json pages = Json::array();
        for (const auto& p : r.pages.pages)
            pages.push_back(page_json(p));
        j["pages"] = std::move(pages);
        j["infinity"] = page_json(r.pages.infinity);
        j["stable_from"] = r.pages.stable_from;
        j["converges"] = conv;
        j["card_R"] = r.card_R;
        j["sum_betti"] = r.sum_betti;
        j["sum_HF"] = r.sum_HF;
        j["holds"] = r.holds;
        j["tight"] = r.tight;
        j["warnings"] = r.warnings;
        j["notes"] = notes;
        out << j.dump(2) << "\n";
    } else {
        for (const auto& note : notes)
            out << note << "\n";
        for (const auto& w : r.warnings)
            out << "warning: " << w << "\n";
        out << "filtration levels: 0 = negative action, 1 = critical points, 2 = non-negative action\n";
        for (std::size_t k = 0; k < r.pages.pages.size(); ++k)
            out << "  E_" << k << ":\n" << page_table(r.pages.pages[k]);
        out << "  E_inf:\n" << page_table(r.pages.infinity);
        out << "stable from page " << r.pages.stable_from << "\n";
        out << "E_inf matches HF: " << (conv ? "yes" : "no") << "\n";
        out << "rank inequality: |R| = " << r.card_R << " >= " << r.sum_betti << " - " << r.sum_HF << " : "
            << (r.holds ? "holds" : "FAILS") << (r.tight ? " (tight)" : "") << "\n";
    }
    return r.holds && conv ? kExitOk : kExitValidation;
}

inline std::string piece_name(const DegenerationPiece& p)
{
    static const char* names[] = {"morse", "strip", "ghost", "splice", "boundary_pearl", "pearl_to_min", "max_to_pearl"};
    return names[p.index()];
}

inline int cmd_audit(const RunConfig& c, std::ostream& out)
{
    if (c.input.empty())
        throw Error(ErrorKind::InvalidArgument, "audit needs --in PATTERN");
    const auto pattern = read_pattern(c.input);
    std::vector<int> budgets;
    for (const auto& piece : pattern.pieces)
        budgets.push_back(piece_budget(piece, c.dim));
    const auto report = audit_pattern(pattern, c.dim);
    if (c.format == "json") {
        Json pieces = Json::array();
        for (std::size_t i = 0; i < budgets.size(); ++i)
            pieces.push_back({{"tag", piece_name(pattern.pieces[i])}, {"budget", budgets[i]}});
        out << Json{{"n", c.dim},
                    {"pieces", pieces},
                    {"bound", report.bound},
                    {"excluded_from_differential", report.excluded_from_differential},
                    {"excluded_from_square", report.excluded_from_square}}
                   .dump(2)
            << "\n";
    } else {
        out << "n = " << c.dim << "\n";
        for (std::size_t i = 0; i < budgets.size(); ++i)
            out << "  " << piece_name(pattern.pieces[i]) << ": " << budgets[i] << "\n";
        out << "index budget: " << report.bound << "\n";
        out << "excluded from index-1 moduli (d): " << (report.excluded_from_differential ? "yes" : "no") << "\n";
        out << "excluded from index-2 moduli (d^2): " << (report.excluded_from_square ? "yes" : "no") << "\n";
    }
    return kExitOk;
}

inline int cmd_verify_map(const RunConfig& c, std::ostream& out)
{
    if (c.input.empty() || c.target.empty() || c.map.empty())
        throw Error(ErrorKind::InvalidArgument, "verify-map needs --in C1 --target C2 --map MAP");
    const auto d1 = read_datum(c.input);
    const auto d2 = read_datum(c.target);
    const auto phi = read_map(c.map, d1, d2);
    const auto c1 = assemble_differential(d1);
    const auto c2 = assemble_differential(d2);
    detail::require_complex(c1);
    detail::require_complex(c2);
    const bool chain = verify_chain_map(c1, c2, phi);
    std::optional<bool> quasi;
    if (chain)
        quasi = is_quasi_iso(c1, c2, phi);
    if (c.format == "json") {
        Json j{{"chain_map", chain}};
        j["quasi_isomorphism"] = quasi ? Json(*quasi) : Json(nullptr);
        out << j.dump(2) << "\n";
    } else {
        out << "chain map: " << (chain ? "yes" : "no") << "\n";
        if (quasi)
            out << "quasi-isomorphism: " << (*quasi ? "yes" : "no") << "\n";
    }
    return chain ? kExitOk : kExitValidation;
}

inline int cmd_export(const RunConfig& c, std::ostream& out)
{
    if (c.model.empty())
        throw Error(ErrorKind::InvalidArgument, "export needs --model");
    FloerDatum d;
    if (c.model == "sphere") {
        d = sphere_datum(c.dim).datum;
    } else {
        d = run_pipeline(c).datum;
    }
    if (c.output.empty())
        out << datum_to_string(d);
    else
        write_datum(c.output, d);
    return kExitOk;
}

inline bool usage_error(ErrorKind k)
{
    return k == ErrorKind::Parse || k == ErrorKind::Io || k == ErrorKind::InvalidArgument;
}

} // namespace cli_detail

inline int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    using namespace cli_detail;
    try {
        validate_config(config);
        if (config.command == "analyze")
            return cmd_analyze(config, out);
        if (config.command == "homology")
            return cmd_homology(config, out);
        if (config.command == "spectral")
            return cmd_spectral(config, out);
        if (config.command == "audit")
            return cmd_audit(config, out);
        if (config.command == "verify-map")
            return cmd_verify_map(config, out);
        if (config.command == "export")
            return cmd_export(config, out);
        err << "error: unknown command '" << config.command << "'\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return usage_error(e.kind()) ? kExitUsage : kExitValidation;
    }
}

} // namespace pearl

#endif
