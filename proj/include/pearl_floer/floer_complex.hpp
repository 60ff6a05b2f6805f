/**
 * The Floer layer: combinatorial data packages (generators, actions and
 * GF(2) differential entries), their validation, the assembled cochain
 * complex, the action filtration and its rank inequality, and the index
 * budget auditor for degenerate pearly configurations.
 *
 * Generators are Morse critical points (kind Crit, degree = Morse index)
 * or ordered double-point lifts (kind Pair, degree = index, with an action
 * and the id of the reversed lift).  A differential entry (from, to) means
 * `to` occurs in d(from); repeated entries cancel in pairs.
 */
#ifndef PEARL_FLOER_FLOER_COMPLEX_HPP
#define PEARL_FLOER_FLOER_COMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "gf2.hpp"

namespace pearl {

inline constexpr double kTolAction = 1e-8;

enum class GeneratorKind
{
    Crit,
    Pair,
};

struct Generator
{
    std::string id;
    GeneratorKind kind = GeneratorKind::Crit;
    int degree = 0;
    std::optional<double> action;      // pairs only
    std::optional<std::string> partner; // pairs only

    bool is_pair() const noexcept { return kind == GeneratorKind::Pair; }
};

struct DifferentialEntry
{
    std::string from;
    std::string to;

    friend bool operator==(const DifferentialEntry&, const DifferentialEntry&) = default;
};

struct FloerDatum
{
    int ambient_dim = 1;
    std::vector<Generator> generators;
    std::vector<DifferentialEntry> differential;

    std::optional<std::size_t> find(const std::string& id) const
    {
        for (std::size_t i = 0; i < generators.size(); ++i)
            if (generators[i].id == id)
                return i;
        return std::nullopt;
    }

    std::size_t pair_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(generators.begin(), generators.end(), [](const Generator& g) { return g.is_pair(); }));
    }
};

struct Violation
{
    std::string code;
    std::string message;
};

struct ValidationReport
{
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    bool has(const std::string& code) const
    {
        return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
    }

    std::string summary() const
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < violations.size(); ++i)
            os << (i ? "; " : "") << violations[i].code << ": " << violations[i].message;
        return os.str();
    }
};

/**
 * Energy non-negativity translated to entries: a contributing strip from
 * gamma_- to gamma_+ has energy A(gamma_-) - A(gamma_+) - sum of jump
 * actions >= 0, with strictly positive energy for non-constant pieces.
 * Read with d carrying a generator to the starting end, this requires
 * action(to) > action(from) between pairs, action(to) > 0 for entries
 * crit -> pair and action(from) < 0 for entries pair -> crit.
 */
inline std::optional<std::string> action_discipline_violation(const Generator& from, const Generator& to)
{
    if (from.is_pair() && to.is_pair()) {
        if (!(*to.action > *from.action))
            return "pair -> pair entry must strictly increase the action";
    } else if (!from.is_pair() && to.is_pair()) {
        if (!(*to.action > 0.0))
            return "crit -> pair entry needs a target of positive action";
    } else if (from.is_pair() && !to.is_pair()) {
        if (!(*from.action < 0.0))
            return "pair -> crit entry needs a source of negative action";
    }
    return std::nullopt;
}

inline ValidationReport validate_datum(const FloerDatum& d)
{
    ValidationReport report;
    auto add = [&](std::string code, std::string message) {
        report.violations.push_back({std::move(code), std::move(message)});
    };

    if (d.ambient_dim < 1)
        add("ambient-dim", "ambient dimension must be >= 1");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < d.generators.size(); ++i) {
        const auto& g = d.generators[i];
        if (g.id.empty())
            add("empty-id", "generator #" + std::to_string(i) + " has an empty id");
        if (!index.emplace(g.id, i).second)
            add("duplicate-id", "id '" + g.id + "' is used twice");
    }

    for (const auto& g : d.generators) {
        if (!g.is_pair()) {
            if (g.action)
                add("unexpected-action", "critical point '" + g.id + "' carries an action");
            if (g.partner)
                add("unexpected-partner", "critical point '" + g.id + "' carries a partner");
            continue;
        }
        if (!g.action)
            add("missing-action", "pair '" + g.id + "' has no action");
        if (!g.partner) {
            add("missing-partner", "pair '" + g.id + "' has no partner");
            continue;
        }
        auto it = index.find(*g.partner);
        if (it == index.end()) {
            add("partner-missing", "partner '" + *g.partner + "' of '" + g.id + "' does not exist");
            continue;
        }
        const auto& p = d.generators[it->second];
        if (p.id == g.id) {
            add("self-partner", "pair '" + g.id + "' is its own partner");
            continue;
        }
        if (!p.is_pair()) {
            add("partner-not-pair", "partner '" + p.id + "' of '" + g.id + "' is not a pair");
            continue;
        }
        if (!p.partner || *p.partner != g.id)
            add("partner-not-reciprocal", "'" + p.id + "' does not name '" + g.id + "' as its partner");
        // Check each couple once.
        if (g.id < p.id) {
            if (g.degree + p.degree != d.ambient_dim)
                add("partner-degree-sum", "degrees of '" + g.id + "' and '" + p.id + "' sum to " +
                                              std::to_string(g.degree + p.degree) + ", expected " +
                                              std::to_string(d.ambient_dim));
            if (g.action && p.action && std::abs(*g.action + *p.action) > kTolAction)
                add("partner-action-sum", "actions of '" + g.id + "' and '" + p.id + "' do not cancel");
        }
    }

    const bool actions_complete = !report.has("missing-action");
    for (const auto& e : d.differential) {
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end()) {
            add("unknown-id", "entry " + e.from + " -> " + e.to + " names an unknown generator");
            continue;
        }
        const auto& from = d.generators[f->second];
        const auto& to = d.generators[t->second];
        if (to.degree != from.degree + 1)
            add("degree", "entry " + e.from + " -> " + e.to + " goes from degree " + std::to_string(from.degree) +
                              " to " + std::to_string(to.degree));
        if (actions_complete)
            if (auto why = action_discipline_violation(from, to))
                add("action-discipline", "entry " + e.from + " -> " + e.to + ": " + *why);
    }
    return report;
}

namespace detail {

// Complex of the datum without the action checks (ids and degrees only).
inline GradedComplex build_complex(const FloerDatum& d)
{
    std::unordered_map<std::string, std::size_t> index;
    std::vector<int> degrees;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < d.generators.size(); ++i) {
        if (!index.emplace(d.generators[i].id, i).second)
            throw Error(ErrorKind::ValidationFailed, "duplicate id '" + d.generators[i].id + "'");
        degrees.push_back(d.generators[i].degree);
        labels.push_back(d.generators[i].id);
    }
    GF2Matrix m(d.generators.size(), d.generators.size());
    for (const auto& e : d.differential) {
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end())
            throw Error(ErrorKind::ValidationFailed, "entry " + e.from + " -> " + e.to + " names an unknown generator");
        if (degrees[t->second] != degrees[f->second] + 1)
            throw Error(ErrorKind::DegreeViolation, "entry " + e.from + " -> " + e.to + " does not raise degree by one");
        m.flip(t->second, f->second);
    }
    return GradedComplex(std::move(degrees), std::move(m), std::move(labels));
}

} // namespace detail

inline GradedComplex assemble_differential(const FloerDatum& d)
{
    const auto report = validate_datum(d);
    if (!report.ok())
        throw Error(ErrorKind::ValidationFailed, report.summary());
    return detail::build_complex(d);
}

inline std::map<int, int> floer_cohomology(const FloerDatum& d)
{
    return cohomology_ranks(assemble_differential(d));
}

// Cohomology of the Morse block alone; this is H*(L; Z/2).
inline std::map<int, int> morse_cohomology(const FloerDatum& d)
{
    FloerDatum morse;
    morse.ambient_dim = d.ambient_dim;
    for (const auto& g : d.generators)
        if (!g.is_pair())
            morse.generators.push_back(g);
    for (const auto& e : d.differential)
        if (morse.find(e.from) && morse.find(e.to))
            morse.differential.push_back(e);
    return cohomology_ranks(detail::build_complex(morse));
}

enum class PositivityMode
{
    Weak,
    Strong,
};

inline double positivity_threshold(PositivityMode mode, int n)
{
    if (mode == PositivityMode::Weak)
        return 3.0;
    return std::max((n + 2) / 2.0, 3.0);
}

struct PositivityRow
{
    std::string id;
    double action = 0.0;
    int degree = 0;
    double threshold = 0.0;
    bool pass = true;
};

struct PositivityReport
{
    PositivityMode mode = PositivityMode::Strong;
    std::vector<PositivityRow> rows;
    bool pass = true;
};

// Only pairs of positive action are constrained.
inline PositivityReport check_positivity(const FloerDatum& d, PositivityMode mode)
{
    PositivityReport report;
    report.mode = mode;
    const double threshold = positivity_threshold(mode, d.ambient_dim);
    for (const auto& g : d.generators) {
        if (!g.is_pair() || !g.action || !(*g.action > 0.0))
            continue;
        PositivityRow row{g.id, *g.action, g.degree, threshold, g.degree >= threshold};
        report.pass = report.pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// E(u) = A(gamma_-) - A(gamma_+) - sum of the jump actions.
inline double strip_energy(double action_out, double action_in, const std::vector<double>& jump_actions)
{
    double e = action_out - action_in;
    for (double a : jump_actions)
        e -= a;
    return e;
}

// ---------------------------------------------------------------------------
// Degeneration budgets

struct MorseEdge
{
    int index_drop = 1;
};

struct Strip
{
    int ind_u = 1;
    int jumps = 0;
};

struct GhostStrip
{
    int ind_pq = 0;
};

struct Splice
{
    std::optional<int> ind_out;
    std::optional<int> ind_in_complement;
};

struct BoundaryPearl
{
};

struct PearlToMin
{
    int jumps = 0;
};

struct MaxToPearl
{
    int jumps = 0;
};

using DegenerationPiece = std::variant<MorseEdge, Strip, GhostStrip, Splice, BoundaryPearl, PearlToMin, MaxToPearl>;

struct DegenerationPattern
{
    std::vector<DegenerationPiece> pieces;
};

/**
 * Lower bound on the index drop across one piece, assuming strong
 * positivity.  Throws InconsistentPattern for parameters no admissible
 * configuration can have.
 */
inline int piece_budget(const DegenerationPiece& piece, int n)
{
    const auto inconsistent = [](const std::string& why) { return Error(ErrorKind::InconsistentPattern, why); };
    return std::visit(
        [&](const auto& p) -> int {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MorseEdge>) {
                if (p.index_drop < 1)
                    throw inconsistent("regular Morse trajectories drop the index by at least 1");
                return p.index_drop;
            } else if constexpr (std::is_same_v<T, Strip>) {
                if (p.ind_u < 1)
                    throw inconsistent("a regular strip has index >= 1");
                if (p.jumps < 0)
                    throw inconsistent("negative jump count");
                return p.ind_u + 2 * p.jumps;
            } else if constexpr (std::is_same_v<T, GhostStrip>) {
                const int bound = 2 * p.ind_pq - n;
                if (bound < 2)
                    throw inconsistent("ghost strip at a pair of index " + std::to_string(p.ind_pq) +
                                       " violates strong positivity in dimension " + std::to_string(n));
                return bound;
            } else if constexpr (std::is_same_v<T, Splice>) {
                if (!p.ind_out || !p.ind_in_complement)
                    return 2;
                const double floor = (n + 2) / 2.0;
                if (*p.ind_out < floor || *p.ind_in_complement < floor)
                    throw inconsistent("splice endpoints violate strong positivity");
                return *p.ind_out + *p.ind_in_complement - n;
            } else if constexpr (std::is_same_v<T, BoundaryPearl>) {
                return 2;
            } else {
                if (p.jumps < 0)
                    throw inconsistent("negative jump count");
                return std::min(3, 1 + 2 * p.jumps);
            }
        },
        piece);
}

inline int degeneration_budget(const DegenerationPattern& pattern, int n)
{
    if (n < 1)
        throw Error(ErrorKind::InconsistentPattern, "dimension must be >= 1");
    int total = 0;
    for (const auto& piece : pattern.pieces)
        total += piece_budget(piece, n);
    return total;
}

struct AuditReport
{
    int bound = 0;
    bool excluded_from_differential = false; // bound > 1
    bool excluded_from_square = false;       // bound > 2
};

inline AuditReport audit_pattern(const DegenerationPattern& pattern, int n)
{
    AuditReport r;
    r.bound = degeneration_budget(pattern, n);
    r.excluded_from_differential = r.bound > 1;
    r.excluded_from_square = r.bound > 2;
    return r;
}

// ---------------------------------------------------------------------------
// Action filtration

inline constexpr int kLevelNegative = 0;
inline constexpr int kLevelMorse = 1;
inline constexpr int kLevelPositive = 2;

struct ActionFiltration
{
    FilteredComplex filtered;
    std::vector<std::string> warnings;
};

/**
 * Negative-action pairs at level 0, critical points at level 1, pairs of
 * non-negative action at level 2.  The action discipline makes d preserve
 * this decreasing filtration; a violation is reported as FiltrationViolated.
 */
inline ActionFiltration action_filtration(const FloerDatum& d)
{
    std::vector<std::string> warnings;
    std::vector<int> levels;
    for (const auto& g : d.generators) {
        if (!g.is_pair()) {
            levels.push_back(kLevelMorse);
            continue;
        }
        if (!g.action)
            throw Error(ErrorKind::ValidationFailed, "pair '" + g.id + "' has no action");
        if (std::abs(*g.action) <= kTolAction)
            warnings.push_back("ZeroActionPair: '" + g.id + "' has action 0 and is placed with the positive pairs");
        levels.push_back(*g.action < 0.0 && std::abs(*g.action) > kTolAction ? kLevelNegative : kLevelPositive);
    }
    FilteredComplex f(detail::build_complex(d), std::move(levels));
    if (auto v = f.filtration_violation()) {
        const auto& labels = f.complex().labels();
        throw Error(ErrorKind::FiltrationViolated,
                    "entry " + labels[v->first] + " -> " + labels[v->second] + " lowers the action level");
    }
    return {std::move(f), std::move(warnings)};
}

struct RankInequalityReport
{
    std::size_t card_R = 0;
    int sum_betti = 0;
    int sum_HF = 0;
    bool holds = false;
    bool tight = false;
    std::map<int, int> morse_ranks;
    std::map<int, int> floer_ranks;
    SpectralTable pages;
    std::vector<std::string> warnings;
};

inline RankInequalityReport rank_inequality_report(const FloerDatum& d, int r_max = 3)
{
    auto filtration = action_filtration(d);
    RankInequalityReport r;
    r.warnings = std::move(filtration.warnings);
    r.card_R = d.pair_count();
    r.morse_ranks = morse_cohomology(d);
    r.floer_ranks = floer_cohomology(d);
    r.sum_betti = total_rank(r.morse_ranks);
    r.sum_HF = total_rank(r.floer_ranks);
    const long lhs = static_cast<long>(r.card_R);
    const long rhs = r.sum_betti - r.sum_HF;
    r.holds = lhs >= rhs;
    r.tight = lhs == rhs;
    r.pages = spectral_pages(filtration.filtered, r_max);
    return r;
}

} // namespace pearl

#endif
