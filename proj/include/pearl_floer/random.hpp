/**
 * Random valid inputs for property runs.
 *
 * A differential with d^2 = 0 is produced as d = P D0 P^{-1}: D0 is a
 * random matching of admissible degree-raising entries (so D0^2 = 0) and
 * P is a random invertible degree-preserving matrix in I + A, where A is
 * the multiplicatively closed set of admissible entries.  P^{-1} is a
 * polynomial in P, so d stays admissible.
 */
#ifndef PEARL_FLOER_RANDOM_HPP
#define PEARL_FLOER_RANDOM_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "floer_complex.hpp"
#include "gf2.hpp"

namespace pearl {

inline std::optional<GF2Matrix> gf2_inverse(const GF2Matrix& m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorKind::ShapeMismatch, "only square matrices have inverses");
    const std::size_t n = m.rows();
    GF2Matrix a = m;
    GF2Matrix inv = GF2Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && !a.get(pivot, col))
            ++pivot;
        if (pivot == n)
            return std::nullopt;
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                const bool x = a.get(col, j), y = a.get(pivot, j);
                a.set(col, j, y);
                a.set(pivot, j, x);
                const bool u = inv.get(col, j), v = inv.get(pivot, j);
                inv.set(col, j, v);
                inv.set(pivot, j, u);
            }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || !a.get(i, col))
                continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (a.get(col, j))
                    a.flip(i, j);
                if (inv.get(col, j))
                    inv.flip(i, j);
            }
        }
    }
    return inv;
}

namespace detail {

// admissible(to, from) closed under composition; degree handled here.
inline GF2Matrix conjugated_square_zero(std::mt19937_64& rng, const std::vector<int>& degrees,
                                        const std::function<bool(std::size_t, std::size_t)>& admissible,
                                        double density = 0.35)
{
    const std::size_t n = degrees.size();
    std::bernoulli_distribution coin(density);

    std::vector<std::pair<std::size_t, std::size_t>> raising;
    for (std::size_t from = 0; from < n; ++from)
        for (std::size_t to = 0; to < n; ++to)
            if (degrees[to] == degrees[from] + 1 && admissible(to, from))
                raising.emplace_back(to, from);
    std::shuffle(raising.begin(), raising.end(), rng);
    GF2Matrix d0(n, n);
    std::vector<bool> used(n, false);
    for (auto [to, from] : raising) {
        if (used[to] || used[from] || !coin(rng))
            continue;
        used[to] = used[from] = true;
        d0.set(to, from, true);
    }

    for (int attempt = 0;; ++attempt) {
        GF2Matrix p = GF2Matrix::identity(n);
        if (attempt < 64)
            for (std::size_t to = 0; to < n; ++to)
                for (std::size_t from = 0; from < n; ++from)
                    if (to != from && degrees[to] == degrees[from] && admissible(to, from) && coin(rng))
                        p.set(to, from, true);
        if (auto inv = gf2_inverse(p))
            return p * d0 * *inv;
    }
}

} // namespace detail

struct RandomDatumOptions
{
    int max_generators = 40;
    int min_dim = 1;
    int max_dim = 6;
};

/**
 * A datum passing validate_datum with d^2 = 0: critical points in degrees
 * 0..n and couples of pairs with degrees summing to n and actions +-A.
 */
inline FloerDatum random_valid_datum(std::mt19937_64& rng, const RandomDatumOptions& opt = {})
{
    std::uniform_int_distribution<int> dim_dist(opt.min_dim, opt.max_dim);
    const int n = dim_dist(rng);
    std::uniform_int_distribution<int> total_dist(1, std::max(1, opt.max_generators));
    const int total = total_dist(rng);
    std::uniform_int_distribution<int> couple_dist(0, total / 2);
    const int couples = couple_dist(rng);
    const int crits = total - 2 * couples;

    FloerDatum d;
    d.ambient_dim = n;
    std::uniform_int_distribution<int> crit_deg(0, n);
    for (int i = 0; i < crits; ++i)
        d.generators.push_back({"x" + std::to_string(i), GeneratorKind::Crit, crit_deg(rng), std::nullopt, std::nullopt});

    std::uniform_int_distribution<int> pair_deg(-2, n + 2);
    std::uniform_real_distribution<double> action(0.05, 10.0);
    std::set<double> used;
    for (int i = 0; i < couples; ++i) {
        double a;
        do
            a = std::round(action(rng) * 1e6) / 1e6;
        while (used.count(a));
        used.insert(a);
        const int deg = pair_deg(rng);
        const std::string p = "p" + std::to_string(i), q = "q" + std::to_string(i);
        d.generators.push_back({p, GeneratorKind::Pair, deg, a, q});
        d.generators.push_back({q, GeneratorKind::Pair, n - deg, -a, p});
    }

    std::vector<int> degrees;
    std::vector<double> key;
    std::vector<bool> is_pair;
    for (const auto& g : d.generators) {
        degrees.push_back(g.degree);
        key.push_back(g.action.value_or(0.0));
        is_pair.push_back(g.is_pair());
    }
    const auto admissible = [&](std::size_t to, std::size_t from) {
        return key[to] > key[from] || (!is_pair[to] && !is_pair[from]);
    };
    const GF2Matrix m = detail::conjugated_square_zero(rng, degrees, admissible);
    for (std::size_t from = 0; from < degrees.size(); ++from)
        for (std::size_t to = 0; to < degrees.size(); ++to)
            if (m.get(to, from))
                d.differential.push_back({d.generators[from].id, d.generators[to].id});
    return d;
}

struct RandomFilteredOptions
{
    int max_generators = 12;
    int levels = 3;
    int max_degree = 3;
};

// d preserves the filtration: every entry goes to an equal or higher level.
inline FilteredComplex random_filtered_complex(std::mt19937_64& rng, const RandomFilteredOptions& opt = {})
{
    std::uniform_int_distribution<int> size_dist(1, opt.max_generators);
    std::uniform_int_distribution<int> deg_dist(0, opt.max_degree);
    std::uniform_int_distribution<int> level_dist(0, opt.levels - 1);
    const auto n = static_cast<std::size_t>(size_dist(rng));
    std::vector<int> degrees(n), levels(n);
    for (std::size_t i = 0; i < n; ++i) {
        degrees[i] = deg_dist(rng);
        levels[i] = level_dist(rng);
    }
    const auto admissible = [&](std::size_t to, std::size_t from) { return levels[to] >= levels[from]; };
    GF2Matrix m = detail::conjugated_square_zero(rng, degrees, admissible, 0.5);
    return FilteredComplex(GradedComplex(degrees, std::move(m)), levels);
}

} // namespace pearl

#endif
