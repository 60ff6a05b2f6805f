#include <map>
#include <random>

#include <catch_amalgamated.hpp>

#include <pearl_floer/gf2.hpp>
#include <pearl_floer/random.hpp>

#include "oracles.hpp"

using namespace pearl;

namespace {

std::map<int, int> nonzero(const std::map<int, int>& ranks)
{
    std::map<int, int> out;
    for (auto [k, r] : ranks)
        if (r != 0)
            out[k] = r;
    return out;
}

// Random square-zero complex on at most max_n generators with degrees 0..3.
GradedComplex random_complex(std::mt19937_64& rng, int max_n)
{
    RandomFilteredOptions opt;
    opt.max_generators = max_n;
    opt.levels = 1;
    return random_filtered_complex(rng, opt).complex();
}

// Subquotient F^p / F^{p+1}: generators of level p with their block of d.
GradedComplex graded_piece(const FilteredComplex& f, int p)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < f.complex().size(); ++i)
        if (f.level(i) == p)
            idx.push_back(i);
    std::vector<int> degrees;
    for (auto i : idx)
        degrees.push_back(f.complex().degree(i));
    GF2Matrix d(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            d.set(a, b, f.complex().differential().get(idx[a], idx[b]));
    return GradedComplex(degrees, d);
}

} // namespace

TEST_CASE("bit vectors", "[gf2]")
{
    BitVector v(130);
    CHECK_FALSE(v.any());
    CHECK(v.lowest() == 130);
    v.set(129, true);
    v.set(64, true);
    CHECK(v.lowest() == 64);
    v.flip(64);
    CHECK(v.lowest() == 129);
    BitVector w(130);
    w.set(129, true);
    w.set(3, true);
    CHECK(v.dot(w));
    w ^= v;
    CHECK(w.lowest() == 3);
    CHECK_FALSE(w.get(129));
}

TEST_CASE("rank matches row-span enumeration", "[gf2]")
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dim(1, 10);
    std::uniform_real_distribution<double> dens(0.1, 0.9);
    for (int trial = 0; trial < 300; ++trial) {
        const auto rows = static_cast<std::size_t>(trial < 100 ? 8 : dim(rng));
        const auto cols = static_cast<std::size_t>(trial < 100 ? 8 : dim(rng));
        const auto m = oracle::random_matrix(rng, rows, cols, dens(rng));
        CHECK(gf2_rank(m) == static_cast<std::size_t>(oracle::brute_rank(m)));
        CHECK(gf2_rank(m) == gf2_rank(m.transpose()));
    }
}

TEST_CASE("null space is a kernel basis", "[gf2]")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = oracle::random_matrix(rng, 1 + trial % 7, 1 + trial % 9, 0.4);
        const auto basis = gf2_null_space(m);
        CHECK(basis.size() == m.cols() - gf2_rank(m));
        Gf2Span span(m.cols());
        for (const auto& v : basis) {
            CHECK_FALSE(m.apply(v).any());
            CHECK(span.insert(v));
        }
    }
}

TEST_CASE("matrix product against naive product", "[gf2]")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = oracle::random_matrix(rng, 5, 7);
        const auto b = oracle::random_matrix(rng, 7, 4);
        CHECK(a * b == oracle::naive_product(a, b));
    }
    CHECK_THROWS_AS(oracle::random_matrix(rng, 2, 3) * oracle::random_matrix(rng, 2, 3), Error);
}

TEST_CASE("gf2 inverse", "[gf2]")
{
    std::mt19937_64 rng(4);
    int invertible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = oracle::random_matrix(rng, 6, 6);
        const auto inv = gf2_inverse(m);
        CHECK(inv.has_value() == (gf2_rank(m) == 6));
        if (inv) {
            ++invertible;
            CHECK(m * *inv == GF2Matrix::identity(6));
        }
    }
    CHECK(invertible > 0);
}

TEST_CASE("cohomology matches exhaustive enumeration", "[gf2]")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = random_complex(rng, 12);
        REQUIRE(verify_square_zero(c).ok);
        CHECK(nonzero(cohomology_ranks(c)) == oracle::brute_cohomology(c.degrees(), c.differential()));
    }
}

TEST_CASE("square-zero witness and degree violations", "[gf2]")
{
    GF2Matrix d(3, 3);
    d.set(1, 0, true);
    d.set(2, 1, true);
    const GradedComplex broken({0, 1, 2}, d, {"a", "b", "c"});
    const auto report = verify_square_zero(broken);
    CHECK_FALSE(report.ok);
    REQUIRE(report.witness);
    CHECK(report.witness->first == 0);
    CHECK(report.witness->second == 2);
    CHECK_THROWS_AS(cohomology_ranks(broken), Error);

    GF2Matrix e(2, 2);
    e.set(1, 0, true);
    const GradedComplex skew({0, 2}, e);
    CHECK(skew.degree_violations().size() == 1);
    try {
        cohomology_ranks(skew);
        FAIL("expected DegreeViolation");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::DegreeViolation);
    }
    CHECK_THROWS_AS(GradedComplex({0, 1}, GF2Matrix(3, 3)), Error);
}

TEST_CASE("chain maps and quasi-isomorphisms", "[gf2]")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_complex(rng, 8);
        const auto id = GF2Matrix::identity(c.size());
        CHECK(verify_chain_map(c, c, id));
        CHECK(is_quasi_iso(c, c, id));

        // C2 = C plus an acyclic pair a -> b; the inclusion is a quasi-isomorphism.
        std::vector<int> degrees = c.degrees();
        degrees.push_back(1);
        degrees.push_back(2);
        GF2Matrix d(c.size() + 2, c.size() + 2);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j)
                d.set(i, j, c.differential().get(i, j));
        d.set(c.size() + 1, c.size(), true);
        const GradedComplex c2(degrees, d);
        GF2Matrix incl(c.size() + 2, c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            incl.set(i, i, true);
        CHECK(verify_chain_map(c, c2, incl));
        CHECK(is_quasi_iso(c, c2, incl));
        // Projection back is also a chain map and a quasi-isomorphism.
        CHECK(is_quasi_iso(c2, c, incl.transpose()));

        // The zero map is a quasi-isomorphism only when H = 0.
        const GF2Matrix zero(c.size(), c.size());
        CHECK(is_quasi_iso(c, c, zero) == (total_rank(cohomology_ranks(c)) == 0));

        const auto cone = mapping_cone(c, c2, incl);
        CHECK(cone.size() == c.size() + c2.size());
        CHECK(cone.degree(0) == c.degree(0) - 1);
        CHECK(verify_square_zero(cone).ok);
    }

    GF2Matrix d(2, 2);
    d.set(1, 0, true);
    const GradedComplex pair({0, 1}, d);
    const GradedComplex point({1}, GF2Matrix(1, 1));
    GF2Matrix phi(1, 2);
    phi.set(0, 1, true);
    CHECK_FALSE(verify_chain_map(pair, point, phi));
    try {
        is_quasi_iso(pair, point, phi);
        FAIL("expected NotChainMap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotChainMap);
    }
    GF2Matrix shift(1, 2);
    shift.set(0, 0, true);
    try {
        verify_chain_map(pair, point, shift);
        FAIL("expected DegreeViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegreeViolation);
    }
    CHECK_THROWS_AS(verify_chain_map(pair, point, GF2Matrix(2, 2)), Error);
}

TEST_CASE("spectral sequence pages", "[gf2][spectral]")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_filtered_complex(rng);
        REQUIRE_FALSE(f.filtration_violation());
        const auto table = spectral_pages(f, 2);

        // E_0 counts generators; E_1 is the cohomology of each graded piece.
        PageRanks e0, e1;
        for (std::size_t i = 0; i < f.complex().size(); ++i)
            e0[{f.level(i), f.complex().degree(i) - f.level(i)}] += 1;
        for (int p = f.min_level(); p <= f.max_level(); ++p) {
            const auto piece = graded_piece(f, p);
            for (auto [k, r] : oracle::brute_cohomology(piece.degrees(), piece.differential()))
                e1[{p, k - p}] = r;
        }
        CHECK(table.pages[0] == e0);
        CHECK(table.pages[1] == e1);

        std::map<int, int> by_degree;
        for (const auto& [pq, r] : table.infinity)
            by_degree[pq.first + pq.second] += r;
        CHECK(by_degree == oracle::brute_cohomology(f.complex().degrees(), f.complex().differential()));
    }
}

TEST_CASE("single-level filtration degenerates at E_1", "[gf2][spectral]")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_complex(rng, 10);
        const FilteredComplex f(c, std::vector<int>(c.size(), 0));
        const auto table = spectral_pages(f, 3);
        CHECK(table.pages[1] == table.infinity);
        CHECK(table.stable_from <= 1);
    }
}

TEST_CASE("filtration violations are rejected", "[gf2][spectral]")
{
    GF2Matrix d(2, 2);
    d.set(1, 0, true);
    const FilteredComplex f(GradedComplex({0, 1}, d), {1, 0});
    REQUIRE(f.filtration_violation());
    try {
        spectral_pages(f, 2);
        FAIL("expected FiltrationViolated");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FiltrationViolated);
    }
    CHECK_THROWS_AS(FilteredComplex(GradedComplex({0, 1}, d), {0}), Error);
}
