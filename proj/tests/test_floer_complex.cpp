#include <random>

#include <catch_amalgamated.hpp>

#include <pearl_floer/floer_complex.hpp>
#include <pearl_floer/random.hpp>
#include <pearl_floer/sphere_example.hpp>

#include "oracles.hpp"

using namespace pearl;

namespace {

Generator crit(std::string id, int deg) { return {std::move(id), GeneratorKind::Crit, deg, std::nullopt, std::nullopt}; }

Generator pair(std::string id, int deg, double action, std::string partner)
{
    return {std::move(id), GeneratorKind::Pair, deg, action, std::move(partner)};
}

FloerDatum embedded_datum(int n)
{
    FloerDatum d;
    d.ambient_dim = n;
    d.generators = {crit("y", 0), crit("y'", n)};
    return d;
}

// Two couples in n = 2 used as a base for single-violation datums.
FloerDatum base_datum()
{
    FloerDatum d;
    d.ambient_dim = 2;
    d.generators = {crit("m", 0), crit("M", 2), pair("a", 3, 1.0, "a'"), pair("a'", -1, -1.0, "a")};
    return d;
}

std::map<int, int> nonzero(const std::map<int, int>& ranks)
{
    std::map<int, int> out;
    for (auto [k, r] : ranks)
        if (r != 0)
            out[k] = r;
    return out;
}

} // namespace

TEST_CASE("validation codes", "[datum]")
{
    CHECK(validate_datum(base_datum()).ok());

    auto expect = [](const FloerDatum& d, const std::string& code) {
        const auto r = validate_datum(d);
        INFO(r.summary());
        CHECK(r.has(code));
    };
    {
        auto d = base_datum();
        d.ambient_dim = 0;
        expect(d, "ambient-dim");
    }
    {
        auto d = base_datum();
        d.generators[0].id = "";
        expect(d, "empty-id");
    }
    {
        auto d = base_datum();
        d.generators[1].id = "m";
        expect(d, "duplicate-id");
    }
    {
        auto d = base_datum();
        d.generators[0].action = 0.5;
        expect(d, "unexpected-action");
    }
    {
        auto d = base_datum();
        d.generators[0].partner = "a";
        expect(d, "unexpected-partner");
    }
    {
        auto d = base_datum();
        d.generators[2].action.reset();
        expect(d, "missing-action");
    }
    {
        auto d = base_datum();
        d.generators[2].partner.reset();
        expect(d, "missing-partner");
    }
    {
        auto d = base_datum();
        d.generators[2].partner = "zz";
        expect(d, "partner-missing");
    }
    {
        auto d = base_datum();
        d.generators[2].partner = "a";
        expect(d, "self-partner");
    }
    {
        auto d = base_datum();
        d.generators[2].partner = "m";
        expect(d, "partner-not-pair");
    }
    {
        auto d = base_datum();
        d.generators.push_back(pair("b", 1, 2.0, "a'"));
        expect(d, "partner-not-reciprocal");
    }
    {
        auto d = base_datum();
        d.generators[2].degree = 4;
        expect(d, "partner-degree-sum");
    }
    {
        auto d = base_datum();
        d.generators[2].action = 2.0;
        expect(d, "partner-action-sum");
    }
    {
        auto d = base_datum();
        d.differential.push_back({"m", "nowhere"});
        expect(d, "unknown-id");
    }
    {
        auto d = base_datum();
        d.differential.push_back({"m", "M"});
        expect(d, "degree");
    }
    {
        // pair -> crit from a positive-action pair.
        FloerDatum d;
        d.ambient_dim = 2;
        d.generators = {crit("m", 1), pair("a", 0, 1.0, "a'"), pair("a'", 2, -1.0, "a")};
        d.differential.push_back({"a", "m"});
        expect(d, "action-discipline");
        d.differential = {{"m", "a'"}};
        expect(d, "action-discipline");
    }
    {
        FloerDatum d;
        d.ambient_dim = 2;
        d.generators = {pair("a", 0, 1.0, "a'"), pair("a'", 2, -1.0, "a"), pair("b", 1, 2.0, "b'"),
                        pair("b'", 1, -2.0, "b")};
        d.differential = {{"b", "a'"}};
        expect(d, "action-discipline");
        d.differential = {{"a", "b"}};
        CHECK(validate_datum(d).ok());
    }
}

TEST_CASE("sphere datum complex", "[datum][sphere]")
{
    for (int n = 2; n <= 6; ++n) {
        const auto s = sphere_datum(n);
        CHECK(validate_datum(s.datum).ok());
        const auto c = assemble_differential(s.datum);
        CHECK(c.size() == 4);
        CHECK(c.differential().count_nonzero() == 2);
        CHECK(verify_square_zero(c).ok);
        CHECK(total_rank(floer_cohomology(s.datum)) == 0);
        const auto morse = nonzero(morse_cohomology(s.datum));
        CHECK(morse == std::map<int, int>{{0, 1}, {n, 1}});
        CHECK_FALSE(s.notes.empty());
    }
    const auto e = embedded_datum(3);
    CHECK(nonzero(floer_cohomology(e)) == std::map<int, int>{{0, 1}, {3, 1}});
}

TEST_CASE("assemble_differential rejects invalid datums", "[datum]")
{
    auto d = base_datum();
    d.differential.push_back({"a'", "M"});
    try {
        assemble_differential(d);
        FAIL("expected ValidationFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ValidationFailed);
    }
}

TEST_CASE("random valid datums square to zero and match the oracle", "[datum][property]")
{
    std::mt19937_64 rng(99);
    RandomDatumOptions small;
    small.max_generators = 12;
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_valid_datum(rng, trial % 2 ? small : RandomDatumOptions{});
        const auto report = validate_datum(d);
        INFO(report.summary());
        REQUIRE(report.ok());
        const auto c = assemble_differential(d);
        CHECK(verify_square_zero(c).ok);
        if (c.size() <= 12)
            CHECK(nonzero(cohomology_ranks(c)) == oracle::brute_cohomology(c.degrees(), c.differential()));
    }
}

TEST_CASE("mutated datums either stay complexes or yield a witness", "[datum][property]")
{
    std::mt19937_64 rng(100);
    int broken = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto d = random_valid_datum(rng);
        std::vector<std::pair<std::size_t, std::size_t>> legal;
        for (std::size_t i = 0; i < d.generators.size(); ++i)
            for (std::size_t j = 0; j < d.generators.size(); ++j)
                if (d.generators[j].degree == d.generators[i].degree + 1 &&
                    !action_discipline_violation(d.generators[i], d.generators[j]))
                    legal.emplace_back(i, j);
        if (legal.empty())
            continue;
        std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
        const auto [i, j] = legal[pick(rng)];
        d.differential.push_back({d.generators[i].id, d.generators[j].id});
        const auto c = assemble_differential(d);
        const auto report = verify_square_zero(c);
        const auto dd = oracle::naive_product(c.differential(), c.differential());
        CHECK(report.ok == dd.is_zero());
        if (!report.ok) {
            ++broken;
            REQUIRE(report.witness);
            CHECK(dd.get(report.witness->second, report.witness->first));
        }
    }
    CHECK(broken > 0);
}

TEST_CASE("positivity thresholds", "[datum][positivity]")
{
    CHECK(positivity_threshold(PositivityMode::Weak, 7) == 3.0);
    CHECK(positivity_threshold(PositivityMode::Strong, 2) == 3.0);
    CHECK(positivity_threshold(PositivityMode::Strong, 6) == 4.0);
    CHECK(positivity_threshold(PositivityMode::Strong, 5) == 3.5);
    for (int n = 2; n <= 8; ++n) {
        const auto r = check_positivity(sphere_datum(n).datum, PositivityMode::Strong);
        CHECK(r.pass);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].id == "gamma");
    }
    const auto one = check_positivity(sphere_datum(1).datum, PositivityMode::Strong);
    CHECK_FALSE(one.pass);
    CHECK(one.rows[0].degree == 2);
    CHECK(one.rows[0].threshold == 3.0);
    CHECK(check_positivity(embedded_datum(2), PositivityMode::Strong).rows.empty());
}

TEST_CASE("degeneration budgets", "[datum][audit]")
{
    for (int n = 2; n <= 10; n += 2) {
        const DegenerationPattern ghost{{GhostStrip{(n + 2) / 2}}};
        CHECK(degeneration_budget(ghost, n) == 2);
        CHECK(audit_pattern(ghost, n).excluded_from_differential);
        CHECK_FALSE(audit_pattern(ghost, n).excluded_from_square);
        try {
            degeneration_budget({{GhostStrip{n / 2}}}, n);
            FAIL("expected InconsistentPattern");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InconsistentPattern);
        }
    }
    CHECK(degeneration_budget({{Strip{1, 1}}}, 3) >= 3);
    CHECK(degeneration_budget({{Strip{1, 0}}}, 3) == 1);
    CHECK(degeneration_budget({{BoundaryPearl{}}}, 4) == 2);
    CHECK(degeneration_budget({{PearlToMin{0}}}, 4) == 1);
    CHECK(degeneration_budget({{PearlToMin{1}}}, 4) == 3);
    CHECK(degeneration_budget({{MaxToPearl{2}}}, 4) == 3);
    CHECK(degeneration_budget({{Splice{}}}, 4) == 2);
    CHECK(degeneration_budget({{Splice{3, 3}}}, 4) == 2);
    CHECK_THROWS_AS(degeneration_budget({{Splice{2, 3}}}, 4), Error);
    CHECK(degeneration_budget({{MorseEdge{}, Strip{1, 0}}}, 2) == 2);
    CHECK_THROWS_AS(degeneration_budget({{MorseEdge{0}}}, 2), Error);
    CHECK(audit_pattern({{Strip{1, 1}}}, 3).excluded_from_square);
    CHECK_FALSE(audit_pattern({{Strip{1, 0}}}, 3).excluded_from_differential);
}

TEST_CASE("strip energy", "[datum]")
{
    CHECK(strip_energy(1.0, 0.0, {}) == 1.0);
    CHECK(strip_energy(3.0, 1.0, {0.5, 0.25}) == 1.25);
}

TEST_CASE("action filtration of the sphere datum", "[datum][spectral]")
{
    const int n = 3;
    const auto f = action_filtration(sphere_datum(n).datum);
    CHECK(f.warnings.empty());
    CHECK(f.filtered.levels() == std::vector<int>{kLevelMorse, kLevelMorse, kLevelPositive, kLevelNegative});

    const auto table = spectral_pages(f.filtered, 3);
    const PageRanks e1{{{0, -1}, 1}, {{1, -1}, 1}, {{1, n - 1}, 1}, {{2, n - 1}, 1}};
    CHECK(table.pages[1] == e1);
    CHECK(table.pages[2].empty());
    CHECK(table.infinity.empty());

    FloerDatum z;
    z.ambient_dim = 2;
    z.generators = {pair("a", 1, 0.0, "b"), pair("b", 1, 0.0, "a")};
    const auto fz = action_filtration(z);
    CHECK(fz.warnings.size() == 2);
    CHECK(fz.filtered.levels() == std::vector<int>{kLevelPositive, kLevelPositive});
}

TEST_CASE("rank inequality", "[datum][spectral]")
{
    for (int n = 2; n <= 6; ++n) {
        const auto r = rank_inequality_report(sphere_datum(n).datum);
        CHECK(r.card_R == 2);
        CHECK(r.sum_betti == 2);
        CHECK(r.sum_HF == 0);
        CHECK(r.holds);
        CHECK(r.tight);
    }
    const auto e = rank_inequality_report(embedded_datum(4));
    CHECK(e.card_R == 0);
    CHECK(e.sum_betti == e.sum_HF);
    CHECK(e.holds);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = random_valid_datum(rng);
        const auto r = rank_inequality_report(d, 1);
        CHECK(r.holds);
        CHECK(r.sum_HF == total_rank(cohomology_ranks(assemble_differential(d))));
    }
}
