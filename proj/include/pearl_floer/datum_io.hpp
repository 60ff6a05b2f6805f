/**
 * JSON file formats: FLD v1 datums, degeneration patterns for `audit` and
 * generator maps for `verify-map`.
 *
 * FLD v1:
 *   { "version": 1, "ambient_dim": n,
 *     "generators": [ {"id", "kind": "crit"|"pair", "degree", "action", "partner"} ],
 *     "differential": [ {"from", "to"} ] }
 *
 * Map file: { "entries": [ {"from": id in C1, "to": id in C2} ] }.
 * Repeated entries cancel over GF(2), in both the differential and maps.
 */
#ifndef PEARL_FLOER_DATUM_IO_HPP
#define PEARL_FLOER_DATUM_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "floer_complex.hpp"
#include "gf2.hpp"

namespace pearl {

using Json = nlohmann::ordered_json;

inline constexpr int kFldVersion = 1;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

template <class T>
T field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        parse_fail(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        parse_fail(where + ": field '" + key + "' has the wrong type");
    }
}

inline int int_field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        parse_fail(where + ": missing field '" + key + "'");
    if (!j.at(key).is_number_integer())
        parse_fail(where + ": field '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

} // namespace detail

inline Json datum_to_json(const FloerDatum& d)
{
    Json j;
    j["version"] = kFldVersion;
    j["ambient_dim"] = d.ambient_dim;
    Json gens = Json::array();
    for (const auto& g : d.generators) {
        Json e;
        e["id"] = g.id;
        e["kind"] = g.is_pair() ? "pair" : "crit";
        e["degree"] = g.degree;
        if (g.action)
            e["action"] = *g.action;
        if (g.partner)
            e["partner"] = *g.partner;
        gens.push_back(std::move(e));
    }
    j["generators"] = std::move(gens);
    Json diff = Json::array();
    for (const auto& e : d.differential)
        diff.push_back({{"from", e.from}, {"to", e.to}});
    j["differential"] = std::move(diff);
    return j;
}

inline FloerDatum datum_from_json(const Json& j)
{
    if (!j.is_object())
        detail::parse_fail("datum must be a JSON object");
    const int version = detail::int_field(j, "version", "datum");
    if (version != kFldVersion)
        detail::parse_fail("unsupported datum version " + std::to_string(version));
    FloerDatum d;
    d.ambient_dim = detail::int_field(j, "ambient_dim", "datum");
    if (!j.contains("generators") || !j["generators"].is_array())
        detail::parse_fail("datum: 'generators' must be an array");
    std::size_t k = 0;
    for (const auto& e : j["generators"]) {
        const std::string where = "generator " + std::to_string(k++);
        Generator g;
        g.id = detail::field<std::string>(e, "id", where);
        const auto kind = detail::field<std::string>(e, "kind", where);
        if (kind == "crit")
            g.kind = GeneratorKind::Crit;
        else if (kind == "pair")
            g.kind = GeneratorKind::Pair;
        else
            detail::parse_fail(where + ": kind must be 'crit' or 'pair'");
        g.degree = detail::int_field(e, "degree", where);
        if (e.contains("action")) {
            if (!e["action"].is_number())
                detail::parse_fail(where + ": action must be a number");
            g.action = e["action"].get<double>();
        }
        if (e.contains("partner"))
            g.partner = detail::field<std::string>(e, "partner", where);
        d.generators.push_back(std::move(g));
    }
    if (j.contains("differential")) {
        if (!j["differential"].is_array())
            detail::parse_fail("datum: 'differential' must be an array");
        k = 0;
        for (const auto& e : j["differential"]) {
            const std::string where = "differential entry " + std::to_string(k++);
            d.differential.push_back(
                {detail::field<std::string>(e, "from", where), detail::field<std::string>(e, "to", where)});
        }
    }
    return d;
}

inline Json parse_json(const std::string& text, const std::string& source)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, source + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out)
        throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

inline std::string datum_to_string(const FloerDatum& d) { return datum_to_json(d).dump(2) + "\n"; }

inline FloerDatum datum_from_string(const std::string& text, const std::string& source = "datum")
{
    return datum_from_json(parse_json(text, source));
}

inline FloerDatum read_datum(const std::string& path) { return datum_from_string(read_text_file(path), path); }

inline void write_datum(const std::string& path, const FloerDatum& d) { write_text_file(path, datum_to_string(d)); }

// ---------------------------------------------------------------------------
// Patterns

inline DegenerationPattern pattern_from_json(const Json& j)
{
    const Json* list = &j;
    if (j.is_object() && j.contains("pieces"))
        list = &j["pieces"];
    if (!list->is_array())
        detail::parse_fail("pattern must be a JSON list of pieces");
    DegenerationPattern pattern;
    std::size_t k = 0;
    for (const auto& e : *list) {
        const std::string where = "piece " + std::to_string(k++);
        std::string tag;
        if (e.is_string())
            tag = e.get<std::string>();
        else
            tag = detail::field<std::string>(e, "tag", where);
        auto opt_int = [&](const char* key, int fallback) {
            return e.is_object() && e.contains(key) ? detail::int_field(e, key, where) : fallback;
        };
        if (tag == "morse") {
            pattern.pieces.emplace_back(MorseEdge{opt_int("index_drop", 1)});
        } else if (tag == "strip") {
            pattern.pieces.emplace_back(Strip{opt_int("ind_u", 1), opt_int("jumps", 0)});
        } else if (tag == "ghost") {
            pattern.pieces.emplace_back(GhostStrip{detail::int_field(e, "ind_pq", where)});
        } else if (tag == "splice") {
            Splice s;
            if (e.is_object() && e.contains("ind_out"))
                s.ind_out = detail::int_field(e, "ind_out", where);
            if (e.is_object() && e.contains("ind_in_complement"))
                s.ind_in_complement = detail::int_field(e, "ind_in_complement", where);
            pattern.pieces.emplace_back(s);
        } else if (tag == "boundary_pearl") {
            pattern.pieces.emplace_back(BoundaryPearl{});
        } else if (tag == "pearl_to_min") {
            pattern.pieces.emplace_back(PearlToMin{opt_int("jumps", 0)});
        } else if (tag == "max_to_pearl") {
            pattern.pieces.emplace_back(MaxToPearl{opt_int("jumps", 0)});
        } else {
            detail::parse_fail(where + ": unknown tag '" + tag + "'");
        }
    }
    return pattern;
}

inline DegenerationPattern read_pattern(const std::string& path)
{
    return pattern_from_json(parse_json(read_text_file(path), path));
}

// ---------------------------------------------------------------------------
// Generator maps

inline GF2Matrix map_from_json(const Json& j, const FloerDatum& c1, const FloerDatum& c2)
{
    const Json* list = &j;
    if (j.is_object() && j.contains("entries"))
        list = &j["entries"];
    if (!list->is_array())
        detail::parse_fail("map file must contain a list of entries");
    GF2Matrix phi(c2.generators.size(), c1.generators.size());
    std::size_t k = 0;
    for (const auto& e : *list) {
        const std::string where = "map entry " + std::to_string(k++);
        const auto from = detail::field<std::string>(e, "from", where);
        const auto to = detail::field<std::string>(e, "to", where);
        const auto j1 = c1.find(from);
        const auto i2 = c2.find(to);
        if (!j1)
            detail::parse_fail(where + ": unknown source generator '" + from + "'");
        if (!i2)
            detail::parse_fail(where + ": unknown target generator '" + to + "'");
        phi.flip(*i2, *j1);
    }
    return phi;
}

inline GF2Matrix read_map(const std::string& path, const FloerDatum& c1, const FloerDatum& c2)
{
    return map_from_json(parse_json(read_text_file(path), path), c1, c2);
}

} // namespace pearl

#endif
