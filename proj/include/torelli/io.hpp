#pragma once

#include <gmpxx.h>

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "torelli/chartab.hpp"
#include "torelli/endo.hpp"
#include "torelli/errors.hpp"
#include "torelli/magnus.hpp"

// JSON schemas for automorphism specs and character tables. Numeric values
// that can exceed 64 bits travel as decimal strings; loaders accept either
// form.

namespace torelli::io {

using nlohmann::json;

inline mpz_class mpz_from_json(const json& j, const std::string& what) {
    if (j.is_string())
        return mpz_class(j.get<std::string>());
    if (j.is_number_integer())
        return mpz_class(std::to_string(j.get<long long>()));
    throw SchemaError(what + " must be an integer or a decimal string");
}

inline int int_from_json(const json& j, const std::string& what) {
    mpz_class v = mpz_from_json(j, what);
    if (!v.fits_sint_p())
        throw SchemaError(what + " out of range");
    return static_cast<int>(v.get_si());
}

struct AutoSpec {
    magnus::RingContextPtr ctx;
    endo::EndoSpec endo;
};

struct ContextDefaults {
    mpz_class prime = 2;
    int precision = 16;
    int degree = 3;
};

inline AutoSpec load_autospec(const json& doc, const ContextDefaults& defaults = {}) {
    if (!doc.is_object())
        throw SchemaError("automorphism spec must be a JSON object");
    mpz_class prime = doc.contains("prime") ? mpz_from_json(doc["prime"], "prime") : defaults.prime;
    int precision = doc.contains("precision") ? int_from_json(doc["precision"], "precision")
                                              : defaults.precision;
    int degree = doc.contains("degree") ? int_from_json(doc["degree"], "degree") : defaults.degree;

    if (!doc.contains("kind") || !doc["kind"].is_object())
        throw SchemaError("spec needs a kind object {\"free\": r} or {\"surface\": g}");
    magnus::RingContextPtr ctx;
    try {
        if (doc["kind"].contains("free"))
            ctx = magnus::RingContext::free_group(int_from_json(doc["kind"]["free"], "free rank"),
                                                  prime, precision, degree);
        else if (doc["kind"].contains("surface"))
            ctx = magnus::RingContext::surface_group(
                int_from_json(doc["kind"]["surface"], "genus"), prime, precision, degree);
        else
            throw SchemaError("kind must contain \"free\" or \"surface\"");
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(std::string("bad context parameters: ") + e.what());
    }

    if (!doc.contains("images") || !doc["images"].is_array())
        throw SchemaError("spec needs an images array, one word per generator");
    std::vector<magnus::GroupWord> images;
    for (const json& word : doc["images"]) {
        if (!word.is_array())
            throw SchemaError("each image must be an array of [generator, exponent] letters");
        magnus::GroupWord w;
        for (const json& letter : word) {
            if (!letter.is_array() || letter.size() != 2)
                throw SchemaError("each letter must be a [generator, exponent] pair");
            int gen = int_from_json(letter[0], "generator index");
            mpz_class exp = mpz_from_json(letter[1], "exponent");
            w = w * magnus::GroupWord::generator(gen, exp);
        }
        images.push_back(std::move(w));
    }
    try {
        return AutoSpec{ctx, endo::EndoSpec(ctx, std::move(images))};
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(std::string("bad automorphism spec: ") + e.what());
    }
}

inline json save_autospec(const AutoSpec& spec) {
    const magnus::RingContextPtr& ctx = spec.ctx;
    json doc;
    doc["prime"] = ctx->prime().get_str();
    doc["precision"] = ctx->precision();
    doc["degree"] = ctx->degree();
    if (ctx->is_surface())
        doc["kind"] = json{{"surface", ctx->genus()}};
    else
        doc["kind"] = json{{"free", ctx->generator_count()}};
    json images = json::array();
    for (const magnus::GroupWord& w : spec.endo.images()) {
        json word = json::array();
        for (const auto& letter : w.letters())
            word.push_back(json::array({letter.gen, letter.exp.get_str()}));
        images.push_back(std::move(word));
    }
    doc["images"] = std::move(images);
    return doc;
}

inline chartab::CharacterTable load_character_table(const json& doc) {
    if (!doc.is_object())
        throw SchemaError("character table must be a JSON object");
    for (const char* field : {"name", "order", "classes", "irreducibles"})
        if (!doc.contains(field))
            throw SchemaError(std::string("character table needs field \"") + field + "\"");

    std::vector<chartab::ConjugacyClass> classes;
    for (const json& c : doc["classes"]) {
        chartab::ConjugacyClass cls;
        cls.label = c.value("label", std::string("?"));
        cls.size = mpz_from_json(c.at("size"), "class size");
        cls.element_order = int_from_json(c.at("element_order"), "element order");
        cls.square_class = int_from_json(c.at("square_class"), "square class");
        classes.push_back(std::move(cls));
    }

    std::vector<chartab::ClassFunction> irreducibles;
    for (const json& row : doc["irreducibles"]) {
        chartab::ClassFunction values;
        for (const json& v : row) {
            if (v.is_string())
                values.push_back(chartab::Cyclotomic::parse(v.get<std::string>()));
            else
                values.push_back(chartab::Cyclotomic::integer(mpz_from_json(v, "character value")));
        }
        irreducibles.push_back(std::move(values));
    }

    try {
        return chartab::CharacterTable(doc["name"].get<std::string>(),
                                       mpz_from_json(doc["order"], "group order"),
                                       std::move(classes), std::move(irreducibles));
    } catch (const Error& e) {
        throw SchemaError(std::string("invalid character table: ") + e.what());
    }
}

inline json save_character_table(const chartab::CharacterTable& table) {
    json doc;
    doc["name"] = table.name();
    doc["order"] = table.order().get_str();
    json classes = json::array();
    for (const auto& c : table.classes()) {
        classes.push_back(json{{"label", c.label},
                               {"size", c.size.get_str()},
                               {"element_order", c.element_order},
                               {"square_class", c.square_class}});
    }
    doc["classes"] = std::move(classes);
    json irr = json::array();
    for (const auto& row : table.irreducibles()) {
        json r = json::array();
        for (const auto& v : row)
            r.push_back(v.to_string());
        irr.push_back(std::move(r));
    }
    doc["irreducibles"] = std::move(irr);
    return doc;
}

/// Integer combinations of table irreducibles: "2*chi_2", "chi_1 + 3*chi_7".
inline chartab::ActionCharacter parse_action(const chartab::CharacterTable& table,
                                             const std::string& text) {
    chartab::ClassFunction values(static_cast<size_t>(table.class_count()),
                                  chartab::Cyclotomic::zero());
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    bool first = true;
    while (true) {
        skip_ws();
        if (pos >= text.size()) {
            if (first)
                throw SchemaError("empty action expression");
            break;
        }
        int sign = 1;
        if (!first || text[pos] == '+' || text[pos] == '-') {
            if (text[pos] == '+') {
                ++pos;
            } else if (text[pos] == '-') {
                sign = -1;
                ++pos;
            } else if (!first) {
                throw SchemaError("expected '+' or '-' in action expression '" + text + "'");
            }
        }
        skip_ws();
        mpz_class coeff = 1;
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                ++pos;
            coeff = mpz_class(text.substr(start, pos - start));
            skip_ws();
            if (pos < text.size() && text[pos] == '*')
                ++pos;
            skip_ws();
        }
        if (text.compare(pos, 4, "chi_") != 0)
            throw SchemaError("expected chi_<index> in action expression '" + text + "'");
        pos += 4;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == start)
            throw SchemaError("missing irreducible index in action expression '" + text + "'");
        int index = std::stoi(text.substr(start, pos - start));
        if (index < 1 || index > table.irreducible_count())
            throw SchemaError("irreducible index chi_" + std::to_string(index) +
                              " out of range 1.." + std::to_string(table.irreducible_count()));
        const auto& row = table.irreducible(index - 1);
        for (int c = 0; c < table.class_count(); ++c)
            values[static_cast<size_t>(c)] =
                values[static_cast<size_t>(c)] +
                row[static_cast<size_t>(c)] * chartab::Cyclotomic::integer(sign * coeff);
        first = false;
    }
    return chartab::ActionCharacter{&table, std::move(values)};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError("cannot parse JSON in " + path + ": " + e.what());
    }
    return doc;
}

} // namespace torelli::io
