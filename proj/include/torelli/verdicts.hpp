#pragma once

#include <gmpxx.h>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "torelli/chartab.hpp"
#include "torelli/errors.hpp"

// Torsion certificates from character theory: a finite automorphism group B
// with no invariants on Hom(V, V (x) V) bounds the order of the class by
// #B. This layer certifies that sufficient condition and ships the built-in
// demonstrations; it never claims non-torsion.

namespace torelli::verdicts {

using nlohmann::json;

enum class Outcome { Certified, NotCertified };

inline const char* to_string(Outcome o) {
    return o == Outcome::Certified ? "Certified" : "NotCertified";
}

/// Result of the invariant-dimension criterion, with the arithmetic trace
/// retained so the certificate can be re-checked downstream.
struct TorsionVerdict {
    Outcome outcome = Outcome::NotCertified;
    mpz_class bound;                             // = #B, meaningful iff Certified
    mpz_class invariant_dim;                     // dim Hom(V, V (x) V)^B
    std::vector<std::string> class_contributions; // per-class terms of the inner product
    std::vector<std::string> caveats;

    bool certified() const { return outcome == Outcome::Certified; }

    json to_json() const {
        json j;
        j["outcome"] = to_string(outcome);
        if (certified())
            j["bound"] = bound.get_str();
        j["invariant_dim"] = invariant_dim.get_str();
        j["class_contributions"] = class_contributions;
        j["caveats"] = caveats;
        return j;
    }
};

/// Certified iff dim Hom(V, V (x) V)^B = 0 exactly; then the class order
/// divides the group order. The certificate is rational-representation
/// arithmetic, so a caveat about the unchecked mod-2 hypothesis is always
/// attached.
inline TorsionVerdict torsion_verdict(const chartab::ActionCharacter& chi_v,
                                      const mpz_class& group_order) {
    TorsionVerdict v;
    v.invariant_dim = chartab::hom_invariant_dim(chi_v);
    v.outcome = v.invariant_dim == 0 ? Outcome::Certified : Outcome::NotCertified;
    v.bound = group_order;
    const chartab::CharacterTable& table = *chi_v.table;
    chartab::ClassFunction cube = chartab::tensor(chi_v.values, chi_v.values);
    for (int c = 0; c < table.class_count(); ++c) {
        chartab::Cyclotomic term = cube[static_cast<size_t>(c)] *
                                   chi_v.values[static_cast<size_t>(c)].conj() *
                                   chartab::Cyclotomic::integer(table.classes()[static_cast<size_t>(c)].size);
        v.class_contributions.push_back(table.classes()[static_cast<size_t>(c)].label + ": " +
                                        term.to_string());
    }
    v.caveats.push_back("rational certificate only; the mod-2 invariant hypothesis is not checked");
    return v;
}

struct Report {
    std::string text;
    json data;
    bool ok = true;
};

/// The cyclic table {1, iota}.
inline chartab::CharacterTable order_two_table() {
    using chartab::Cyclotomic;
    auto Z = [](long v) { return Cyclotomic::integer(v); };
    return chartab::CharacterTable(
        "C2", 2, {{"1a", 1, 1, 0}, {"2a", 1, 2, 0}},
        {{Z(1), Z(1)}, {Z(1), Z(-1)}});
}

/// The involution acts on H^1 of a genus-g curve as -1, so the action
/// character is 2g times the sign character and the invariant dimension
/// cancels to zero: the class is 2-torsion.
inline Report demo_hyperelliptic(int genus) {
    if (genus < 1)
        throw Error("genus must be at least 1");
    chartab::CharacterTable table = order_two_table();
    chartab::ActionCharacter chi_v{
        &table,
        {chartab::Cyclotomic::integer(2 * genus), chartab::Cyclotomic::integer(-2 * genus)}};
    TorsionVerdict verdict = torsion_verdict(chi_v, table.order());

    const long dim = 2L * genus;
    const long cube = dim * dim * dim;
    std::ostringstream text;
    text << "hyperelliptic criterion, genus " << genus << "\n";
    text << "  involution acts on H^1 (dimension " << dim << ") as multiplication by -1\n";
    text << "  action character: chi_V = " << dim << "*chi_2 = (" << dim << ", " << -dim
         << ")\n";
    text << "  invariant dimension <chi_V chi_V, chi_V> = (" << cube << " - " << cube
         << ") / 2 = " << verdict.invariant_dim.get_str() << "\n";
    if (verdict.certified())
        text << "  verdict: torsion, order divides 2  (bound " << verdict.bound.get_str()
             << ")\n";
    else
        text << "  verdict: not certified\n";
    for (const std::string& c : verdict.caveats)
        text << "  caveat: " << c << "\n";

    Report report;
    report.text = text.str();
    report.ok = verdict.certified();
    report.data = json{{"demo", "hyperelliptic"},
                       {"genus", genus},
                       {"h1_dimension", std::to_string(dim)},
                       {"verdict", verdict.to_json()}};
    return report;
}

namespace detail {

/// Renders one class contribution of <chi^2, chi> the way the inner product
/// expands by hand: |chi(c)| * |chi(c)^2| * size with unit factors dropped.
inline std::string factored_contribution(const mpz_class& chi_value, const mpz_class& size) {
    mpz_class sq = chi_value * chi_value;
    mpz_class a = abs(chi_value);
    std::vector<std::string> factors;
    if (a != 1)
        factors.push_back(a.get_str());
    if (sq != 1)
        factors.push_back(sq.get_str());
    if (size != 1 || factors.empty())
        factors.push_back(size.get_str());
    std::string out;
    for (size_t i = 0; i < factors.size(); ++i) {
        if (i > 0)
            out += "*";
        out += factors[i];
    }
    return out;
}

} // namespace detail

/// Full chain for the genus-7 curve with automorphism group PSL(2,8):
/// identify chi_2 as the only 7-dimensional irreducible whose chi + conj
/// is rational, build chi_V = 2 chi_2, reproduce the vanishing inner
/// product, certify torsion of order dividing 504, and push the order-2
/// quotient through Lefschetz and Riemann-Hurwitz.
inline Report demo_fricke_macbeath() {
    const chartab::CharacterTable& table = chartab::CharacterTable::psl2_8();
    Report report;
    report.data["demo"] = "fricke-macbeath";
    std::ostringstream text;
    text << "Fricke-Macbeath criterion (" << table.name() << ", order "
         << table.order().get_str() << ")\n";

    // (1) the unique rational chi + conj(chi) in dimension 7
    std::vector<int> sevens = chartab::rational_sum_filter(table, 7);
    text << "  7-dimensional irreducibles with rational chi + conj(chi):";
    json filter = json::array();
    for (int i : sevens) {
        text << " chi_" << (i + 1);
        filter.push_back("chi_" + std::to_string(i + 1));
    }
    text << "\n";
    report.data["rational_sum_filter_dim7"] = filter;
    bool unique_chi2 = sevens == std::vector<int>{1};
    report.ok = unique_chi2;

    // (2) the action character on H^1
    const chartab::ClassFunction& chi2 = table.irreducible(1);
    chartab::ClassFunction values(static_cast<size_t>(table.class_count()),
                                  chartab::Cyclotomic::zero());
    for (int c = 0; c < table.class_count(); ++c)
        values[static_cast<size_t>(c)] =
            chi2[static_cast<size_t>(c)] * chartab::Cyclotomic::integer(2);
    chartab::ActionCharacter chi_v{&table, std::move(values)};
    text << "  action character on H^1: chi_V = 2*chi_2\n";

    // (3) <chi_2 (x) chi_2, chi_2> rendered class by class
    mpq_class ip = chartab::inner_product(table, chartab::tensor(chi2, chi2), chi2);
    std::string expansion;
    for (int c = 0; c < table.class_count(); ++c) {
        mpz_class value = chi2[static_cast<size_t>(c)].rational_value();
        mpz_class contribution =
            value * value * value * table.classes()[static_cast<size_t>(c)].size;
        if (contribution == 0)
            continue;
        std::string term =
            detail::factored_contribution(value, table.classes()[static_cast<size_t>(c)].size);
        if (expansion.empty())
            expansion = (contribution < 0 ? "-" : "") + term;
        else
            expansion += (contribution < 0 ? " - " : " + ") + term;
    }
    text << "  <chi_2 (x) chi_2, chi_2> = (" << expansion << ") / "
         << table.order().get_str() << " = " << ip.get_str() << "\n";
    report.data["inner_product_expansion"] = expansion;
    report.data["inner_product"] = ip.get_str();
    report.ok = report.ok && ip == 0;

    // (4) verdict
    TorsionVerdict verdict = torsion_verdict(chi_v, table.order());
    text << "  invariant dimension <chi_V chi_V, chi_V> = " << verdict.invariant_dim.get_str()
         << "\n";
    if (verdict.certified())
        text << "  verdict: torsion, order divides " << verdict.bound.get_str() << "  (bound "
             << verdict.bound.get_str() << ")\n";
    else
        text << "  verdict: not certified\n";
    report.data["verdict"] = verdict.to_json();
    report.ok = report.ok && verdict.certified();

    // (5) the order-2 quotient
    mpz_class trace_z = chi_v.values[1].rational_value();
    long trace = static_cast<long>(trace_z.get_si());
    long fixed = chartab::lefschetz_fixed_points(trace);
    long quotient = chartab::quotient_genus(7, 2, fixed);
    text << "  order-2 quotient: trace on H^1 = " << trace << ", fixed points = " << fixed
         << ", quotient genus = " << quotient << "\n";
    report.data["involution"] = json{{"trace_on_h1", std::to_string(trace)},
                                     {"fixed_points", std::to_string(fixed)},
                                     {"quotient_genus", std::to_string(quotient)}};
    report.ok = report.ok && fixed == 4 && quotient == 3;

    for (const std::string& c : verdict.caveats)
        text << "  caveat: " << c << "\n";
    report.text = text.str();
    return report;
}

} // namespace torelli::verdicts
