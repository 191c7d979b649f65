#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torelli/errors.hpp"

// Exact character theory of finite groups over cyclotomic integers:
// canonical-form arithmetic in Z[zeta_n], tables with power-map data,
// inner products, tensor/alternating/symmetric squares, and the small
// fixed-point bookkeeping around them. Everything here is over Q(zeta_n);
// nothing is l-adic.

namespace torelli::chartab {

namespace detail {

using Poly = std::vector<mpz_class>; // index = degree, no trailing zeros

inline void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty())
        return {};
    Poly out(a.size() + b.size() - 1, mpz_class(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    poly_trim(out);
    return out;
}

/// Exact quotient by a monic divisor.
inline Poly poly_divexact(Poly num, const Poly& den) {
    if (den.empty() || den.back() != 1)
        throw Error("poly_divexact: divisor must be monic");
    Poly q(num.size() > den.size() - 1 ? num.size() - den.size() + 1 : 0, mpz_class(0));
    for (size_t k = q.size(); k-- > 0;) {
        mpz_class c = num[k + den.size() - 1];
        q[k] = c;
        if (c == 0)
            continue;
        for (size_t j = 0; j < den.size(); ++j)
            num[k + j] -= c * den[j];
    }
    poly_trim(num);
    if (!num.empty())
        throw Error("poly_divexact: division not exact");
    return q;
}

/// The n-th cyclotomic polynomial: (x^n - 1) / prod_{d | n, d < n} Phi_d.
inline const Poly& cyclotomic_polynomial(long n) {
    thread_local std::map<long, Poly> cache;
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    Poly p(static_cast<size_t>(n) + 1, mpz_class(0));
    p[0] = -1;
    p[static_cast<size_t>(n)] = 1;
    for (long d = 1; d < n; ++d)
        if (n % d == 0)
            p = poly_divexact(std::move(p), cyclotomic_polynomial(d));
    return cache.emplace(n, std::move(p)).first->second;
}

inline long euler_phi(long n) {
    return static_cast<long>(cyclotomic_polynomial(n).size()) - 1;
}

} // namespace detail

/// Exact element of Z[zeta_n], kept in the canonical form obtained by
/// reducing the exponent polynomial modulo the n-th cyclotomic polynomial.
/// Two expressions in roots of unity are equal exactly when their canonical
/// forms agree, which realizes equality under the vanishing sums of p-th
/// roots for each prime p dividing n.
class Cyclotomic {
public:
    Cyclotomic() : conductor_(1) {}

    Cyclotomic(long conductor, std::map<long, mpz_class> coeffs) : conductor_(conductor) {
        if (conductor < 1)
            throw Error("conductor must be positive");
        for (auto& [k, c] : coeffs) {
            if (k < 0 || k >= conductor)
                throw Error("root-of-unity exponent out of range");
            coeffs_[k] = std::move(c);
        }
        canonicalize();
    }

    static Cyclotomic integer(const mpz_class& v) {
        Cyclotomic out;
        if (v != 0)
            out.coeffs_[0] = v;
        return out;
    }

    static Cyclotomic zero() { return Cyclotomic(); }

    /// zeta_n^k.
    static Cyclotomic root_of_unity(long n, long k) {
        k %= n;
        if (k < 0)
            k += n;
        Cyclotomic out;
        out.conductor_ = n;
        out.coeffs_[k] = 1;
        out.canonicalize();
        return out;
    }

    long conductor() const { return conductor_; }
    const std::map<long, mpz_class>& coefficients() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_rational() const {
        return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == 0);
    }
    mpz_class rational_value() const {
        if (!is_rational())
            throw NonRationalResult("value is not rational: " + to_string());
        return coeffs_.empty() ? mpz_class(0) : coeffs_.begin()->second;
    }

    Cyclotomic operator+(const Cyclotomic& o) const {
        auto [a, b] = aligned(*this, o);
        for (const auto& [k, c] : b.coeffs_) {
            auto it = a.coeffs_.find(k);
            if (it == a.coeffs_.end()) {
                a.coeffs_[k] = c;
            } else {
                it->second += c;
                if (it->second == 0)
                    a.coeffs_.erase(it);
            }
        }
        return a;
    }

    Cyclotomic operator-() const {
        Cyclotomic out = *this;
        for (auto& [k, c] : out.coeffs_)
            c = -c;
        return out;
    }

    Cyclotomic operator-(const Cyclotomic& o) const { return *this + (-o); }

    Cyclotomic operator*(const Cyclotomic& o) const {
        auto [a, b] = aligned(*this, o);
        Cyclotomic out;
        out.conductor_ = a.conductor_;
        for (const auto& [ka, ca] : a.coeffs_)
            for (const auto& [kb, cb] : b.coeffs_) {
                long k = (ka + kb) % out.conductor_;
                auto it = out.coeffs_.find(k);
                if (it == out.coeffs_.end())
                    out.coeffs_[k] = ca * cb;
                else
                    it->second += ca * cb;
            }
        out.canonicalize();
        return out;
    }

    /// Complex conjugation, zeta -> zeta^{-1}.
    Cyclotomic conj() const {
        Cyclotomic out;
        out.conductor_ = conductor_;
        for (const auto& [k, c] : coeffs_) {
            long kk = k == 0 ? 0 : conductor_ - k;
            out.coeffs_[kk] = c;
        }
        out.canonicalize();
        return out;
    }

    /// Exact division by a rational integer; throws if any coefficient
    /// fails to divide.
    Cyclotomic divexact(const mpz_class& d) const {
        Cyclotomic out = *this;
        for (auto& [k, c] : out.coeffs_) {
            if (!mpz_divisible_p(c.get_mpz_t(), d.get_mpz_t()))
                throw Error("cyclotomic coefficient not divisible by " + d.get_str());
            mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
        }
        return out;
    }

    bool operator==(const Cyclotomic& o) const {
        auto [a, b] = aligned(*this, o);
        return a.coeffs_ == b.coeffs_;
    }
    bool operator!=(const Cyclotomic& o) const { return !(*this == o); }

    /// Grammar: value = term (("+"|"-") term)*, term = int | int "*z(" n ")^" k.
    std::string to_string() const {
        if (coeffs_.empty())
            return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [k, c] : coeffs_) {
            bool neg = c < 0;
            mpz_class a = abs(c);
            if (first) {
                if (neg)
                    out << "-";
                first = false;
            } else {
                out << (neg ? " - " : " + ");
            }
            out << a.get_str();
            if (k != 0)
                out << "*z(" << conductor_ << ")^" << k;
        }
        return out.str();
    }

    static Cyclotomic parse(const std::string& text);

private:
    /// Promote both operands to the lcm conductor.
    static std::pair<Cyclotomic, Cyclotomic> aligned(const Cyclotomic& x, const Cyclotomic& y) {
        if (x.conductor_ == y.conductor_)
            return {x, y};
        long g = std::gcd(x.conductor_, y.conductor_);
        long m = x.conductor_ / g * y.conductor_;
        return {x.promoted(m), y.promoted(m)};
    }

    Cyclotomic promoted(long m) const {
        long f = m / conductor_;
        Cyclotomic out;
        out.conductor_ = m;
        for (const auto& [k, c] : coeffs_)
            out.coeffs_[k * f] = c;
        out.canonicalize();
        return out;
    }

    void canonicalize() {
        if (coeffs_.empty())
            return;
        const detail::Poly& phi = detail::cyclotomic_polynomial(conductor_);
        const long deg = static_cast<long>(phi.size()) - 1;
        long top = coeffs_.rbegin()->first;
        if (top < deg) {
            for (auto it = coeffs_.begin(); it != coeffs_.end();)
                it = it->second == 0 ? coeffs_.erase(it) : std::next(it);
            return;
        }
        std::vector<mpz_class> dense(static_cast<size_t>(top) + 1, mpz_class(0));
        for (const auto& [k, c] : coeffs_)
            dense[static_cast<size_t>(k)] = c;
        for (long k = top; k >= deg; --k) {
            mpz_class c = dense[static_cast<size_t>(k)];
            if (c == 0)
                continue;
            for (long j = 0; j <= deg; ++j)
                dense[static_cast<size_t>(k - deg + j)] -= c * phi[static_cast<size_t>(j)];
        }
        coeffs_.clear();
        for (long k = 0; k < deg && k < static_cast<long>(dense.size()); ++k)
            if (dense[static_cast<size_t>(k)] != 0)
                coeffs_[k] = dense[static_cast<size_t>(k)];
    }

    long conductor_;
    std::map<long, mpz_class> coeffs_;
};

inline Cyclotomic Cyclotomic::parse(const std::string& text) {
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto parse_int = [&]() -> mpz_class {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
            ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(text[start]))))
            throw SchemaError("expected integer at position " + std::to_string(start) +
                              " in cyclotomic value '" + text + "'");
        return mpz_class(text.substr(start, pos - start));
    };
    auto expect = [&](const std::string& s) {
        skip_ws();
        if (text.compare(pos, s.size(), s) != 0)
            throw SchemaError("expected '" + s + "' in cyclotomic value '" + text + "'");
        pos += s.size();
    };

    Cyclotomic total;
    bool first = true;
    while (true) {
        skip_ws();
        if (pos >= text.size()) {
            if (first)
                throw SchemaError("empty cyclotomic value");
            break;
        }
        int sign = 1;
        if (!first) {
            if (text[pos] == '+') {
                ++pos;
            } else if (text[pos] == '-') {
                sign = -1;
                ++pos;
            } else {
                throw SchemaError("expected '+' or '-' in cyclotomic value '" + text + "'");
            }
        }
        mpz_class coeff = parse_int();
        skip_ws();
        if (pos < text.size() && text[pos] == '*') {
            ++pos;
            expect("z(");
            mpz_class n_big = parse_int();
            expect(")^");
            mpz_class k_big = parse_int();
            if (n_big < 1 || !n_big.fits_slong_p() || !k_big.fits_slong_p())
                throw SchemaError("bad root of unity in '" + text + "'");
            long n = n_big.get_si();
            long k = k_big.get_si();
            total = total + Cyclotomic::root_of_unity(n, k) * Cyclotomic::integer(sign * coeff);
        } else {
            total = total + Cyclotomic::integer(sign * coeff);
        }
        first = false;
    }
    return total;
}

struct ConjugacyClass {
    std::string label;
    mpz_class size;
    long element_order = 1;
    int square_class = 0; // index of the class containing g^2
};

/// A class function given by one value per conjugacy class.
using ClassFunction = std::vector<Cyclotomic>;

/// Character table with class power data. Orthonormality of the rows and
/// the basic counting identities are validated on construction.
class CharacterTable {
public:
    CharacterTable(std::string name, mpz_class order, std::vector<ConjugacyClass> classes,
                   std::vector<ClassFunction> irreducibles)
        : name_(std::move(name)), order_(std::move(order)), classes_(std::move(classes)),
          irreducibles_(std::move(irreducibles)) {
        validate();
    }

    const std::string& name() const { return name_; }
    const mpz_class& order() const { return order_; }
    const std::vector<ConjugacyClass>& classes() const { return classes_; }
    int class_count() const { return static_cast<int>(classes_.size()); }
    const std::vector<ClassFunction>& irreducibles() const { return irreducibles_; }
    int irreducible_count() const { return static_cast<int>(irreducibles_.size()); }
    const ClassFunction& irreducible(int i) const { return irreducibles_[static_cast<size_t>(i)]; }

    /// Degree of the i-th irreducible.
    mpz_class degree(int i) const { return irreducibles_[static_cast<size_t>(i)][0].rational_value(); }

    /// The built-in character table of PSL(2,8), order 504. Square-class
    /// data comes from exponent doubling on the root-of-unity arguments
    /// (order-7 and order-9 classes each form a 3-cycle under squaring) and
    /// is cross-validated by the alternating/symmetric square characters.
    static const CharacterTable& psl2_8();

private:
    void validate() const;

    std::string name_;
    mpz_class order_;
    std::vector<ConjugacyClass> classes_;
    std::vector<ClassFunction> irreducibles_;
};

/// (1/|G|) sum_c |c| a(c) conj(b)(c); must reduce to a rational number.
inline mpq_class inner_product(const CharacterTable& table, const ClassFunction& a,
                               const ClassFunction& b) {
    if (static_cast<int>(a.size()) != table.class_count() ||
        static_cast<int>(b.size()) != table.class_count())
        throw Error("class function length does not match the table");
    Cyclotomic sum;
    for (int c = 0; c < table.class_count(); ++c) {
        Cyclotomic term = a[static_cast<size_t>(c)] * b[static_cast<size_t>(c)].conj();
        sum = sum + term * Cyclotomic::integer(table.classes()[static_cast<size_t>(c)].size);
    }
    if (!sum.is_rational())
        throw NonRationalResult("inner product did not reduce to a rational: " + sum.to_string());
    mpq_class q(sum.rational_value(), table.order());
    q.canonicalize();
    return q;
}

inline ClassFunction tensor(const ClassFunction& a, const ClassFunction& b) {
    if (a.size() != b.size())
        throw Error("class function length mismatch");
    ClassFunction out;
    out.reserve(a.size());
    for (size_t c = 0; c < a.size(); ++c)
        out.push_back(a[c] * b[c]);
    return out;
}

/// alt^2(chi)(c) = (chi(c)^2 - chi(c^2)) / 2.
inline ClassFunction alt_square(const CharacterTable& table, const ClassFunction& a) {
    ClassFunction out;
    out.reserve(a.size());
    for (size_t c = 0; c < a.size(); ++c) {
        const auto& sq = a[static_cast<size_t>(table.classes()[c].square_class)];
        out.push_back((a[c] * a[c] - sq).divexact(2));
    }
    return out;
}

/// sym^2(chi)(c) = (chi(c)^2 + chi(c^2)) / 2.
inline ClassFunction sym_square(const CharacterTable& table, const ClassFunction& a) {
    ClassFunction out;
    out.reserve(a.size());
    for (size_t c = 0; c < a.size(); ++c) {
        const auto& sq = a[static_cast<size_t>(table.classes()[c].square_class)];
        out.push_back((a[c] * a[c] + sq).divexact(2));
    }
    return out;
}

/// Multiplicities of a character in the basis of irreducibles; validates
/// that the input reconstructs exactly.
inline std::vector<mpz_class> decompose(const CharacterTable& table, const ClassFunction& a) {
    std::vector<mpz_class> mult;
    mult.reserve(static_cast<size_t>(table.irreducible_count()));
    for (int i = 0; i < table.irreducible_count(); ++i) {
        mpq_class m = inner_product(table, a, table.irreducible(i));
        if (m < 0 || m.get_den() != 1)
            throw NegativeMultiplicity("multiplicity of irreducible " + std::to_string(i + 1) +
                                       " is " + m.get_str() + "; input is not a character");
        mult.push_back(m.get_num());
    }
    ClassFunction rebuilt(static_cast<size_t>(table.class_count()), Cyclotomic::zero());
    for (int i = 0; i < table.irreducible_count(); ++i)
        for (int c = 0; c < table.class_count(); ++c)
            rebuilt[static_cast<size_t>(c)] =
                rebuilt[static_cast<size_t>(c)] +
                table.irreducible(i)[static_cast<size_t>(c)] *
                    Cyclotomic::integer(mult[static_cast<size_t>(i)]);
    for (int c = 0; c < table.class_count(); ++c)
        if (rebuilt[static_cast<size_t>(c)] != a[static_cast<size_t>(c)])
            throw NegativeMultiplicity("class function is not an integral combination of the "
                                       "irreducibles");
    return mult;
}

/// The character of a group action on the dual of H^1, given against a
/// fixed table.
struct ActionCharacter {
    const CharacterTable* table;
    ClassFunction values;
};

/// dim Hom(V, V (x) V)^B as the exact integer <chi_V chi_V, chi_V>.
/// Zero certifies that the degree-2 coefficient module has no invariants
/// rationally.
inline mpz_class hom_invariant_dim(const ActionCharacter& chi) {
    mpq_class dim = inner_product(*chi.table, tensor(chi.values, chi.values), chi.values);
    if (dim.get_den() != 1 || dim < 0)
        throw NegativeMultiplicity("invariant dimension " + dim.get_str() +
                                   " is not a non-negative integer; the action character is "
                                   "not a character");
    return dim.get_num();
}

/// Irreducibles chi of the given degree such that chi + conj(chi) takes
/// rational values on every class.
inline std::vector<int> rational_sum_filter(const CharacterTable& table, const mpz_class& dim) {
    std::vector<int> out;
    for (int i = 0; i < table.irreducible_count(); ++i) {
        if (table.degree(i) != dim)
            continue;
        bool all_rational = true;
        for (const Cyclotomic& v : table.irreducible(i)) {
            if (!(v + v.conj()).is_rational()) {
                all_rational = false;
                break;
            }
        }
        if (all_rational)
            out.push_back(i);
    }
    return out;
}

/// Fixed points of an automorphism of a curve from its trace on H^1,
/// by Lefschetz: #fix = 2 - tr.
inline long lefschetz_fixed_points(long trace_on_h1) { return 2 - trace_on_h1; }

/// Genus of the quotient by a prime-order automorphism with f fixed
/// points: 2g - 2 = p (2g' - 2) + f (p - 1).
inline long quotient_genus(long g, long p, long f) {
    mpz_class pz(p);
    if (p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
        throw NotRealizable("automorphism order must be prime, got " + std::to_string(p));
    long numerator = 2 * g - 2 - f * (p - 1);
    if (numerator % (2 * p) != 0)
        throw NotRealizable("ramification data fails the divisibility constraint");
    long gq = numerator / (2 * p) + 1;
    if (gq < 0)
        throw NotRealizable("ramification data forces negative genus");
    return gq;
}

inline void CharacterTable::validate() const {
    const int k = class_count();
    if (k == 0)
        throw MalformedTable("table has no classes");
    if (irreducibles_.empty())
        throw MalformedTable("table has no irreducibles");
    for (const ClassFunction& row : irreducibles_)
        if (static_cast<int>(row.size()) != k)
            throw MalformedTable("irreducible row length does not match class count");

    mpz_class size_sum = 0;
    for (const ConjugacyClass& c : classes_) {
        if (c.size < 1)
            throw MalformedTable("class size must be positive");
        if (c.element_order < 1)
            throw MalformedTable("element order must be positive");
        if (c.square_class < 0 || c.square_class >= k)
            throw MalformedTable("square class index out of range");
        size_sum += c.size;
    }
    if (size_sum != order_)
        throw MalformedTable("class sizes sum to " + size_sum.get_str() + ", expected " +
                             order_.get_str());

    mpz_class degree_sum = 0;
    for (int i = 0; i < irreducible_count(); ++i) {
        mpz_class d = irreducibles_[static_cast<size_t>(i)][0].rational_value();
        degree_sum += d * d;
    }
    if (degree_sum != order_)
        throw MalformedTable("sum of squared degrees is " + degree_sum.get_str() +
                             ", expected " + order_.get_str());

    for (const ConjugacyClass& c : classes_) {
        long expected = c.element_order % 2 == 0 ? c.element_order / 2 : c.element_order;
        if (classes_[static_cast<size_t>(c.square_class)].element_order != expected)
            throw MalformedTable("square of class " + c.label + " has inconsistent order");
    }

    for (int i = 0; i < irreducible_count(); ++i)
        for (int j = i; j < irreducible_count(); ++j) {
            mpq_class ip = inner_product(*this, irreducibles_[static_cast<size_t>(i)],
                                         irreducibles_[static_cast<size_t>(j)]);
            if (ip != (i == j ? 1 : 0))
                throw MalformedTable("rows " + std::to_string(i + 1) + "," +
                                     std::to_string(j + 1) + " have inner product " +
                                     ip.get_str());
        }
}

inline const CharacterTable& CharacterTable::psl2_8() {
    static const CharacterTable table = [] {
        auto Z = [](long v) { return Cyclotomic::integer(v); };
        // alpha_k = zeta_9^k + zeta_9^{-k}, beta_k = zeta_7^k + zeta_7^{-k}
        auto alpha = [](long k) {
            return Cyclotomic::root_of_unity(9, k) + Cyclotomic::root_of_unity(9, 9 - k);
        };
        auto beta = [](long k) {
            return Cyclotomic::root_of_unity(7, k) + Cyclotomic::root_of_unity(7, 7 - k);
        };

        std::vector<ConjugacyClass> classes = {
            {"1a", 1, 1, 0},  {"2a", 63, 2, 0}, {"3a", 56, 3, 2},
            {"7a", 72, 7, 4}, {"7b", 72, 7, 5}, {"7c", 72, 7, 3},
            {"9a", 56, 9, 7}, {"9b", 56, 9, 8}, {"9c", 56, 9, 6},
        };

        std::vector<ClassFunction> irr;
        irr.push_back({Z(1), Z(1), Z(1), Z(1), Z(1), Z(1), Z(1), Z(1), Z(1)});
        irr.push_back({Z(7), Z(-1), Z(-2), Z(0), Z(0), Z(0), Z(1), Z(1), Z(1)});
        irr.push_back({Z(7), Z(-1), Z(1), Z(0), Z(0), Z(0), -alpha(1), -alpha(2), -alpha(4)});
        irr.push_back({Z(7), Z(-1), Z(1), Z(0), Z(0), Z(0), -alpha(4), -alpha(1), -alpha(2)});
        irr.push_back({Z(7), Z(-1), Z(1), Z(0), Z(0), Z(0), -alpha(2), -alpha(4), -alpha(1)});
        irr.push_back({Z(8), Z(0), Z(-1), Z(1), Z(1), Z(1), Z(-1), Z(-1), Z(-1)});
        irr.push_back({Z(9), Z(1), Z(0), beta(1), beta(2), beta(3), Z(0), Z(0), Z(0)});
        irr.push_back({Z(9), Z(1), Z(0), beta(3), beta(1), beta(2), Z(0), Z(0), Z(0)});
        irr.push_back({Z(9), Z(1), Z(0), beta(2), beta(3), beta(1), Z(0), Z(0), Z(0)});

        return CharacterTable("PSL(2,8)", 504, std::move(classes), std::move(irr));
    }();
    return table;
}

} // namespace torelli::chartab
