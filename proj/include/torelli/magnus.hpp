#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torelli/errors.hpp"
#include "torelli/padic.hpp"

// Truncated arithmetic in the completed group ring of a free (or surface)
// pro-l group: non-commutative words of length < d with Z/l^N coefficients,
// the g -> 1 + x embedding, unit inversion, and the comultiplication.

namespace torelli::magnus {

/// A non-commutative monomial in the generators x_0, ..., x_{n-1}.
using Word = std::vector<int>;

/// Words ordered by length first, then lexicographically. Fixing this order
/// makes every iteration (printing, basis enumeration) reproducible.
struct GradedLex {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    }
};

struct PairGradedLex {
    bool operator()(const std::pair<Word, Word>& a, const std::pair<Word, Word>& b) const {
        size_t ta = a.first.size() + a.second.size();
        size_t tb = b.first.size() + b.second.size();
        if (ta != tb)
            return ta < tb;
        GradedLex lt;
        if (a.first != b.first)
            return lt(a.first, b.first);
        return lt(a.second, b.second);
    }
};

enum class GroupKind { Free, Surface };

/// The ambient ring: which group, which prime/precision, and the word-length
/// truncation degree d (elements live modulo words of length >= d).
///
/// Surface kind: generators come in symplectic pairs a_1, b_1, ..., a_g, b_g
/// (indices 2i, 2i+1) and the ring is the free one modulo the two-sided
/// ideal of omega = sum_i (a_i b_i - b_i a_i). Series are kept in the
/// reduced basis that eliminates the pivot word b_g a_g via omega.
class RingContext {
public:
    static std::shared_ptr<const RingContext> free_group(int rank, const mpz_class& prime,
                                                         int precision, int degree = 3) {
        if (rank < 1)
            throw Error("free rank must be at least 1");
        return std::shared_ptr<const RingContext>(new RingContext(
            GroupKind::Free, rank, 0, degree, padic::Context::create(prime, precision)));
    }

    static std::shared_ptr<const RingContext> surface_group(int genus, const mpz_class& prime,
                                                            int precision, int degree = 3) {
        if (genus < 1)
            throw Error("genus must be at least 1");
        return std::shared_ptr<const RingContext>(new RingContext(
            GroupKind::Surface, 2 * genus, genus, degree,
            padic::Context::create(prime, precision)));
    }

    GroupKind kind() const { return kind_; }
    bool is_surface() const { return kind_ == GroupKind::Surface; }
    int generator_count() const { return generators_; }
    int genus() const { return genus_; }
    int degree() const { return degree_; }
    const padic::ContextPtr& scalars() const { return scalars_; }
    const mpz_class& prime() const { return scalars_->prime(); }
    int precision() const { return scalars_->precision(); }

    /// The eliminated length-2 word b_g a_g (surface kind only).
    Word pivot_word() const { return Word{generators_ - 1, generators_ - 2}; }

    /// pivot = a_g b_g + sum_{i<g-1} (a_i b_i - b_i a_i), from omega = 0.
    std::vector<std::pair<Word, int>> pivot_substitution() const {
        std::vector<std::pair<Word, int>> subst;
        subst.emplace_back(Word{generators_ - 2, generators_ - 1}, 1);
        for (int i = 0; i + 1 < genus_; ++i) {
            subst.emplace_back(Word{2 * i, 2 * i + 1}, 1);
            subst.emplace_back(Word{2 * i + 1, 2 * i}, -1);
        }
        return subst;
    }

    bool operator==(const RingContext& o) const {
        return kind_ == o.kind_ && generators_ == o.generators_ && genus_ == o.genus_ &&
               degree_ == o.degree_ && *scalars_ == *o.scalars_;
    }
    bool operator!=(const RingContext& o) const { return !(*this == o); }

private:
    RingContext(GroupKind kind, int generators, int genus, int degree, padic::ContextPtr scalars)
        : kind_(kind), generators_(generators), genus_(genus), degree_(degree),
          scalars_(std::move(scalars)) {
        if (degree_ < 2)
            throw Error("truncation degree must be at least 2");
    }

    GroupKind kind_;
    int generators_;
    int genus_;
    int degree_;
    padic::ContextPtr scalars_;
};

using RingContextPtr = std::shared_ptr<const RingContext>;

inline void require_same(const RingContext& a, const RingContext& b) {
    if (a != b)
        throw ContextMismatch("mixed ring contexts");
}

/// 1-based display name of a generator.
inline std::string generator_name(int index) { return "x" + std::to_string(index + 1); }

inline std::string word_name(const Word& w) {
    if (w.empty())
        return "1";
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i > 0)
            out += "*";
        out += generator_name(w[i]);
    }
    return out;
}

/// A group element written as a word in the generators, with
/// arbitrary-precision exponents. Adjacent letters with equal generator are
/// merged and zero exponents dropped, so representation is normalized.
class GroupWord {
public:
    struct Letter {
        int gen;
        mpz_class exp;
        bool operator==(const Letter& o) const = default;
    };

    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> letters) { append_all(std::move(letters)); }

    static GroupWord identity() { return GroupWord(); }
    static GroupWord generator(int index, const mpz_class& exp = 1) {
        GroupWord w;
        w.append(index, exp);
        return w;
    }

    const std::vector<Letter>& letters() const { return letters_; }
    bool is_identity() const { return letters_.empty(); }

    void append(int gen, const mpz_class& exp) {
        if (exp == 0)
            return;
        if (!letters_.empty() && letters_.back().gen == gen) {
            letters_.back().exp += exp;
            if (letters_.back().exp == 0)
                letters_.pop_back();
            return;
        }
        letters_.push_back(Letter{gen, exp});
    }

    GroupWord operator*(const GroupWord& o) const {
        GroupWord out = *this;
        for (const Letter& l : o.letters_)
            out.append(l.gen, l.exp);
        return out;
    }

    GroupWord inverse() const {
        GroupWord out;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
            out.append(it->gen, -it->exp);
        return out;
    }

    /// Word-level power. Single-letter words stay symbolic; longer words are
    /// repeated literally, so the exponent must fit a machine integer.
    GroupWord pow(const mpz_class& e) const {
        if (e == 0 || letters_.empty())
            return GroupWord();
        if (letters_.size() == 1)
            return generator(letters_[0].gen, letters_[0].exp * e);
        mpz_class a = abs(e);
        if (!a.fits_slong_p())
            throw Error("word power exponent too large for literal repetition");
        const GroupWord& base = e > 0 ? *this : inverse();
        GroupWord out;
        for (long i = 0, reps = a.get_si(); i < reps; ++i)
            out = out * base;
        return out;
    }

    static GroupWord commutator(const GroupWord& u, const GroupWord& v) {
        return u * v * u.inverse() * v.inverse();
    }

    /// Signed exponent sums per generator (the abelianized image).
    std::vector<mpz_class> exponent_vector(int generator_count) const {
        std::vector<mpz_class> v(static_cast<size_t>(generator_count), mpz_class(0));
        for (const Letter& l : letters_) {
            if (l.gen < 0 || l.gen >= generator_count)
                throw BadGeneratorIndex("generator index " + std::to_string(l.gen) +
                                        " out of range");
            v[static_cast<size_t>(l.gen)] += l.exp;
        }
        return v;
    }

    int max_generator_index() const {
        int m = -1;
        for (const Letter& l : letters_)
            m = std::max(m, l.gen);
        return m;
    }

    std::string to_string() const {
        if (letters_.empty())
            return "1";
        std::string out;
        for (size_t i = 0; i < letters_.size(); ++i) {
            if (i > 0)
                out += "*";
            out += "g" + std::to_string(letters_[i].gen + 1);
            if (letters_[i].exp != 1)
                out += "^" + letters_[i].exp.get_str();
        }
        return out;
    }

    bool operator==(const GroupWord& o) const = default;

private:
    void append_all(std::vector<Letter> letters) {
        for (Letter& l : letters)
            append(l.gen, l.exp);
    }

    std::vector<Letter> letters_;
};

/// Element of the group ring modulo (l^N, words of length >= d). Stored
/// coefficients are nonzero residues; surface-kind series never store a word
/// containing the pivot.
class TruncatedSeries {
public:
    using CoeffMap = std::map<Word, mpz_class, GradedLex>;

    explicit TruncatedSeries(RingContextPtr ctx) : ctx_(std::move(ctx)) {}

    static TruncatedSeries zero(RingContextPtr ctx) { return TruncatedSeries(std::move(ctx)); }

    static TruncatedSeries constant(RingContextPtr ctx, const mpz_class& c) {
        TruncatedSeries s(std::move(ctx));
        s.add_to_coeff(Word{}, c);
        return s;
    }

    static TruncatedSeries one(RingContextPtr ctx) { return constant(std::move(ctx), 1); }

    /// The generator x_i as a series.
    static TruncatedSeries generator(RingContextPtr ctx, int index) {
        if (index < 0 || index >= ctx->generator_count())
            throw BadGeneratorIndex("generator index " + std::to_string(index) +
                                    " out of range for rank " +
                                    std::to_string(ctx->generator_count()));
        TruncatedSeries s(std::move(ctx));
        s.add_to_coeff(Word{index}, 1);
        return s;
    }

    static TruncatedSeries monomial(RingContextPtr ctx, const Word& w, const mpz_class& c = 1) {
        TruncatedSeries s(std::move(ctx));
        if (static_cast<int>(w.size()) < ctx_degree(*s.ctx_))
            s.add_to_coeff(w, c);
        s.reduce_surface();
        return s;
    }

    const RingContextPtr& context() const { return ctx_; }
    const CoeffMap& coefficients() const { return coeffs_; }

    mpz_class coeff(const Word& w) const {
        auto it = coeffs_.find(w);
        return it == coeffs_.end() ? mpz_class(0) : it->second;
    }
    mpz_class constant_term() const { return coeff(Word{}); }
    bool is_zero() const { return coeffs_.empty(); }

    TruncatedSeries operator+(const TruncatedSeries& o) const {
        require_same(*ctx_, *o.ctx_);
        TruncatedSeries out = *this;
        for (const auto& [w, c] : o.coeffs_)
            out.add_to_coeff(w, c);
        return out;
    }

    TruncatedSeries operator-(const TruncatedSeries& o) const {
        require_same(*ctx_, *o.ctx_);
        TruncatedSeries out = *this;
        for (const auto& [w, c] : o.coeffs_)
            out.add_to_coeff(w, -c);
        return out;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries out(ctx_);
        for (const auto& [w, c] : coeffs_)
            out.add_to_coeff(w, -c);
        return out;
    }

    TruncatedSeries operator*(const TruncatedSeries& o) const {
        require_same(*ctx_, *o.ctx_);
        const int d = ctx_->degree();
        TruncatedSeries out(ctx_);
        for (const auto& [u, cu] : coeffs_)
            for (const auto& [v, cv] : o.coeffs_) {
                if (static_cast<int>(u.size() + v.size()) >= d)
                    continue;
                Word w = u;
                w.insert(w.end(), v.begin(), v.end());
                out.add_to_coeff(w, cu * cv);
            }
        out.reduce_surface();
        return out;
    }

    TruncatedSeries scaled(const mpz_class& c) const {
        TruncatedSeries out(ctx_);
        for (const auto& [w, cw] : coeffs_)
            out.add_to_coeff(w, c * cw);
        return out;
    }

    bool operator==(const TruncatedSeries& o) const {
        require_same(*ctx_, *o.ctx_);
        return coeffs_ == o.coeffs_;
    }
    bool operator!=(const TruncatedSeries& o) const { return !(*this == o); }

    /// Terms of one fixed word length.
    TruncatedSeries degree_part(int k) const {
        TruncatedSeries out(ctx_);
        for (const auto& [w, c] : coeffs_)
            if (static_cast<int>(w.size()) == k)
                out.coeffs_[w] = c;
        return out;
    }

    /// Smallest word length carrying a nonzero coefficient; d for 0.
    int filtration_degree() const {
        if (coeffs_.empty())
            return ctx_->degree();
        return static_cast<int>(coeffs_.begin()->first.size());
    }

    /// True iff every word of length < k has zero coefficient.
    bool vanishes_below_degree(int k) const {
        return coeffs_.empty() || static_cast<int>(coeffs_.begin()->first.size()) >= k;
    }

    /// Display with balanced residues (r above l^N/2 shown as r - l^N).
    std::string to_string() const {
        if (coeffs_.empty())
            return "0";
        const mpz_class& mod = ctx_->scalars()->modulus();
        mpz_class half = mod / 2;
        std::ostringstream out;
        bool first = true;
        for (const auto& [w, c] : coeffs_) {
            mpz_class v = c > half ? mpz_class(c - mod) : c;
            bool neg = v < 0;
            mpz_class a = abs(v);
            if (first) {
                if (neg)
                    out << "-";
                first = false;
            } else {
                out << (neg ? " - " : " + ");
            }
            if (a != 1 || w.empty())
                out << a.get_str() << (w.empty() ? "" : "*");
            out << (w.empty() ? "" : word_name(w));
        }
        return out.str();
    }

    /// Internal accumulation; callers must reduce_surface() when done.
    void add_to_coeff(const Word& w, const mpz_class& delta) {
        if (static_cast<int>(w.size()) >= ctx_->degree())
            return;
        auto it = coeffs_.find(w);
        mpz_class v = ctx_->scalars()->reduce((it == coeffs_.end() ? mpz_class(0) : it->second) + delta);
        if (v == 0) {
            if (it != coeffs_.end())
                coeffs_.erase(it);
        } else if (it == coeffs_.end()) {
            coeffs_.emplace(w, std::move(v));
        } else {
            it->second = std::move(v);
        }
    }

    /// Rewrite away every occurrence of the surface pivot word. Terminates:
    /// each substitution step strictly decreases the graded-lex order.
    void reduce_surface() {
        if (!ctx_->is_surface())
            return;
        const Word pivot = ctx_->pivot_word();
        const auto subst = ctx_->pivot_substitution();
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = coeffs_.begin(); it != coeffs_.end(); ++it) {
                size_t pos = find_pivot(it->first, pivot);
                if (pos == npos)
                    continue;
                Word w = it->first;
                mpz_class c = it->second;
                coeffs_.erase(it);
                for (const auto& [rep, sign] : subst) {
                    Word nw(w.begin(), w.begin() + static_cast<long>(pos));
                    nw.insert(nw.end(), rep.begin(), rep.end());
                    nw.insert(nw.end(), w.begin() + static_cast<long>(pos) + 2, w.end());
                    add_to_coeff(nw, sign * c);
                }
                changed = true;
                break;
            }
        }
    }

private:
    static constexpr size_t npos = static_cast<size_t>(-1);
    static int ctx_degree(const RingContext& c) { return c.degree(); }

    static size_t find_pivot(const Word& w, const Word& pivot) {
        if (w.size() < 2)
            return npos;
        for (size_t i = 0; i + 1 < w.size(); ++i)
            if (w[i] == pivot[0] && w[i + 1] == pivot[1])
                return i;
        return npos;
    }

    RingContextPtr ctx_;
    CoeffMap coeffs_;
};

/// Reduced basis of the degree-2 slice: all length-2 words in graded-lex
/// order, minus the pivot for surface contexts. Size n^2 or 4g^2 - 1.
inline std::vector<Word> degree2_basis(const RingContext& ctx) {
    std::vector<Word> basis;
    const int n = ctx.generator_count();
    Word pivot = ctx.is_surface() ? ctx.pivot_word() : Word{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Word w{i, j};
            if (ctx.is_surface() && w == pivot)
                continue;
            basis.push_back(std::move(w));
        }
    return basis;
}

/// Binomial coefficient C(e, k) with arbitrary-precision (possibly
/// negative) top argument.
inline mpz_class binomial(const mpz_class& e, unsigned long k) {
    mpz_class b;
    mpz_bin_ui(b.get_mpz_t(), e.get_mpz_t(), k);
    return b;
}

/// Image of a group element under g -> 1 + x: the product over letters of
/// (1 + x_i)^e, each factor expanded by the exact binomial series
/// sum_k C(e, k) x_i^k truncated at degree d.
inline TruncatedSeries from_word(const GroupWord& g, const RingContextPtr& ctx) {
    TruncatedSeries out = TruncatedSeries::one(ctx);
    const int d = ctx->degree();
    for (const auto& letter : g.letters()) {
        if (letter.gen < 0 || letter.gen >= ctx->generator_count())
            throw BadGeneratorIndex("generator index " + std::to_string(letter.gen) +
                                    " out of range for rank " +
                                    std::to_string(ctx->generator_count()));
        TruncatedSeries factor(ctx);
        Word w;
        for (int k = 0; k < d; ++k) {
            factor.add_to_coeff(w, binomial(letter.exp, static_cast<unsigned long>(k)));
            w.push_back(letter.gen);
        }
        factor.reduce_surface();
        out = out * factor;
    }
    return out;
}

/// Inverse of a series whose constant term is a unit: geometric series in
/// the augmentation part, which is nilpotent at truncation degree d.
inline TruncatedSeries invert_unit(const TruncatedSeries& u) {
    const RingContextPtr& ctx = u.context();
    padic::Scalar c0(ctx->scalars(), u.constant_term());
    if (!c0.is_unit())
        throw NotAUnit("series constant term " + c0.residue().get_str() +
                       " has positive valuation");
    mpz_class c0_inv = c0.inverse().residue();
    // u = c0 (1 + t) with t = c0^{-1} (u - c0);  u^{-1} = (sum (-t)^k) c0^{-1}
    TruncatedSeries t = (u - TruncatedSeries::constant(ctx, c0.residue())).scaled(-c0_inv);
    TruncatedSeries acc = TruncatedSeries::one(ctx);
    TruncatedSeries power = TruncatedSeries::one(ctx);
    for (int k = 1; k < ctx->degree(); ++k) {
        power = power * t;
        if (power.is_zero())
            break;
        acc = acc + power;
    }
    return acc.scaled(c0_inv);
}

/// Element of the tensor square of the truncated ring, truncated at total
/// degree d.
class TensorSquareElement {
public:
    using CoeffMap = std::map<std::pair<Word, Word>, mpz_class, PairGradedLex>;

    explicit TensorSquareElement(RingContextPtr ctx) : ctx_(std::move(ctx)) {}

    const RingContextPtr& context() const { return ctx_; }
    const CoeffMap& coefficients() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void add_to_coeff(const Word& u, const Word& v, const mpz_class& delta) {
        if (static_cast<int>(u.size() + v.size()) >= ctx_->degree())
            return;
        auto key = std::make_pair(u, v);
        auto it = coeffs_.find(key);
        mpz_class val =
            ctx_->scalars()->reduce((it == coeffs_.end() ? mpz_class(0) : it->second) + delta);
        if (val == 0) {
            if (it != coeffs_.end())
                coeffs_.erase(it);
        } else if (it == coeffs_.end()) {
            coeffs_.emplace(std::move(key), std::move(val));
        } else {
            it->second = std::move(val);
        }
    }

    TensorSquareElement operator+(const TensorSquareElement& o) const {
        require_same(*ctx_, *o.ctx_);
        TensorSquareElement out = *this;
        for (const auto& [k, c] : o.coeffs_)
            out.add_to_coeff(k.first, k.second, c);
        return out;
    }

    TensorSquareElement operator-(const TensorSquareElement& o) const {
        require_same(*ctx_, *o.ctx_);
        TensorSquareElement out = *this;
        for (const auto& [k, c] : o.coeffs_)
            out.add_to_coeff(k.first, k.second, -c);
        return out;
    }

    TensorSquareElement operator*(const TensorSquareElement& o) const {
        require_same(*ctx_, *o.ctx_);
        const int d = ctx_->degree();
        TensorSquareElement out(ctx_);
        for (const auto& [ka, ca] : coeffs_)
            for (const auto& [kb, cb] : o.coeffs_) {
                if (static_cast<int>(ka.first.size() + ka.second.size() + kb.first.size() +
                                     kb.second.size()) >= d)
                    continue;
                Word left = ka.first;
                left.insert(left.end(), kb.first.begin(), kb.first.end());
                Word right = ka.second;
                right.insert(right.end(), kb.second.begin(), kb.second.end());
                out.add_to_coeff(left, right, ca * cb);
            }
        return out;
    }

    bool operator==(const TensorSquareElement& o) const {
        require_same(*ctx_, *o.ctx_);
        return coeffs_ == o.coeffs_;
    }
    bool operator!=(const TensorSquareElement& o) const { return !(*this == o); }

    std::string to_string() const {
        if (coeffs_.empty())
            return "0";
        const mpz_class& mod = ctx_->scalars()->modulus();
        mpz_class half = mod / 2;
        std::ostringstream out;
        bool first = true;
        for (const auto& [k, c] : coeffs_) {
            mpz_class v = c > half ? mpz_class(c - mod) : c;
            bool neg = v < 0;
            mpz_class a = abs(v);
            if (first) {
                if (neg)
                    out << "-";
                first = false;
            } else {
                out << (neg ? " - " : " + ");
            }
            if (a != 1)
                out << a.get_str() << "*";
            out << "(" << word_name(k.first) << ")x(" << word_name(k.second) << ")";
        }
        return out.str();
    }

private:
    RingContextPtr ctx_;
    CoeffMap coeffs_;
};

/// a (x) b, truncated at total degree d.
inline TensorSquareElement tensor_outer(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same(*a.context(), *b.context());
    TensorSquareElement out(a.context());
    for (const auto& [u, cu] : a.coefficients())
        for (const auto& [v, cv] : b.coefficients())
            out.add_to_coeff(u, v, cu * cv);
    return out;
}

/// The comultiplication: the unique ring map with
/// D(x_i) = x_i (x) x_i + 1 (x) x_i + x_i (x) 1, truncated at total degree d.
/// Free kind only; the surface reduced basis is not stable under D.
inline TensorSquareElement comultiply(const TruncatedSeries& u) {
    const RingContextPtr& ctx = u.context();
    if (ctx->is_surface())
        throw UnsupportedForSurface("comultiplication is defined on the free kind only");
    std::vector<TensorSquareElement> delta_gen;
    delta_gen.reserve(static_cast<size_t>(ctx->generator_count()));
    for (int i = 0; i < ctx->generator_count(); ++i) {
        TensorSquareElement d(ctx);
        d.add_to_coeff(Word{i}, Word{i}, 1);
        d.add_to_coeff(Word{}, Word{i}, 1);
        d.add_to_coeff(Word{i}, Word{}, 1);
        delta_gen.push_back(std::move(d));
    }
    TensorSquareElement out(ctx);
    for (const auto& [w, c] : u.coefficients()) {
        TensorSquareElement term(ctx);
        term.add_to_coeff(Word{}, Word{}, c);
        for (int gen : w)
            term = term * delta_gen[static_cast<size_t>(gen)];
        out = out + term;
    }
    return out;
}

/// True iff the constant term is 1 and D(u) = u (x) u, the defining
/// property of images of group elements.
inline bool is_grouplike(const TruncatedSeries& u) {
    if (u.context()->is_surface())
        throw UnsupportedForSurface("group-like test uses the comultiplication");
    if (u.constant_term() != 1)
        return false;
    return comultiply(u) == tensor_outer(u, u);
}

inline int filtration_degree(const TruncatedSeries& u) { return u.filtration_degree(); }

} // namespace torelli::magnus
