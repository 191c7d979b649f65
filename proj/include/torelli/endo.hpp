#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "torelli/errors.hpp"
#include "torelli/magnus.hpp"
#include "torelli/padic.hpp"

// Endomorphisms of the free (or surface) pro-l group, presented by one
// image word per generator, together with the induced maps on the
// abelianization and on the truncated group ring.

namespace torelli::endo {

using magnus::GroupWord;
using magnus::RingContext;
using magnus::RingContextPtr;
using magnus::TruncatedSeries;

class EndoSpec {
public:
    /// Builds a spec from generator images. Surface kind: the images must
    /// respect the defining relation modulo words of length 3; we verify by
    /// mapping omega and checking the result reduces to zero, rather than
    /// constructing lifts.
    EndoSpec(RingContextPtr ctx, std::vector<GroupWord> images)
        : ctx_(std::move(ctx)), images_(std::move(images)) {
        const int n = ctx_->generator_count();
        if (static_cast<int>(images_.size()) != n)
            throw Error("expected " + std::to_string(n) + " generator images, got " +
                        std::to_string(images_.size()));
        for (const GroupWord& w : images_)
            if (w.max_generator_index() >= n)
                throw BadGeneratorIndex("image word uses generator index " +
                                        std::to_string(w.max_generator_index()) +
                                        " outside rank " + std::to_string(n));
        if (ctx_->is_surface())
            check_surface_relation();
    }

    static EndoSpec identity(RingContextPtr ctx) {
        std::vector<GroupWord> images;
        const int n = ctx->generator_count();
        images.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            images.push_back(GroupWord::generator(i));
        return EndoSpec(std::move(ctx), std::move(images));
    }

    /// h -> g h g^{-1}.
    static EndoSpec conjugation(RingContextPtr ctx, const GroupWord& g) {
        std::vector<GroupWord> images;
        const int n = ctx->generator_count();
        images.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            images.push_back(g * GroupWord::generator(i) * g.inverse());
        return EndoSpec(std::move(ctx), std::move(images));
    }

    const RingContextPtr& context() const { return ctx_; }
    const std::vector<GroupWord>& images() const { return images_; }
    const GroupWord& image(int i) const { return images_[static_cast<size_t>(i)]; }

    bool operator==(const EndoSpec& o) const {
        return *ctx_ == *o.ctx_ && images_ == o.images_;
    }

private:
    // Image of omega = sum_i (a_i b_i - b_i a_i) must reduce to 0 in the
    // pivot-free basis, i.e. lie in span{omega} among degree-2 words.
    void check_surface_relation() const {
        TruncatedSeries total = TruncatedSeries::zero(ctx_);
        for (int i = 0; i < ctx_->genus(); ++i) {
            TruncatedSeries a =
                magnus::from_word(images_[static_cast<size_t>(2 * i)], ctx_) -
                TruncatedSeries::one(ctx_);
            TruncatedSeries b =
                magnus::from_word(images_[static_cast<size_t>(2 * i + 1)], ctx_) -
                TruncatedSeries::one(ctx_);
            total = total + (a * b - b * a);
        }
        if (!total.degree_part(2).is_zero())
            throw RelationNotPreserved(
                "generator images do not preserve the surface relation mod degree 3");
    }

    RingContextPtr ctx_;
    std::vector<GroupWord> images_;
};

/// Column i = signed exponent sums of the image of generator i, reduced
/// mod l^N: the induced automorphism of the abelianization.
inline padic::Matrix abelianization_matrix(const EndoSpec& e) {
    const RingContextPtr& ctx = e.context();
    const int n = ctx->generator_count();
    padic::Matrix m(ctx->scalars(), n, n);
    for (int i = 0; i < n; ++i) {
        auto col = e.image(i).exponent_vector(n);
        for (int j = 0; j < n; ++j)
            m.set(j, i, col[static_cast<size_t>(j)]);
    }
    return m;
}

/// An endomorphism of the free pro-l group is an automorphism exactly when
/// it is one on the abelianization, i.e. the matrix is invertible mod l.
inline bool is_automorphism(const EndoSpec& e) {
    return padic::is_invertible(abelianization_matrix(e));
}

/// Acts trivially on the abelianization mod l^N.
inline bool in_torelli(const EndoSpec& e) {
    const padic::Matrix m = abelianization_matrix(e);
    return m == padic::Matrix::identity(m.context(), m.rows());
}

/// The induced ring endomorphism: the unique continuous ring map with
/// x_i -> from_word(images[i]) - 1, applied coefficient-wise and truncated.
inline TruncatedSeries apply(const EndoSpec& e, const TruncatedSeries& u) {
    require_same(*e.context(), *u.context());
    const RingContextPtr& ctx = e.context();
    const int n = ctx->generator_count();
    std::vector<TruncatedSeries> gen_image;
    gen_image.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        gen_image.push_back(magnus::from_word(e.image(i), ctx) - TruncatedSeries::one(ctx));
    TruncatedSeries out = TruncatedSeries::zero(ctx);
    for (const auto& [w, c] : u.coefficients()) {
        TruncatedSeries term = TruncatedSeries::constant(ctx, c);
        for (int gen : w)
            term = term * gen_image[static_cast<size_t>(gen)];
        out = out + term;
    }
    return out;
}

/// Word-level composition: images of the result are e1 applied to e2's
/// image words. Then apply(compose(e1, e2), u) == apply(e1, apply(e2, u))
/// and the abelianization matrices multiply.
inline EndoSpec compose(const EndoSpec& e1, const EndoSpec& e2) {
    require_same(*e1.context(), *e2.context());
    std::vector<GroupWord> images;
    const int n = e1.context()->generator_count();
    images.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        GroupWord out;
        for (const auto& letter : e2.image(i).letters())
            out = out * e1.image(letter.gen).pow(letter.exp);
        images.push_back(std::move(out));
    }
    return EndoSpec(e1.context(), std::move(images));
}

namespace detail {

/// Deterministic bounded draw; avoids distribution objects whose output is
/// implementation-defined.
inline uint64_t draw(std::mt19937_64& rng, uint64_t bound) { return rng() % bound; }

inline GroupWord random_short_word(std::mt19937_64& rng, int generator_count) {
    GroupWord w;
    const int len = 1 + static_cast<int>(draw(rng, 2));
    for (int i = 0; i < len; ++i) {
        int gen = static_cast<int>(draw(rng, static_cast<uint64_t>(generator_count)));
        mpz_class exp = draw(rng, 2) == 0 ? 1 : -1;
        w = w * GroupWord::generator(gen, exp);
    }
    return w;
}

} // namespace detail

/// g_i -> g_i * c_i with c_i a product of `complexity` commutators of short
/// random words. Output is deterministic in the seed and always lies in the
/// Torelli subgroup.
inline EndoSpec random_torelli(const RingContextPtr& ctx, uint64_t seed, int complexity) {
    std::mt19937_64 rng(seed);
    const int n = ctx->generator_count();
    std::vector<GroupWord> images;
    images.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        GroupWord img = GroupWord::generator(i);
        for (int k = 0; k < complexity; ++k) {
            GroupWord u = detail::random_short_word(rng, n);
            GroupWord v = detail::random_short_word(rng, n);
            img = img * GroupWord::commutator(u, v);
        }
        images.push_back(std::move(img));
    }
    return EndoSpec(ctx, std::move(images));
}

} // namespace torelli::endo
