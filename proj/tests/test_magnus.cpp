#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"
#include "torelli/magnus.hpp"

using namespace torelli;
using magnus::GroupWord;
using magnus::RingContext;
using magnus::TensorSquareElement;
using magnus::TruncatedSeries;
using magnus::Word;

TEST_CASE("convolution product") {
    auto ctx = RingContext::free_group(2, 2, 16, 3);
    TruncatedSeries one = TruncatedSeries::one(ctx);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);
    TruncatedSeries x2 = TruncatedSeries::generator(ctx, 1);

    SECTION("(1+x1)(1+x2) = 1 + x1 + x2 + x1 x2") {
        TruncatedSeries p = (one + x1) * (one + x2);
        REQUIRE(p.coeff(Word{}) == 1);
        REQUIRE(p.coeff(Word{0}) == 1);
        REQUIRE(p.coeff(Word{1}) == 1);
        REQUIRE(p.coeff(Word{0, 1}) == 1);
        REQUIRE(p.coeff(Word{1, 0}) == 0);
        REQUIRE(p.coefficients().size() == 4);
    }
    SECTION("(1+x1)(1 - x1 + x1^2) = 1 at degree 3") {
        TruncatedSeries inv = one - x1 + x1 * x1;
        REQUIRE((one + x1) * inv == one);
    }
    SECTION("context mismatch is rejected") {
        auto other = RingContext::free_group(2, 3, 16, 3);
        REQUIRE_THROWS_AS(x1 * TruncatedSeries::one(other), ContextMismatch);
    }
}

TEST_CASE("surface reduction kills the symplectic commutator") {
    auto ctx = RingContext::surface_group(1, 2, 16, 3);
    TruncatedSeries one = TruncatedSeries::one(ctx);
    TruncatedSeries a = TruncatedSeries::generator(ctx, 0);
    TruncatedSeries b = TruncatedSeries::generator(ctx, 1);
    TruncatedSeries commutator = (one + a) * (one + b) - (one + b) * (one + a);
    REQUIRE(commutator.is_zero());
}

TEST_CASE("surface reduced basis stores no pivot word") {
    for (int genus : {1, 2, 3}) {
        auto ctx = RingContext::surface_group(genus, 2, 8, 3);
        auto basis = magnus::degree2_basis(*ctx);
        REQUIRE(static_cast<int>(basis.size()) == 4 * genus * genus - 1);
        // omega reduces to zero, term by term
        TruncatedSeries omega = TruncatedSeries::zero(ctx);
        for (int i = 0; i < genus; ++i) {
            TruncatedSeries ai = TruncatedSeries::generator(ctx, 2 * i);
            TruncatedSeries bi = TruncatedSeries::generator(ctx, 2 * i + 1);
            omega = omega + ai * bi - bi * ai;
        }
        REQUIRE(omega.is_zero());
    }
}

TEST_CASE("from_word") {
    auto ctx = RingContext::free_group(2, 3, 16, 3);
    TruncatedSeries one = TruncatedSeries::one(ctx);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);

    SECTION("single generator") {
        REQUIRE(magnus::from_word(GroupWord::generator(0), ctx) == one + x1);
    }
    SECTION("inverse generator expands the geometric series") {
        TruncatedSeries s = magnus::from_word(GroupWord::generator(0, -1), ctx);
        REQUIRE(s == one - x1 + x1 * x1);
    }
    SECTION("fifth power matches the repeated-multiplication oracle") {
        TruncatedSeries direct = magnus::from_word(GroupWord::generator(0, 5), ctx);
        REQUIRE(direct.coeff(Word{}) == 1);
        REQUIRE(direct.coeff(Word{0}) == 5);
        REQUIRE(direct.coeff(Word{0, 0}) == 10);
        TruncatedSeries repeated = one;
        for (int i = 0; i < 5; ++i)
            repeated = repeated * (one + x1);
        REQUIRE(direct == repeated);
    }
    SECTION("bad generator index") {
        REQUIRE_THROWS_AS(magnus::from_word(GroupWord::generator(2), ctx), BadGeneratorIndex);
    }
    SECTION("huge exponents stay exact through the binomial series") {
        mpz_class huge("123456789123456789123456789");
        TruncatedSeries s = magnus::from_word(GroupWord::generator(0, huge), ctx);
        REQUIRE(s.coeff(Word{0}) == ctx->scalars()->reduce(huge));
        mpz_class c2 = huge * (huge - 1) / 2;
        REQUIRE(s.coeff(Word{0, 0}) == ctx->scalars()->reduce(c2));
    }
}

TEST_CASE("invert_unit") {
    auto ctx = RingContext::free_group(2, 5, 10, 3);
    TruncatedSeries one = TruncatedSeries::one(ctx);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);

    SECTION("1 + x1") {
        REQUIRE(magnus::invert_unit(one + x1) == one - x1 + x1 * x1);
    }
    SECTION("constants invert in the scalar ring") {
        TruncatedSeries c = TruncatedSeries::constant(ctx, 7);
        TruncatedSeries cinv = magnus::invert_unit(c);
        REQUIRE(c * cinv == one);
    }
    SECTION("l * 1 is not a unit") {
        REQUIRE_THROWS_AS(magnus::invert_unit(TruncatedSeries::constant(ctx, 5)), NotAUnit);
    }
    SECTION("random units invert on both sides") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 15; ++trial) {
            TruncatedSeries u =
                one + test_support::random_series(rng, ctx).degree_part(1) +
                test_support::random_series(rng, ctx).degree_part(2);
            TruncatedSeries v = magnus::invert_unit(u);
            REQUIRE(u * v == one);
            REQUIRE(v * u == one);
        }
    }
}

TEST_CASE("comultiplication") {
    auto ctx = RingContext::free_group(2, 2, 16, 3);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);
    TruncatedSeries x2 = TruncatedSeries::generator(ctx, 1);

    SECTION("on a generator") {
        TensorSquareElement d = magnus::comultiply(x1);
        REQUIRE(d.coefficients().size() == 3);
        REQUIRE(d.coefficients().at({Word{0}, Word{0}}) == 1);
        REQUIRE(d.coefficients().at({Word{}, Word{0}}) == 1);
        REQUIRE(d.coefficients().at({Word{0}, Word{}}) == 1);
    }
    SECTION("unital") {
        TensorSquareElement d = magnus::comultiply(TruncatedSeries::one(ctx));
        REQUIRE(d.coefficients().size() == 1);
        REQUIRE(d.coefficients().at({Word{}, Word{}}) == 1);
    }
    SECTION("multiplicative on x1 x2") {
        REQUIRE(magnus::comultiply(x1 * x2) ==
                magnus::comultiply(x1) * magnus::comultiply(x2));
    }
    SECTION("ring map on random pairs") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            TruncatedSeries a = test_support::random_series(rng, ctx);
            TruncatedSeries b = test_support::random_series(rng, ctx);
            REQUIRE(magnus::comultiply(a * b) ==
                    magnus::comultiply(a) * magnus::comultiply(b));
        }
    }
    SECTION("rejected on the surface kind") {
        auto sctx = RingContext::surface_group(1, 2, 16, 3);
        REQUIRE_THROWS_AS(magnus::comultiply(TruncatedSeries::one(sctx)),
                          UnsupportedForSurface);
    }
}

TEST_CASE("group-like elements") {
    auto ctx = RingContext::free_group(2, 3, 12, 3);

    SECTION("images of group words are group-like") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            GroupWord w = test_support::random_word(rng, 2);
            REQUIRE(magnus::is_grouplike(magnus::from_word(w, ctx)));
        }
    }
    SECTION("1 + x1 + x2 misses the cross term") {
        TruncatedSeries u = TruncatedSeries::one(ctx) + TruncatedSeries::generator(ctx, 0) +
                            TruncatedSeries::generator(ctx, 1);
        REQUIRE_FALSE(magnus::is_grouplike(u));
    }
    SECTION("truncated exponential is not group-like") {
        // 1 + x1 + (1/2) x1^2 with 1/2 the inverse of 2 mod 3^12
        padic::Scalar half = padic::Scalar(ctx->scalars(), 2).inverse();
        TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);
        TruncatedSeries u =
            TruncatedSeries::one(ctx) + x1 + (x1 * x1).scaled(half.residue());
        REQUIRE_FALSE(magnus::is_grouplike(u));
    }
    SECTION("closure under product and inverse") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 15; ++trial) {
            TruncatedSeries a =
                magnus::from_word(test_support::random_word(rng, 2), ctx);
            TruncatedSeries b =
                magnus::from_word(test_support::random_word(rng, 2), ctx);
            REQUIRE(magnus::is_grouplike(a * b));
            REQUIRE(magnus::is_grouplike(magnus::invert_unit(a)));
        }
    }
}

TEST_CASE("filtration degree") {
    auto ctx = RingContext::free_group(2, 2, 16, 3);
    TruncatedSeries one = TruncatedSeries::one(ctx);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);
    TruncatedSeries x2 = TruncatedSeries::generator(ctx, 1);
    REQUIRE(magnus::filtration_degree(one + x1) == 0);
    REQUIRE(magnus::filtration_degree(x1 * x2 - x2 * x1) == 2);
    REQUIRE(magnus::filtration_degree(TruncatedSeries::zero(ctx)) == 3);
}

TEST_CASE("associativity on random triples") {
    for (long prime : {2, 3, 5}) {
        for (int degree : {3, 4}) {
            auto ctx = RingContext::free_group(3, prime, 16, degree);
            std::mt19937_64 rng(static_cast<std::uint64_t>(100 * prime + degree));
            for (int trial = 0; trial < 10; ++trial) {
                TruncatedSeries a = test_support::random_series(rng, ctx);
                TruncatedSeries b = test_support::random_series(rng, ctx);
                TruncatedSeries c = test_support::random_series(rng, ctx);
                REQUIRE((a * b) * c == a * (b * c));
            }
        }
    }
}

TEST_CASE("group words abelianize additively in degree 1") {
    auto ctx = RingContext::free_group(3, 2, 16, 3);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        GroupWord v = test_support::random_word(rng, 3);
        GroupWord w = test_support::random_word(rng, 3);
        TruncatedSeries lhs = magnus::from_word(v * w, ctx);
        TruncatedSeries rhs = magnus::from_word(v, ctx) + magnus::from_word(w, ctx) -
                              TruncatedSeries::one(ctx);
        REQUIRE((lhs - rhs).vanishes_below_degree(2));
    }
}

TEST_CASE("commutator words open with the ring commutator") {
    auto ctx = RingContext::free_group(2, 2, 16, 3);
    TruncatedSeries x1 = TruncatedSeries::generator(ctx, 0);
    TruncatedSeries x2 = TruncatedSeries::generator(ctx, 1);

    GroupWord commutator =
        GroupWord::commutator(GroupWord::generator(0), GroupWord::generator(1));
    TruncatedSeries direct = magnus::from_word(commutator, ctx);

    // oracle: expand the four-fold product with invert_unit
    TruncatedSeries g1 = magnus::from_word(GroupWord::generator(0), ctx);
    TruncatedSeries g2 = magnus::from_word(GroupWord::generator(1), ctx);
    TruncatedSeries oracle = g1 * g2 * magnus::invert_unit(g1) * magnus::invert_unit(g2);
    REQUIRE(direct == oracle);

    TruncatedSeries expected_deg2 = x1 * x2 - x2 * x1;
    TruncatedSeries diff = direct - TruncatedSeries::one(ctx) - expected_deg2;
    REQUIRE(diff.vanishes_below_degree(3));
}

TEST_CASE("group word normalization") {
    GroupWord w = GroupWord::generator(0) * GroupWord::generator(0, -1);
    REQUIRE(w.is_identity());
    GroupWord u = GroupWord::generator(0, 2) * GroupWord::generator(0, 3);
    REQUIRE(u.letters().size() == 1);
    REQUIRE(u.letters()[0].exp == 5);
    GroupWord v = GroupWord::generator(0) * GroupWord::generator(1) * GroupWord::generator(1, -1) *
                  GroupWord::generator(0);
    REQUIRE(v.letters().size() == 1);
    REQUIRE(v.letters()[0].exp == 2);
    REQUIRE((u * u.inverse()).is_identity());
}
