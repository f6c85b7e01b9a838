#include <edyn/bumps.hpp>
#include <edyn/interp_check.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace edyn;

namespace {

ExactPoly P(std::initializer_list<GR> c) { return ExactPoly(std::vector<GR>(c)); }
GR q(long n, long d = 1) { return GR(mpq_class(n, d)); }

// Oracle: check every constraint by direct exact evaluation.
void expect_value_bump(const ExactPoly& p, const PointSet& a, const GR& b, const GR& zeta)
{
    ExactPoly dp = p.derivative();
    for (const auto& x : a) {
        EXPECT_TRUE(p.eval(x).is_zero()) << x.str();
        EXPECT_TRUE(dp.eval(x).is_zero()) << x.str();
    }
    EXPECT_EQ(p.eval(b), zeta);
}

void expect_deriv_bump(const ExactPoly& p, const PointSet& a, const GR& b, const GR& lambda)
{
    ExactPoly dp = p.derivative();
    for (const auto& x : a) {
        EXPECT_TRUE(p.eval(x).is_zero());
        EXPECT_TRUE(dp.eval(x).is_zero());
    }
    EXPECT_TRUE(p.eval(b).is_zero());
    EXPECT_EQ(dp.eval(b), lambda);
}

GR random_point(std::mt19937& rng, int den = 20)
{
    std::uniform_int_distribution<int> n(-60, 60), d(1, den);
    return GR(mpq_class(n(rng), d(rng)), mpq_class(n(rng), d(rng)));
}

} // namespace

TEST(BumpValue, Examples)
{
    EXPECT_EQ(bump_value(PointSet{GR(0)}, GR(1), GR(1)), P({q(0), q(0), q(1)}));
    EXPECT_EQ(bump_value(PointSet{}, GR(1, 2), GR(5, 1)), P({GR(5, 1)}));
    PointSet a{GR(-1), GR(1)};
    ExactPoly p = bump_value(a, GR(0), GR(2));
    EXPECT_EQ(p, P({q(2), q(0), q(-4), q(0), q(2)}));
    expect_value_bump(p, a, GR(0), GR(2));
    EXPECT_THROW(bump_value(a, GR(1), GR(2)), ConstraintConflict);
}

TEST(BumpDeriv, Examples)
{
    EXPECT_EQ(bump_deriv(PointSet{}, GR(0), GR(1)), P({q(0), q(1)}));
    EXPECT_EQ(bump_deriv(PointSet{GR(0)}, GR(1), GR(1)), P({q(0), q(0), q(-1), q(1)}));
    PointSet a{-GR::i(), GR::i()};
    normalize(a);
    ExactPoly p = bump_deriv(a, GR(2), GR(3));
    EXPECT_EQ(p.degree(), 5);
    expect_deriv_bump(p, a, GR(2), GR(3));
}

TEST(BumpValueAxes, Examples)
{
    PointSet a{GR(-1), GR(1)};
    EXPECT_EQ(bump_value_axes(a, GR(0), GR(1)), P({q(1), q(0), q(-2), q(0), q(1)}));
    EXPECT_EQ(bump_value_axes(PointSet{}, GR(2), GR(-12)), P({q(-12)}));
    PointSet b{-GR::i(), GR::i()};
    normalize(b);
    ExactPoly p = bump_value_axes(b, GR(1), GR(mpq_class(1, 2)));
    EXPECT_EQ(p, P({q(1, 8), q(0), q(1, 4), q(0), q(1, 8)}));
    EXPECT_TRUE(is_real_even(p));
    EXPECT_THROW(bump_value_axes(PointSet{GR(1)}, GR(0), GR(1)), PreconditionError);
    EXPECT_THROW(bump_value_axes(PointSet{}, GR(1, 1), GR(1)), PreconditionError);
    EXPECT_THROW(bump_value_axes(PointSet{}, GR(1), GR(1, 1)), PreconditionError);
}

TEST(BumpValueAway, Examples)
{
    // b = 1 + i has b^2 = 2i; zeta = 2i gives gamma = 2i and Gamma(z) = z^2
    EXPECT_EQ(bump_value_away(PointSet{}, GR(1, 1), GR(0, 2)), P({q(0), q(0), q(1)}));
    EXPECT_TRUE(bump_value_away(PointSet{}, GR(1, 1), GR(0)).is_zero());
    PointSet a = symmetrize(PointSet{GR(2), GR(0, 2)});
    ExactPoly p = bump_value_away(a, GR(1, 1), GR(1));
    // gamma = 1/400 is real here, so the z^2 term of Gamma drops out
    EXPECT_EQ(p.degree(), 8);
    ExactPoly full = bump_value_away(a, GR(1, 1), GR::i());
    EXPECT_EQ(full.degree(), 10);
    expect_value_bump(full, a, GR(1, 1), GR::i());
    EXPECT_TRUE(is_real_even(p));
    expect_value_bump(p, a, GR(1, 1), GR(1));
    EXPECT_THROW(bump_value_away(PointSet{}, GR(2), GR(1)), SingularConfiguration);
}

TEST(BumpDerivAxes, Examples)
{
    EXPECT_EQ(bump_deriv_axes(PointSet{}, GR(1), GR(2)), P({q(-1), q(0), q(1)}));
    EXPECT_EQ(bump_deriv_axes(PointSet{}, GR(mpq_class(1, 2)), GR(1)), P({q(-1, 4), q(0), q(1)}));
    PointSet a{GR(-1), GR(1)};
    ExactPoly p = bump_deriv_axes(a, GR(2), GR(1));
    EXPECT_EQ(p.degree(), 6);
    expect_deriv_bump(p, a, GR(2), GR(1));
    EXPECT_THROW(bump_deriv_axes(PointSet{}, GR(0), GR(1)), SingularConfiguration);
}

TEST(BumpDerivAway, Examples)
{
    EXPECT_TRUE(bump_deriv_away(PointSet{}, GR(1, 1), GR(0)).is_zero());
    ExactPoly p = bump_deriv_away(PointSet{}, GR(1, 1), GR(1));
    EXPECT_EQ(p.degree(), 6);
    EXPECT_TRUE(is_real_even(p));
    expect_deriv_bump(p, PointSet{}, GR(1, 1), GR(1));
    // conjugate equivariance: same polynomial at conj(b) with conj(lambda)
    ExactPoly r = bump_deriv_away(PointSet{}, GR(1, 1), GR::i());
    ExactPoly s = bump_deriv_away(PointSet{}, GR(1, -1), -GR::i());
    EXPECT_EQ(r, s);
    expect_deriv_bump(r, PointSet{}, GR(1, 1), GR::i());
}

TEST(BumpDerivAway, FloatResidual)
{
    PrecisionScope prec(128);
    FloatPoly p = bump_deriv_away(PointSet{}, GR(1, 1), Ch(Hp(1)));
    Ch b = GR(1, 1).to<Hp>();
    EXPECT_LT(abs(p.eval(b)), Hp(1e-30));
    EXPECT_LT(abs(p.derivative().eval(b) - Ch(Hp(1))), Hp(1e-30));
}

TEST(Bumps, LinearInTarget)
{
    std::mt19937 rng(17);
    for (int t = 0; t < 50; ++t) {
        PointSet a{random_point(rng), random_point(rng)};
        normalize(a);
        GR b = random_point(rng), z = random_point(rng);
        if (contains(a, b))
            continue;
        EXPECT_EQ(bump_value(a, b, z), bump_value(a, b, GR(1)) * z);
        EXPECT_EQ(bump_deriv(a, b, z), bump_deriv(a, b, GR(1)) * z);
        PointSet s = symmetrize(a);
        if (!b.on_axes() && !contains(s, b)) {
            // real-linear in the target
            GR z2 = random_point(rng);
            EXPECT_EQ(bump_value_away(s, b, z + z2), bump_value_away(s, b, z) + bump_value_away(s, b, z2));
            EXPECT_EQ(bump_deriv_away(s, b, z + z2), bump_deriv_away(s, b, z) + bump_deriv_away(s, b, z2));
        }
    }
}

// Random valid inputs for all six constructors; constraints and degrees.
TEST(Bumps, RandomConstraintsAndDegrees)
{
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> size(0, 3);
    for (int t = 0; t < 120; ++t) {
        PointSet a;
        int n = size(rng) * 2;
        for (int k = 0; k < n; ++k)
            a.push_back(random_point(rng));
        normalize(a);
        GR b = random_point(rng), z = random_point(rng);
        if (contains(a, b))
            continue;
        ExactPoly p = bump_value(a, b, z);
        EXPECT_LE(p.degree(), 2 * static_cast<int>(a.size()));
        expect_value_bump(p, a, b, z);
        ExactPoly d = bump_deriv(a, b, z);
        EXPECT_LE(d.degree(), 2 * static_cast<int>(a.size()) + 1);
        expect_deriv_bump(d, a, b, z);

        PointSet s;
        for (std::size_t k = 0; k < a.size() / 2; ++k)
            s.push_back(a[k]);
        s = symmetrize(s);
        if (!contains(s, b) && !b.on_axes()) {
            ExactPoly pa = bump_value_away(s, b, z);
            EXPECT_LE(pa.degree(), 2 * static_cast<int>(s.size()) + 2);
            EXPECT_TRUE(is_real_even(pa));
            expect_value_bump(pa, s, b, z);
            ExactPoly qa = bump_deriv_away(s, b, z);
            EXPECT_LE(qa.degree(), 2 * static_cast<int>(s.size()) + 6);
            EXPECT_TRUE(is_real_even(qa));
            expect_deriv_bump(qa, s, b, z);
        }
        GR br(b.re());
        if (!contains(s, br) && !br.is_zero()) {
            ExactPoly px = bump_value_axes(s, br, GR(z.re()));
            EXPECT_LE(px.degree(), 2 * static_cast<int>(s.size()));
            EXPECT_TRUE(is_real_even(px));
            expect_value_bump(px, s, br, GR(z.re()));
            ExactPoly qx = bump_deriv_axes(s, br, GR(z.re()));
            EXPECT_LE(qx.degree(), 2 * static_cast<int>(s.size()) + 2);
            EXPECT_TRUE(is_real_even(qx));
            expect_deriv_bump(qx, s, br, GR(z.re()));
        }
        GR bi(0, b.im());
        if (!contains(s, bi) && !bi.is_zero()) {
            ExactPoly px = bump_value_axes(s, bi, GR(z.im()));
            EXPECT_TRUE(is_real_even(px));
            expect_value_bump(px, s, bi, GR(z.im()));
        }
    }
}

TEST(Bumps, FloatTargetsKeepExactShape)
{
    PrecisionScope prec(128);
    PointSet a = symmetrize(PointSet{GR(1, 2), GR(3)});
    GR b(mpq_class(1, 2), mpq_class(1, 3));
    Ch zeta(Hp("0.123456789"), Hp("-2.5"));
    FloatPoly p = bump_value_away(a, b, zeta);
    EXPECT_TRUE(is_real_even(p));
    EXPECT_LT(abs(p.eval(b.to<Hp>()) - zeta), Hp(1e-30));
    for (const auto& x : a)
        EXPECT_LT(abs(p.eval(x.to<Hp>())), Hp(1e-25));
}

TEST(ConstructorSuite, AllKindsHold)
{
    auto tallies = constructor_suite(200, 6, 20, 5);
    ASSERT_EQ(tallies.size(), 6u);
    for (const auto& t : tallies) {
        EXPECT_TRUE(t.ok()) << to_string(t.kind);
        EXPECT_EQ(t.instances, 200);
        EXPECT_LE(t.max_size, 6);
        EXPECT_GE(t.max_size, 4) << to_string(t.kind);
        EXPECT_LE(t.max_degree, degree_bound(t.kind, 6));
    }
    EXPECT_THROW(constructor_suite(0), PreconditionError);
}
