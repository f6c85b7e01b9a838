#include <edyn/entire_map.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace edyn;

namespace {

GR q(long n, long d = 1) { return GR(mpq_class(n, d)); }

EntireMap f0() { return EntireMap::cosh_affine(mpq_class(10), mpq_class(-12)); }

EntireMap quad(long c) { return EntireMap::polynomial(ExactPoly({q(c), q(0), q(2)}), Symmetry::real_even); }

} // namespace

TEST(EntireMap, CoshValues)
{
    EntireMap f = f0();
    EXPECT_NEAR(eval(f, Cd(0.0)).re, -2, 1e-14);
    EXPECT_NEAR(eval(f, Cd(2.0)).re, 10 * std::cosh(2.0) - 12, 1e-12);
    EXPECT_NEAR(deriv(f, Cd(1.0)).re, 10 * std::sinh(1.0), 1e-12);
    EXPECT_EQ(f.known_value(GR(0)), q(-2));
    EXPECT_EQ(f.known_deriv(GR(0)), q(0));
    EXPECT_FALSE(f.exact());
    EXPECT_TRUE(is_real_even(f));
    EXPECT_FALSE(is_affine(f));
}

TEST(EntireMap, BanachNorms)
{
    EXPECT_NEAR(banach_norm(f0()), 10, 1e-9);
    EXPECT_NEAR(banach_norm(EntireMap::polynomial(ExactPoly({q(0), q(0), q(1)}))), 2, 1e-9);
    EXPECT_NEAR(banach_norm(EntireMap::cosh_affine(mpq_class(1), mpq_class(0))), 1, 1e-9);
    // |f(z)| <= ||f|| cosh|z| on a grid
    EntireMap f = quad(-3);
    for (double r : {0.0, 0.5, 1.0, 2.0, 3.0})
        for (int k = 0; k < 16; ++k) {
            Cd z = polar(r, k * 0.39);
            EXPECT_LE(abs(eval(f, z)), growth_bound(f, z) * (1 + 1e-12));
        }
}

TEST(EntireMap, Seminorms)
{
    EXPECT_NEAR(seminorm(EntireMap::cosh_affine(mpq_class(1), mpq_class(0)), 1, 4096), std::cosh(1.0), 1e-9);
    EXPECT_NEAR(seminorm(EntireMap::polynomial(ExactPoly({q(0), q(0), q(1)})), 2, 4096), 4, 1e-9);
}

TEST(EntireMap, FrechetDistance)
{
    EntireMap f = quad(-3);
    DistanceBracket zero = frechet_dist(f, f, 40, 256);
    EXPECT_EQ(zero.lower, 0);
    EXPECT_LE(zero.upper, 1e-11);
    EntireMap z = EntireMap::polynomial(ExactPoly({q(0), q(1)}));
    EntireMap z1 = EntireMap::polynomial(ExactPoly({q(1), q(1)}));
    DistanceBracket d = frechet_dist(z, z1, 40, 256);
    EXPECT_NEAR(d.lower, 2 - std::ldexp(1.0, -40), 1e-12);
    EXPECT_LE(d.lower, d.upper);
    EXPECT_NEAR(d.upper, 2, 1e-9);
    // oracle: for a tiny constant difference c the distance is 2c up to the tail
    EntireMap zc = EntireMap::polynomial(ExactPoly({q(1, 1000), q(1)}));
    DistanceBracket e = frechet_dist(z, zc, 40, 64);
    EXPECT_NEAR(e.lower, 2e-3, 1e-9);
    EXPECT_NEAR(e.upper, 2e-3, 1e-9);
}

TEST(EntireMap, AffineAndSymmetry)
{
    EXPECT_TRUE(is_affine(EntireMap::polynomial(ExactPoly({q(2), q(3)}))));
    EXPECT_TRUE(is_constant(EntireMap::polynomial(ExactPoly({q(2)}))));
    EXPECT_FALSE(is_affine(quad(-3)));
    EXPECT_TRUE(is_real_even(quad(-3)));
    EXPECT_FALSE(is_real_even(EntireMap::polynomial(ExactPoly({q(0), q(1)}))));
    EXPECT_THROW(EntireMap::polynomial(ExactPoly({q(0), q(1)}), Symmetry::real_even), PreconditionError);
    EntireMap f = quad(-3);
    Perturbation odd{ExactPoly({q(0), q(1)}), "test"};
    EXPECT_THROW(f.push(odd, Effect{}), PreconditionError);
}

TEST(EntireMap, JsonRoundTrip)
{
    PrecisionScope prec(160);
    EntireMap f = quad(-3);
    f.push(Perturbation{bump_value_axes(PointSet{}, GR(1), q(1, 7)), "value"}, Effect{});
    f.push(Perturbation{FloatPoly({Ch(Hp("1e-9")), Ch(Hp(0)), Ch(Hp("3e-11"))}), "float"}, Effect{});
    f.record_value(GR(1), q(5, 3));
    auto j = to_json(f);
    EXPECT_EQ(j["schema"], 1);
    EntireMap g = map_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(g).dump(), j.dump());
    Ch z(Hp("0.3"), Hp("0.7"));
    EXPECT_LT(abs(eval(f, z) - eval(g, z)), Hp(1e-40));
    EntireMap c = f0();
    EXPECT_EQ(to_json(map_from_json(to_json(c))).dump(), to_json(c).dump());
}

// A value bump vanishing to second order on the pinned points leaves the
// exact values and derivatives there unchanged.
TEST(EntireMap, PushedBumpsKeepPinnedData)
{
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> n(-30, 30), d(1, 12);
    for (int t = 0; t < 40; ++t) {
        EntireMap f = EntireMap::polynomial(ExactPoly({q(n(rng), d(rng)), q(n(rng), d(rng)), q(1)}));
        PointSet pins;
        for (int k = 0; k < 3; ++k)
            pins.push_back(GR(mpq_class(n(rng), d(rng)), mpq_class(n(rng), d(rng))));
        normalize(pins);
        GR b(mpq_class(n(rng), d(rng)), mpq_class(1, 97));
        if (contains(pins, b))
            continue;
        ExactView before(f);
        std::vector<GR> v, dv;
        for (const auto& x : pins) {
            v.push_back(before(x));
            dv.push_back(before.deriv(x));
        }
        GR target(mpq_class(n(rng), d(rng)));
        GR need = target - before(b);
        f.push(Perturbation{bump_value(pins, b, need), "value"}, Effect{pins, pins, {{b, target}}, {}});
        ExactView after(f);
        for (std::size_t k = 0; k < pins.size(); ++k) {
            EXPECT_EQ(after(pins[k]), v[k]);
            EXPECT_EQ(after.deriv(pins[k]), dv[k]);
        }
        EXPECT_EQ(after(b), target);
        EXPECT_EQ(f.known_value(b), target);
    }
}

TEST(EntireMap, TaylorDataMatchesEvaluation)
{
    PrecisionScope prec(128);
    EntireMap f = f0();
    f.push(Perturbation{ExactPoly({q(1, 3), q(0), q(-1, 5), q(0), q(1, 11)}), "p"}, Effect{});
    TaylorModel t = taylor_model(f);
    NumericMap<Hp> g(f);
    for (double r : {0.25, 0.9, 1.7}) {
        Ch z = polar(Hp(r), Hp(0.4));
        Ch want = g(z);
        Ch got = t.poly.eval(z) + cosh(z) * t.cosh_coeff;
        EXPECT_LT(abs(want - got), Hp(1e-30));
        EXPECT_LE(abs(to_double(want)), sup_upper(t, r));
    }
    Metric m;
    EXPECT_GT(m.upper(t), 0);
    EXPECT_LE(m.upper(t), 2 + 1e-9);
}
