#include <edyn/dynamics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace edyn;

namespace {

GR q(long n, long d = 1) { return GR(mpq_class(n, d)); }

EntireMap f0() { return EntireMap::cosh_affine(mpq_class(10), mpq_class(-12)); }
EntireMap square() { return EntireMap::polynomial(ExactPoly({q(0), q(0), q(1)}), Symmetry::real_even); }

// Oracle: plain bisection of a sign change on the real line.
template <class F>
double bisect(F g, double lo, double hi)
{
    double glo = g(lo);
    for (int k = 0; k < 200; ++k) {
        double mid = (lo + hi) / 2;
        double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

double f0_real(double x) { return 10 * std::cosh(x) - 12; }

std::vector<Cd> all_points(const std::vector<Cycle>& cs)
{
    std::vector<Cd> out;
    for (const auto& c : cs)
        for (const auto& z : c.points)
            out.push_back(to_double(z));
    return out;
}

bool has_point(const std::vector<Cd>& pts, const Cd& z, double tol)
{
    for (const auto& p : pts)
        if (abs(p - z) < tol)
            return true;
    return false;
}

} // namespace

TEST(Winding, Examples)
{
    EXPECT_EQ(winding_count(square(), Cd(1.0), Disk{{0, 0}, 2}), 2);
    EXPECT_EQ(winding_count(square(), Cd(1.0), Disk{{0, 0}, 0.5}), 0);
    EXPECT_EQ(winding_count(f0(), Cd(0.0), Disk{{0, 0}, 1}), 2);
    EXPECT_THROW(winding_count(square(), Cd(1.0), Disk{{0, 0}, 1}), BoundaryTooClose);
}

TEST(Roots, Examples)
{
    PrecisionScope prec(128);
    EntireMap f = EntireMap::polynomial(ExactPoly({q(-1), q(0), q(1)}));
    auto r = roots_in_disk(f, Ch(Hp(0)), Disk{{0, 0}, 2});
    ASSERT_EQ(r.size(), 2u);
    std::vector<double> xs{to_double(r[0].z).re, to_double(r[1].z).re};
    std::sort(xs.begin(), xs.end());
    EXPECT_NEAR(xs[0], -1, 1e-14);
    EXPECT_NEAR(xs[1], 1, 1e-14);

    auto d = roots_in_disk(f0(), Ch(Hp(-2)), Disk{{0, 0}, 1});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].multiplicity, 2);
    EXPECT_LT(abs(to_double(d[0].z)), 1e-12);

    auto z = roots_in_disk(f0(), Ch(Hp(0)), Disk{{0, 0}, 1});
    ASSERT_EQ(z.size(), 2u);
    double want = bisect(f0_real, 0, 1);
    EXPECT_NEAR(want, 0.6223625, 1e-7);
    for (const auto& root : z) {
        EXPECT_NEAR(std::abs(to_double(root.z).re), want, 1e-12);
        EXPECT_EQ(root.z.im, 0);
        EXPECT_LT(root.residual, Hp(1e-25));
    }
}

TEST(Roots, CountMatchesWinding)
{
    PrecisionScope prec(128);
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> c(-9, 9);
    for (int t = 0; t < 25; ++t) {
        std::vector<GR> co;
        for (int k = 0; k < 6; ++k)
            co.push_back(GR(mpq_class(c(rng), 4), mpq_class(c(rng), 5)));
        co.push_back(q(1));
        EntireMap f = EntireMap::polynomial(ExactPoly(co));
        Disk disk{{0.1, -0.05}, 1.3 + 0.1 * (t % 5)};
        int w;
        try {
            w = winding_count(f, Cd(0.0), disk);
        } catch (const BoundaryTooClose&) {
            continue;
        }
        auto roots = roots_in_disk(f, Ch(Hp(0)), disk);
        int total = 0;
        NumericMap<Hp> g(f);
        for (const auto& r : roots) {
            total += r.multiplicity;
            EXPECT_LT(abs(g(r.z)), Hp(1e-25));
        }
        EXPECT_EQ(total, w);
    }
}

TEST(Preimages, Examples)
{
    PrecisionScope prec(128);
    auto a = preimages_in_disk(square(), {Ch(Hp(4))}, Disk{{0, 0}, 3});
    ASSERT_EQ(a[0].second.size(), 2u);
    EXPECT_NEAR(to_double(a[0].second[0].z).re, 2, 1e-14);
    EXPECT_NEAR(to_double(a[0].second[1].z).re, -2, 1e-14);
    auto b = preimages_in_disk(square(), {Ch(Hp(0))}, Disk{{0, 0}, 1});
    ASSERT_EQ(b[0].second.size(), 1u);
    EXPECT_EQ(b[0].second[0].multiplicity, 2);
    auto c = preimages_in_disk(f0(), {Ch(Hp(-12))}, Disk{{0, 0}, 1});
    EXPECT_TRUE(c[0].second.empty());
}

TEST(Cycles, SquareExamples)
{
    PrecisionScope prec(128);
    auto c1 = periodic_cycles(square(), 1, Disk{{0, 0}, 2});
    ASSERT_EQ(c1.size(), 2u);
    EXPECT_LT(abs(to_double(c1[0].points[0])), 1e-20);
    EXPECT_LT(abs(to_double(c1[0].multiplier)), 1e-20);
    EXPECT_NEAR(to_double(c1[1].points[0]).re, 1, 1e-14);
    EXPECT_NEAR(to_double(c1[1].multiplier).re, 2, 1e-14);

    auto c2 = periodic_cycles(square(), 2, Disk{{0, 0}, 2});
    ASSERT_EQ(c2.size(), 3u);
    EXPECT_EQ(c2[2].period, 2);
    EXPECT_NEAR(to_double(c2[2].multiplier).re, 4, 1e-12);
    EXPECT_NEAR(to_double(c2[2].multiplier).im, 0, 1e-12);
    for (const auto& z : c2[2].points)
        EXPECT_NEAR(abs(to_double(z)), 1, 1e-14);
    Cd w = polar(1.0, 2 * pi_value<double>() / 3);
    EXPECT_TRUE(has_point(all_points(c2), w, 1e-12));
    EXPECT_TRUE(has_point(all_points(c2), conj(w), 1e-12));

    ExactView ex(square());
    for (auto& c : c2) {
        if (c.period == 1) {
            EXPECT_TRUE(confirm_exact(ex, c, mpz_class(10)));
        }
    }
    EXPECT_TRUE(c2[1].fully_exact());
    EXPECT_EQ(*c2[1].exact_multiplier, q(2));
    std::string csv = cycles_csv(c2);
    EXPECT_NE(csv.find("1,1/1+0/1i,2/1+0/1i"), std::string::npos) << csv;
}

TEST(Cycles, CoshExampleMatchesBisection)
{
    PrecisionScope prec(128);
    auto cs = periodic_cycles(f0(), 2, Disk{{0, 0}, 1});
    ASSERT_EQ(cs.size(), 3u);
    EXPECT_EQ(cs[0].period, 1);
    EXPECT_EQ(cs[1].period, 1);
    EXPECT_EQ(cs[2].period, 2);
    auto fix = [](double x) { return f0_real(x) - x; };
    double a = bisect(fix, -1, 0), b = bisect(fix, 0, 1);
    std::vector<Cd> pts = all_points(cs);
    EXPECT_TRUE(has_point(pts, Cd(a), 1e-12));
    EXPECT_TRUE(has_point(pts, Cd(b), 1e-12));
    for (const auto& z : pts)
        EXPECT_EQ(z.im, 0);
    // the two-cycle agrees with bisection of f0(f0(x)) - x around each point
    auto two = [](double x) { return f0_real(f0_real(x)) - x; };
    for (const auto& z : cs[2].points) {
        double x = to_double(z).re;
        EXPECT_NEAR(bisect(two, x - 1e-3, x + 1e-3), x, 1e-12);
        EXPECT_GT(std::abs(fix(x)), 1e-3);
    }
}

TEST(Cycles, Invariants)
{
    PrecisionScope prec(128);
    EntireMap f = EntireMap::polynomial(ExactPoly({q(-3, 4), q(0), q(1, 2), q(0), q(1, 8)}), Symmetry::real_even);
    f.push(Perturbation{ExactPoly({q(0), q(0), q(1, 50)}), "p"}, Effect{});
    NumericMap<Hp> g(f);
    auto big = periodic_cycles(f, 3, Disk{{0, 0}, 2.1});
    auto small = periodic_cycles(f, 3, Disk{{0, 0}, 1.3});
    ASSERT_FALSE(big.empty());
    std::vector<Cd> bp = all_points(big);
    for (const auto& c : big) {
        // closure and multiplier
        Ch mult(Hp(1));
        for (std::size_t k = 0; k < c.points.size(); ++k) {
            EXPECT_LT(abs(g(c.points[k]) - c.points[(k + 1) % c.points.size()]), Hp(1e-24));
            mult *= g.deriv(c.points[k]);
        }
        EXPECT_LT(abs(mult - c.multiplier), Hp(1e-20) * std::max<Hp>(Hp(1), abs(mult)));
        // minimality
        for (int d = 1; d < c.period; ++d) {
            if (c.period % d)
                continue;
            Ch v, dv;
            g.iterate(c.points[0], d, v, dv);
            EXPECT_GT(abs(v - c.points[0]), Hp(1e-20));
        }
        // conjugation equivariance
        for (const auto& z : c.points)
            EXPECT_TRUE(has_point(bp, conj(to_double(z)), 1e-12));
    }
    for (const auto& c : small)
        for (const auto& z : c.points)
            EXPECT_TRUE(has_point(bp, to_double(z), 1e-12));
}

TEST(ClearRadius, Examples)
{
    PrecisionScope prec(128);
    ClearRadius r = clear_radius(square(), 1, 1.5, 2.5);
    EXPECT_DOUBLE_EQ(r.radius, 2);
    EXPECT_DOUBLE_EQ(r.margin, 0.5);
    ClearRadius c = clear_radius(f0(), 2, 1, 2);
    EXPECT_GT(c.radius, 1);
    EXPECT_LT(c.radius, 2);
    EXPECT_GT(c.margin, 0);
    auto cs = periodic_cycles(f0(), 2, Disk{{0, 0}, 2.5});
    for (double m : moduli_of(cs))
        EXPECT_GE(std::abs(m - c.radius), c.margin * (1 - 1e-12));
    ClearRadius e = clear_radius_from_moduli({}, 0, 4);
    EXPECT_DOUBLE_EQ(e.radius, 2);
    std::vector<double> dense;
    for (int k = 0; k <= 1000; ++k)
        dense.push_back(1 + k * 1e-10);
    EXPECT_THROW(clear_radius_from_moduli(dense, 1, 1 + 1e-7), IntervalExhausted);
}
