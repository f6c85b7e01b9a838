#include <edyn/driver.hpp>

#include <gtest/gtest.h>

#include <chrono>

using namespace edyn;

namespace {

GR q(long n, long d = 1) { return GR(mpq_class(n, d)); }

EntireMap base(Symmetry s = Symmetry::general)
{
    return EntireMap::polynomial(ExactPoly({q(-3), q(0), q(2)}), s);
}

DriverOptions flagship()
{
    DriverOptions o;
    o.epsilon = 0.5;
    o.stages = 2;
    o.plan.fallback.kind = MultiplierKind::rational;
    return o;
}

// Oracle: exact closure, multiplier and membership of every certified cycle,
// recomputed from the final map by exact evaluation.
void expect_exact_cycles(const StageCertificate& c, const EntireMap& f, const MultiplierPlan& plan)
{
    ExactView ex(f);
    for (const auto& cyc : c.cycles) {
        ASSERT_TRUE(cyc.fully_exact());
        GR mult(1);
        for (std::size_t k = 0; k < cyc.exact.size(); ++k) {
            EXPECT_EQ(ex(*cyc.exact[k]), *cyc.exact[(k + 1) % cyc.exact.size()]);
            mult *= ex.deriv(*cyc.exact[k]);
        }
        EXPECT_EQ(mult, *cyc.exact_multiplier);
        EXPECT_TRUE(plan.for_period(cyc.period).contains(mult));
        EXPECT_NE(mult, GR(1));
        EXPECT_TRUE(mult.is_real());
    }
}

} // namespace

TEST(Drive, NoStages)
{
    DriverOptions o = flagship();
    o.stages = 0;
    DriveResult r = drive_plain(base(), o);
    EXPECT_TRUE(r.certificates.empty());
    EXPECT_FALSE(r.error);
    EXPECT_EQ(to_json(r.map).dump(), to_json(base()).dump());
    DriveResult s = drive_real_even(base(Symmetry::real_even), o);
    EXPECT_TRUE(s.certificates.empty());
}

TEST(Drive, RejectsBadInput)
{
    DriverOptions o = flagship();
    o.epsilon = 0;
    EXPECT_THROW(drive_plain(base(), o), PreconditionError);
    o.epsilon = 0.5;
    EXPECT_THROW(drive_plain(EntireMap::polynomial(ExactPoly({q(1), q(2)})), o), PreconditionError);
    EXPECT_THROW(drive_real_even(EntireMap::polynomial(ExactPoly({q(1), q(2), q(1)})), o), PreconditionError);
}

TEST(Drive, PlainFlagship)
{
    auto t0 = std::chrono::steady_clock::now();
    DriverOptions o = flagship();
    DriveResult r = drive_plain(base(), o);
    ASSERT_FALSE(r.error) << *r.error;
    ASSERT_EQ(r.certificates.size(), 2u);
    EntireMap prev = base();
    double total = 0;
    for (const auto& c : r.certificates) {
        EXPECT_TRUE(c.ok());
        EXPECT_EQ(c.conditions.size(), 5u);
        EntireMap cur = map_from_json(c.map);
        expect_exact_cycles(c, cur, o.plan);
        total += c.step_upper;
        EXPECT_LT(c.step_upper, c.step_limit);
        // re-verification from the serialized certificate alone
        StageCheck again = reverify(prev, nlohmann::json::parse(to_json(c).dump()), o);
        ASSERT_EQ(again.conditions.size(), c.conditions.size());
        for (std::size_t k = 0; k < c.conditions.size(); ++k)
            EXPECT_EQ(again.conditions[k].ok, c.conditions[k].ok) << c.conditions[k].id;
        prev = cur;
    }
    EXPECT_LT(total, o.epsilon);
    // stage 1 leaves 2z^2 - 3 alone since its fixed points 3/2 and -1 are
    // rational; both lie in D(0,2) and are carried by stage 2
    EXPECT_EQ(r.certificates[0].steps[1]["relocations"], 0);
    EXPECT_TRUE(r.certificates[0].c.empty());
    const auto& s2 = r.certificates[1];
    EXPECT_TRUE(contains(s2.c, q(3, 2)));
    EXPECT_TRUE(contains(s2.c, q(-1)));
    // stage 2 holds the stage-1 data fixed to first order
    ExactView f2(r.map);
    EXPECT_EQ(f2(q(3, 2)), q(3, 2));
    EXPECT_EQ(f2.deriv(q(3, 2)), q(6));
    EXPECT_EQ(f2(q(-1)), q(-1));
    EXPECT_EQ(f2.deriv(q(-1)), q(-4));
    EXPECT_EQ(f2(q(0)), q(-3));
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 600);
}

TEST(Drive, RealEvenFlagship)
{
    DriverOptions o = flagship();
    DriveResult r = drive_real_even(base(Symmetry::real_even), o);
    ASSERT_FALSE(r.error) << *r.error;
    ASSERT_EQ(r.certificates.size(), 2u);
    EntireMap prev = base(Symmetry::real_even);
    for (const auto& c : r.certificates) {
        EXPECT_TRUE(c.ok());
        EXPECT_EQ(c.conditions.size(), 6u);
        EntireMap cur = map_from_json(c.map);
        EXPECT_TRUE(is_real_even(cur));
        expect_exact_cycles(c, cur, o.plan);
        StageCheck again = reverify(prev, to_json(c), o);
        for (std::size_t k = 0; k < c.conditions.size(); ++k)
            EXPECT_EQ(again.conditions[k].ok, c.conditions[k].ok);
        prev = cur;
    }
    // the critical orbit 0 -> -3 -> 15 -> 447 is kept through stage 2
    ExactView f(r.map);
    EXPECT_EQ(f(q(0)), q(-3));
    EXPECT_EQ(f(q(-3)), q(15));
    EXPECT_EQ(f(q(15)), q(447));
}

TEST(Drive, CoshFloatStage)
{
    DriverOptions o;
    o.epsilon = 0.25;
    o.stages = 1;
    o.plan.fallback.kind = MultiplierKind::even_den_or_nonreal;
    o.plan.per_period[2].kind = MultiplierKind::odd_den_or_nonreal;
    o.adjust.metric.kind = Metric::Kind::banach;
    EntireMap f0 = EntireMap::cosh_affine(mpq_class(10), mpq_class(-12));
    DriveResult r = drive_real_even(f0, o);
    ASSERT_FALSE(r.error) << *r.error;
    ASSERT_EQ(r.certificates.size(), 1u);
    const auto& c = r.certificates[0];
    EXPECT_TRUE(c.ok());
    EXPECT_TRUE(is_real_even(r.map));
    for (const auto& k : c.conditions) {
        if (k.witness.contains("residual")) {
            EXPECT_LT(k.witness["residual"].get<double>(), 1e-20);
        }
    }
    for (const auto& cyc : c.cycles) {
        ASSERT_TRUE(cyc.fully_exact());
        EXPECT_TRUE(o.plan.for_period(cyc.period).contains(*cyc.exact_multiplier));
    }
    // two stages need an exact value of f^4(0) ~ exp(6.5e11)
    o.stages = 2;
    DriveResult two = drive_real_even(f0, o);
    EXPECT_TRUE(two.error.has_value());
    EXPECT_EQ(two.certificates.size(), 1u);
}
