#pragma once

#include "adjust.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace edyn {

struct DriverOptions {
    double epsilon = 0.5;
    int stages = 2;
    MultiplierPlan plan;        // per-period multiplier targets
    AdjustOptions adjust;       // flavor is set by the driver
    double residual_tol = 1e-20; // float mode: recorded targets vs MPFR evaluation
};

struct ConditionResult {
    std::string id;
    std::string name;
    bool ok = false;
    nlohmann::json witness;
};

// The sets carried from stage n to n + 1, recomputed from a map alone.
struct StageSets {
    int n = 0;
    PointSet e;          // E_n
    PointSet preimages;  // exact preimages of E_n in D(0, n)
    PointSet orbit;      // 0, f(0), ..., f^(n-1)(0) (real-even)
    PointSet a;
    PointSet c;
    std::vector<Cycle> cycles; // period <= n, meeting D(0, n)
    std::vector<std::string> gaps;
    nlohmann::json preimage_witness = nlohmann::json::object();
    nlohmann::json cycle_witness = nlohmann::json::object();
};

struct StageCertificate {
    int stage = 0;
    Flavor flavor = Flavor::plain;
    std::string metric;
    double epsilon = 0;
    nlohmann::json map;
    PointSet a;
    PointSet c;
    std::vector<Cycle> cycles;
    double step_upper = 0;
    double step_limit = 0;
    double cumulative_upper = 0;
    bool symmetric = true;
    mpz_class witness_den = 1;
    std::vector<ConditionResult> conditions;
    nlohmann::json steps = nlohmann::json::array();

    bool ok() const
    {
        if (!symmetric)
            return false;
        for (const auto& c : conditions)
            if (!c.ok)
                return false;
        return true;
    }
};

struct DriveResult {
    EntireMap map;
    std::vector<StageCertificate> certificates;
    std::optional<std::string> error;
};

namespace detail {

inline nlohmann::json points_json(const PointSet& s)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& x : s)
        out.push_back(x.str());
    return out;
}

inline nlohmann::json cycle_json(const Cycle& c)
{
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t k = 0; k < c.points.size(); ++k)
        pts.push_back(point_string(c.points[k], c.exact[k]));
    return {{"period", c.period},
            {"points", pts},
            {"multiplier", point_string(c.multiplier, c.exact_multiplier)},
            {"exact", c.fully_exact()}};
}

inline bool within(const Ch& z, double r) { return abs(to_double(z)) <= r * (1 + 1e-12); }

// f - g as a polynomial, exact when both maps are.
inline TaylorModel map_delta(const EntireMap& f, const EntireMap& g)
{
    if (f.exact() && g.exact())
        return taylor_model(f.combined_exact() - g.combined_exact());
    return difference(taylor_model(f), taylor_model(g));
}

inline mpz_class bound_of(const DriverOptions& opt, const mpz_class& wden)
{
    return std::max(opt.adjust.witness_den, wden);
}

} // namespace detail

// A_n and C_n of a map, with the exactness gaps found on the way. n = 0
// gives empty sets.
inline StageSets compute_sets(const EntireMap& f, int n, Flavor flavor, const AdjustOptions& opt)
{
    StageSets out;
    out.n = n;
    if (n == 0)
        return out;
    EnumerationE enumeration;
    out.e = enumeration.first(static_cast<std::size_t>(n));
    Snapshot s(f, opt);
    // preimages of E_n in D(0, n), counted against the winding on a clear circle
    std::vector<Ch> tnum;
    for (const auto& t : out.e)
        tnum.push_back(t.to<Hp>());
    const double pre_r = detail::preimage_guard(s, tnum, n, 0.5);
    nlohmann::json counts = nlohmann::json::array();
    bool counts_ok = true;
    for (std::size_t i = 0; i < out.e.size(); ++i) {
        int found = 0;
        for (const auto& r : s.roots_of(tnum[i], pre_r)) {
            found += r.multiplicity;
            if (!detail::within(r.z, n))
                continue;
            if (auto x = s.exact_preimage(r, out.e[i]))
                out.preimages.push_back(*x);
            else
                out.gaps.push_back("preimage of " + out.e[i].str() + " at " + point_string(r.z, std::nullopt));
        }
        const int w = s.value_winding(tnum[i], pre_r);
        counts_ok = counts_ok && w == found;
        counts.push_back({{"target", out.e[i].str()}, {"winding", w}, {"found", found}});
    }
    normalize(out.preimages);
    out.preimage_witness = {{"guard_radius", pre_r}, {"counts", counts}, {"counts_ok", counts_ok}};
    if (!counts_ok)
        out.gaps.push_back("preimage count differs from the winding number");
    // orbit of the critical point 0
    if (flavor == Flavor::real_even) {
        GR x(0);
        for (int k = 0; k < n; ++k) {
            out.orbit.push_back(x);
            if (k + 1 == n)
                break;
            auto v = s.value(x);
            if (!v) {
                out.gaps.push_back("orbit of 0 leaves the recorded points at " + x.str());
                break;
            }
            x = *v;
        }
        normalize(out.orbit);
    }
    // cycles of period <= n meeting D(0, n), counted on a clear circle in (n, n + 1)
    const double cyc_r = clear_radius(s.views(), n, n, n + 1, s.roots()).radius;
    auto all = s.cycles(n, cyc_r);
    nlohmann::json wind = nlohmann::json::array();
    bool wind_ok = true;
    for (int q = 1; q <= n; ++q) {
        int inside = 0;
        for (const auto& c : all)
            if (q % c.period == 0)
                for (const auto& z : c.points)
                    inside += detail::within(z, cyc_r) ? 1 : 0;
        const int w = s.periodic_winding(q, cyc_r);
        wind_ok = wind_ok && w == inside;
        wind.push_back({{"q", q}, {"winding", w}, {"found", inside}});
    }
    out.cycle_witness = {{"clear_radius", cyc_r}, {"counts", wind}, {"counts_ok", wind_ok}};
    if (!wind_ok)
        out.gaps.push_back("periodic point count differs from the winding number");
    for (auto& c : all) {
        if (!c.meets(Disk{{0, 0}, static_cast<double>(n)}))
            continue;
        if (!c.fully_exact())
            out.gaps.push_back("cycle of period " + std::to_string(c.period) + " through " +
                               point_string(c.points[0], std::nullopt));
        for (const auto& x : c.exact)
            if (x)
                out.c.push_back(*x);
        out.cycles.push_back(c);
    }
    normalize(out.c);
    out.a = unite(unite(out.e, out.preimages), out.orbit);
    return out;
}

struct StageCheck {
    std::vector<ConditionResult> conditions;
    StageSets sets;
    double step_upper = 0;
    bool symmetric = true;
};

// Re-derives every condition of stage n from the maps f_(n-1) and f_n alone.
inline StageCheck verify_stage(const EntireMap& prev, const EntireMap& cur, int n, Flavor flavor,
                               const DriverOptions& opt, const mpz_class& witness_den)
{
    AdjustOptions ao = opt.adjust;
    ao.flavor = flavor;
    ao.witness_den = detail::bound_of(opt, witness_den);
    PrecisionScope prec(detail::bits_for_den(ao.witness_den, ao.min_bits));
    StageCheck out;
    const bool sym = flavor == Flavor::real_even;
    const bool exact_mode = cur.exact();
    out.symmetric = !sym || is_real_even(cur);
    Snapshot sp(prev, ao), sc(cur, ao);
    const Hp tol(opt.residual_tol);

    auto guarded = [&](std::string id, std::string name, auto&& body) {
        ConditionResult r{std::move(id), std::move(name), false, nlohmann::json::object()};
        try {
            body(r);
        } catch (const Error& e) {
            r.ok = false;
            r.witness["error"] = e.what();
        }
        out.conditions.push_back(std::move(r));
    };
    // exact value of cur at x, with the float residual when the value is recorded
    auto value_ok = [&](const GR& x, const GR& want, nlohmann::json& bad) {
        auto v = sc.value(x);
        if (!v || *v != want) {
            bad.push_back(x.str());
            return false;
        }
        if (!exact_mode && abs(sc.value_hp(x) - want.to<Hp>()) > tol * std::max<Hp>(Hp(1), abs(want.to<Hp>()))) {
            bad.push_back(x.str() + " residual");
            return false;
        }
        return true;
    };

    StageSets before, now;
    bool sets_ok = true;
    try {
        before = compute_sets(prev, n - 1, flavor, ao);
        now = compute_sets(cur, n, flavor, ao);
    } catch (const Error& e) {
        sets_ok = false;
        ConditionResult r{"sets", "recompute A and C", false, {{"error", e.what()}}};
        out.conditions.push_back(r);
    }

    guarded("1", "stage distance", [&](ConditionResult& r) {
        out.step_upper = ao.metric.upper(detail::map_delta(cur, prev));
        const double limit = opt.epsilon / std::ldexp(1.0, n);
        r.ok = out.step_upper < limit;
        r.witness = {{"upper", out.step_upper}, {"limit", limit}, {"metric", ao.metric.name()}};
    });
    if (!sets_ok)
        return out;

    guarded("2", "first-order agreement", [&](ConditionResult& r) {
        nlohmann::json bad = nlohmann::json::array();
        bool ok = true;
        for (const auto& x : unite(before.a, before.c)) {
            auto want = sp.value(x);
            ok = want && value_ok(x, *want, bad) && ok;
            if (!want)
                bad.push_back(x.str() + " unknown before");
        }
        for (const auto& x : before.c) {
            auto want = sp.deriv(x);
            auto got = sc.deriv(x);
            if (!want || !got || *want != *got) {
                bad.push_back(x.str() + " derivative");
                ok = false;
            } else if (!exact_mode && abs(sc.deriv_hp(x) - want->to<Hp>()) > tol * std::max<Hp>(Hp(1), abs(want->to<Hp>()))) {
                bad.push_back(x.str() + " derivative residual");
                ok = false;
            }
        }
        r.ok = ok && before.gaps.empty();
        r.witness = {{"points", before.a.size() + before.c.size()}, {"failures", bad}, {"gaps", before.gaps}};
    });

    if (sym) {
        guarded("3", "critical orbit", [&](ConditionResult& r) {
            GR x(0);
            bool known = true;
            for (int k = 0; k < n && known; ++k) {
                auto v = sc.value(x);
                known = v.has_value();
                if (known)
                    x = *v;
            }
            const PointSet forbidden = symmetrize(std::span<const GR>(unite(now.a, now.c)));
            r.ok = known && !contains(forbidden, x);
            r.witness = {{"point", known ? x.str() : std::string("unknown")}, {"iterate", n}};
            if (known && !exact_mode) {
                Ch v(Hp(0));
                for (int k = 0; k < n; ++k)
                    v = sc.views().hi(v);
                const double res = abs(v - x.to<Hp>()).convert_to<double>();
                r.witness["residual"] = res;
                r.ok = r.ok && Hp(res) <= tol * std::max<Hp>(Hp(1), abs(x.to<Hp>()));
            }
        });
    }

    const std::string img = sym ? "4" : "3", pre = sym ? "5" : "4", cyc = sym ? "6" : "5";
    guarded(img, "image of e_n", [&](ConditionResult& r) {
        EnumerationE enumeration;
        const GR& e = enumeration.at(static_cast<std::size_t>(n));
        auto v = sc.value(e);
        r.ok = v.has_value();
        r.witness = {{"e", e.str()}, {"value", v ? v->str() : std::string("unknown")}};
        if (v && !exact_mode) {
            Hp res = abs(sc.value_hp(e) - v->to<Hp>());
            r.witness["residual"] = res.convert_to<double>();
            r.ok = res <= tol * std::max<Hp>(Hp(1), abs(v->to<Hp>()));
        }
    });

    guarded(pre, "preimages of E_n in D(0,n)", [&](ConditionResult& r) {
        bool ok = now.preimage_witness.value("counts_ok", false);
        nlohmann::json gaps = nlohmann::json::array();
        for (const auto& g : now.gaps)
            if (g.rfind("preimage", 0) == 0) {
                gaps.push_back(g);
                ok = false;
            }
        nlohmann::json res = nlohmann::json::array();
        if (!exact_mode)
            for (const auto& x : now.preimages) {
                Hp d = abs(sc.value_hp(x) - sc.value(x)->to<Hp>());
                res.push_back(d.convert_to<double>());
                ok = ok && d <= tol;
            }
        r.ok = ok;
        r.witness = now.preimage_witness;
        r.witness["points"] = detail::points_json(now.preimages);
        r.witness["gaps"] = gaps;
        if (!exact_mode)
            r.witness["residuals"] = res;
    });

    guarded(cyc, "cycles of period <= n in D(0,n)", [&](ConditionResult& r) {
        bool ok = now.cycle_witness.value("counts_ok", false);
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : now.cycles) {
            nlohmann::json j = detail::cycle_json(c);
            bool good = c.fully_exact() && opt.plan.for_period(c.period).contains(*c.exact_multiplier);
            j["target_set"] = opt.plan.for_period(c.period).name();
            j["conforms"] = good;
            if (!exact_mode && c.fully_exact()) {
                Hp worst(0);
                for (std::size_t k = 0; k < c.exact.size(); ++k) {
                    const GR& x = *c.exact[k];
                    worst = std::max<Hp>(worst, abs(sc.value_hp(x) - c.exact[(k + 1) % c.exact.size()]->to<Hp>()));
                    worst = std::max<Hp>(worst, abs(sc.deriv_hp(x) - sc.deriv(x)->to<Hp>()));
                }
                j["residual"] = worst.convert_to<double>();
                good = good && worst <= tol;
            }
            ok = ok && good;
            cs.push_back(j);
        }
        r.ok = ok;
        r.witness = now.cycle_witness;
        r.witness["cycles"] = cs;
    });

    out.sets = std::move(now);
    return out;
}

inline nlohmann::json to_json(const ConditionResult& c)
{
    return {{"id", c.id}, {"name", c.name}, {"status", c.ok ? "verified" : "failed"}, {"witness", c.witness}};
}

inline nlohmann::json to_json(const StageCertificate& c)
{
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& k : c.conditions)
        conds.push_back(to_json(k));
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& k : c.cycles)
        cycles.push_back(detail::cycle_json(k));
    return {{"schema", 1},
            {"stage", c.stage},
            {"flavor", to_string(c.flavor)},
            {"metric", c.metric},
            {"epsilon", c.epsilon},
            {"ok", c.ok()},
            {"real_even", c.symmetric},
            {"A", detail::points_json(c.a)},
            {"C", detail::points_json(c.c)},
            {"cycles", cycles},
            {"budget", {{"step_upper", c.step_upper}, {"step_limit", c.step_limit}, {"cumulative_upper", c.cumulative_upper}}},
            {"witness_den", c.witness_den.get_str()},
            {"conditions", conds},
            {"steps", c.steps},
            {"map", c.map}};
}

namespace detail {

struct StepOutput {
    EntireMap map;
    nlohmann::json steps = nlohmann::json::array();
    mpz_class den = 1;
};

inline void note(StepOutput& out, AdjustOptions& opt, const Adjusted& a, nlohmann::json extra = nlohmann::json::object())
{
    nlohmann::json j = to_json(a.report);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        j[it.key()] = it.value();
    out.steps.push_back(j);
    if (a.report.max_den > out.den)
        out.den = a.report.max_den;
    // later steps must recognise the new points
    if (out.den > opt.witness_den)
        opt.witness_den = out.den;
}

// Clear radius R_n in (n + 1, n + 2), the cycles X_n meeting D(0, R_n) and a
// guard keeping the periodic counts W_q on |z| = R_n.
struct PeriodicGuard {
    double radius = 0;
    PointSet points;
    std::vector<int> counts;
};

inline PeriodicGuard periodic_guard(const EntireMap& h, int p, const AdjustOptions& opt)
{
    PeriodicGuard g;
    PrecisionScope prec(bits_for_den(opt.witness_den, opt.min_bits));
    Snapshot s(h, opt);
    g.radius = clear_radius(s.views(), p, p, p + 1, s.roots()).radius;
    for (const auto& c : s.cycles(p, g.radius)) {
        if (!c.fully_exact())
            throw InternalLogicError("drive", "cycle left inexact after the cycle step");
        for (const auto& x : c.exact)
            g.points.push_back(*x);
    }
    normalize(g.points);
    for (int q = 1; q <= p; ++q)
        g.counts.push_back(s.periodic_winding(q, g.radius));
    return g;
}

inline MapGuard keep_counts(const PeriodicGuard& pg, const AdjustOptions& opt)
{
    return [pg, opt](const EntireMap& m) {
        try {
            PrecisionScope prec(bits_for_den(opt.witness_den, opt.min_bits));
            Snapshot s(m, opt);
            for (std::size_t q = 1; q <= pg.counts.size(); ++q)
                if (s.periodic_winding(static_cast<int>(q), pg.radius) != pg.counts[q - 1])
                    return false;
            return true;
        } catch (const BoundaryTooClose&) {
            return false;
        }
    };
}

inline StepOutput plain_step(const EntireMap& f, const StageSets& sets, int n, double epsilon, const MultiplierPlan& plan,
                             AdjustOptions opt)
{
    StepOutput out;
    const double budget = epsilon / (3 * std::ldexp(1.0, n + 1));
    EnumerationE enumeration;
    const GR e = enumeration.at(static_cast<std::size_t>(n + 1));
    const PointSet ac = unite(sets.a, sets.c);
    Adjusted g = adjust_image(f, ac, e, budget, opt);
    note(out, opt, g, {{"e", e.str()}});
    const PointSet a1 = unite(sets.a, PointSet{e});
    Adjusted h = adjust_cycles(g.map, a1, sets.c, n + 1, n + 2, plan, budget, opt);
    note(out, opt, h);
    PeriodicGuard pg = periodic_guard(h.map, n + 1, opt);
    Adjusted k = adjust_preimages(h.map, unite(a1, pg.points), enumeration.first(static_cast<std::size_t>(n + 1)),
                                  n + 1, budget, opt, keep_counts(pg, opt));
    note(out, opt, k, {{"clear_radius", pg.radius}, {"periodic_points", pg.points.size()}});
    out.map = k.map;
    return out;
}

inline StepOutput real_even_step(const EntireMap& f, const StageSets& sets, int n, double epsilon,
                                 const MultiplierPlan& plan, AdjustOptions opt)
{
    StepOutput out;
    const double chain_budget = epsilon / ((n + 2) * std::ldexp(1.0, n + 3));
    const double budget = epsilon / std::ldexp(1.0, n + 3);
    EnumerationE enumeration;
    const GR e = enumeration.at(static_cast<std::size_t>(n + 1));
    const PointSet ac = unite(sets.a, sets.c);
    // x_0 = f^n(0)
    GR x(0);
    {
        Snapshot s(f, opt);
        for (int k = 0; k < n; ++k) {
            auto v = s.value(x);
            if (!v)
                throw OrbitInfeasible("drive_real_even", "f^n(0) is not known exactly");
            x = *v;
        }
    }
    std::vector<GR> xs{x};
    EntireMap g = f;
    PointSet pins = ac;
    PointSet grown = unite(ac, PointSet{e, x});
    normalize(grown);
    for (int j = 1; j <= n + 2; ++j) {
        const GR b = xs.back();
        if (j >= 2)
            grown = unite(pins, PointSet{b});
        const PointSet avoid = symmetrize(std::span<const GR>(grown));
        Adjusted a = adjust_image(g, pins, b, chain_budget, opt, avoid);
        note(out, opt, a, {{"orbit_step", j}, {"b", b.str()}});
        g = a.map;
        Snapshot s(g, opt);
        auto v = s.value(b);
        if (!v)
            throw InternalLogicError("drive_real_even", "image step left no exact value");
        xs.push_back(*v);
        pins = grown;
    }
    PointSet a1 = sets.a;
    for (int j = 0; j <= n + 1; ++j)
        a1.push_back(xs[static_cast<std::size_t>(j)]);
    normalize(a1);
    Adjusted h = adjust_image(g, unite(a1, sets.c), e, budget, opt);
    note(out, opt, h, {{"e", e.str()}});
    const PointSet a2 = unite(a1, PointSet{e});
    Adjusted k = adjust_cycles(h.map, a2, sets.c, n + 1, n + 2, plan, budget, opt);
    note(out, opt, k);
    PeriodicGuard pg = periodic_guard(k.map, n + 1, opt);
    Adjusted l = adjust_preimages(k.map, unite(a2, pg.points), enumeration.first(static_cast<std::size_t>(n + 1)),
                                  n + 1, budget, opt, keep_counts(pg, opt));
    note(out, opt, l, {{"clear_radius", pg.radius}, {"periodic_points", pg.points.size()}});
    out.map = l.map;
    nlohmann::json orbit = nlohmann::json::array();
    for (const auto& y : xs)
        orbit.push_back(y.str());
    out.steps.push_back({{"op", "orbit"}, {"points", orbit}});
    return out;
}

inline DriveResult drive(const EntireMap& f0, DriverOptions opt, Flavor flavor)
{
    const char* where = flavor == Flavor::plain ? "drive_plain" : "drive_real_even";
    if (!(opt.epsilon > 0))
        throw PreconditionError(where, "epsilon must be positive");
    if (opt.stages < 0)
        throw PreconditionError(where, "stage count must be >= 0");
    opt.epsilon = std::min(opt.epsilon, 1.0);
    if (flavor == Flavor::plain && is_affine(f0))
        throw PreconditionError(where, "base map is affine");
    if (flavor == Flavor::real_even && (is_constant(f0) || !is_real_even(f0)))
        throw PreconditionError(where, "base map must be real, even and non-constant");
    opt.adjust.flavor = flavor;

    DriveResult result{f0, {}, std::nullopt};
    StageSets sets;
    mpz_class wden = 1;
    double cumulative = 0;
    for (int n = 0; n < opt.stages; ++n) {
        try {
            AdjustOptions ao = opt.adjust;
            ao.witness_den = detail::bound_of(opt, wden);
            PrecisionScope prec(bits_for_den(ao.witness_den, ao.min_bits));
            StepOutput step = flavor == Flavor::plain ? plain_step(result.map, sets, n, opt.epsilon, opt.plan, ao)
                                                      : real_even_step(result.map, sets, n, opt.epsilon, opt.plan, ao);
            if (step.den > wden)
                wden = step.den;
            StageCheck check = verify_stage(result.map, step.map, n + 1, flavor, opt, wden);
            StageCertificate cert;
            cert.stage = n + 1;
            cert.flavor = flavor;
            cert.metric = opt.adjust.metric.name();
            cert.epsilon = opt.epsilon;
            cert.map = to_json(step.map);
            cert.a = check.sets.a;
            cert.c = check.sets.c;
            cert.cycles = check.sets.cycles;
            cert.step_upper = check.step_upper;
            cert.step_limit = opt.epsilon / std::ldexp(1.0, n + 1);
            cumulative += check.step_upper;
            cert.cumulative_upper = cumulative;
            cert.symmetric = check.symmetric;
            cert.witness_den = wden;
            cert.conditions = std::move(check.conditions);
            cert.steps = step.steps;
            if (!cert.ok()) {
                std::string failed;
                for (const auto& c : cert.conditions)
                    if (!c.ok)
                        failed += " (" + c.id + ")";
                result.error = "stage " + std::to_string(n + 1) + " did not verify:" + failed;
                break;
            }
            result.map = step.map;
            sets = std::move(check.sets);
            result.certificates.push_back(std::move(cert));
        } catch (const Error& e) {
            result.error = "stage " + std::to_string(n + 1) + ": " + e.what();
            break;
        }
    }
    return result;
}

} // namespace detail

// Stages 1..N of the recursion for a general base map.
inline DriveResult drive_plain(const EntireMap& f0, const DriverOptions& opt)
{
    return detail::drive(f0, opt, Flavor::plain);
}

// Stages 1..N for a real even base, threading the orbit of 0 through E.
inline DriveResult drive_real_even(const EntireMap& f0, const DriverOptions& opt)
{
    return detail::drive(f0, opt, Flavor::real_even);
}

// Re-checks a certificate against the previous map using only serialized data.
inline StageCheck reverify(const EntireMap& prev, const nlohmann::json& cert, const DriverOptions& opt)
{
    const Flavor flavor = cert.at("flavor") == "plain" ? Flavor::plain : Flavor::real_even;
    DriverOptions o = opt;
    o.epsilon = cert.at("epsilon").get<double>();
    return verify_stage(prev, map_from_json(cert.at("map")), cert.at("stage").get<int>(), flavor, o,
                        mpz_class(cert.at("witness_den").get<std::string>()));
}

} // namespace edyn
