#pragma once

#include "bumps.hpp"
#include "dynamics.hpp"
#include "entire_map.hpp"
#include "multipliers.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace edyn {

enum class Flavor { plain, real_even };

inline const char* to_string(Flavor f) { return f == Flavor::plain ? "plain" : "real_even"; }

struct AdjustOptions {
    Flavor flavor = Flavor::plain;
    Metric metric;
    mpz_class denom_bound = 16;   // first snapping bound
    mpz_class witness_den = 1;    // largest denominator of exact points that may need recognising
    int max_retries = 10;         // placement shifts per bound before the bound doubles
    int max_growth = 48;          // bound increases before giving up
    double guard_width = 0.25;    // guard radius is searched in (R, R + width)
    unsigned min_bits = 128;
    double float_match = 1e-20;   // recorded points match numerical points within this (float mode)
    RootOptions roots;
};

struct AdjustReport {
    std::string op;
    double budget = 0;
    double used = 0;       // metric upper bound of the whole step
    int relocations = 0;
    int bumps = 0;
    double guard_radius = 0;
    mpz_class denom_bound = 0;
    mpz_class max_den = 1; // largest denominator of a new exact point
};

inline nlohmann::json to_json(const AdjustReport& r)
{
    return {{"op", r.op},
            {"budget", r.budget},
            {"used_upper", r.used},
            {"relocations", r.relocations},
            {"bumps", r.bumps},
            {"guard_radius", r.guard_radius},
            {"denom_bound", r.denom_bound.get_str()},
            {"max_den", r.max_den.get_str()}};
}

struct Adjusted {
    EntireMap map;
    AdjustReport report;
};

// Extra acceptance test on a candidate map, e.g. a periodic guard count.
using MapGuard = std::function<bool(const EntireMap&)>;

namespace detail {

inline unsigned bits_for_den(const mpz_class& den, unsigned min_bits)
{
    unsigned len = static_cast<unsigned>(mpz_sizeinbase(den.get_mpz_t(), 2));
    return std::max(min_bits, 4 * len + 96);
}

inline void raise_den(mpz_class& m, const GR& x)
{
    if (x.max_den() > m)
        m = x.max_den();
}

inline mpz_class den_of(const PointSet& s, mpz_class start = 1)
{
    for (const auto& x : s)
        raise_den(start, x);
    return start;
}

inline RootOptions tuned(RootOptions r)
{
    int e = static_cast<int>(std::min(1000u, working_bits() * 7 / 10));
    r.tol = std::ldexp(1.0, -e);
    return r;
}

inline PointSet intersect(const PointSet& a, const PointSet& b) { return minus(a, minus(a, b)); }

inline PointSet sym_if(PointSet s, bool sym)
{
    normalize(s);
    return sym ? symmetrize(s) : s;
}

// 0, 1, -1, 2, -2, ...
inline long shift(int k) { return k % 2 == 1 ? (k + 1) / 2 : -(k / 2); }

inline mpz_class grow(const mpz_class& q, double ratio)
{
    double f = 2 * std::ceil(std::sqrt(std::max(ratio, 1.0)));
    f = std::min(std::max(f, 2.0), 1e6);
    return q * mpz_class(static_cast<unsigned long>(f));
}

enum class Locus { free, real, imaginary, away };

inline Locus locus_of(const Ch& z, bool sym)
{
    if (!sym)
        return Locus::free;
    Hp tiny = ldexp(Hp(1), -static_cast<int>(working_bits() / 2)) * std::max<Hp>(Hp(1), abs(z));
    if (abs(z.im) <= tiny)
        return Locus::real;
    if (abs(z.re) <= tiny)
        return Locus::imaginary;
    return Locus::away;
}

// Element of Q(i) near z on the requested locus; k walks outward in steps of 1/q.
inline GR place(const Ch& z, const mpz_class& q, Locus l, int k)
{
    mpq_class step(1);
    step /= q;
    mpq_class s = step * shift(k);
    mpq_class re = snap_real(z.re, q), im = snap_real(z.im, q);
    switch (l) {
    case Locus::real: return GR(re + s);
    case Locus::imaginary: return GR(0, im + s);
    case Locus::away: {
        re += s;
        if (sgn(re) == 0)
            re = z.re < 0 ? mpq_class(-step) : step;
        if (sgn(im) == 0)
            im = z.im < 0 ? mpq_class(-step) : step;
        return GR(re, im);
    }
    default: return GR(re + s, im);
    }
}

inline void record_value(Effect& e, const GR& x, const GR& v, bool sym)
{
    e.new_values.emplace_back(x, v);
    if (!sym)
        return;
    e.new_values.emplace_back(-x, v);
    e.new_values.emplace_back(x.conj(), v.conj());
    e.new_values.emplace_back(-x.conj(), v.conj());
}

inline void record_deriv(Effect& e, const GR& x, const GR& d, bool sym)
{
    e.new_derivs.emplace_back(x, d);
    if (!sym)
        return;
    e.new_derivs.emplace_back(-x, -d);
    e.new_derivs.emplace_back(x.conj(), d.conj());
    e.new_derivs.emplace_back(-x.conj(), -d.conj());
}

// Where one bump of a step leaves the map untouched.
struct BumpSite {
    PointSet pins;
    GR b;
    bool deriv = false;
};

// Values survive where every bump vanishes, derivatives where every bump
// vanishes to second order.
inline Effect effect_of(const std::vector<BumpSite>& sites)
{
    Effect e;
    bool first = true;
    for (const auto& s : sites) {
        PointSet v = s.pins;
        if (s.deriv)
            v = unite(v, PointSet{s.b});
        if (first) {
            e.value_pinned = v;
            e.deriv_pinned = s.pins;
            first = false;
        } else {
            e.value_pinned = intersect(e.value_pinned, v);
            e.deriv_pinned = intersect(e.deriv_pinned, s.pins);
        }
    }
    return e;
}

} // namespace detail

// One version of a map at the current precision: both numeric tiers, tuned
// root options and the exact facts (exact evaluation or recorded targets).
class Snapshot {
public:
    Snapshot(const EntireMap& f, const AdjustOptions& opt)
        : map_(f), views_(map_), roots_(detail::tuned(opt.roots)), float_match_(opt.float_match)
    {
        if (map_.exact())
            exact_.emplace(map_);
    }

    const EntireMap& map() const { return map_; }
    const MapViews& views() const { return views_; }
    const RootOptions& roots() const { return roots_; }
    bool exact_map() const { return exact_.has_value(); }

    std::optional<GR> value(const GR& x) const
    {
        if (exact_)
            return (*exact_)(x);
        return map_.known_value(x);
    }
    std::optional<GR> deriv(const GR& x) const
    {
        if (exact_)
            return exact_->deriv(x);
        return map_.known_deriv(x);
    }
    Ch value_hp(const GR& x) const { return views_.hi(x.to<Hp>()); }
    Ch deriv_hp(const GR& x) const { return views_.hi.deriv(x.to<Hp>()); }

    // Exact point that the numerical point z stands for, if one is known or
    // recognisable. Exact maps: the lowest-height element of Q(i) agreeing with
    // z to most of the working precision (callers confirm it exactly). Float
    // maps: the nearest recorded point.
    std::optional<GR> match(const Ch& z, int multiplicity = 1) const
    {
        const Hp scale = std::max<Hp>(Hp(1), abs(z));
        if (!exact_) {
            std::optional<GR> best;
            Hp best_d = Hp(float_match_) * scale;
            auto consider = [&](const GR& x) {
                Hp d = abs(x.to<Hp>() - z);
                if (d <= best_d) {
                    best_d = d;
                    best = x;
                }
            };
            for (const auto& kv : map_.known_values())
                consider(kv.first);
            for (const auto& kv : map_.known_derivs())
                consider(kv.first);
            return best;
        }
        const unsigned bits = working_bits();
        const double share = multiplicity > 1 ? 0.4 : 0.6;
        Hp err = ldexp(Hp(1), -static_cast<int>(bits * share)) * scale;
        mpq_class re = RealOps<Hp>::to_q(z.re), im = RealOps<Hp>::to_q(z.im);
        const int max_log = static_cast<int>(bits / 4);
        for (int k = 0; k <= max_log; ++k) {
            mpz_class q = mpz_class(1) << k;
            GR c(limit_denominator(re, q), limit_denominator(im, q));
            if (abs(c.to<Hp>() - z) <= err)
                return c;
        }
        return std::nullopt;
    }

    // Exact preimage of t standing for the root z.
    std::optional<GR> exact_preimage(const Root& r, const GR& t) const
    {
        auto c = match(r.z, r.multiplicity);
        if (!c)
            return std::nullopt;
        auto v = value(*c);
        if (!v || *v != t)
            return std::nullopt;
        return c;
    }

    // Fills the exact witnesses of a cycle when every point and derivative is known exactly.
    bool witness(Cycle& c) const
    {
        std::vector<GR> pts;
        for (const auto& z : c.points) {
            auto m = match(z);
            if (!m)
                return false;
            pts.push_back(*m);
        }
        for (std::size_t k = 0; k < pts.size(); ++k) {
            auto v = value(pts[k]);
            if (!v || *v != pts[(k + 1) % pts.size()])
                return false;
        }
        GR mult(1);
        for (const auto& x : pts) {
            auto d = deriv(x);
            if (!d)
                return false;
            mult *= *d;
        }
        for (std::size_t k = 0; k < pts.size(); ++k)
            c.exact[k] = pts[k];
        c.exact_multiplier = mult;
        return true;
    }

    std::vector<Cycle> cycles(int p, double radius) const
    {
        auto out = periodic_cycles(views_, p, Disk{{0, 0}, radius}, roots_);
        for (auto& c : out)
            witness(c);
        return out;
    }

    std::vector<Root> roots_of(const Ch& t, double radius) const
    {
        return roots_in_disk(views_, t, Disk{{0, 0}, radius}, roots_);
    }

    int periodic_winding(int q, double radius) const
    {
        auto g = [&](const Cd& z) {
            Cd v, d;
            views_.lo.iterate(z, q, v, d);
            return v - z;
        };
        return winding_count(g, Disk{{0, 0}, radius}, roots_.winding);
    }

    int value_winding(const Ch& t, double radius) const
    {
        Cd td = to_double(t);
        return winding_count([&](const Cd& z) { return views_.lo(z) - td; }, Disk{{0, 0}, radius}, roots_.winding);
    }

private:
    EntireMap map_;
    MapViews views_;
    RootOptions roots_;
    double float_match_;
    std::optional<ExactView> exact_;
};

inline bool conforms(const Cycle& c, const MultiplierPlan& plan)
{
    return c.fully_exact() && plan.for_period(c.period).contains(*c.exact_multiplier);
}

namespace detail {

template <class F>
F value_at(const Snapshot& s, const GR& x)
{
    if constexpr (std::is_same_v<F, GR>)
        return *s.value(x);
    else
        return s.value_hp(x);
}

template <class F>
F deriv_at(const Snapshot& s, const GR& x)
{
    if constexpr (std::is_same_v<F, GR>)
        return *s.deriv(x);
    else
        return s.deriv_hp(x);
}

template <class F>
Poly<F> value_bump(bool sym, const PointSet& pins, const GR& b, const F& need)
{
    if (!sym)
        return bump_value(pins, b, need);
    if (b.on_axes())
        return bump_value_axes(pins, b, need);
    return bump_value_away(pins, b, need);
}

template <class F>
Poly<F> deriv_bump(bool sym, const PointSet& pins, const GR& b, const F& need)
{
    if (!sym)
        return bump_deriv(pins, b, need);
    if (b.on_axes())
        return bump_deriv_axes(pins, b, need);
    return bump_deriv_away(pins, b, need);
}

inline void require_nondegenerate(const EntireMap& f, bool sym, const char* op)
{
    if (sym ? is_constant(f) : is_affine(f))
        throw PreconditionError(op, sym ? "map is constant" : "map is affine");
}

inline bool affine_guard_ok(const EntireMap& f, bool sym) { return !(sym ? is_constant(f) : is_affine(f)); }

template <class F>
Adjusted adjust_image_impl(const EntireMap& f, PointSet pins, const GR& b, PointSet avoid, double budget,
                           const AdjustOptions& opt)
{
    const bool sym = opt.flavor == Flavor::real_even;
    pins = sym_if(std::move(pins), sym);
    avoid = sym_if(std::move(avoid), sym);
    AdjustReport rep;
    rep.op = "image";
    rep.budget = budget;
    mpz_class den = den_of(avoid, den_of(pins, opt.witness_den));
    raise_den(den, b);
    PrecisionScope prec(bits_for_den(den, opt.min_bits));
    Snapshot s(f, opt);
    auto v = s.value(b);
    if (v && !contains(avoid, *v))
        return {f, rep};
    if (contains(pins, b))
        throw ConstraintConflict("adjust_image", "pinned point " + b.str() + " has a value that must move");
    const Ch w = s.value_hp(b);
    // values on the axes are real for real-even maps
    const bool axes = sym && b.on_axes();
    const Locus target_locus = axes ? Locus::real : Locus::free;
    mpz_class q = opt.denom_bound;
    int k = 0;
    for (int round = 0; round < opt.max_growth; ++round) {
        GR zeta = place(w, q, target_locus, k);
        if (contains(avoid, zeta)) {
            if (++k > opt.max_retries) {
                q *= 2;
                k = 0;
            }
            continue;
        }
        F need = Field<F>::from(zeta) - value_at<F>(s, b);
        if (axes)
            need = Field<F>::real_part(need);
        Poly<F> bump = value_bump<F>(sym, pins, b, need);
        double used = opt.metric.upper(taylor_model(bump));
        if (used >= budget) {
            q = grow(q, used / budget);
            k = 0;
            continue;
        }
        EntireMap g = f;
        Effect e = effect_of({BumpSite{pins, b, false}});
        record_value(e, b, zeta, sym);
        g.push(Perturbation{bump, "image"}, e);
        if (!affine_guard_ok(g, sym))
            throw StructuralError("adjust_image", "perturbation degenerated the map");
        if constexpr (std::is_same_v<F, GR>) {
            if (ExactView(g)(b) != zeta)
                throw InternalLogicError("adjust_image", "exact post-check failed");
        }
        rep.used = used;
        rep.bumps = bump.is_zero() ? 0 : 1;
        rep.denom_bound = q;
        rep.max_den = zeta.max_den();
        return {g, rep};
    }
    throw RetryExhausted("adjust_image", "no admissible target within the budget");
}

// Clear guard radius in (lo, lo + width) for the roots of f - t, t in targets.
inline double preimage_guard(const Snapshot& s, const std::vector<Ch>& targets, double lo, double width)
{
    for (int k = 0; k < 8; ++k) {
        double outer = lo + width * (1 + k / 16.0);
        try {
            std::vector<double> moduli;
            for (const auto& t : targets)
                for (const auto& r : s.roots_of(t, outer))
                    moduli.push_back(abs(to_double(r.z)));
            return clear_radius_from_moduli(moduli, lo, lo + width).radius;
        } catch (const BoundaryTooClose&) {
        }
    }
    throw BoundaryTooClose("adjust_preimages", "no resolvable guard circle");
}

template <class F>
Adjusted adjust_preimages_impl(const EntireMap& f, PointSet pins, PointSet targets, double radius, double budget,
                               const AdjustOptions& opt, const MapGuard& guard)
{
    const bool sym = opt.flavor == Flavor::real_even;
    require_nondegenerate(f, sym, "adjust_preimages");
    pins = sym_if(std::move(pins), sym);
    AdjustReport rep;
    rep.op = "preimages";
    rep.budget = budget;
    mpz_class den = den_of(targets, den_of(pins, opt.witness_den));
    std::vector<Ch> tnum;
    double guard_radius = 0;
    std::vector<int> counts;
    int pending = 0;
    {
        PrecisionScope prec(bits_for_den(den, opt.min_bits));
        Snapshot s(f, opt);
        for (const auto& t : targets)
            tnum.push_back(t.to<Hp>());
        guard_radius = preimage_guard(s, tnum, radius, opt.guard_width);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            counts.push_back(s.value_winding(tnum[i], guard_radius));
            for (const auto& r : s.roots_of(tnum[i], guard_radius))
                if (!s.exact_preimage(r, targets[i]))
                    pending += r.multiplicity;
        }
    }
    rep.guard_radius = guard_radius;
    if (pending == 0)
        return {f, rep};
    const double allot = budget * (1 - 1e-9) / pending;
    EntireMap g = f;
    mpz_class q = opt.denom_bound;
    for (int iter = 0;; ++iter) {
        if (iter > pending)
            throw InternalLogicError("adjust_preimages", "iteration cap exceeded");
        PrecisionScope prec(bits_for_den(std::max(den, q), opt.min_bits));
        Snapshot s(g, opt);
        PointSet found;
        std::optional<std::pair<Root, std::size_t>> todo;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            for (const auto& r : s.roots_of(targets[i].to<Hp>(), guard_radius)) {
                if (auto e = s.exact_preimage(r, targets[i]))
                    found.push_back(*e);
                else if (!todo)
                    todo = std::make_pair(r, i);
            }
        }
        normalize(found);
        if (!todo)
            break;
        const Root& w = todo->first;
        const GR& t = targets[todo->second];
        const PointSet fixed = sym_if(unite(pins, found), sym);
        const Locus l = locus_of(w.z, sym);
        bool placed = false;
        int k = 0;
        for (int round = 0; round < opt.max_growth && !placed; ++round) {
            PrecisionScope inner(bits_for_den(std::max(den, q), opt.min_bits));
            GR zeta = place(w.z, q, l, k);
            double zd = abs(to_double(zeta.to<Hp>()));
            if (contains(fixed, zeta) || zd >= guard_radius) {
                if (++k > opt.max_retries) {
                    q *= 2;
                    k = 0;
                }
                continue;
            }
            F need = Field<F>::from(t) - value_at<F>(s, zeta);
            if (sym && zeta.on_axes())
                need = Field<F>::real_part(need);
            Poly<F> bump = value_bump<F>(sym, fixed, zeta, need);
            double used = opt.metric.upper(taylor_model(bump));
            if (used >= allot) {
                q = grow(q, used / allot);
                k = 0;
                continue;
            }
            EntireMap h = g;
            Effect e = effect_of({BumpSite{fixed, zeta, false}});
            record_value(e, zeta, t, sym);
            h.push(Perturbation{bump, "preimages"}, e);
            bool ok = affine_guard_ok(h, sym);
            if (ok) {
                try {
                    Snapshot hs(h, opt);
                    for (std::size_t i = 0; i < targets.size() && ok; ++i)
                        ok = hs.value_winding(tnum[i], guard_radius) == counts[i];
                } catch (const BoundaryTooClose&) {
                    ok = false;
                }
            }
            if (ok && guard)
                ok = guard(h);
            if (!ok) {
                q *= 2;
                k = 0;
                continue;
            }
            if constexpr (std::is_same_v<F, GR>) {
                if (ExactView(h)(zeta) != t)
                    throw InternalLogicError("adjust_preimages", "exact post-check failed");
            }
            g = std::move(h);
            raise_den(rep.max_den, zeta);
            raise_den(den, zeta);
            rep.denom_bound = q;
            ++rep.relocations;
            ++rep.bumps;
            placed = true;
        }
        if (!placed)
            throw RetryExhausted("adjust_preimages", "no admissible replacement for a preimage of " + t.str());
    }
    rep.used = opt.metric.upper(taylor_model(g.stack_delta(f.perturbations().size())));
    return {g, rep};
}

// Exact derivative target at the last orbit point so that the product lands
// in the target set; `rest` is the exact product over the other points.
inline std::optional<GR> last_target(const Ch& d, const GR& rest, const MultiplierSet& set, const mpz_class& q,
                                     bool must_be_real, bool paired, int attempt)
{
    if (rest.is_zero())
        return std::nullopt;
    if (!paired) {
        Ch mu = d * rest.to<Hp>();
        GR target = set.propose(mu, q, attempt, must_be_real) / rest;
        if (target.is_zero())
            return std::nullopt;
        return target;
    }
    // multiplier |t|^2 * rest for a conjugate pair of orbit points
    mpq_class step(1);
    step /= q;
    GR base = snap(d, q);
    for (int r = attempt; r < attempt + 24; ++r)
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b) {
                if (std::max(std::abs(a), std::abs(b)) != r)
                    continue;
                GR c = base + GR(mpq_class(step * a), mpq_class(step * b));
                if (c.is_zero() || c.is_real())
                    continue;
                if (set.contains(GR(c.norm()) * rest))
                    return c;
            }
    return std::nullopt;
}

template <class F>
Adjusted adjust_cycles_impl(const EntireMap& f, PointSet pins, PointSet frozen, int p, double radius,
                            const MultiplierPlan& plan, double budget, const AdjustOptions& opt)
{
    const bool sym = opt.flavor == Flavor::real_even;
    require_nondegenerate(f, sym, "adjust_cycles");
    if (p < 1)
        throw PreconditionError("adjust_cycles", "period must be >= 1");
    pins = sym_if(std::move(pins), sym);
    normalize(frozen);
    AdjustReport rep;
    rep.op = "cycles";
    rep.budget = budget;
    mpz_class den = den_of(frozen, den_of(pins, opt.witness_den));
    double guard_radius = 0;
    std::vector<int> counts;
    int pending = 0;
    {
        PrecisionScope prec(bits_for_den(den, opt.min_bits));
        Snapshot s(f, opt);
        if (sym) {
            Ch v(Hp(0));
            for (int q = 1; q <= p; ++q) {
                v = s.views().hi(v);
                if (abs(v) <= Hp(1e-30))
                    throw PreconditionError("adjust_cycles", "0 is periodic with period <= p");
            }
        }
        guard_radius = clear_radius(s.views(), p, radius, radius + opt.guard_width, s.roots()).radius;
        for (int q = 1; q <= p; ++q)
            counts.push_back(s.periodic_winding(q, guard_radius));
        for (const auto& c : s.cycles(p, guard_radius))
            if (!conforms(c, plan))
                ++pending;
    }
    rep.guard_radius = guard_radius;
    if (pending == 0)
        return {f, rep};
    const double allot = budget * (1 - 1e-9) / pending;
    EntireMap g = f;
    mpz_class q = opt.denom_bound;
    for (int iter = 0;; ++iter) {
        if (iter > pending)
            throw InternalLogicError("adjust_cycles", "iteration cap exceeded");
        PrecisionScope prec(bits_for_den(std::max(den, q), opt.min_bits));
        Snapshot s(g, opt);
        std::vector<Cycle> all = s.cycles(p, guard_radius);
        PointSet good = frozen;
        const Cycle* omega = nullptr;
        for (const auto& c : all) {
            if (conforms(c, plan)) {
                for (const auto& x : c.exact)
                    good.push_back(*x);
            } else if (!omega) {
                omega = &c;
            }
        }
        normalize(good);
        if (!omega)
            break;
        const Cycle& cyc = *omega;
        const std::size_t n = cyc.points.size();
        const MultiplierSet& set = plan.for_period(cyc.period);
        // conjugate partner of each orbit point (real-even, symmetric orbit)
        std::vector<std::size_t> partner(n);
        bool paired = false;
        if (sym) {
            paired = true;
            for (std::size_t i = 0; i < n && paired; ++i) {
                Hp best = -1;
                for (std::size_t j = 0; j < n; ++j) {
                    Hp d = abs(cyc.points[j] - conj(cyc.points[i]));
                    if (best < 0 || d < best) {
                        best = d;
                        partner[i] = j;
                    }
                }
                paired = best <= Hp(1e-12) * std::max<Hp>(Hp(1), abs(cyc.points[i]));
            }
            bool real = std::all_of(cyc.points.begin(), cyc.points.end(),
                                    [](const Ch& z) { return locus_of(z, true) == Locus::real; });
            if (real) {
                for (std::size_t i = 0; i < n; ++i)
                    partner[i] = i;
                paired = false;
            }
        }
        std::vector<Locus> loci(n);
        for (std::size_t i = 0; i < n; ++i)
            loci[i] = locus_of(cyc.points[i], sym);
        const PointSet good_sym = sym_if(good, sym);
        std::vector<std::optional<GR>> kept(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto m = s.match(cyc.points[i]);
            if (m) {
                auto v = s.value(*m);
                auto mn = s.match(cyc.points[(i + 1) % n]);
                if (v && mn && *v == *mn)
                    kept[i] = m;
            }
        }
        bool placed = false;
        int k = 0;
        for (int round = 0; round < opt.max_growth && !placed; ++round) {
            PrecisionScope inner(bits_for_den(std::max(den, q), opt.min_bits));
            auto bump_collision = [&]() {
                if (++k > opt.max_retries) {
                    q *= 2;
                    k = 0;
                }
            };
            // relocation of the orbit
            std::vector<GR> zeta(n);
            std::vector<bool> rep_point(n, true);
            for (std::size_t i = 0; i < n; ++i) {
                if (paired && partner[i] < i) {
                    rep_point[i] = false;
                    continue;
                }
                zeta[i] = kept[i] ? *kept[i] : place(cyc.points[i], q, loci[i], k);
            }
            for (std::size_t i = 0; i < n; ++i)
                if (!rep_point[i])
                    zeta[i] = zeta[partner[i]].conj();
            PointSet moved_sym, orbit_sym;
            bool clash = false;
            std::size_t expect = 0;
            for (std::size_t i = 0; i < n; ++i) {
                PointSet one = sym_if(PointSet{zeta[i]}, sym);
                if (rep_point[i])
                    expect += one.size();
                orbit_sym = unite(orbit_sym, one);
                if (!kept[i] && (contains(pins, zeta[i]) || contains(good_sym, zeta[i])))
                    clash = true;
                if (sym && !kept[i] && loci[i] == Locus::away && zeta[i].on_axes())
                    clash = true;
            }
            if (orbit_sym.size() != expect)
                clash = true;
            if (clash) {
                bump_collision();
                continue;
            }
            const PointSet base = unite(pins, good_sym);
            // value bumps send each relocated point to the next one
            Poly<F> phi;
            std::vector<BumpSite> sites;
            for (std::size_t i = 0; i < n; ++i) {
                if (!rep_point[i] || kept[i])
                    continue;
                PointSet own = sym_if(PointSet{zeta[i]}, sym);
                PointSet at = unite(base, minus(orbit_sym, own));
                F need = Field<F>::from(zeta[(i + 1) % n]) - value_at<F>(s, zeta[i]);
                if (sym && loci[i] == Locus::real)
                    need = Field<F>::real_part(need);
                phi += value_bump<F>(sym, at, zeta[i], need);
                sites.push_back(BumpSite{at, zeta[i], false});
            }
            Poly<F> dphi = phi.derivative();
            std::vector<F> d(n);
            for (std::size_t i = 0; i < n; ++i)
                d[i] = deriv_at<F>(s, zeta[i]) + dphi.eval(Field<F>::from(zeta[i]));
            // derivative targets: exact ones kept, the others snapped; the last
            // representative is solved so the multiplier lands in the set
            std::vector<std::size_t> reps;
            for (std::size_t i = 0; i < n; ++i)
                if (rep_point[i])
                    reps.push_back(i);
            std::vector<GR> target(n);
            const bool real_orbit = sym && loci[0] == Locus::real;
            const bool must_be_real = real_orbit || !set.allows_nonreal();
            GR rest(1);
            for (std::size_t r = 0; r + 1 < reps.size(); ++r) {
                std::size_t i = reps[r];
                if constexpr (std::is_same_v<F, GR>) {
                    target[i] = d[i];
                } else {
                    target[i] = real_orbit ? GR(snap_real(d[i].re, q)) : snap(d[i], q);
                }
                if (target[i].is_zero())
                    target[i] = GR(mpq_class(1) / q);
                rest *= paired ? GR(target[i].norm()) : target[i];
            }
            const std::size_t last = reps.back();
            Ch dlast;
            if constexpr (std::is_same_v<F, GR>)
                dlast = d[last].template to<Hp>();
            else
                dlast = d[last];
            bool exact_ok = false;
            if constexpr (std::is_same_v<F, GR>) {
                GR mu = rest * (paired ? GR(d[last].norm()) : d[last]);
                exact_ok = set.contains(mu);
            }
            if (exact_ok) {
                if constexpr (std::is_same_v<F, GR>)
                    target[last] = d[last];
            } else {
                auto t = last_target(dlast, rest, set, q, must_be_real, paired, k);
                if (!t) {
                    bump_collision();
                    continue;
                }
                target[last] = *t;
            }
            for (std::size_t i = 0; i < n; ++i)
                if (!rep_point[i])
                    target[i] = target[partner[i]].conj();
            // derivative bumps
            Poly<F> psi;
            for (std::size_t i : reps) {
                F need = Field<F>::from(target[i]) - d[i];
                if (real_orbit)
                    need = Field<F>::real_part(need);
                if (Field<F>::is_zero(need))
                    continue;
                PointSet own = sym_if(PointSet{zeta[i]}, sym);
                PointSet at = unite(good_sym, minus(unite(pins, orbit_sym), own));
                psi += deriv_bump<F>(sym, at, zeta[i], need);
                sites.push_back(BumpSite{at, zeta[i], true});
            }
            Poly<F> delta = phi + psi;
            double used = opt.metric.upper(taylor_model(delta));
            if (used >= allot) {
                q = grow(q, used / allot);
                k = 0;
                continue;
            }
            EntireMap h = g;
            if (!delta.is_zero()) {
                Effect e = effect_of(sites);
                for (std::size_t i = 0; i < n; ++i) {
                    record_value(e, zeta[i], zeta[(i + 1) % n], sym);
                    record_deriv(e, zeta[i], target[i], sym);
                }
                h.push(Perturbation{delta, "cycles"}, e);
            } else {
                // nothing moved: the orbit already was exact, record the facts
                for (std::size_t i = 0; i < n; ++i) {
                    h.record_value(zeta[i], zeta[(i + 1) % n]);
                    h.record_deriv(zeta[i], target[i]);
                }
            }
            bool ok = affine_guard_ok(h, sym);
            if (ok) {
                try {
                    Snapshot hs(h, opt);
                    for (int qq = 1; qq <= p && ok; ++qq)
                        ok = hs.periodic_winding(qq, guard_radius) == counts[qq - 1];
                } catch (const BoundaryTooClose&) {
                    ok = false;
                }
            }
            if (!ok) {
                q *= 2;
                k = 0;
                continue;
            }
            if constexpr (std::is_same_v<F, GR>) {
                ExactView ex(h);
                GR mu(1);
                for (std::size_t i = 0; i < n; ++i) {
                    if (ex(zeta[i]) != zeta[(i + 1) % n])
                        throw InternalLogicError("adjust_cycles", "relocated orbit does not close");
                    mu *= ex.deriv(zeta[i]);
                }
                if (!set.contains(mu))
                    throw InternalLogicError("adjust_cycles", "multiplier " + mu.str() + " missed the target set");
            }
            g = std::move(h);
            for (const auto& z : zeta) {
                raise_den(rep.max_den, z);
                raise_den(den, z);
            }
            rep.denom_bound = q;
            ++rep.relocations;
            rep.bumps += static_cast<int>(sites.size());
            placed = true;
        }
        if (!placed)
            throw RetryExhausted("adjust_cycles", "no admissible relocation for a cycle of period " +
                                                      std::to_string(cyc.period));
    }
    rep.used = opt.metric.upper(taylor_model(g.stack_delta(f.perturbations().size())));
    return {g, rep};
}

} // namespace detail

// g agrees with f to first order on the pinned set and sends b into E,
// avoiding the given points.
inline Adjusted adjust_image(const EntireMap& f, const PointSet& pins, const GR& b, double budget,
                             const AdjustOptions& opt = {}, const PointSet& avoid = {})
{
    if (f.exact())
        return detail::adjust_image_impl<GR>(f, pins, b, avoid, budget, opt);
    return detail::adjust_image_impl<Ch>(f, pins, b, avoid, budget, opt);
}

// Every preimage of the targets in D(0, radius) becomes an element of E.
inline Adjusted adjust_preimages(const EntireMap& f, const PointSet& pins, const PointSet& targets, double radius,
                                 double budget, const AdjustOptions& opt = {}, const MapGuard& guard = {})
{
    if (f.exact())
        return detail::adjust_preimages_impl<GR>(f, pins, targets, radius, budget, opt, guard);
    return detail::adjust_preimages_impl<Ch>(f, pins, targets, radius, budget, opt, guard);
}

// Every cycle of period <= p meeting D(0, radius) becomes exact with its
// multiplier in the period's target set. `frozen` holds points of cycles that
// already conform and must stay fixed to first order.
inline Adjusted adjust_cycles(const EntireMap& f, const PointSet& pins, const PointSet& frozen, int p, double radius,
                              const MultiplierPlan& plan, double budget, const AdjustOptions& opt = {})
{
    if (f.exact())
        return detail::adjust_cycles_impl<GR>(f, pins, frozen, p, radius, plan, budget, opt);
    return detail::adjust_cycles_impl<Ch>(f, pins, frozen, p, radius, plan, budget, opt);
}

} // namespace edyn
