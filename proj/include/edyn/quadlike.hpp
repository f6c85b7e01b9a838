#pragma once

#include "driver.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace edyn {

// 10 cosh - 12, the base of the quadratic-like construction.
inline EntireMap make_f0() { return EntireMap::cosh_affine(mpq_class(10), mpq_class(-12)); }

struct KoebeBounds {
    mpq_class r;     // inner radius around -2 covered by f0(D)
    mpq_class big_r; // outer radius of f0(D) around -2, scaled by 1/10
    mpq_class s;     // inner radius for f0(2D), scaled by 1/10

    bool ok() const { return r > mpq_class(2, 5) && big_r < mpq_class(7, 10) && s > mpq_class(9, 10); }
};

inline KoebeBounds koebe_bounds()
{
    const mpq_class ninth(1, 9);
    KoebeBounds k;
    k.r = mpq_class(1, 2) / ((1 + ninth) * (1 + ninth));
    k.big_r = mpq_class(1, 2) / ((1 - ninth) * (1 - ninth));
    k.s = mpq_class(2) / ((1 + 4 * ninth) * (1 + 4 * ninth));
    return k;
}

// sup over the closed disk of radius 2 of a map with Banach norm 1/4 is at
// most this factor (sum 4^j / (2j)! / 4 over even orders).
inline double perturbation_sup_factor() { return std::cosh(2.0) / 4; }

// Winding of f - w over a circle for a grid of targets filling a closed disk.
struct DiskCover {
    Cd center;
    double radius = 0;  // target disk
    double contour = 0; // circle |z| = contour
    int want = 2;
    int targets = 0;
    int matched = 0;
    double margin = 0; // min distance from a target to the sampled image curve

    bool ok(double min_margin) const { return targets > 0 && matched == targets && margin > min_margin; }
};

inline nlohmann::json to_json(const DiskCover& c)
{
    return {{"center", {c.center.re, c.center.im}}, {"radius", c.radius}, {"contour", c.contour},
            {"winding", c.want}, {"targets", c.targets}, {"matched", c.matched}, {"margin", c.margin}};
}

namespace detail {

// 10 rings of 10 points, the outer ring on the boundary.
inline std::vector<Cd> disk_grid(const Cd& center, double radius)
{
    std::vector<Cd> out;
    for (int k = 1; k <= 10; ++k)
        for (int j = 0; j < 10; ++j) {
            double t = 2 * pi_value<double>() * (j + 0.5 * (k % 2)) / 10;
            out.push_back(center + polar(radius * k / 10, t));
        }
    return out;
}

inline std::vector<Cd> image_samples(const NumericMap<double>& g, double contour, int samples)
{
    std::vector<Cd> out;
    out.reserve(samples);
    for (int k = 0; k < samples; ++k)
        out.push_back(g(polar(contour, 2 * pi_value<double>() * k / samples)));
    return out;
}

inline double max_distance(const std::vector<Cd>& pts, const Cd& c)
{
    double best = 0;
    for (const auto& p : pts)
        best = std::max(best, abs(p - c));
    return best;
}

inline DiskCover cover(const EntireMap& f, const Cd& center, double radius, double contour, int samples, int want)
{
    NumericMap<double> g(f);
    const auto img = image_samples(g, contour, samples);
    DiskCover c{center, radius, contour, want};
    c.margin = HUGE_VAL;
    WindingOptions wo;
    wo.initial_samples = samples;
    for (const auto& w : disk_grid(center, radius)) {
        ++c.targets;
        for (const auto& p : img)
            c.margin = std::min(c.margin, abs(p - w));
        int n = -1;
        try {
            n = winding_count(f, w, Disk{{0, 0}, contour}, wo);
        } catch (const BoundaryTooClose&) {
        }
        c.matched += n == want ? 1 : 0;
    }
    return c;
}

inline int critical_count(const EntireMap& f, double contour, int samples)
{
    NumericMap<double> g(f);
    WindingOptions wo;
    wo.initial_samples = samples;
    return winding_count([&](const Cd& z) { return g.deriv(z); }, Disk{{0, 0}, contour}, wo);
}

inline double real_value(const NumericMap<double>& g, double x) { return g(Cd(x)).re; }

// Root of h on [lo, hi] given a sign change.
template <class H>
double bisect(const H& h, double lo, double hi)
{
    double hlo = h(lo);
    for (int k = 0; k < 200 && hi - lo > 0; ++k) {
        double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        double hm = h(mid);
        if ((hm < 0) == (hlo < 0)) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2;
}

inline void require_real_even(const EntireMap& f, const char* where)
{
    if (!is_real_even(f))
        throw PreconditionError(where, "map must be real and even");
}

} // namespace detail

struct InclusionReport {
    int samples = 0;
    double max_modulus = 0; // max over |z| = 1 of |f0 + 2|
    double outer_bound = 7;
    DiskCover inner; // D(-2, 4) over |z| = 1
    DiskCover outer; // D(-2, 9) over |z| = 2
    int degree = 0;   // winding of f0 + 2 over |z| = 2
    int critical = 0; // winding of f0' over |z| = 2
    double min_margin = 0.1;

    bool ok() const
    {
        return outer_bound - max_modulus > min_margin && inner.ok(min_margin) && outer.ok(min_margin) &&
               degree == 2 && critical == 1;
    }
};

inline nlohmann::json to_json(const InclusionReport& r)
{
    return {{"samples", r.samples},   {"max_modulus", r.max_modulus}, {"outer_bound", r.outer_bound},
            {"inner", to_json(r.inner)}, {"outer", to_json(r.outer)}, {"degree", r.degree},
            {"critical_points", r.critical}, {"ok", r.ok()}};
}

inline InclusionReport certify_f0_inclusions(int samples = 4096)
{
    if (samples < 16)
        throw PreconditionError("certify_f0_inclusions", "samples must be >= 16");
    const EntireMap f = make_f0();
    NumericMap<double> g(f);
    InclusionReport r;
    r.samples = samples;
    r.max_modulus = detail::max_distance(detail::image_samples(g, 1, samples), Cd(-2.0));
    r.inner = detail::cover(f, Cd(-2.0), 4, 1, samples, 2);
    r.outer = detail::cover(f, Cd(-2.0), 9, 2, samples, 2);
    WindingOptions wo;
    wo.initial_samples = samples;
    r.degree = winding_count(f, Cd(-2.0), Disk{{0, 0}, 2}, wo);
    r.critical = detail::critical_count(f, 2, samples);
    return r;
}

struct ConvexReport {
    bool convex = false; // false means inconclusive, never a refutation
    double distance = 0; // Banach distance to f0
    double limit = 10;
    std::vector<double> even_derivs; // f^(2j)(0), j = 1..truncation_degree
};

inline nlohmann::json to_json(const ConvexReport& r)
{
    return {{"status", r.convex ? "convex" : "inconclusive"}, {"distance", r.distance}, {"limit", r.limit},
            {"even_derivatives", r.even_derivs}};
}

inline ConvexReport certify_convex(const EntireMap& f, int truncation_degree = 8)
{
    detail::require_real_even(f, "certify_convex");
    if (truncation_degree < 0)
        throw PreconditionError("certify_convex", "truncation_degree must be >= 0");
    PrecisionScope prec(std::max(128u, working_bits()));
    ConvexReport r;
    const TaylorModel t = taylor_model(f);
    r.distance = banach_norm(difference(t, taylor_model(make_f0())));
    r.convex = r.distance < r.limit;
    Hp fact = 1;
    const auto& c = t.poly.coeffs();
    for (int k = 1; k <= 2 * truncation_degree; ++k) {
        fact *= Hp(k);
        if (k % 2)
            continue;
        Hp v = t.cosh_coeff;
        if (static_cast<std::size_t>(k) < c.size())
            v += c[k].re * fact;
        r.even_derivs.push_back(v.convert_to<double>());
    }
    return r;
}

struct QuadLikeCert {
    bool ok = false;
    std::vector<std::string> failures;
    int samples = 0;
    double distance = 0;      // Banach distance to f0
    double sup_bound = 0;     // distance * cosh(2), bound for |f - f0| on the closed 2-disk
    double sampled_sup = 0;   // sampled max of |f - f0| on |z| = 2
    double max_modulus = 0;   // max over |z| = 1 of |f + 2|
    DiskCover inner;          // closed D(-2, 3) over |z| = 1
    int critical = 0;         // critical points in the unit disk
    double critical_value = 0;
    double branch_root = 0;   // the positive preimage of 0
    double u_plus_lo = 0;     // U+ meets the real line in (u_plus_lo, u_plus_hi)
    double u_plus_hi = 0;
};

inline nlohmann::json to_json(const QuadLikeCert& c)
{
    return {{"status", c.ok ? "quadratic_like" : "inconclusive"},
            {"failures", c.failures},
            {"samples", c.samples},
            {"distance", c.distance},
            {"sup_bound", c.sup_bound},
            {"sampled_sup", c.sampled_sup},
            {"max_modulus", c.max_modulus},
            {"outer_bound", 8},
            {"inner", to_json(c.inner)},
            {"critical_points", c.critical},
            {"critical_value", c.critical_value},
            {"branches", {{"plus", {{"zero_preimage", c.branch_root}, {"real_part", {c.u_plus_lo, c.u_plus_hi}}}},
                          {"minus", {{"zero_preimage", -c.branch_root}, {"real_part", {-c.u_plus_hi, -c.u_plus_lo}}}}}}};
}

inline QuadLikeCert certify_quadratic_like(const EntireMap& f, int samples = 4096)
{
    detail::require_real_even(f, "certify_quadratic_like");
    QuadLikeCert c;
    c.samples = samples;
    auto fail = [&](const std::string& s) { c.failures.push_back(s); };
    {
        PrecisionScope prec(std::max(128u, working_bits()));
        c.distance = banach_norm(difference(taylor_model(f), taylor_model(make_f0())));
    }
    if (!(c.distance < 0.25))
        fail("Banach distance to f0 is not below 1/4");
    c.sup_bound = round_up(c.distance * std::cosh(2.0));
    NumericMap<double> g(f), g0(make_f0());
    for (int k = 0; k < samples; ++k) {
        Cd z = polar(2.0, 2 * pi_value<double>() * k / samples);
        c.sampled_sup = std::max(c.sampled_sup, abs(g(z) - g0(z)));
    }
    if (!(c.sup_bound < 1) || !(c.sampled_sup < 1))
        fail("perturbation is not below 1 on the closed disk of radius 2");
    c.max_modulus = detail::max_distance(detail::image_samples(g, 1, samples), Cd(-2.0));
    if (!(c.max_modulus < 8))
        fail("f(D) is not inside D(-2, 8)");
    c.inner = detail::cover(f, Cd(-2.0), 3, 1, samples, 2);
    if (!c.inner.ok(0))
        fail("closed D(-2, 3) is not covered twice by f(D)");
    try {
        c.critical = detail::critical_count(f, 1, samples);
    } catch (const BoundaryTooClose&) {
        c.critical = -1;
    }
    if (c.critical != 1)
        fail("f' does not have exactly one zero in D");
    c.critical_value = detail::real_value(g, 0);
    if (!(c.critical_value < -1))
        fail("f(0) is not below -1");
    if (c.failures.empty()) {
        auto h = [&](double t) { return [&g, t](double x) { return detail::real_value(g, x) - t; }; };
        c.branch_root = detail::bisect(h(0), 0, 1);
        c.u_plus_lo = detail::bisect(h(-1), 0, c.branch_root);
        c.u_plus_hi = detail::bisect(h(1), c.branch_root, 1);
    }
    c.ok = c.failures.empty();
    return c;
}

enum class Sign { plus, minus };

inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

// A periodic sign sequence given by one period.
struct SignWord {
    std::vector<Sign> signs;

    int period() const { return static_cast<int>(signs.size()); }
    std::string str() const
    {
        std::string s;
        for (auto x : signs)
            s += sign_char(x);
        return s;
    }
    SignWord shifted(int k = 1) const
    {
        SignWord w;
        for (int i = 0; i < period(); ++i)
            w.signs.push_back(signs[(i + k) % period()]);
        return w;
    }
    SignWord flipped() const
    {
        SignWord w;
        for (auto x : signs)
            w.signs.push_back(x == Sign::plus ? Sign::minus : Sign::plus);
        return w;
    }
};

// Parses "+-+" and reduces to the minimal period.
inline SignWord make_word(const std::string& s)
{
    if (s.empty())
        throw PreconditionError("make_word", "sign word must be nonempty");
    SignWord w;
    for (char c : s) {
        if (c != '+' && c != '-')
            throw PreconditionError("make_word", "sign word may only contain + and -");
        w.signs.push_back(c == '+' ? Sign::plus : Sign::minus);
    }
    const int n = w.period();
    for (int d = 1; d < n; ++d) {
        if (n % d)
            continue;
        bool rep = true;
        for (int i = d; i < n && rep; ++i)
            rep = w.signs[i] == w.signs[i - d];
        if (rep) {
            w.signs.resize(d);
            break;
        }
    }
    return w;
}

// Lyndon words of length p over (+ < -): one representative per shift orbit.
inline std::vector<SignWord> lyndon_words(int p)
{
    std::vector<SignWord> out;
    std::vector<int> w{-1};
    while (!w.empty()) {
        ++w.back();
        if (static_cast<int>(w.size()) == p) {
            SignWord s;
            for (int x : w)
                s.signs.push_back(x ? Sign::minus : Sign::plus);
            out.push_back(s);
        }
        const std::size_t m = w.size();
        while (static_cast<int>(w.size()) < p)
            w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == 1)
            w.pop_back();
    }
    return out;
}

// Unique preimage of w in U+ or U-, by Newton continuation from the preimage
// of 0 along the segment [0, w].
inline Cd inverse_branch(const EntireMap& f, Sign sign, const Cd& w, double tol = 1e-13)
{
    if (!(abs(w) < 1))
        throw PreconditionError("inverse_branch", "target must lie in the unit disk");
    NumericMap<double> g(f);
    const double root = detail::bisect([&](double x) { return detail::real_value(g, x); }, 0, 1);
    Cd z(sign == Sign::plus ? root : -root);
    auto newton = [&](Cd z, const Cd& t, Cd& out) {
        for (int it = 0; it < 60; ++it) {
            Cd v, d;
            g.eval_d(z, v, d);
            v -= t;
            if (abs(v) < tol * 1e-2)
                break;
            if (abs(d) == 0)
                return false;
            Cd step = v / d;
            z -= step;
            if (!(abs(z) < 2))
                return false;
            if (abs(step) < 1e-16)
                break;
        }
        Cd v = g(z) - t;
        out = z;
        return abs(v) < tol;
    };
    double t = 0, h = 1.0 / 8;
    int halvings = 0;
    while (t < 1) {
        double next = std::min(1.0, t + h);
        Cd trial;
        if (newton(z, w * next, trial) && abs(trial - z) < 0.5) {
            z = trial;
            t = next;
            h = std::min(1.0 / 8, 2 * h);
        } else {
            h /= 2;
            if (++halvings > 40) {
                std::ostringstream box;
                box << "no convergence near " << z.re << (z.im < 0 ? "" : "+") << z.im << "i (step " << h << ")";
                throw StructuralError("inverse_branch", box.str());
            }
        }
    }
    if (w.im == 0)
        z.im = 0;
    return z;
}

// g_e0 o ... o g_e(n-1) applied to the seed, for a finite sign sequence.
inline Cd code_prefix(const EntireMap& f, const std::vector<Sign>& signs, const Cd& seed = Cd(0.0))
{
    Cd z = seed;
    for (auto it = signs.rbegin(); it != signs.rend(); ++it)
        z = inverse_branch(f, *it, z);
    return z;
}

struct CodedPoint {
    SignWord word;
    Ch point;
    int depth = 0; // branch applications used
    Hp residual{0};
};

// zeta(word) = lim (g_e0 o ... o g_e(p-1))^n (0), polished as a zero of
// f^p(z) - z at the working precision.
inline CodedPoint code_point(const EntireMap& f, const SignWord& word, double tol = 1e-14)
{
    if (word.signs.empty())
        throw PreconditionError("code_point", "sign word must be nonempty");
    const int p = word.period();
    const int cap = 10 * p + 200;
    CodedPoint out;
    out.word = word;
    Cd z(0.0);
    bool done = false;
    while (out.depth + p <= cap) {
        Cd x = z;
        for (int k = p - 1; k >= 0; --k)
            x = inverse_branch(f, word.signs[k], x);
        out.depth += p;
        const double step = abs(x - z);
        z = x;
        if (step < tol) {
            done = true;
            break;
        }
    }
    if (!done)
        throw StructuralError("code_point", "no convergence for " + word.str() + " within depth " + std::to_string(cap));
    MapViews views(f);
    RootOptions ro;
    Ch zh(z);
    out.point = polish(periodic_equation(views, p), zh, 1, ro, &out.residual);
    if (abs(to_double(out.point) - z) > 1e-12)
        throw StructuralError("code_point", "polishing left the coded point for " + word.str());
    return out;
}

struct CodedCycle {
    SignWord word; // Lyndon representative; points[k] codes word.shifted(k)
    Cycle cycle;
};

inline std::vector<CodedCycle> enumerate_orbits(const EntireMap& f, int max_period)
{
    if (max_period < 1)
        throw PreconditionError("enumerate_orbits", "max_period must be >= 1");
    detail::require_real_even(f, "enumerate_orbits");
    MapViews views(f);
    RootOptions ro;
    std::vector<CodedCycle> out;
    for (int p = 1; p <= max_period; ++p) {
        auto eq = periodic_equation(views, p);
        for (const auto& w : lyndon_words(p)) {
            CodedCycle c;
            c.word = w;
            c.cycle.period = p;
            Ch z = code_point(f, w).point;
            Ch mult(Hp(1));
            for (int k = 0; k < p; ++k) {
                c.cycle.points.push_back(z);
                mult *= views.hi.deriv(z);
                z = polish(eq, views.hi(z), 1, ro);
            }
            c.cycle.multiplier = mult;
            c.cycle.exact.assign(p, std::nullopt);
            out.push_back(std::move(c));
        }
    }
    return out;
}

inline std::string orbits_csv(const std::vector<CodedCycle>& cs)
{
    std::string out = "word,period,points,multiplier\n";
    for (const auto& c : cs) {
        out += c.word.str() + "," + std::to_string(c.word.period()) + ",";
        for (std::size_t k = 0; k < c.cycle.points.size(); ++k) {
            if (k)
                out += ";";
            out += point_string(c.cycle.points[k], c.cycle.exact.empty() ? std::nullopt : c.cycle.exact[k]);
        }
        out += "," + point_string(c.cycle.multiplier, c.cycle.exact_multiplier) + "\n";
    }
    return out;
}

struct PeriodMatch {
    int period = 0;
    int real_count = 0;  // zeros of f^p(x) - x in [-1, 1]
    int coded_count = 0; // coded points of period dividing p
    double max_distance = 0;
    bool matched = false;
};

struct SamePeriodicReport {
    double tol = 0;
    std::vector<PeriodMatch> periods;
    bool all_real = false;
    bool inside = false;       // every coded point in (-1, 1)
    bool escapes = false;      // f(1) > 1 and f'(1) > 1, so f(x) > x on [1, inf)
    double max_imag = 0;
    int unresolved = 0;        // intervals the real search could not decide

    bool ok() const
    {
        bool m = !periods.empty();
        for (const auto& p : periods)
            m = m && p.matched;
        return m && all_real && inside && escapes && unresolved == 0;
    }
};

inline nlohmann::json to_json(const SamePeriodicReport& r)
{
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : r.periods)
        ps.push_back({{"period", p.period}, {"real_count", p.real_count}, {"coded_count", p.coded_count},
                      {"max_distance", p.max_distance}, {"matched", p.matched}});
    return {{"tol", r.tol},         {"periods", ps},          {"all_real", r.all_real}, {"inside", r.inside},
            {"escapes", r.escapes}, {"max_imag", r.max_imag}, {"unresolved", r.unresolved}, {"ok", r.ok()}};
}

namespace detail {

struct Interval {
    double lo, hi;
};

// Zeros of f^p(x) - x on [-1, 1] for an even map increasing on [0, inf) with
// increasing derivative. Enclosures use monotonicity of f and f'.
inline std::vector<double> real_periodic(const NumericMap<double>& g, int p, int& unresolved)
{
    auto fv = [&](double x) { return real_value(g, x); };
    auto dv = [&](double x) { return g.deriv(Cd(x)).re; };
    auto image = [&](const Interval& iv) {
        if (iv.lo <= 0 && iv.hi >= 0)
            return Interval{fv(0), std::max(fv(iv.lo), fv(iv.hi))};
        if (iv.hi <= 0)
            return Interval{fv(iv.hi), fv(iv.lo)};
        return Interval{fv(iv.lo), fv(iv.hi)};
    };
    auto iterate = [&](double x) {
        for (int k = 0; k < p; ++k)
            x = fv(x);
        return x;
    };
    const double slack = 1e-12;
    std::vector<double> roots;
    std::vector<Interval> work{{-1, 1}};
    while (!work.empty()) {
        Interval iv = work.back();
        work.pop_back();
        // iterate the enclosure; track the derivative bound of f^p
        Interval cur = iv;
        bool escaped = false, monotone = true;
        double dmin = 1, dmax = 1, dsign = 1; // |(f^p)'| lies in [dmin, dmax] with sign dsign
        for (int k = 0; k < p; ++k) {
            if (cur.hi < -1 - slack || cur.lo > 1 + slack) {
                escaped = true;
                break;
            }
            if (cur.lo <= 0 && cur.hi >= 0) {
                monotone = false;
            } else {
                // f' is increasing and has the sign of x
                double a = std::abs(dv(cur.lo)), b = std::abs(dv(cur.hi));
                dmin *= std::min(a, b);
                dmax *= std::max(a, b);
                dsign *= cur.lo > 0 ? 1 : -1;
            }
            cur = image(cur);
        }
        if (escaped || cur.hi < -1 - slack || cur.lo > 1 + slack)
            continue;
        // f^p(x) - x cannot vanish when the image misses the interval
        if (cur.hi < iv.lo - slack || cur.lo > iv.hi + slack)
            continue;
        if (monotone && (dsign < 0 || dmin > 1 || dmax < 1)) {
            // at most one zero; find it by a sign change
            double a = iterate(iv.lo) - iv.lo, b = iterate(iv.hi) - iv.hi;
            if (a == 0)
                roots.push_back(iv.lo);
            else if ((a < 0) != (b < 0))
                roots.push_back(bisect([&](double x) { return iterate(x) - x; }, iv.lo, iv.hi));
            continue;
        }
        if (iv.hi - iv.lo < 1e-13) {
            ++unresolved;
            continue;
        }
        double mid = iv.lo + (iv.hi - iv.lo) / 2;
        work.push_back({mid, iv.hi});
        work.push_back({iv.lo, mid});
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                roots.end());
    return roots;
}

} // namespace detail

inline SamePeriodicReport check_same_periodic(const EntireMap& f, int max_period, double tol = 1e-10)
{
    ConvexReport cv = certify_convex(f, 0);
    if (!cv.convex)
        throw PreconditionError("check_same_periodic", "map is not certified convex");
    SamePeriodicReport r;
    r.tol = tol;
    NumericMap<double> g(f);
    r.escapes = detail::real_value(g, 1) > 1 && g.deriv(Cd(1.0)).re > 1;
    auto coded = enumerate_orbits(f, max_period);
    r.all_real = true;
    r.inside = true;
    for (const auto& c : coded)
        for (const auto& z : c.cycle.points) {
            Cd x = to_double(z);
            r.max_imag = std::max(r.max_imag, std::abs(x.im));
            r.all_real = r.all_real && std::abs(x.im) < tol;
            r.inside = r.inside && std::abs(x.re) < 1;
        }
    for (int p = 1; p <= max_period; ++p) {
        PeriodMatch m;
        m.period = p;
        auto real = detail::real_periodic(g, p, r.unresolved);
        m.real_count = static_cast<int>(real.size());
        std::vector<double> pts;
        for (const auto& c : coded)
            if (p % c.cycle.period == 0)
                for (const auto& z : c.cycle.points)
                    pts.push_back(to_double(z).re);
        m.coded_count = static_cast<int>(pts.size());
        std::sort(pts.begin(), pts.end());
        m.matched = m.real_count == m.coded_count && m.coded_count == (1 << p);
        if (m.real_count == m.coded_count)
            for (std::size_t i = 0; i < pts.size(); ++i)
                m.max_distance = std::max(m.max_distance, std::abs(pts[i] - real[i]));
        else
            m.max_distance = HUGE_VAL;
        m.matched = m.matched && m.max_distance < tol;
        r.periods.push_back(m);
    }
    return r;
}

enum class Verdict { not_affine_conjugate, inconclusive };

inline const char* to_string(Verdict v)
{
    return v == Verdict::not_affine_conjugate ? "NOT_AFFINE_CONJUGATE" : "INCONCLUSIVE";
}

// Multipliers at the two fixed points and at the 2-cycle.
struct MultiplierData {
    double plus = 0, minus = 0, two = 0;
    double error = 0; // absolute error bar of each float value
    std::optional<GR> exact_plus, exact_minus, exact_two;

    bool exact() const { return exact_plus && exact_minus && exact_two; }
};

struct ObstructionReport {
    Verdict verdict = Verdict::inconclusive;
    std::string route; // "exact" or "float"
    MultiplierData data;
    double product = 0;
    double gap = 0; // |product - two| in the float route
    std::string classes[3]; // parity classes of plus, minus, two in the exact route
};

inline nlohmann::json to_json(const ObstructionReport& r)
{
    nlohmann::json j = {{"verdict", to_string(r.verdict)},
                        {"route", r.route},
                        {"lambda_plus", r.data.plus},
                        {"lambda_minus", r.data.minus},
                        {"lambda_two", r.data.two},
                        {"product", r.product}};
    if (r.route == "exact") {
        j["exact"] = {{"lambda_plus", r.data.exact_plus->str()},
                      {"lambda_minus", r.data.exact_minus->str()},
                      {"lambda_two", r.data.exact_two->str()},
                      {"product", (*r.data.exact_plus * *r.data.exact_minus).str()},
                      {"classes", {r.classes[0], r.classes[1], r.classes[2]}}};
    } else {
        j["gap"] = r.gap;
        j["error"] = r.data.error;
    }
    return j;
}

inline ObstructionReport affine_obstruction(const MultiplierData& d)
{
    ObstructionReport r;
    r.data = d;
    r.product = d.plus * d.minus;
    if (d.exact()) {
        r.route = "exact";
        const GR prod = *d.exact_plus * *d.exact_minus;
        r.classes[0] = to_string(parity(*d.exact_plus));
        r.classes[1] = to_string(parity(*d.exact_minus));
        r.classes[2] = to_string(parity(*d.exact_two));
        r.verdict = prod != *d.exact_two ? Verdict::not_affine_conjugate : Verdict::inconclusive;
        return r;
    }
    r.route = "float";
    r.gap = std::abs(r.product - d.two);
    const double bar = d.error * (std::abs(d.plus) + std::abs(d.minus) + 1) + d.error;
    r.verdict = r.gap > bar ? Verdict::not_affine_conjugate : Verdict::inconclusive;
    return r;
}

// Float multipliers of a certified map, from the coded fixed points and 2-cycle.
inline MultiplierData multipliers_of(const EntireMap& f)
{
    auto cs = enumerate_orbits(f, 2);
    MultiplierData d;
    bool two = false;
    for (const auto& c : cs) {
        double m = to_double(c.cycle.multiplier).re;
        if (c.word.str() == "+")
            d.plus = m;
        else if (c.word.str() == "-")
            d.minus = m;
        else if (c.word.period() == 2) {
            d.two = m;
            two = true;
        }
    }
    if (!two)
        throw StructuralError("affine_obstruction", "no 2-cycle found");
    d.error = 1e-20 * (1 + std::abs(d.plus) + std::abs(d.minus) + std::abs(d.two));
    return d;
}

inline ObstructionReport affine_obstruction(const EntireMap& f) { return affine_obstruction(multipliers_of(f)); }

// Control model: the escaping pair x -> a x + b on the positive branch and
// x -> -a x + b on the negative one (a > 1, b < 0), with cycles solved exactly.
inline MultiplierData affine_model(const mpq_class& a, const mpq_class& b)
{
    if (!(a > 1) || !(b < 0))
        throw PreconditionError("affine_model", "need a > 1 and b < 0");
    auto branch = [&](const mpq_class& x) { return x > 0 ? mpq_class(a * x + b) : mpq_class(-a * x + b); };
    auto slope = [&](const mpq_class& x) { return x > 0 ? a : mpq_class(-a); };
    const mpq_class xp = b / (1 - a), xm = b / (1 + a);
    const mpq_class y = b * (1 - a) / (1 + a * a);
    if (branch(xp) != xp || branch(xm) != xm || branch(branch(y)) != y || branch(y) == y)
        throw InternalLogicError("affine_model", "cycle equations do not hold");
    MultiplierData d;
    d.exact_plus = GR(slope(xp));
    d.exact_minus = GR(slope(xm));
    d.exact_two = GR(mpq_class(slope(y) * slope(branch(y))));
    d.plus = d.exact_plus->re().get_d();
    d.minus = d.exact_minus->re().get_d();
    d.two = d.exact_two->re().get_d();
    return d;
}

struct TheoremOptions {
    int stages = 1;
    double epsilon = 0.25;
    unsigned precision = 128;
    int max_period = 3; // orbit table and real-line comparison
    int samples = 4096;
};

struct TheoremReport {
    EntireMap map = make_f0();
    std::vector<StageCertificate> certificates;
    std::optional<std::string> driver_error;
    nlohmann::json closing;  // report of the closing cycle step
    double distance = 0;     // Banach distance of the final map to f0
    ConvexReport convex;
    QuadLikeCert quadlike;
    SamePeriodicReport same;
    ObstructionReport obstruction;
    std::vector<CodedCycle> orbits;

    bool ok() const
    {
        bool certs = std::all_of(certificates.begin(), certificates.end(), [](const auto& c) { return c.ok(); });
        return certs && distance < 0.25 && convex.convex && quadlike.ok && same.ok() &&
               obstruction.verdict == Verdict::not_affine_conjugate;
    }
};

inline nlohmann::json to_json(const TheoremReport& r)
{
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& c : r.certificates)
        certs.push_back(to_json(c));
    nlohmann::json j = {{"schema", 1},
                        {"ok", r.ok()},
                        {"certificates", certs},
                        {"closing", r.closing},
                        {"distance", r.distance},
                        {"convex", to_json(r.convex)},
                        {"quadratic_like", to_json(r.quadlike)},
                        {"same_periodic", to_json(r.same)},
                        {"obstruction", to_json(r.obstruction)},
                        {"map", to_json(r.map)}};
    if (r.driver_error)
        j["driver_error"] = *r.driver_error;
    return j;
}

namespace detail {

// Exact multipliers of the fixed points and 2-cycle meeting the unit disk.
inline MultiplierData exact_multipliers(const EntireMap& f, const AdjustOptions& opt)
{
    Snapshot s(f, opt);
    const double r = clear_radius(s.views(), 2, 1, 1.25, s.roots()).radius;
    MultiplierData d;
    int fixed = 0, two = 0;
    for (auto& c : s.cycles(2, r)) {
        if (!c.meets(Disk{{0, 0}, 1}))
            continue;
        const double m = to_double(c.multiplier).re;
        if (c.period == 1) {
            ++fixed;
            (to_double(c.points[0]).re > 0 ? d.plus : d.minus) = m;
            (to_double(c.points[0]).re > 0 ? d.exact_plus : d.exact_minus) = c.exact_multiplier;
        } else {
            ++two;
            d.two = m;
            d.exact_two = c.exact_multiplier;
        }
    }
    if (fixed != 2 || two != 1)
        throw StructuralError("run_theorem_quadlike", "expected two fixed points and one 2-cycle in D, found " +
                                                          std::to_string(fixed) + " and " + std::to_string(two));
    d.error = 1e-20 * (1 + std::abs(d.plus) + std::abs(d.minus) + std::abs(d.two));
    return d;
}

} // namespace detail

inline TheoremReport run_theorem_quadlike(const TheoremOptions& opt)
{
    if (opt.stages < 0)
        throw PreconditionError("run_theorem_quadlike", "stages must be >= 0");
    if (!(opt.epsilon > 0) || opt.epsilon > 0.25)
        throw PreconditionError("run_theorem_quadlike", "epsilon must lie in (0, 1/4]");
    if (opt.precision < 64)
        throw PreconditionError("run_theorem_quadlike", "precision must be >= 64");
    PrecisionScope prec(opt.precision);
    TheoremReport r;
    DriverOptions d;
    d.epsilon = opt.epsilon;
    d.stages = opt.stages;
    d.plan.fallback.kind = MultiplierKind::even_den_or_nonreal;
    d.plan.per_period[2].kind = MultiplierKind::odd_den_or_nonreal;
    d.adjust.metric.kind = Metric::Kind::banach;
    d.adjust.min_bits = opt.precision;
    std::optional<MultiplierData> exact;
    if (opt.stages > 0) {
        DriveResult dr = drive_real_even(r.map, d);
        r.map = dr.map;
        r.certificates = dr.certificates;
        r.driver_error = dr.error;
        if (!r.certificates.empty()) {
            const auto& last = r.certificates.back();
            AdjustOptions a = d.adjust;
            a.flavor = Flavor::real_even;
            a.witness_den = last.witness_den;
            const double budget = (opt.epsilon - last.cumulative_upper) / 2;
            Adjusted closing = adjust_cycles(r.map, unite(last.a, last.c), last.c, 2, 1, d.plan, budget, a);
            r.map = closing.map;
            r.closing = to_json(closing.report);
            exact = detail::exact_multipliers(r.map, a);
        }
    }
    {
        PrecisionScope p2(std::max(opt.precision, 128u));
        r.distance = banach_norm(difference(taylor_model(r.map), taylor_model(make_f0())));
    }
    r.convex = certify_convex(r.map);
    r.quadlike = certify_quadratic_like(r.map, opt.samples);
    if (!r.convex.convex || !r.quadlike.ok)
        return r;
    r.orbits = enumerate_orbits(r.map, std::max(2, opt.max_period));
    if (exact) {
        // exact witnesses for the cycles whose targets are recorded on the map
        Snapshot s(r.map, d.adjust);
        for (auto& c : r.orbits)
            s.witness(c.cycle);
    }
    r.same = check_same_periodic(r.map, opt.max_period);
    r.obstruction = affine_obstruction(exact ? *exact : multipliers_of(r.map));
    if (exact) {
        // float values from the coded orbits, exact values from the recorded targets
        MultiplierData fl = multipliers_of(r.map);
        r.obstruction.data.plus = fl.plus;
        r.obstruction.data.minus = fl.minus;
        r.obstruction.data.two = fl.two;
        r.obstruction.product = fl.plus * fl.minus;
    }
    return r;
}

} // namespace edyn
