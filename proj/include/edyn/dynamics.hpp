#pragma once

#include "complex.hpp"
#include "entire_map.hpp"
#include "errors.hpp"
#include "gaussian.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace edyn {

struct Disk {
    Cd center{0, 0};
    double radius = 1;
};

struct WindingOptions {
    int initial_samples = 256;
    int max_samples = 1 << 18;
    double min_rel_modulus = 1e-12; // relative to the neighbouring samples
};

struct RootOptions {
    WindingOptions winding;
    double tol = 1e-25;          // Newton step tolerance in the high precision stage
    double cluster_size = 1e-9;  // boxes below this size report a cluster
    int max_newton = 200;
};

// Both evaluation tiers of a map, built once per map version.
struct MapViews {
    explicit MapViews(const EntireMap& f) : lo(f), hi(f), real_even(f.symmetry() == Symmetry::real_even) {}
    NumericMap<double> lo;
    NumericMap<Hp> hi;
    bool real_even;
};

// An equation g(z) = 0 with value and derivative at both tiers.
struct Equation {
    std::function<void(const Cd&, Cd&, Cd&)> lo;
    std::function<void(const Ch&, Ch&, Ch&)> hi;
    bool conj_symmetric = false;    // zero set closed under conjugation
    bool negconj_symmetric = false; // zero set closed under z -> -conj(z)
};

inline Equation value_equation(const MapViews& m, const Ch& target)
{
    Equation e;
    Cd td = to_double(target);
    e.lo = [&m, td](const Cd& z, Cd& v, Cd& d) {
        m.lo.eval_d(z, v, d);
        v -= td;
    };
    e.hi = [&m, target](const Ch& z, Ch& v, Ch& d) {
        m.hi.eval_d(z, v, d);
        v -= target;
    };
    e.conj_symmetric = m.real_even && target.im == 0;
    e.negconj_symmetric = e.conj_symmetric;
    return e;
}

// f^q(z) - z
inline Equation periodic_equation(const MapViews& m, int q)
{
    Equation e;
    e.lo = [&m, q](const Cd& z, Cd& v, Cd& d) {
        m.lo.iterate(z, q, v, d);
        v -= z;
        d -= Cd(1.0);
    };
    e.hi = [&m, q](const Ch& z, Ch& v, Ch& d) {
        m.hi.iterate(z, q, v, d);
        v -= z;
        d -= Ch(Hp(1));
    };
    e.conj_symmetric = m.real_even;
    return e;
}

namespace detail {

inline double principal(double a)
{
    const double pi = pi_value<double>();
    while (a > pi)
        a -= 2 * pi;
    while (a <= -pi)
        a += 2 * pi;
    return a;
}

// Winding number of g along the closed curve t -> path(t), t in [0, 1).
template <class G, class Path>
int winding(const G& g, const Path& path, const WindingOptions& opt, const char* where)
{
    const double pi = pi_value<double>();
    for (int m = opt.initial_samples; m <= opt.max_samples; m *= 2) {
        std::vector<Cd> w(m);
        for (int k = 0; k < m; ++k) {
            w[k] = g(path(static_cast<double>(k) / m));
            if (!is_finite(w[k]))
                throw NumericOverflow(where, "non-finite value on the contour");
        }
        // a sample far below both neighbours marks a zero on the contour
        for (int k = 0; k < m; ++k) {
            double here = abs(w[k]);
            double near = std::max(abs(w[(k + m - 1) % m]), abs(w[(k + 1) % m]));
            if (here == 0 || here <= opt.min_rel_modulus * near)
                throw BoundaryTooClose(where, "zero of the function too close to the contour");
        }
        double total = 0;
        bool fine = true;
        for (int k = 0; k < m && fine; ++k) {
            const Cd& a = w[k];
            const Cd& b = w[(k + 1) % m];
            double step = principal(std::atan2(b.im, b.re) - std::atan2(a.im, a.re));
            if (std::abs(step) >= pi / 4)
                fine = false;
            total += step;
        }
        if (!fine)
            continue;
        double turns = total / (2 * pi);
        double r = std::round(turns);
        if (std::abs(turns - r) > 1e-3)
            throw InternalLogicError(where, "winding number is not an integer");
        return static_cast<int>(r);
    }
    throw BoundaryTooClose(where, "sampling limit reached before the argument steps resolved");
}

struct Box {
    double x0, x1, y0, y1;
    int count;
    double size() const { return std::max(x1 - x0, y1 - y0); }
    Cd center() const { return Cd((x0 + x1) / 2, (y0 + y1) / 2); }
    bool holds(const Cd& z, double slack) const
    {
        return z.re >= x0 - slack && z.re <= x1 + slack && z.im >= y0 - slack && z.im <= y1 + slack;
    }
};

template <class G>
int box_winding(const G& g, const Box& b, const WindingOptions& opt)
{
    auto path = [&](double t) {
        double s = 4 * t;
        if (s < 1)
            return Cd(b.x0 + s * (b.x1 - b.x0), b.y0);
        if (s < 2)
            return Cd(b.x1, b.y0 + (s - 1) * (b.y1 - b.y0));
        if (s < 3)
            return Cd(b.x1 - (s - 2) * (b.x1 - b.x0), b.y1);
        return Cd(b.x0, b.y1 - (s - 3) * (b.y1 - b.y0));
    };
    WindingOptions o = opt;
    o.initial_samples = 64;
    return winding(g, path, o, "roots_in_disk");
}

inline bool less_mod_arg(const Cd& a, const Cd& b)
{
    double ma = abs(a), mb = abs(b);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb)))
        return ma < mb;
    const double tau = 2 * pi_value<double>();
    double aa = std::atan2(a.im, a.re), ab = std::atan2(b.im, b.re);
    if (aa < 0)
        aa += tau;
    if (ab < 0)
        ab += tau;
    return aa < ab;
}

} // namespace detail

struct Root {
    Ch z;
    int multiplicity = 1;
    Hp residual{0};
};

template <class G>
int winding_count(const G& g, const Disk& disk, const WindingOptions& opt = {})
{
    auto path = [&](double t) { return disk.center + polar(disk.radius, 2 * pi_value<double>() * t); };
    return detail::winding(g, path, opt, "winding_count");
}

inline int winding_count(const EntireMap& f, const Cd& target, const Disk& disk, const WindingOptions& opt = {})
{
    NumericMap<double> g(f);
    return winding_count([&](const Cd& z) { return g(z) - target; }, disk, opt);
}

// Polishes an approximate zero at the current MPFR precision.
inline Ch polish(const Equation& eq, Ch z, int multiplicity, const RootOptions& opt, Hp* residual = nullptr)
{
    const Hp tol(opt.tol);
    Ch v, d;
    Hp last = -1;
    int stalled = 0;
    for (int it = 0; it < opt.max_newton; ++it) {
        eq.hi(z, v, d);
        if (d.re == 0 && d.im == 0)
            break;
        Ch step = v / d * Hp(multiplicity);
        if (eq.conj_symmetric && z.im == 0)
            step.im = 0;
        if (eq.negconj_symmetric && z.re == 0)
            step.re = 0;
        Hp size = abs(step);
        // past the precision floor the steps stop shrinking
        if (last >= 0 && size >= last && ++stalled >= 3)
            break;
        z -= step;
        last = size;
        if (size <= tol * std::max<Hp>(Hp(1), abs(z)) * Hp(1e-3))
            break;
    }
    eq.hi(z, v, d);
    if (residual)
        *residual = abs(v);
    return z;
}

// All zeros of the equation in the disk, with multiplicity, sorted by
// (modulus, argument).
inline std::vector<Root> solve_in_disk(const Equation& eq, const Disk& disk, const RootOptions& opt = {})
{
    auto g = [&](const Cd& z) {
        Cd v, d;
        eq.lo(z, v, d);
        return v;
    };
    const int total = winding_count(g, disk, opt.winding);
    if (total < 0)
        throw InternalLogicError("roots_in_disk", "negative winding for an entire function");
    std::vector<std::pair<Cd, int>> found;
    if (total > 0) {
        const double r = disk.radius * (1 + 1.0 / 97);
        // offsets keep box edges away from the axes, where symmetric maps put roots
        const double off = disk.radius / 1013;
        detail::Box root{disk.center.re - r + off, disk.center.re + r + off, disk.center.im - r + off,
                         disk.center.im + r + off, 0};
        static const double fractions[] = {0.5 + 1.0 / 83, 0.5 - 1.0 / 67, 0.5 + 1.0 / 29, 0.5 - 1.0 / 23, 0.5 + 1.0 / 11};
        for (double grow : {0.0, 1.0 / 61, 1.0 / 37}) {
            try {
                detail::Box b = root;
                b.x0 -= grow * r;
                b.y0 -= grow * r;
                b.count = detail::box_winding(g, b, opt.winding);
                root = b;
                break;
            } catch (const BoundaryTooClose&) {
                if (grow == 1.0 / 37)
                    throw;
            }
        }
        std::vector<detail::Box> stack{root};
        const double floor_size = std::max(opt.cluster_size, 1e-14 * std::max(1.0, disk.radius));
        while (!stack.empty()) {
            detail::Box b = stack.back();
            stack.pop_back();
            if (b.count == 0)
                continue;
            if (b.count == 1) {
                Cd z = b.center();
                bool ok = false;
                for (int it = 0; it < 60; ++it) {
                    Cd v, d;
                    eq.lo(z, v, d);
                    if (!is_finite(v) || (d.re == 0 && d.im == 0))
                        break;
                    Cd step = v / d;
                    z -= step;
                    if (!b.holds(z, b.size()))
                        break;
                    if (abs(step) < 1e-13 * std::max(1.0, abs(z))) {
                        ok = b.holds(z, 1e-12 * std::max(1.0, abs(z)));
                        break;
                    }
                }
                if (ok) {
                    found.emplace_back(z, 1);
                    continue;
                }
            }
            if (b.size() < floor_size) {
                found.emplace_back(b.center(), b.count);
                continue;
            }
            bool split = false;
            for (double fr : fractions) {
                double xm = b.x0 + fr * (b.x1 - b.x0), ym = b.y0 + fr * (b.y1 - b.y0);
                detail::Box kids[4] = {{b.x0, xm, b.y0, ym, 0}, {xm, b.x1, b.y0, ym, 0}, {b.x0, xm, ym, b.y1, 0},
                                       {xm, b.x1, ym, b.y1, 0}};
                try {
                    int sum = 0;
                    for (auto& k : kids) {
                        k.count = detail::box_winding(g, k, opt.winding);
                        sum += k.count;
                    }
                    if (sum != b.count)
                        continue;
                } catch (const BoundaryTooClose&) {
                    continue;
                }
                for (auto& k : kids)
                    stack.push_back(k);
                split = true;
                break;
            }
            if (!split && b.count >= 2) {
                // noise floor reached around a multiple zero
                found.emplace_back(b.center(), b.count);
                continue;
            }
            if (!split) {
                std::ostringstream box;
                box << "[" << b.x0 << "," << b.x1 << "]x[" << b.y0 << "," << b.y1 << "]";
                throw UnresolvedCluster("roots_in_disk", "cannot split box " + box.str());
            }
        }
    }
    std::vector<Root> out;
    int counted = 0;
    for (auto& [z0, mult] : found) {
        Cd z = z0;
        double scale = std::max(1.0, abs(z));
        if (mult == 1 && eq.conj_symmetric && std::abs(z.im) < 1e-9 * scale)
            z.im = 0;
        if (mult == 1 && eq.negconj_symmetric && std::abs(z.re) < 1e-9 * scale)
            z.re = 0;
        if (abs(z - disk.center) >= disk.radius)
            continue;
        Root r;
        r.multiplicity = mult;
        r.z = polish(eq, Ch(z), mult, opt, &r.residual);
        out.push_back(r);
        counted += mult;
    }
    if (counted != total)
        throw UnresolvedCluster("roots_in_disk", "located " + std::to_string(counted) + " of " +
                                                      std::to_string(total) + " roots");
    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
        return detail::less_mod_arg(to_double(a.z), to_double(b.z));
    });
    return out;
}

inline std::vector<Root> roots_in_disk(const MapViews& m, const Ch& target, const Disk& disk, const RootOptions& opt = {})
{
    return solve_in_disk(value_equation(m, target), disk, opt);
}

inline std::vector<Root> roots_in_disk(const EntireMap& f, const Ch& target, const Disk& disk, const RootOptions& opt = {})
{
    MapViews m(f);
    return roots_in_disk(m, target, disk, opt);
}

struct Cycle {
    int period = 0;
    std::vector<Ch> points;
    Ch multiplier;
    std::vector<std::optional<GR>> exact; // exact witnesses where known
    std::optional<GR> exact_multiplier;

    bool fully_exact() const
    {
        return exact_multiplier.has_value() &&
               std::all_of(exact.begin(), exact.end(), [](const auto& x) { return x.has_value(); });
    }
    bool meets(const Disk& d) const
    {
        return std::any_of(points.begin(), points.end(),
                           [&](const Ch& z) { return abs(to_double(z) - d.center) < d.radius; });
    }
};

inline Hp separation_tol(const RootOptions& opt)
{
    // distinct periodic points closer than this are treated as one
    return std::max<Hp>(Hp(opt.tol) * Hp(1e6), Hp(1e-30));
}

// Cycles of minimal period <= p meeting the disk, sorted by period and then
// by (modulus, argument) of the leading point.
inline std::vector<Cycle> periodic_cycles(const MapViews& m, int p, const Disk& disk, const RootOptions& opt = {})
{
    if (p < 1)
        throw PreconditionError("periodic_cycles", "period must be >= 1");
    std::vector<Cycle> out;
    const Hp sep = separation_tol(opt);
    auto known = [&](const Ch& z) {
        for (const auto& c : out)
            for (const auto& x : c.points)
                if (abs(x - z) <= sep * std::max<Hp>(Hp(1), abs(z)))
                    return true;
        return false;
    };
    for (int q = 1; q <= p; ++q) {
        std::vector<Root> roots = solve_in_disk(periodic_equation(m, q), disk, opt);
        Equation per = periodic_equation(m, q);
        for (const auto& r : roots) {
            if (known(r.z))
                continue;
            bool lower = false;
            for (int d = 1; d < q && !lower; ++d) {
                if (q % d != 0)
                    continue;
                Ch v, dv;
                m.hi.iterate(r.z, d, v, dv);
                if (abs(v - r.z) <= sep * std::max<Hp>(Hp(1), abs(r.z)) * Hp(1e3))
                    lower = true;
            }
            if (lower)
                continue;
            Cycle c;
            c.period = q;
            c.points.push_back(r.z);
            for (int k = 1; k < q; ++k) {
                Ch next = m.hi(c.points.back());
                c.points.push_back(polish(per, next, 1, opt));
            }
            c.multiplier = Ch(Hp(1));
            for (const auto& x : c.points)
                c.multiplier *= m.hi.deriv(x);
            std::size_t lead = 0;
            for (std::size_t k = 1; k < c.points.size(); ++k)
                if (detail::less_mod_arg(to_double(c.points[k]), to_double(c.points[lead])))
                    lead = k;
            std::rotate(c.points.begin(), c.points.begin() + lead, c.points.end());
            c.exact.assign(c.points.size(), std::nullopt);
            out.push_back(std::move(c));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) {
        if (a.period != b.period)
            return a.period < b.period;
        return detail::less_mod_arg(to_double(a.points[0]), to_double(b.points[0]));
    });
    return out;
}

inline std::vector<Cycle> periodic_cycles(const EntireMap& f, int p, const Disk& disk, const RootOptions& opt = {})
{
    MapViews m(f);
    return periodic_cycles(m, p, disk, opt);
}

// Tries to witness every point of the cycle exactly: snap, then check the
// orbit relation and multiplier by exact evaluation.
inline bool confirm_exact(const ExactView& f, Cycle& c, const mpz_class& bound)
{
    std::vector<GR> pts;
    for (const auto& z : c.points)
        pts.push_back(snap(z, bound));
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (f(pts[k]) != pts[(k + 1) % pts.size()])
            return false;
    GR mult(1);
    for (const auto& x : pts)
        mult *= f.deriv(x);
    for (std::size_t k = 0; k < pts.size(); ++k)
        c.exact[k] = pts[k];
    c.exact_multiplier = mult;
    return true;
}

struct ClearRadius {
    double radius = 0;
    double margin = 0;
};

// Radius in (lo, hi) at the middle of the widest gap between the moduli.
inline ClearRadius clear_radius_from_moduli(std::vector<double> moduli, double lo, double hi)
{
    if (!(lo < hi))
        throw PreconditionError("clear_radius", "empty interval");
    std::vector<double> cuts{lo, hi};
    for (double m : moduli)
        if (m > lo && m < hi)
            cuts.push_back(m);
    std::sort(cuts.begin(), cuts.end());
    ClearRadius best;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double gap = cuts[k + 1] - cuts[k];
        if (gap / 2 > best.margin) {
            best.margin = gap / 2;
            best.radius = (cuts[k] + cuts[k + 1]) / 2;
        }
    }
    if (best.margin < 1e-9 * std::max(1.0, hi))
        throw IntervalExhausted("clear_radius", "points blanket the interval");
    return best;
}

inline std::vector<double> moduli_of(const std::vector<Cycle>& cycles)
{
    std::vector<double> out;
    for (const auto& c : cycles)
        for (const auto& z : c.points)
            out.push_back(abs(to_double(z)));
    return out;
}

// Clear radius for periodic points of period <= p. The search disk is the
// first radius at or above hi whose boundary can be resolved.
inline ClearRadius clear_radius(const MapViews& m, int p, double lo, double hi, const RootOptions& opt = {})
{
    for (int k = 0; k < 8; ++k) {
        double outer = hi + (hi - lo) * k / 16.0;
        try {
            return clear_radius_from_moduli(moduli_of(periodic_cycles(m, p, Disk{{0, 0}, outer}, opt)), lo, hi);
        } catch (const BoundaryTooClose&) {
        }
    }
    throw BoundaryTooClose("clear_radius", "no resolvable outer circle");
}

inline ClearRadius clear_radius(const EntireMap& f, int p, double lo, double hi, const RootOptions& opt = {})
{
    MapViews m(f);
    return clear_radius(m, p, lo, hi, opt);
}

inline std::vector<std::pair<Ch, std::vector<Root>>> preimages_in_disk(const MapViews& m, const std::vector<Ch>& targets,
                                                                      const Disk& disk, const RootOptions& opt = {})
{
    std::vector<std::pair<Ch, std::vector<Root>>> out;
    for (const auto& t : targets)
        out.emplace_back(t, roots_in_disk(m, t, disk, opt));
    return out;
}

inline std::vector<std::pair<Ch, std::vector<Root>>> preimages_in_disk(const EntireMap& f, const std::vector<Ch>& targets,
                                                                      const Disk& disk, const RootOptions& opt = {})
{
    MapViews m(f);
    return preimages_in_disk(m, targets, disk, opt);
}

inline std::string point_string(const Ch& z, const std::optional<GR>& exact)
{
    if (exact)
        return exact->str();
    Cd d = to_double(z);
    // no negative zeros in the output
    d.re += 0.0;
    d.im += 0.0;
    std::ostringstream s;
    s.precision(17);
    s << d.re << (d.im < 0 ? "" : "+") << d.im << "i";
    return s.str();
}

inline std::string cycles_csv(const std::vector<Cycle>& cycles)
{
    std::ostringstream out;
    out << "period,points,multiplier\n";
    for (const auto& c : cycles) {
        out << c.period << ",";
        for (std::size_t k = 0; k < c.points.size(); ++k)
            out << (k ? ";" : "") << point_string(c.points[k], c.exact[k]);
        out << "," << point_string(c.multiplier, c.exact_multiplier) << "\n";
    }
    return out.str();
}

} // namespace edyn
