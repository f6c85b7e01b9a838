#pragma once

#include "bumps.hpp"

#include <nlohmann/json.hpp>

#include <random>
#include <vector>

namespace edyn {

struct ConstructorTally {
    BumpKind kind = BumpKind::value;
    int instances = 0;
    int constraint_failures = 0;
    int degree_violations = 0;
    int max_degree = 0;
    int max_size = 0; // largest pinned set used

    bool ok() const { return instances > 0 && constraint_failures == 0 && degree_violations == 0; }
};

inline nlohmann::json to_json(const ConstructorTally& t)
{
    return {{"constructor", to_string(t.kind)},     {"instances", t.instances},
            {"constraint_failures", t.constraint_failures}, {"degree_violations", t.degree_violations},
            {"max_degree", t.max_degree},           {"max_pinned", t.max_size},
            {"ok", t.ok()}};
}

namespace detail {

class InstanceSource {
public:
    InstanceSource(unsigned seed, int den) : rng_(seed), den_(den) {}

    mpq_class rational()
    {
        std::uniform_int_distribution<int> n(-3 * den_, 3 * den_), d(1, den_);
        return mpq_class(n(rng_), d(rng_));
    }
    GR point() { return GR(rational(), rational()); }
    int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    // Up to `limit` points, no symmetry.
    PointSet plain_set(int limit)
    {
        PointSet a;
        const int n = below(limit + 1);
        while (static_cast<int>(a.size()) < n) {
            a.push_back(point());
            normalize(a);
        }
        return a;
    }

    // Union of symmetry orbits (z, -z, conj z, -conj z) of size <= limit.
    PointSet symmetric_set(int limit)
    {
        PointSet a;
        for (int tries = 0; tries < 8; ++tries) {
            GR g;
            switch (below(4)) {
            case 0: g = GR(0); break;
            case 1: g = GR(rational()); break;
            case 2: g = GR(mpq_class(0), rational()); break;
            default: g = point(); break;
            }
            PointSet next = unite(a, symmetrize(PointSet{g}));
            if (static_cast<int>(next.size()) <= limit)
                a = next;
        }
        return a;
    }

private:
    std::mt19937 rng_;
    int den_;
};

// Exact oracle: vanishing to second order on A and the constraint at b.
inline bool constraints_hold(BumpKind kind, const ExactPoly& p, const PointSet& a, const GR& b, const GR& t)
{
    const ExactPoly dp = p.derivative();
    for (const auto& x : a)
        if (!p.eval(x).is_zero() || !dp.eval(x).is_zero())
            return false;
    const bool value_kind = kind == BumpKind::value || kind == BumpKind::value_axes || kind == BumpKind::value_away;
    if (value_kind)
        return p.eval(b) == t;
    return p.eval(b).is_zero() && dp.eval(b) == t;
}

} // namespace detail

// Random valid instances of every bump constructor, checked exactly.
inline std::vector<ConstructorTally> constructor_suite(int instances = 1000, int max_pinned = 6, int max_den = 20,
                                                       unsigned seed = 1)
{
    if (instances < 1 || max_pinned < 0 || max_den < 1)
        throw PreconditionError("constructor_suite", "instances and max_den must be positive, max_pinned >= 0");
    const BumpKind kinds[] = {BumpKind::value,      BumpKind::deriv,      BumpKind::value_axes,
                              BumpKind::value_away, BumpKind::deriv_axes, BumpKind::deriv_away};
    std::vector<ConstructorTally> out;
    for (BumpKind kind : kinds) {
        detail::InstanceSource src(seed + static_cast<unsigned>(kind) * 7919u, max_den);
        ConstructorTally t;
        t.kind = kind;
        while (t.instances < instances) {
            const bool sym = kind != BumpKind::value && kind != BumpKind::deriv;
            PointSet a = sym ? src.symmetric_set(max_pinned) : src.plain_set(max_pinned);
            GR b = src.point(), target = src.point();
            switch (kind) {
            case BumpKind::value_axes:
                b = src.below(2) ? GR(b.re()) : GR(mpq_class(0), b.im());
                target = GR(target.re());
                break;
            case BumpKind::deriv_axes:
                b = GR(b.re());
                target = GR(target.re());
                break;
            default: break;
            }
            // skip draws outside the constructor's domain
            if (contains(a, b))
                continue;
            if (kind == BumpKind::deriv_axes && b.is_zero())
                continue;
            if ((kind == BumpKind::value_away || kind == BumpKind::deriv_away) && (b * b).is_real())
                continue;
            ++t.instances;
            ExactPoly p;
            try {
                p = make_bump(kind, a, b, target);
            } catch (const InternalLogicError&) {
                // the constructor's own post-check rejected its output
                ++t.constraint_failures;
                continue;
            }
            t.max_size = std::max(t.max_size, static_cast<int>(a.size()));
            t.max_degree = std::max(t.max_degree, p.degree());
            if (p.degree() > degree_bound(kind, a.size()))
                ++t.degree_violations;
            bool ok = detail::constraints_hold(kind, p, a, b, target);
            if (sym)
                ok = ok && is_real_even(p);
            if (!ok)
                ++t.constraint_failures;
        }
        out.push_back(t);
    }
    return out;
}

} // namespace edyn
