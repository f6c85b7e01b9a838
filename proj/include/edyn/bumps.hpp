#pragma once

#include "errors.hpp"
#include "poly.hpp"

#include <string>

namespace edyn {

enum class BumpKind { value, deriv, value_axes, value_away, deriv_axes, deriv_away };

inline const char* to_string(BumpKind k)
{
    switch (k) {
    case BumpKind::value: return "P";
    case BumpKind::deriv: return "Q";
    case BumpKind::value_axes: return "P_axes";
    case BumpKind::value_away: return "P_away";
    case BumpKind::deriv_axes: return "Q_axes";
    default: return "Q_away";
    }
}

inline int degree_bound(BumpKind k, std::size_t n)
{
    const int a = static_cast<int>(n);
    switch (k) {
    case BumpKind::value:
    case BumpKind::value_axes: return 2 * a;
    case BumpKind::deriv: return 2 * a + 1;
    case BumpKind::value_away:
    case BumpKind::deriv_axes: return 2 * a + 2;
    default: return 2 * a + 6;
    }
}

namespace detail {

template <class F>
bool close_to(const F& got, const F& want, const F& scale)
{
    if constexpr (std::is_same_v<F, GR>) {
        (void)scale;
        return got == want;
    } else {
        using R = decltype(got.re);
        // residual must sit below 2^-(prec/2) relative to the size of the terms involved
        R tol = sqrt(RealOps<R>::epsilon());
        return abs(got - want) <= tol * (R(1) + abs(scale) + abs(want));
    }
}

// Largest term sum |c_k| |z|^k, the natural scale of a float residual at z.
template <class F>
F magnitude_at(const Poly<F>& p, const GR& z)
{
    if constexpr (std::is_same_v<F, GR>) {
        (void)p;
        (void)z;
        return GR(0);
    } else {
        using R = decltype(std::declval<F>().re);
        R r = abs(z.template to<R>());
        R acc = 0, pw = 1;
        for (const auto& c : p.coeffs()) {
            acc += abs(c) * pw;
            pw *= r;
        }
        return F(acc);
    }
}

inline void require_outside(const PointSet& a, const GR& b, const char* op)
{
    if (contains(a, b))
        throw ConstraintConflict(op, "target point " + b.str() + " lies in the pinned set");
}

inline void require_symmetric(const PointSet& a, const char* op)
{
    if (!is_symmetric(a))
        throw PreconditionError(op, "pinned set is not symmetric about both axes");
}

template <class F>
void require_real(const F& x, const char* op, const char* what)
{
    if (!Field<F>::is_real(x))
        throw PreconditionError(op, std::string(what) + " must be real");
}

// prod over a of (b - a)^2
inline GR squared_gap(const PointSet& a, const GR& b)
{
    GR d(1);
    for (const auto& x : a) {
        GR t = b - x;
        d *= t * t;
    }
    return d;
}

template <class F>
Poly<F> checked(Poly<F> p, BumpKind kind, const PointSet& a, const GR& b, const F& target, bool symmetric)
{
    const char* op = to_string(kind);
    if (p.degree() > degree_bound(kind, a.size()))
        throw InternalLogicError(op, "degree bound exceeded");
    Poly<F> dp = p.derivative();
    const F zero = Field<F>::zero();
    for (const auto& x : a) {
        F xv = Field<F>::from(x);
        if (!close_to(p.eval(xv), zero, magnitude_at(p, x)) || !close_to(dp.eval(xv), zero, magnitude_at(dp, x)))
            throw InternalLogicError(op, "bump does not vanish to second order at " + x.str());
    }
    F bv = Field<F>::from(b);
    const bool value_kind = kind == BumpKind::value || kind == BumpKind::value_axes || kind == BumpKind::value_away;
    if (value_kind) {
        if (!close_to(p.eval(bv), target, magnitude_at(p, b)))
            throw InternalLogicError(op, "value constraint violated at " + b.str());
    } else {
        if (!close_to(p.eval(bv), zero, magnitude_at(p, b)) || !close_to(dp.eval(bv), target, magnitude_at(dp, b)))
            throw InternalLogicError(op, "derivative constraint violated at " + b.str());
    }
    if (symmetric && !is_real_even(p))
        throw InternalLogicError(op, "symmetric bump is not real-even");
    return p;
}

} // namespace detail

// zeta * prod ((z - a) / (b - a))^2
template <class F = GR>
Poly<F> bump_value(const PointSet& a, const GR& b, const F& zeta)
{
    detail::require_outside(a, b, "bump_value");
    GR scale = GR(1) / detail::squared_gap(a, b);
    Poly<F> shape = (squared_vanishing<GR>(a) * scale).template cast<F>();
    return detail::checked(shape * zeta, BumpKind::value, a, b, zeta, false);
}

// lambda * (z - b) * prod ((z - a) / (b - a))^2
template <class F = GR>
Poly<F> bump_deriv(const PointSet& a, const GR& b, const F& lambda)
{
    detail::require_outside(a, b, "bump_deriv");
    GR scale = GR(1) / detail::squared_gap(a, b);
    Poly<GR> shape = Poly<GR>::linear_root(b) * squared_vanishing<GR>(a) * scale;
    return detail::checked(shape.template cast<F>() * lambda, BumpKind::deriv, a, b, lambda, false);
}

template <class F = GR>
Poly<F> bump_value_axes(const PointSet& a, const GR& b, const F& zeta)
{
    detail::require_symmetric(a, "bump_value_axes");
    if (!b.on_axes())
        throw PreconditionError("bump_value_axes", "point " + b.str() + " is off the axes");
    detail::require_real(zeta, "bump_value_axes", "target");
    detail::require_outside(a, b, "bump_value_axes");
    GR scale = GR(1) / detail::squared_gap(a, b);
    Poly<F> shape = (squared_vanishing<GR>(a) * scale).template cast<F>();
    return detail::checked(shape * zeta, BumpKind::value_axes, a, b, zeta, true);
}

// Gamma(z) * prod (z - a)^2 with gamma = zeta / prod (b - a)^2. Real-linear in
// zeta, so it is assembled as Re(gamma) * S1 + Im(gamma) * S2 over exact shapes.
template <class F = GR>
Poly<F> bump_value_away(const PointSet& a, const GR& b, const F& zeta)
{
    detail::require_symmetric(a, "bump_value_away");
    GR b2 = b * b;
    if (b2.is_real())
        throw SingularConfiguration("bump_value_away", "Im(b^2) = 0 at b = " + b.str());
    detail::require_outside(a, b, "bump_value_away");
    F gamma = zeta / Field<F>::from(detail::squared_gap(a, b));
    Poly<GR> base = squared_vanishing<GR>(a);
    Poly<GR> quad({GR(-b2.re() / b2.im()), GR(0), GR(1 / b2.im())});
    Poly<F> s1 = base.template cast<F>();
    Poly<F> s2 = (quad * base).template cast<F>();
    Poly<F> p = s1 * Field<F>::real_part(gamma) + s2 * Field<F>::imag_part(gamma);
    return detail::checked(std::move(p), BumpKind::value_away, a, b, zeta, true);
}

// lambda * ((z^2 - b^2) / (2b)) * prod ((z - a) / (b - a))^2
template <class F = GR>
Poly<F> bump_deriv_axes(const PointSet& a, const GR& b, const F& lambda)
{
    detail::require_symmetric(a, "bump_deriv_axes");
    if (!b.is_real())
        throw PreconditionError("bump_deriv_axes", "point " + b.str() + " is not real");
    if (b.is_zero())
        throw SingularConfiguration("bump_deriv_axes", "point must be nonzero");
    detail::require_real(lambda, "bump_deriv_axes", "target");
    detail::require_outside(a, b, "bump_deriv_axes");
    GR scale = GR(1) / (detail::squared_gap(a, b) * GR(2) * b);
    Poly<GR> shape = Poly<GR>({-(b * b), GR(0), GR(1)}) * squared_vanishing<GR>(a) * scale;
    return detail::checked(shape.template cast<F>() * lambda, BumpKind::deriv_axes, a, b, lambda, true);
}

// Delta(z) * (z^4 - 2 Re(b^2) z^2 + |b|^4) * prod (z - a)^2 with
// delta = lambda / (4 i b Im(b^2) prod (b - a)^2).
template <class F = GR>
Poly<F> bump_deriv_away(const PointSet& a, const GR& b, const F& lambda)
{
    detail::require_symmetric(a, "bump_deriv_away");
    GR b2 = b * b;
    if (b2.is_real())
        throw SingularConfiguration("bump_deriv_away", "Im(b^2) = 0 at b = " + b.str());
    detail::require_outside(a, b, "bump_deriv_away");
    GR k = GR(4) * GR::i() * b * GR(b2.im()) * detail::squared_gap(a, b);
    F delta = lambda / Field<F>::from(k);
    mpq_class nb = b.norm();
    Poly<GR> quartic({GR(nb * nb), GR(0), GR(-2 * b2.re()), GR(0), GR(1)});
    Poly<GR> base = quartic * squared_vanishing<GR>(a);
    Poly<GR> quad({GR(-b2.re() / b2.im()), GR(0), GR(1 / b2.im())});
    Poly<F> t1 = base.template cast<F>();
    Poly<F> t2 = (quad * base).template cast<F>();
    Poly<F> p = t1 * Field<F>::real_part(delta) + t2 * Field<F>::imag_part(delta);
    return detail::checked(std::move(p), BumpKind::deriv_away, a, b, lambda, true);
}

template <class F = GR>
Poly<F> make_bump(BumpKind kind, const PointSet& a, const GR& b, const F& target)
{
    switch (kind) {
    case BumpKind::value: return bump_value(a, b, target);
    case BumpKind::deriv: return bump_deriv(a, b, target);
    case BumpKind::value_axes: return bump_value_axes(a, b, target);
    case BumpKind::value_away: return bump_value_away(a, b, target);
    case BumpKind::deriv_axes: return bump_deriv_axes(a, b, target);
    default: return bump_deriv_away(a, b, target);
    }
}

} // namespace edyn
