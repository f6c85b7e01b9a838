#pragma once

#include "complex.hpp"
#include "gaussian.hpp"

#include <span>
#include <vector>

namespace edyn {

template <class C>
struct Field;

template <>
struct Field<GR> {
    static GR zero() { return GR(0); }
    static GR one() { return GR(1); }
    static bool is_zero(const GR& c) { return c.is_zero(); }
    static GR from(const GR& x) { return x; }
    static GR real_part(const GR& x) { return GR(x.re()); }
    static GR imag_part(const GR& x) { return GR(x.im()); }
    static bool is_real(const GR& x) { return x.is_real(); }
};

template <class T>
struct Field<Complex<T>> {
    static Complex<T> zero() { return Complex<T>(T(0), T(0)); }
    static Complex<T> one() { return Complex<T>(T(1), T(0)); }
    static bool is_zero(const Complex<T>& c) { return c.re == 0 && c.im == 0; }
    static Complex<T> from(const GR& x) { return x.template to<T>(); }
    static Complex<T> real_part(const Complex<T>& x) { return Complex<T>(x.re, T(0)); }
    static Complex<T> imag_part(const Complex<T>& x) { return Complex<T>(x.im, T(0)); }
    static bool is_real(const Complex<T>& x) { return x.im == 0; }
};

// Dense univariate polynomial; coefficient k multiplies z^k.
template <class C>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<C> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Poly constant(const C& c) { return Poly(std::vector<C>{c}); }
    static Poly monomial(const C& c, std::size_t k)
    {
        std::vector<C> v(k + 1, Field<C>::zero());
        v[k] = c;
        return Poly(std::move(v));
    }
    // z - a
    static Poly linear_root(const C& a) { return Poly(std::vector<C>{-a, Field<C>::one()}); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    std::size_t size() const { return c_.size(); }
    const std::vector<C>& coeffs() const { return c_; }
    C coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Field<C>::zero(); }

    template <class Z>
    Z eval(const Z& z) const
    {
        Z acc = Field<Z>::zero();
        for (std::size_t k = c_.size(); k-- > 0;) {
            acc *= z;
            acc += convert<Z>(c_[k]);
        }
        return acc;
    }

    Poly derivative() const
    {
        if (c_.size() <= 1)
            return Poly();
        std::vector<C> d;
        d.reserve(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k)
            d.push_back(c_[k] * C(static_cast<long>(k)));
        return Poly(std::move(d));
    }

    Poly& operator+=(const Poly& o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), Field<C>::zero());
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), Field<C>::zero());
        for (std::size_t k = 0; k < o.c_.size(); ++k)
            c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Poly& operator*=(const C& s)
    {
        for (auto& c : c_)
            c *= s;
        trim();
        return *this;
    }

    // in place multiplication by (z - a)
    Poly& times_linear(const C& a)
    {
        if (c_.empty())
            return *this;
        c_.push_back(Field<C>::zero());
        for (std::size_t k = c_.size() - 1; k > 0; --k) {
            c_[k] = c_[k - 1] - a * c_[k];
        }
        c_[0] = -(a * c_[0]);
        trim();
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const C& s) { return a *= s; }
    friend Poly operator*(const C& s, Poly a) { return a *= s; }
    friend Poly operator-(Poly a)
    {
        for (auto& c : a.c_)
            c = -c;
        return a;
    }
    friend Poly operator*(const Poly& a, const Poly& b)
    {
        if (a.is_zero() || b.is_zero())
            return Poly();
        std::vector<C> out(a.c_.size() + b.c_.size() - 1, Field<C>::zero());
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (Field<C>::is_zero(a.c_[i]))
                continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                out[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(out));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    // Coefficient-wise conversion into another field.
    template <class D>
    Poly<D> cast() const
    {
        std::vector<D> out;
        out.reserve(c_.size());
        for (const auto& c : c_)
            out.push_back(convert<D>(c));
        return Poly<D>(std::move(out));
    }

private:
    template <class D, class S>
    static D convert(const S& s)
    {
        if constexpr (std::is_same_v<D, S>)
            return s;
        else if constexpr (std::is_same_v<S, GR>)
            return Field<D>::from(s);
        else
            return D(s);
    }

    void trim()
    {
        while (!c_.empty() && Field<C>::is_zero(c_.back()))
            c_.pop_back();
    }

    std::vector<C> c_;
};

using ExactPoly = Poly<GR>;
using FloatPoly = Poly<Ch>;

// prod over a in A of (z - a)^2
template <class C = GR>
Poly<C> squared_vanishing(std::span<const GR> pts)
{
    Poly<C> out = Poly<C>::constant(Field<C>::one());
    for (const auto& a : pts) {
        C v = Field<C>::from(a);
        out.times_linear(v);
        out.times_linear(v);
    }
    return out;
}

template <class C>
bool is_real_even(const Poly<C>& p)
{
    const auto& c = p.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k % 2 == 1 && !Field<C>::is_zero(c[k]))
            return false;
        if (!Field<C>::is_real(c[k]))
            return false;
    }
    return true;
}

} // namespace edyn
