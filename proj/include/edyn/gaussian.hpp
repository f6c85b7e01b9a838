#pragma once

#include "complex.hpp"
#include "errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edyn {

// Exact element of Q(i). Both parts are kept in lowest terms.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long n) : re_(n), im_(0) {}
    GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im))
    {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return GaussianRational(0, 1); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_imaginary() const { return sgn(re_) == 0; }
    bool on_axes() const { return is_real() || is_imaginary(); }

    GaussianRational conj() const { return GaussianRational(re_, -im_); }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }
    mpz_class max_den() const
    {
        return cmp(re_.get_den(), im_.get_den()) >= 0 ? re_.get_den() : im_.get_den();
    }

    GaussianRational& operator+=(const GaussianRational& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o)
    {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o)
    {
        mpq_class n = o.norm();
        if (sgn(n) == 0)
            throw std::domain_error("GaussianRational: division by zero");
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        im_ = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = r;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return GaussianRational(-a.re_, -a.im_); }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    // Lexicographic on (re, im); used for sorted point sets.
    friend std::strong_ordering operator<=>(const GaussianRational& a, const GaussianRational& b)
    {
        int c = cmp(a.re_, b.re_);
        if (c == 0)
            c = cmp(a.im_, b.im_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    // Canonical text: "a/b+c/di" with b, d >= 1.
    std::string str() const
    {
        std::string out = re_.get_num().get_str() + "/" + re_.get_den().get_str();
        out += sgn(im_) < 0 ? "-" : "+";
        mpz_class n = abs(im_.get_num());
        out += n.get_str() + "/" + im_.get_den().get_str() + "i";
        return out;
    }

    // Accepts the canonical form and plain rationals ("3/2", "-5").
    static GaussianRational parse(std::string_view s)
    {
        auto fail = [&] { throw PreconditionError("GaussianRational::parse", "bad literal '" + std::string(s) + "'"); };
        if (s.empty())
            fail();
        if (s.back() != 'i') {
            mpq_class q;
            if (q.set_str(std::string(s), 10) != 0)
                fail();
            return GaussianRational(q, 0);
        }
        std::size_t split = std::string_view::npos;
        for (std::size_t k = 1; k < s.size(); ++k)
            if (s[k] == '+' || s[k] == '-')
                split = k;
        if (split == std::string_view::npos)
            fail();
        mpq_class r, m;
        std::string im_part(s.substr(split, s.size() - split - 1));
        if (im_part[0] == '+')
            im_part.erase(0, 1);
        if (r.set_str(std::string(s.substr(0, split)), 10) != 0 || m.set_str(im_part, 10) != 0)
            fail();
        return GaussianRational(r, m);
    }

    template <class T>
    Complex<T> to() const
    {
        return Complex<T>(RealOps<T>::from_q(re_), RealOps<T>::from_q(im_));
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

using GR = GaussianRational;
using PointSet = std::vector<GR>; // sorted, no duplicates

inline void normalize(PointSet& s)
{
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool contains(const PointSet& s, const GR& x)
{
    return std::binary_search(s.begin(), s.end(), x);
}

inline PointSet unite(PointSet a, const PointSet& b)
{
    a.insert(a.end(), b.begin(), b.end());
    normalize(a);
    return a;
}

inline PointSet minus(const PointSet& a, const PointSet& b)
{
    PointSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// A union conj(A) union -A union -conj(A).
inline PointSet symmetrize(std::span<const GR> a)
{
    PointSet out;
    out.reserve(4 * a.size());
    for (const auto& x : a) {
        out.push_back(x);
        out.push_back(x.conj());
        out.push_back(-x);
        out.push_back(-x.conj());
    }
    normalize(out);
    return out;
}

inline PointSet symmetrize(const GR& x)
{
    return symmetrize(std::span<const GR>(&x, 1));
}

inline bool is_symmetric(const PointSet& a)
{
    return symmetrize(a) == a;
}

enum class ParityClass { Q0, Q1, NotRational };

inline const char* to_string(ParityClass p)
{
    switch (p) {
    case ParityClass::Q0: return "Q0";
    case ParityClass::Q1: return "Q1";
    default: return "NotRational";
    }
}

inline ParityClass parity(mpq_class q)
{
    q.canonicalize();
    return mpz_even_p(q.get_den().get_mpz_t()) ? ParityClass::Q0 : ParityClass::Q1;
}

inline ParityClass parity(const GR& x)
{
    return x.is_real() ? parity(x.re()) : ParityClass::NotRational;
}

// Closest rational to x with denominator <= bound. On a tie the smaller
// denominator wins, then the smaller value.
inline mpq_class limit_denominator(const mpq_class& x, const mpz_class& bound)
{
    if (bound < 1)
        throw PreconditionError("limit_denominator", "bound must be >= 1");
    if (x.get_den() <= bound)
        return x;
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpz_class n = x.get_num(), d = x.get_den();
    for (;;) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        mpz_class q2 = q0 + a * q1;
        if (q2 > bound)
            break;
        mpz_class p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpz_class r = n - a * d;
        n = d;
        d = r;
    }
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), mpz_class(bound - q0).get_mpz_t(), q1.get_mpz_t());
    mpq_class semi(p0 + k * p1, q0 + k * q1);
    mpq_class conv(p1, q1);
    semi.canonicalize();
    conv.canonicalize();
    mpq_class ds = abs(semi - x), dc = abs(conv - x);
    int c = cmp(ds, dc);
    if (c != 0)
        return c < 0 ? semi : conv;
    if (semi.get_den() != conv.get_den())
        return semi.get_den() < conv.get_den() ? semi : conv;
    return semi < conv ? semi : conv;
}

template <class T>
mpq_class snap_real(const T& x, const mpz_class& bound)
{
    return limit_denominator(RealOps<T>::to_q(x), bound);
}

// Nearest element of Q(i) whose component denominators are <= bound.
template <class T>
GR snap(const Complex<T>& z, const mpz_class& bound)
{
    return GR(snap_real(z.re, bound), snap_real(z.im, bound));
}

inline GR snap(double re, double im, long bound)
{
    return snap(Cd(re, im), mpz_class(bound));
}

namespace detail {

inline mpz_class ceil_abs(const mpq_class& q)
{
    mpz_class out;
    mpz_class n = abs(q.get_num());
    mpz_cdiv_q(out.get_mpz_t(), n.get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

// 0 for arguments in [0, pi), 1 for [pi, 2 pi).
inline int half_plane(const GR& x)
{
    if (sgn(x.im()) > 0 || (sgn(x.im()) == 0 && sgn(x.re()) >= 0))
        return 0;
    return 1;
}

inline bool arg_less(const GR& a, const GR& b)
{
    int ha = half_plane(a), hb = half_plane(b);
    if (ha != hb)
        return ha < hb;
    return sgn(a.re() * b.im() - a.im() * b.re()) > 0;
}

} // namespace detail

// Height used to cut Q(i) into finite shells.
inline mpz_class height(const GR& x)
{
    mpz_class h = x.max_den();
    mpz_class a = detail::ceil_abs(x.re()), b = detail::ceil_abs(x.im());
    if (a > h)
        h = a;
    if (b > h)
        h = b;
    return h;
}

// Deterministic enumeration e_1, e_2, ... of Q(i): shells of growing height,
// each sorted by (max denominator, modulus, argument in [0, 2 pi)).
class EnumerationE {
public:
    const GR& at(std::size_t n)
    {
        if (n == 0)
            throw PreconditionError("EnumerationE::at", "index is 1-based");
        while (items_.size() < n)
            add_shell();
        return items_[n - 1];
    }

    PointSet first(std::size_t n)
    {
        PointSet out;
        for (std::size_t k = 1; k <= n; ++k)
            out.push_back(at(k));
        normalize(out);
        return out;
    }

private:
    void add_shell()
    {
        ++shell_;
        const long k = shell_;
        std::vector<mpq_class> comps;
        for (long q = 1; q <= k; ++q)
            for (long p = -k * q; p <= k * q; ++p) {
                mpq_class v(p, q);
                v.canonicalize();
                if (v.get_den() == q)
                    comps.push_back(v);
            }
        std::vector<GR> shell;
        for (const auto& r : comps)
            for (const auto& m : comps) {
                GR x(r, m);
                if (height(x) == k)
                    shell.push_back(x);
            }
        std::sort(shell.begin(), shell.end(), [](const GR& a, const GR& b) {
            int c = cmp(a.max_den(), b.max_den());
            if (c != 0)
                return c < 0;
            c = cmp(a.norm(), b.norm());
            if (c != 0)
                return c < 0;
            return detail::arg_less(a, b);
        });
        items_.insert(items_.end(), shell.begin(), shell.end());
    }

    long shell_ = 0;
    std::vector<GR> items_;
};

} // namespace edyn
