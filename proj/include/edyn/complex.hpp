#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace edyn {

using Hp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                         boost::multiprecision::et_off>;

// MPFR precision of a value created now
inline unsigned working_bits()
{
    Hp x;
    return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

// smallest decimal default precision giving at least `bits` bits
inline unsigned digits_for_bits(unsigned bits)
{
    unsigned d = std::max(1u, static_cast<unsigned>(bits * 0.30103) - 1);
    while (static_cast<unsigned>(std::ceil(d * 3.3219280948873623)) + 1 < bits)
        ++d;
    return d;
}

// Sets the default MPFR precision (at least `bits`) for new values; restores it on exit.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits) : saved_(Hp::default_precision())
    {
        Hp::default_precision(digits_for_bits(bits));
    }
    ~PrecisionScope() { Hp::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

template <class T>
struct RealOps;

template <>
struct RealOps<double> {
    static double from_q(const mpq_class& q) { return q.get_d(); }
    static mpq_class to_q(double x) { return mpq_class(x); }
    static double to_double(double x) { return x; }
    static bool finite(double x) { return std::isfinite(x); }
    static double epsilon() { return 0x1p-52; }
};

template <>
struct RealOps<Hp> {
    static Hp from_q(const mpq_class& q) { return Hp(q.get_mpq_t()); }
    static mpq_class to_q(const Hp& x)
    {
        mpq_class out;
        mpfr_get_q(out.get_mpq_t(), x.backend().data());
        return out;
    }
    static double to_double(const Hp& x) { return x.template convert_to<double>(); }
    static bool finite(const Hp& x) { return mpfr_number_p(x.backend().data()) != 0; }
    static Hp epsilon()
    {
        Hp e = 1;
        return ldexp(e, -static_cast<int>(working_bits()));
    }
};

template <class T>
struct Complex {
    T re{};
    T im{};

    Complex() : re(0), im(0) {}
    Complex(const T& r) : re(r), im(0) {}
    Complex(const T& r, const T& i) : re(r), im(i) {}
    template <class U, class = std::enable_if_t<!std::is_same_v<T, U>>>
    explicit Complex(const Complex<U>& o)
        : re(convert(o.re)), im(convert(o.im)) {}

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o)
    {
        T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator/=(const Complex& o)
    {
        // scaled division keeps double overflow away for moderate inputs
        using std::abs;
        if (abs(o.re) >= abs(o.im)) {
            T t = o.im / o.re;
            T d = o.re + o.im * t;
            T r = (re + im * t) / d;
            im = (im - re * t) / d;
            re = std::move(r);
        } else {
            T t = o.re / o.im;
            T d = o.re * t + o.im;
            T r = (re * t + im) / d;
            im = (im * t - re) / d;
            re = std::move(r);
        }
        return *this;
    }
    Complex& operator*=(const T& s) { re *= s; im *= s; return *this; }
    Complex& operator/=(const T& s) { re /= s; im /= s; return *this; }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator*(Complex a, const T& s) { return a *= s; }
    friend Complex operator*(const T& s, Complex a) { return a *= s; }
    friend Complex operator/(Complex a, const T& s) { return a /= s; }
    friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

private:
    template <class U>
    static T convert(const U& u)
    {
        if constexpr (std::is_same_v<U, Hp> && std::is_same_v<T, double>)
            return u.template convert_to<double>();
        else
            return T(u);
    }
};

using Cd = Complex<double>;
using Ch = Complex<Hp>;

template <class T>
T norm(const Complex<T>& z) { return z.re * z.re + z.im * z.im; }

template <class T>
T abs(const Complex<T>& z)
{
    if constexpr (std::is_same_v<T, double>) {
        return std::hypot(z.re, z.im);
    } else {
        using std::sqrt;
        return sqrt(norm(z));
    }
}

template <class T>
T arg(const Complex<T>& z)
{
    using std::atan2;
    return atan2(z.im, z.re);
}

template <class T>
Complex<T> conj(const Complex<T>& z) { return Complex<T>(z.re, -z.im); }

template <class T>
Complex<T> cosh(const Complex<T>& z)
{
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return Complex<T>(cosh(z.re) * cos(z.im), sinh(z.re) * sin(z.im));
}

template <class T>
Complex<T> sinh(const Complex<T>& z)
{
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return Complex<T>(sinh(z.re) * cos(z.im), cosh(z.re) * sin(z.im));
}

template <class T>
Complex<T> polar(const T& r, const T& theta)
{
    using std::cos;
    using std::sin;
    return Complex<T>(r * cos(theta), r * sin(theta));
}

template <class T>
bool is_finite(const Complex<T>& z)
{
    return RealOps<T>::finite(z.re) && RealOps<T>::finite(z.im);
}

inline Cd to_double(const Ch& z) { return Cd(z); }
inline Cd to_double(const Cd& z) { return z; }

inline std::string hp_string(const Hp& x)
{
    return x.str(0, std::ios_base::scientific);
}

template <class T>
T pi_value()
{
    if constexpr (std::is_same_v<T, double>) {
        return 3.14159265358979323846;
    } else {
        T p;
        mpfr_const_pi(p.backend().data(), MPFR_RNDN);
        return p;
    }
}

} // namespace edyn
