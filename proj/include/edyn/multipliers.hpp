#pragma once

#include "complex.hpp"
#include "gaussian.hpp"

#include <map>
#include <string>

namespace edyn {

enum class MultiplierKind {
    gaussian,             // Q(i)
    rational,             // Q
    even_den_or_nonreal,  // Q0 union (C \ R), restricted to Q(i)
    odd_den_or_nonreal,   // Q1 union (C \ R), restricted to Q(i)
};

inline bool is_root_of_unity(const GR& x)
{
    return x == GR(1) || x == GR(-1) || x == GR::i() || x == -GR::i();
}

// Target set for cycle multipliers. Roots of unity are never members, so a
// certified cycle of period d stays simple as a fixed point of every f^(kd).
struct MultiplierSet {
    MultiplierKind kind = MultiplierKind::gaussian;

    bool contains(const GR& x) const
    {
        if (is_root_of_unity(x))
            return false;
        switch (kind) {
        case MultiplierKind::gaussian: return true;
        case MultiplierKind::rational: return x.is_real();
        case MultiplierKind::even_den_or_nonreal: return !x.is_real() || parity(x.re()) == ParityClass::Q0;
        default: return !x.is_real() || parity(x.re()) == ParityClass::Q1;
        }
    }

    bool allows_nonreal() const { return kind != MultiplierKind::rational; }

    std::string name() const
    {
        switch (kind) {
        case MultiplierKind::gaussian: return "Q(i)";
        case MultiplierKind::rational: return "Q";
        case MultiplierKind::even_den_or_nonreal: return "Q0+nonreal";
        default: return "Q1+nonreal";
        }
    }

    // A member close to mu. Successive attempts walk outward from the nearest
    // candidate; the error is at most (attempt + 1) / bound.
    GR propose(const Ch& mu, const mpz_class& bound, int attempt, bool must_be_real) const
    {
        const bool nonreal = !must_be_real && allows_nonreal() && mu.im != 0;
        if (nonreal) {
            GR x = snap(mu, bound);
            mpq_class step(1, 1);
            step /= bound;
            if (x.is_real())
                x = GR(x.re(), mu.im > 0 ? step : mpq_class(-step));
            for (int k = 0;; ++k) {
                GR c = x + GR(mpq_class(step * shift(k + attempt)));
                if (contains(c) && !c.is_real())
                    return c;
            }
        }
        mpq_class r = RealOps<Hp>::to_q(mu.re);
        mpz_class q;
        mpz_class p;
        long stride = 1;
        switch (kind) {
        case MultiplierKind::even_den_or_nonreal: {
            q = 2;
            while (q < bound)
                q *= 2;
            mpq_class t = r * q;
            p = floor_half(t);
            p = 2 * p + 1; // odd numerator nearest below-or-at
            if (abs(mpq_class(p - 1) - t) < abs(mpq_class(p) - t))
                p -= 2;
            else if (abs(mpq_class(p + 2) - t) < abs(mpq_class(p) - t))
                p += 2;
            stride = 2;
            break;
        }
        case MultiplierKind::odd_den_or_nonreal: {
            q = 2;
            while (q < bound)
                q *= 2;
            q += 1;
            p = round_q(r * q);
            break;
        }
        default: {
            mpq_class s = limit_denominator(r, bound);
            q = s.get_den();
            p = s.get_num();
            break;
        }
        }
        int seen = 0;
        for (int k = 0;; ++k) {
            mpq_class c(p + stride * shift(k), q);
            c.canonicalize();
            GR x(c);
            if (!contains(x))
                continue;
            if (seen++ == attempt)
                return x;
        }
    }

private:
    // 0, 1, -1, 2, -2, ...
    static long shift(int k) { return k % 2 == 1 ? (k + 1) / 2 : -(k / 2); }

    static mpz_class round_q(const mpq_class& t)
    {
        mpz_class out;
        mpq_class h = t + mpq_class(1, 2);
        mpz_fdiv_q(out.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
        return out;
    }

    // floor((t - 1) / 2)
    static mpz_class floor_half(const mpq_class& t)
    {
        mpz_class out;
        mpq_class h = (t - 1) / 2;
        mpz_fdiv_q(out.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
        return out;
    }
};

// Per-period target sets with a fallback for unlisted periods.
struct MultiplierPlan {
    MultiplierSet fallback;
    std::map<int, MultiplierSet> per_period;

    const MultiplierSet& for_period(int p) const
    {
        auto it = per_period.find(p);
        return it == per_period.end() ? fallback : it->second;
    }
};

} // namespace edyn
