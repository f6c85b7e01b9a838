#pragma once

#include "bumps.hpp"
#include "complex.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "poly.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace edyn {

enum class Symmetry { general, real_even };

inline const char* to_string(Symmetry s) { return s == Symmetry::general ? "general" : "real_even"; }

// a cosh(z) + b with real rational a, b.
struct CoshAffine {
    mpq_class a;
    mpq_class b;
};

struct Perturbation {
    std::variant<ExactPoly, FloatPoly> poly;
    std::string provenance;

    bool exact() const { return std::holds_alternative<ExactPoly>(poly); }
    FloatPoly as_float() const
    {
        if (exact())
            return std::get<ExactPoly>(poly).cast<Ch>();
        return std::get<FloatPoly>(poly);
    }
};

// What a pushed perturbation does to the exactly known values of the map.
// Entries at points outside the pinned sets are dropped, then the new entries
// are recorded.
struct Effect {
    PointSet value_pinned;
    PointSet deriv_pinned;
    std::vector<std::pair<GR, GR>> new_values;
    std::vector<std::pair<GR, GR>> new_derivs;
};

class EntireMap {
public:
    static EntireMap polynomial(ExactPoly p, Symmetry sym = Symmetry::general)
    {
        EntireMap f;
        f.base_ = std::move(p);
        f.sym_ = sym;
        if (sym == Symmetry::real_even && !is_real_even(std::get<ExactPoly>(f.base_)))
            throw PreconditionError("EntireMap::polynomial", "base is not real-even");
        return f;
    }

    static EntireMap cosh_affine(mpq_class a, mpq_class b)
    {
        EntireMap f;
        f.values_[GR(0)] = GR(mpq_class(a + b));
        f.derivs_[GR(0)] = GR(0);
        f.base_ = CoshAffine{std::move(a), std::move(b)};
        f.sym_ = Symmetry::real_even;
        return f;
    }

    const std::variant<ExactPoly, CoshAffine>& base() const { return base_; }
    bool has_poly_base() const { return std::holds_alternative<ExactPoly>(base_); }
    const std::vector<Perturbation>& perturbations() const { return stack_; }
    Symmetry symmetry() const { return sym_; }

    bool exact() const
    {
        if (!has_poly_base())
            return false;
        return std::all_of(stack_.begin(), stack_.end(), [](const Perturbation& p) { return p.exact(); });
    }

    void push(Perturbation p, const Effect& effect)
    {
        if (sym_ == Symmetry::real_even) {
            bool ok = p.exact() ? is_real_even(std::get<ExactPoly>(p.poly)) : is_real_even(std::get<FloatPoly>(p.poly));
            if (!ok)
                throw PreconditionError("EntireMap::push", "perturbation breaks real-even symmetry");
        }
        stack_.push_back(std::move(p));
        std::erase_if(values_, [&](const auto& kv) { return !contains(effect.value_pinned, kv.first); });
        std::erase_if(derivs_, [&](const auto& kv) { return !contains(effect.deriv_pinned, kv.first); });
        for (const auto& [x, v] : effect.new_values)
            values_[x] = v;
        for (const auto& [x, d] : effect.new_derivs)
            derivs_[x] = d;
    }

    // Exact value records; for exact maps these agree with exact evaluation.
    std::optional<GR> known_value(const GR& x) const
    {
        auto it = values_.find(x);
        if (it == values_.end())
            return std::nullopt;
        return it->second;
    }
    std::optional<GR> known_deriv(const GR& x) const
    {
        auto it = derivs_.find(x);
        if (it == derivs_.end())
            return std::nullopt;
        return it->second;
    }
    const std::map<GR, GR>& known_values() const { return values_; }
    const std::map<GR, GR>& known_derivs() const { return derivs_; }
    void record_value(const GR& x, const GR& v) { values_[x] = v; }
    void record_deriv(const GR& x, const GR& d) { derivs_[x] = d; }

    // base polynomial plus every perturbation; exact maps only
    ExactPoly combined_exact() const
    {
        if (!exact())
            throw ModeUnsupported("EntireMap::combined_exact", "map has a transcendental base or float perturbations");
        ExactPoly out = std::get<ExactPoly>(base_);
        for (const auto& p : stack_)
            out += std::get<ExactPoly>(p.poly);
        return out;
    }

    // polynomial part (base polynomial if any plus the stack) in float
    template <class T>
    Poly<Complex<T>> polynomial_part() const
    {
        Poly<Complex<T>> out;
        if (has_poly_base())
            out = std::get<ExactPoly>(base_).cast<Complex<T>>();
        for (const auto& p : stack_) {
            if (p.exact())
                out += std::get<ExactPoly>(p.poly).cast<Complex<T>>();
            else
                out += std::get<FloatPoly>(p.poly).cast<Complex<T>>();
        }
        return out;
    }

    // Sum of the perturbations pushed after position `from`.
    std::variant<ExactPoly, FloatPoly> stack_delta(std::size_t from) const
    {
        bool all_exact = true;
        for (std::size_t k = from; k < stack_.size(); ++k)
            all_exact = all_exact && stack_[k].exact();
        if (all_exact) {
            ExactPoly out;
            for (std::size_t k = from; k < stack_.size(); ++k)
                out += std::get<ExactPoly>(stack_[k].poly);
            return out;
        }
        FloatPoly out;
        for (std::size_t k = from; k < stack_.size(); ++k)
            out += stack_[k].as_float();
        return out;
    }

private:
    std::variant<ExactPoly, CoshAffine> base_;
    std::vector<Perturbation> stack_;
    Symmetry sym_ = Symmetry::general;
    std::map<GR, GR> values_;
    std::map<GR, GR> derivs_;
};

// Exact evaluation view of a map with polynomial base and exact stack.
class ExactView {
public:
    explicit ExactView(const EntireMap& f) : p_(f.combined_exact()), dp_(p_.derivative()) {}
    GR operator()(const GR& z) const { return p_.eval(z); }
    GR deriv(const GR& z) const { return dp_.eval(z); }
    // order of vanishing of f - f(z) at z, capped at the degree
    int local_degree(const GR& z) const
    {
        Poly<GR> d = dp_;
        int k = 1;
        while (!d.is_zero()) {
            if (!d.eval(z).is_zero())
                return k;
            d = d.derivative();
            ++k;
        }
        return k;
    }
    const ExactPoly& poly() const { return p_; }

private:
    ExactPoly p_;
    ExactPoly dp_;
};

inline GR eval_exact(const EntireMap& f, const GR& z) { return ExactView(f)(z); }
inline GR deriv_exact(const EntireMap& f, const GR& z) { return ExactView(f).deriv(z); }

// Float evaluation view; T is double or Hp (at the precision current when built).
template <class T>
class NumericMap {
public:
    using C = Complex<T>;

    explicit NumericMap(const EntireMap& f) : poly_(f.polynomial_part<T>())
    {
        if (const auto* c = std::get_if<CoshAffine>(&f.base())) {
            cosh_ = true;
            a_ = RealOps<T>::from_q(c->a);
            b_ = RealOps<T>::from_q(c->b);
        }
        dpoly_ = poly_.derivative();
    }

    C operator()(const C& z) const
    {
        C v = poly_.eval(z);
        if (cosh_)
            v += cosh(z) * a_ + C(b_);
        return v;
    }

    C deriv(const C& z) const
    {
        C d = dpoly_.eval(z);
        if (cosh_)
            d += sinh(z) * a_;
        return d;
    }

    void eval_d(const C& z, C& v, C& d) const
    {
        v = poly_.eval(z);
        d = dpoly_.eval(z);
        if (cosh_) {
            C ch = cosh(z), sh = sinh(z);
            v += ch * a_ + C(b_);
            d += sh * a_;
        }
    }

    // k-th derivative
    C derivative(const C& z, int k) const
    {
        if (k == 0)
            return (*this)(z);
        Poly<C> p = dpoly_;
        for (int j = 1; j < k; ++j)
            p = p.derivative();
        C v = p.eval(z);
        if (cosh_)
            v += (k % 2 == 0 ? cosh(z) : sinh(z)) * a_;
        return v;
    }

    // q-th iterate and its derivative
    void iterate(const C& z, int q, C& v, C& d) const
    {
        v = z;
        d = C(T(1));
        for (int k = 0; k < q; ++k) {
            C fv, fd;
            eval_d(v, fv, fd);
            d *= fd;
            v = fv;
        }
    }

    bool has_cosh() const { return cosh_; }
    const T& cosh_coeff() const { return a_; }
    const T& cosh_shift() const { return b_; }
    const Poly<C>& poly() const { return poly_; }

private:
    Poly<C> poly_;
    Poly<C> dpoly_;
    bool cosh_ = false;
    T a_{0};
    T b_{0};
};

template <class T>
Complex<T> eval(const EntireMap& f, const Complex<T>& z) { return NumericMap<T>(f)(z); }

template <class T>
Complex<T> deriv(const EntireMap& f, const Complex<T>& z) { return NumericMap<T>(f).deriv(z); }

// c_cosh * cosh(z) + p(z), the Taylor data used by norms and distances.
struct TaylorModel {
    Hp cosh_coeff{0};
    Poly<Ch> poly;
};

inline TaylorModel taylor_model(const EntireMap& f)
{
    TaylorModel t;
    t.poly = f.polynomial_part<Hp>();
    if (const auto* c = std::get_if<CoshAffine>(&f.base())) {
        t.cosh_coeff = RealOps<Hp>::from_q(c->a);
        t.poly += Poly<Ch>::constant(Ch(RealOps<Hp>::from_q(c->b)));
    }
    return t;
}

inline TaylorModel difference(const TaylorModel& x, const TaylorModel& y)
{
    return TaylorModel{x.cosh_coeff - y.cosh_coeff, x.poly - y.poly};
}

template <class C>
TaylorModel taylor_model(const Poly<C>& p)
{
    TaylorModel t;
    t.poly = p.template cast<Ch>();
    return t;
}

inline TaylorModel taylor_model(const std::variant<ExactPoly, FloatPoly>& p)
{
    return std::visit([](const auto& q) { return taylor_model(q); }, p);
}

inline double round_up(double x) { return x * (1 + 1e-12) + 1e-300; }

// sup_j |f^(j)(0)|
inline double banach_norm(const TaylorModel& t)
{
    Hp best = abs(t.cosh_coeff);
    Hp fact = 1;
    const auto& c = t.poly.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k > 0)
            fact *= Hp(static_cast<long>(k));
        Ch v = c[k] * fact;
        if (k % 2 == 0)
            v += Ch(t.cosh_coeff);
        Hp m = abs(v);
        if (m > best)
            best = m;
    }
    return round_up(best.convert_to<double>());
}

inline double banach_norm(const EntireMap& f)
{
    PrecisionScope prec(std::max(128u, working_bits()));
    return banach_norm(taylor_model(f));
}

inline double growth_bound(const EntireMap& f, const Cd& z)
{
    return banach_norm(f) * std::cosh(abs(z));
}

// max |h| over `samples` equispaced points of |z| = j
template <class Eval>
double circle_max(const Eval& h, double radius, int samples)
{
    if (radius == 0)
        return abs(to_double(h(Cd(0, 0))));
    double best = 0;
    for (int k = 0; k < samples; ++k) {
        double t = 2 * pi_value<double>() * k / samples;
        best = std::max(best, abs(to_double(h(polar(radius, t)))));
    }
    return best;
}

inline double seminorm(const EntireMap& f, int j, int samples)
{
    NumericMap<double> g(f);
    return circle_max(g, j, samples);
}

// Rigorous bound for sup_{|z|<=r} |t(z)|: |c_cosh| cosh(r) + sum |c_k| r^k.
inline double sup_upper(const TaylorModel& t, double r)
{
    double acc = std::abs(t.cosh_coeff.convert_to<double>()) * std::cosh(r);
    double pw = 1;
    for (const auto& c : t.poly.coeffs()) {
        acc += abs(to_double(c)) * pw;
        pw *= r;
    }
    return round_up(acc);
}

struct DistanceBracket {
    double lower = 0;
    double upper = 0;
};

// Frechet distance with seminorms sup_{|z|<=j}; sampled lower bound, and an
// upper bound from the Taylor data (rigorous up to rounding) plus the tail.
inline DistanceBracket frechet_dist(const EntireMap& f, const EntireMap& g, int j_max, int samples)
{
    NumericMap<double> nf(f), ng(g);
    auto h = [&](const Cd& z) { return nf(z) - ng(z); };
    TaylorModel t = difference(taylor_model(f), taylor_model(g));
    DistanceBracket out;
    double w = 1;
    for (int j = 0; j <= j_max; ++j) {
        double s = circle_max(h, j, samples);
        double u = std::max(s, sup_upper(t, j));
        out.lower += w * std::min(1.0, s);
        out.upper += w * std::min(1.0, u);
        w /= 2;
    }
    out.upper = round_up(out.upper + std::ldexp(1.0, -j_max));
    return out;
}

// Budget metric used by the drivers; applied to perturbation differences.
struct Metric {
    enum class Kind { frechet, banach } kind = Kind::frechet;
    int j_max = 40;

    double upper(const TaylorModel& t) const
    {
        if (kind == Kind::banach)
            return banach_norm(t);
        double acc = 0, w = 1;
        for (int j = 0; j <= j_max; ++j) {
            acc += w * std::min(1.0, sup_upper(t, j));
            w /= 2;
        }
        return round_up(acc + std::ldexp(1.0, -j_max));
    }

    const char* name() const { return kind == Kind::banach ? "banach" : "frechet"; }
};

inline bool is_affine(const EntireMap& f)
{
    if (const auto* c = std::get_if<CoshAffine>(&f.base()))
        if (sgn(c->a) != 0)
            return false;
    return f.polynomial_part<Hp>().degree() <= 1;
}

inline bool is_constant(const EntireMap& f)
{
    if (const auto* c = std::get_if<CoshAffine>(&f.base()))
        if (sgn(c->a) != 0)
            return false;
    return f.polynomial_part<Hp>().degree() <= 0;
}

inline bool is_real_even(const EntireMap& f)
{
    if (f.has_poly_base() && !is_real_even(std::get<ExactPoly>(f.base())))
        return false;
    for (const auto& p : f.perturbations()) {
        bool ok = p.exact() ? is_real_even(std::get<ExactPoly>(p.poly)) : is_real_even(std::get<FloatPoly>(p.poly));
        if (!ok)
            return false;
    }
    return true;
}

// ---- serialization ----

inline nlohmann::json to_json(const ExactPoly& p)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : p.coeffs())
        out.push_back(c.str());
    return out;
}

inline nlohmann::json to_json(const FloatPoly& p)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : p.coeffs())
        out.push_back({RealOps<Hp>::to_q(c.re).get_str(), RealOps<Hp>::to_q(c.im).get_str()});
    return out;
}

inline ExactPoly exact_poly_from_json(const nlohmann::json& j)
{
    std::vector<GR> c;
    for (const auto& s : j)
        c.push_back(GR::parse(s.get<std::string>()));
    return ExactPoly(std::move(c));
}

inline FloatPoly float_poly_from_json(const nlohmann::json& j)
{
    std::vector<Ch> c;
    for (const auto& pair : j)
        c.emplace_back(RealOps<Hp>::from_q(mpq_class(pair[0].get<std::string>())),
                       RealOps<Hp>::from_q(mpq_class(pair[1].get<std::string>())));
    return FloatPoly(std::move(c));
}

inline nlohmann::json to_json(const EntireMap& f)
{
    nlohmann::json j;
    j["schema"] = 1;
    if (const auto* c = std::get_if<CoshAffine>(&f.base()))
        j["base"] = {{"kind", "cosh_affine"}, {"a", c->a.get_str()}, {"b", c->b.get_str()}};
    else
        j["base"] = {{"kind", "poly"}, {"coeffs", to_json(std::get<ExactPoly>(f.base()))}};
    j["symmetry"] = to_string(f.symmetry());
    j["precision_bits"] = working_bits();
    nlohmann::json stack = nlohmann::json::array();
    for (const auto& p : f.perturbations()) {
        nlohmann::json e;
        e["provenance"] = p.provenance;
        e["exact"] = p.exact();
        e["coeffs"] = p.exact() ? to_json(std::get<ExactPoly>(p.poly)) : to_json(std::get<FloatPoly>(p.poly));
        stack.push_back(e);
    }
    j["perturbations"] = stack;
    nlohmann::json vals = nlohmann::json::array(), ders = nlohmann::json::array();
    for (const auto& [x, v] : f.known_values())
        vals.push_back({x.str(), v.str()});
    for (const auto& [x, d] : f.known_derivs())
        ders.push_back({x.str(), d.str()});
    j["exact_values"] = vals;
    j["exact_derivs"] = ders;
    return j;
}

inline EntireMap map_from_json(const nlohmann::json& j)
{
    unsigned bits = j.value("precision_bits", 128u);
    PrecisionScope prec(std::max(bits, working_bits()));
    const auto& base = j.at("base");
    Symmetry sym = j.at("symmetry").get<std::string>() == "real_even" ? Symmetry::real_even : Symmetry::general;
    EntireMap f = base.at("kind").get<std::string>() == "cosh_affine"
                      ? EntireMap::cosh_affine(mpq_class(base.at("a").get<std::string>()),
                                               mpq_class(base.at("b").get<std::string>()))
                      : EntireMap::polynomial(exact_poly_from_json(base.at("coeffs")), sym);
    for (const auto& e : j.at("perturbations")) {
        Perturbation p;
        p.provenance = e.at("provenance").get<std::string>();
        if (e.at("exact").get<bool>())
            p.poly = exact_poly_from_json(e.at("coeffs"));
        else
            p.poly = float_poly_from_json(e.at("coeffs"));
        Effect keep_all;
        f.push(std::move(p), keep_all);
    }
    for (const auto& kv : j.at("exact_values"))
        f.record_value(GR::parse(kv[0].get<std::string>()), GR::parse(kv[1].get<std::string>()));
    for (const auto& kv : j.at("exact_derivs"))
        f.record_deriv(GR::parse(kv[0].get<std::string>()), GR::parse(kv[1].get<std::string>()));
    return f;
}

} // namespace edyn
