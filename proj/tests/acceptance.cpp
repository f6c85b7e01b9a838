// One pass/fail line per acceptance criterion. Tolerances and limits are fixed here.
#include <edyn/interp_check.hpp>
#include <edyn/quadlike.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace edyn;

namespace {

constexpr int constructor_instances = 1000;
constexpr int constructor_pinned = 6;
constexpr int constructor_den = 20;
constexpr double constructor_seconds = 30;

constexpr int boundary_samples = 4096;
constexpr double f0_outer_bound = 7;
constexpr double f0_max_expected = 5.431;
constexpr double f0_max_tol = 1e-3;
constexpr double min_margin = 0.1;
constexpr double inclusion_seconds = 10;

constexpr double sup_factor_expected = 0.94050;
constexpr double sup_factor_tol = 1e-4;
constexpr int random_perturbations = 20;

constexpr int max_period = 8;
constexpr double real_line_tol = 1e-10;
constexpr double orbit_seconds = 60;

constexpr double drive_epsilon = 0.5;
constexpr int drive_stages = 2;
constexpr double drive_seconds = 600;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome constructors()
{
    auto t0 = Clock::now();
    auto tallies = constructor_suite(constructor_instances, constructor_pinned, constructor_den);
    const double secs = seconds_since(t0);
    bool ok = tallies.size() == 6 && secs < constructor_seconds;
    std::ostringstream d;
    for (const auto& t : tallies) {
        ok = ok && t.ok() && t.instances == constructor_instances;
        d << to_string(t.kind) << " deg<=" << t.max_degree << "/" << degree_bound(t.kind, t.max_size) << " ";
    }
    d << "in " << secs << " s";
    return {ok, d.str()};
}

Outcome koebe()
{
    KoebeBounds k = koebe_bounds();
    bool ok = k.r == mpq_class(81, 200) && k.big_r == mpq_class(81, 128) && k.s == mpq_class(162, 169) && k.ok();
    return {ok, "r=" + k.r.get_str() + " R=" + k.big_r.get_str() + " s=" + k.s.get_str()};
}

Outcome inclusions()
{
    auto t0 = Clock::now();
    InclusionReport r = certify_f0_inclusions(boundary_samples);
    const double secs = seconds_since(t0);
    bool ok = r.max_modulus <= f0_outer_bound && std::abs(r.max_modulus - f0_max_expected) < f0_max_tol &&
              r.inner.targets == 100 && r.inner.matched == 100 && r.outer.targets == 100 && r.outer.matched == 100 &&
              r.inner.margin > min_margin && r.outer.margin > min_margin && secs < inclusion_seconds;
    std::ostringstream d;
    d << "max=" << r.max_modulus << " winding2 " << r.inner.matched << "+" << r.outer.matched << "/200 margins "
      << r.inner.margin << "," << r.outer.margin << " in " << secs << " s";
    return {ok, d.str()};
}

Outcome sup_bound()
{
    const double factor = perturbation_sup_factor();
    bool ok = std::abs(factor - sup_factor_expected) < sup_factor_tol && factor < 1;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int t = 0; t < random_perturbations; ++t) {
        // even g with |g^(2j)(0)| < 1/4, so that |g| < cosh(2) / 4 on the closed 2-disk
        std::vector<GR> co;
        mpz_class fact = 1;
        for (int k = 0; k <= 24; ++k) {
            if (k)
                fact *= k;
            long num = k % 2 ? 0 : static_cast<long>(std::floor(u(rng) * 1e6));
            co.push_back(GR(mpq_class(num, 4000001L) / mpq_class(fact)));
        }
        ExactPoly g(co);
        ok = ok && banach_norm(taylor_model(g)) < 0.25;
        auto gd = g.cast<Cd>();
        // polar grid over the closed disk, boundary included
        for (int r = 1; r <= 8; ++r)
            for (int k = 0; k < boundary_samples / 8; ++k) {
                Cd z = polar(2.0 * r / 8, 2 * pi_value<double>() * k / (boundary_samples / 8));
                worst = std::max(worst, abs(gd.eval(z)));
            }
    }
    ok = ok && worst < 1;
    std::ostringstream d;
    d << "cosh(2)/4=" << factor << " sampled sup=" << worst;
    return {ok, d.str()};
}

Outcome symbolic()
{
    PrecisionScope prec(128);
    auto t0 = Clock::now();
    const EntireMap f = make_f0();
    auto cs = enumerate_orbits(f, max_period);
    bool ok = true;
    std::vector<int> per(max_period + 1);
    for (const auto& c : cs)
        ++per[c.cycle.period];
    for (int p = 1; p <= max_period; ++p) {
        int total = 0;
        for (int d = 1; d <= p; ++d)
            if (p % d == 0)
                total += d * per[d];
        ok = ok && total == (1 << p);
    }
    SamePeriodicReport r = check_same_periodic(f, max_period, real_line_tol);
    const double secs = seconds_since(t0);
    double worst = 0;
    for (const auto& p : r.periods)
        worst = std::max(worst, p.max_distance);
    ok = ok && r.ok() && r.all_real && r.inside && per[1] == 2 && per[2] == 1 && per[3] == 2 && secs < orbit_seconds;
    std::ostringstream d;
    d << "cycles by period";
    for (int p = 1; p <= max_period; ++p)
        d << " " << per[p];
    d << ", max real-line gap " << worst << " in " << secs << " s";
    return {ok, d.str()};
}

// Every certified cycle checked again by exact evaluation of the certificate's map.
bool exact_cycles(const StageCertificate& c, const MultiplierPlan& plan)
{
    ExactView f(map_from_json(c.map));
    for (const auto& cyc : c.cycles) {
        if (!cyc.fully_exact())
            return false;
        GR mult(1);
        const std::size_t n = cyc.exact.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (f(*cyc.exact[k]) != *cyc.exact[(k + 1) % n])
                return false;
            mult *= f.deriv(*cyc.exact[k]);
        }
        if (mult != *cyc.exact_multiplier || mult == GR(1) || !plan.for_period(cyc.period).contains(mult))
            return false;
    }
    return true;
}

Outcome driver()
{
    auto t0 = Clock::now();
    DriverOptions o;
    o.epsilon = drive_epsilon;
    o.stages = drive_stages;
    const ExactPoly base({GR(mpq_class(-3)), GR(0), GR(mpq_class(2))});
    bool ok = true;
    std::ostringstream d;
    for (Symmetry sym : {Symmetry::general, Symmetry::real_even}) {
        EntireMap f = EntireMap::polynomial(base, sym);
        DriveResult r = sym == Symmetry::general ? drive_plain(f, o) : drive_real_even(f, o);
        const std::size_t want_conditions = sym == Symmetry::general ? 5 : 6;
        ok = ok && !r.error && static_cast<int>(r.certificates.size()) == drive_stages;
        std::size_t cycles = 0;
        for (const auto& c : r.certificates) {
            ok = ok && c.ok() && c.conditions.size() == want_conditions && exact_cycles(c, o.plan);
            cycles += c.cycles.size();
        }
        d << to_string(sym) << ": " << r.certificates.size() << " stages, " << cycles << " exact cycles; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < drive_seconds;
    d << "in " << secs << " s";
    return {ok, d.str()};
}

Outcome obstruction()
{
    TheoremOptions o;
    o.stages = 1;
    TheoremReport r = run_theorem_quadlike(o);
    const auto& m = r.obstruction.data;
    bool ok = r.ok() && m.exact() && parity(*m.exact_plus) == ParityClass::Q0 &&
              parity(*m.exact_minus) == ParityClass::Q0 && parity(*m.exact_two) == ParityClass::Q1 &&
              *m.exact_plus * *m.exact_minus != *m.exact_two &&
              r.obstruction.verdict == Verdict::not_affine_conjugate;
    ObstructionReport control = affine_obstruction(affine_model(mpq_class(3), mpq_class(-2)));
    ok = ok && control.verdict == Verdict::inconclusive;
    std::ostringstream d;
    if (m.exact())
        d << "lambda+=" << m.exact_plus->str() << " lambda-=" << m.exact_minus->str() << " lambda2 in "
          << to_string(parity(*m.exact_two)) << "; ";
    d << to_string(r.obstruction.verdict) << ", control " << to_string(control.verdict);
    return {ok, d.str()};
}

// Runs each property suite binary passed on the command line.
Outcome invariants(const std::vector<std::string>& suites)
{
    bool ok = !suites.empty();
    std::ostringstream d;
    for (const auto& s : suites) {
        const std::string cmd = "\"" + s + "\" --gtest_brief=1 > /dev/null 2>&1";
        const bool pass = std::system(cmd.c_str()) == 0;
        ok = ok && pass;
        d << s.substr(s.find_last_of('/') + 1) << (pass ? " ok " : " FAILED ");
    }
    return {ok, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> suites(argv + 1, argv + argc);
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"constructor exactness", constructors},
        {"Koebe constants", koebe},
        {"f0 inclusions", inclusions},
        {"perturbation sup bound", sup_bound},
        {"symbolic dynamics", symbolic},
        {"driver soundness", driver},
        {"obstruction verdict", obstruction},
        {"invariant suites", [&] { return invariants(suites); }},
    };
    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << k + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << ": "
                  << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
