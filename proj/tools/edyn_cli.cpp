#include <edyn/interp_check.hpp>
#include <edyn/quadlike.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace edyn;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string mode;
    int stages = 2;
    std::optional<double> epsilon; // mode default when unset
    long denom_bound = 16;
    unsigned precision = 128;
    double tol = 1e-10;
    int samples = 4096;
    int instances = 1000;
    int period = 8;
    std::string out = "out";
};

const char* const modes[] = {"interp-check",     "drive-plain",     "drive-real-even",
                             "quadlike-certify", "quadlike-orbits", "theorem-quadlike"};

double default_epsilon(const std::string& mode) { return mode == "theorem-quadlike" ? 0.25 : 0.5; }

// Empty when valid, otherwise a message naming the field.
std::string validate(const RunConfig& c)
{
    if (std::find(std::begin(modes), std::end(modes), c.mode) == std::end(modes))
        return "mode: unknown mode '" + c.mode + "'";
    if (c.stages < 0)
        return "stages: must be >= 0";
    if (c.epsilon && !(*c.epsilon > 0 && *c.epsilon <= 1))
        return "epsilon: must lie in (0, 1]";
    if (c.denom_bound < 1)
        return "denom-bound: must be positive";
    if (c.precision < 64)
        return "precision: must be >= 64";
    if (!(c.tol > 0))
        return "tol: must be positive";
    if (c.samples < 16)
        return "samples: must be >= 16";
    if (c.instances < 1)
        return "instances: must be positive";
    if (c.period < 1 || c.period > 12)
        return "period: must lie in [1, 12]";
    if (c.out.empty())
        return "out: must be a directory path";
    return {};
}

json config_json(const RunConfig& c)
{
    return {{"mode", c.mode},           {"stages", c.stages},       {"epsilon", c.epsilon.value_or(default_epsilon(c.mode))},
            {"denom_bound", c.denom_bound}, {"precision", c.precision}, {"tol", c.tol},
            {"samples", c.samples},     {"instances", c.instances}, {"period", c.period}};
}

class Writer {
public:
    explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    void text(const std::string& name, const std::string& body)
    {
        std::ofstream f(dir_ / name);
        if (!f)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << body;
    }
    void write(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

private:
    std::filesystem::path dir_;
};

struct Summary {
    json items = json::array();

    void add(const std::string& name, bool pass, const std::string& source)
    {
        items.push_back({{"item", name}, {"pass", pass}, {"source", source}});
    }
    bool pass() const
    {
        for (const auto& i : items)
            if (!i["pass"].get<bool>())
                return false;
        return !items.empty();
    }
};

void interp_check(const RunConfig& c, Writer& w, Summary& s)
{
    json tallies = json::array();
    for (const auto& t : constructor_suite(c.instances)) {
        tallies.push_back(to_json(t));
        s.add(std::string("constructor ") + to_string(t.kind), t.ok(), "constructors.json");
    }
    w.write("constructors.json", {{"schema", 1}, {"tallies", tallies}});
}

DriverOptions driver_options(const RunConfig& c)
{
    DriverOptions d;
    d.epsilon = c.epsilon.value_or(default_epsilon(c.mode));
    d.stages = c.stages;
    d.adjust.denom_bound = c.denom_bound;
    d.adjust.min_bits = c.precision;
    return d;
}

void drive(const RunConfig& c, Writer& w, Summary& s)
{
    // base map 2z^2 - 3
    const EntireMap base = EntireMap::polynomial(
        ExactPoly({GR(mpq_class(-3)), GR(0), GR(mpq_class(2))}),
        c.mode == "drive-real-even" ? Symmetry::real_even : Symmetry::general);
    const DriverOptions d = driver_options(c);
    DriveResult r = c.mode == "drive-plain" ? drive_plain(base, d) : drive_real_even(base, d);
    for (const auto& cert : r.certificates) {
        const std::string name = "stage_" + std::to_string(cert.stage) + ".json";
        w.write(name, to_json(cert));
        s.add("stage " + std::to_string(cert.stage) + " certificate", cert.ok(), name);
    }
    json res = {{"schema", 1}, {"stages_certified", r.certificates.size()}, {"map", to_json(r.map)}};
    if (r.error)
        res["error"] = *r.error;
    w.write("result.json", res);
    s.add("all stages ran", !r.error && static_cast<int>(r.certificates.size()) == c.stages, "result.json");
}

void quadlike_certify(const RunConfig& c, Writer& w, Summary& s)
{
    const KoebeBounds k = koebe_bounds();
    const InclusionReport inc = certify_f0_inclusions(c.samples);
    const ConvexReport cv = certify_convex(make_f0());
    const QuadLikeCert ql = certify_quadratic_like(make_f0(), c.samples);
    w.write("quadlike.json", {{"schema", 1},
                              {"koebe", {{"r", k.r.get_str()}, {"R", k.big_r.get_str()}, {"s", k.s.get_str()}, {"ok", k.ok()}}},
                              {"sup_factor", perturbation_sup_factor()},
                              {"inclusions", to_json(inc)},
                              {"convex", to_json(cv)},
                              {"quadratic_like", to_json(ql)}});
    s.add("koebe constants", k.ok(), "quadlike.json");
    s.add("sup factor below 1", perturbation_sup_factor() < 1, "quadlike.json");
    s.add("f0 inclusions", inc.ok(), "quadlike.json");
    s.add("f0 convex", cv.convex, "quadlike.json");
    s.add("f0 quadratic-like", ql.ok, "quadlike.json");
}

void quadlike_orbits(const RunConfig& c, Writer& w, Summary& s)
{
    const EntireMap f = make_f0();
    auto orbits = enumerate_orbits(f, c.period);
    w.text("orbits.csv", orbits_csv(orbits));
    const SamePeriodicReport same = check_same_periodic(f, c.period, c.tol);
    w.write("same_periodic.json", {{"schema", 1}, {"report", to_json(same)}});
    for (const auto& p : same.periods)
        s.add("period " + std::to_string(p.period) + " matches the real line", p.matched, "same_periodic.json");
    s.add("coded points real in (-1, 1)", same.all_real && same.inside, "same_periodic.json");
}

void theorem(const RunConfig& c, Writer& w, Summary& s)
{
    TheoremOptions o;
    o.stages = c.stages;
    o.epsilon = c.epsilon.value_or(default_epsilon(c.mode));
    o.precision = c.precision;
    o.samples = c.samples;
    o.max_period = std::min(c.period, 8);
    TheoremReport r = run_theorem_quadlike(o);
    json j = to_json(r);
    j["orbit_table"] = "orbits.csv";
    w.write("theorem.json", j);
    w.text("orbits.csv", orbits_csv(r.orbits));
    for (const auto& cert : r.certificates)
        s.add("stage " + std::to_string(cert.stage) + " certificate", cert.ok(), "theorem.json");
    s.add("driver finished", !r.driver_error, "theorem.json");
    s.add("distance below 1/4", r.distance < 0.25, "theorem.json");
    s.add("convex", r.convex.convex, "theorem.json");
    s.add("quadratic-like", r.quadlike.ok, "theorem.json");
    s.add("same periodic points", r.same.ok(), "theorem.json");
    s.add("not affine conjugate", r.obstruction.verdict == Verdict::not_affine_conjugate, "theorem.json");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entire maps with prescribed periodic data: drivers and quadratic-like certification"};
    RunConfig c;
    double eps = 0;
    app.set_config("--config", "", "TOML or INI file with the same keys; flags win");
    app.add_option("--mode", c.mode, "interp-check | drive-plain | drive-real-even | quadlike-certify | "
                                      "quadlike-orbits | theorem-quadlike")
        ->required();
    app.add_option("--stages", c.stages, "driver stages (count)")->capture_default_str();
    auto* eps_opt = app.add_option("--epsilon", eps, "total budget in (0, 1]; default 0.5, 1/4 for theorem-quadlike");
    app.add_option("--denom-bound", c.denom_bound, "first denominator bound for snapping")->capture_default_str();
    app.add_option("--precision", c.precision, "MPFR working precision in bits (>= 64)")->capture_default_str();
    app.add_option("--tol", c.tol, "match tolerance for real-line comparison (absolute)")->capture_default_str();
    app.add_option("--samples", c.samples, "boundary samples per circle")->capture_default_str();
    app.add_option("--instances", c.instances, "random instances per constructor")->capture_default_str();
    app.add_option("--period", c.period, "largest orbit period")->capture_default_str();
    app.add_option("--out", c.out, "output directory")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (eps_opt->count() > 0)
        c.epsilon = eps;
    if (std::string err = validate(c); !err.empty()) {
        std::cerr << "invalid config: " << err << "\n";
        return 2;
    }
    try {
        PrecisionScope prec(c.precision);
        Writer w(c.out);
        Summary s;
        if (c.mode == "interp-check")
            interp_check(c, w, s);
        else if (c.mode == "drive-plain" || c.mode == "drive-real-even")
            drive(c, w, s);
        else if (c.mode == "quadlike-certify")
            quadlike_certify(c, w, s);
        else if (c.mode == "quadlike-orbits")
            quadlike_orbits(c, w, s);
        else
            theorem(c, w, s);
        w.write("summary.json", {{"schema", 1}, {"config", config_json(c)}, {"items", s.items}, {"pass", s.pass()}});
        for (const auto& i : s.items)
            std::cout << (i["pass"].get<bool>() ? "PASS " : "FAIL ") << i["item"].get<std::string>() << "\n";
        return s.pass() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
