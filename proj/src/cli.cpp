#include "elk/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "elk/diff.hpp"
#include "elk/ericksen.hpp"
#include "elk/field_io.hpp"
#include "elk/morrey.hpp"
#include "elk/samples.hpp"
#include "elk/spectral.hpp"

namespace elk::cli {

namespace fs = std::filesystem;
using report::Json;
using report::num;

// ---------------------------------------------------------------- RunConfig

namespace {

struct KeyInfo {
    const char* name;
    const char* help;
    bool flag;
};

const std::vector<KeyInfo>& key_table() {
    static const std::vector<KeyInfo> t{
        {"n", "grid nodes per axis", false},
        {"box", "half box length L (box is [-L,L)^3)", false},
        {"gamma", "Morrey gamma; eta-map takes a:b:step", false},
        {"p", "Morrey p; eta-map takes a:b:step", false},
        {"radii", "radius ladder r1,r2,...", false},
        {"ladder", "radius ladder geometric:<base>", false},
        {"dt", "time step", false},
        {"T", "final time", false},
        {"out", "output directory", false},
        {"dump-spectra", "write spectral intermediates as ELF3", true},
        {"input", "ELF3 input field", false},
        {"director", "ELF3 director field (pressure)", false},
        {"space", "norm: local | weighted | homogeneous", false},
        {"r", "homogeneous Morrey exponent", false},
        {"state", "trivial | appendix-a | directory with u.elf3, v.elf3 [, p.elf3]", false},
        {"R", "cutoff radius (caccioppoli) or bump radius (gen bump)", false},
        {"preset", "initial data preset", false},
        {"amplitude", "preset amplitude (negative: preset default)", false},
        {"snapshot-every", "solve: keep every k-th step as a snapshot", false},
        {"probe-radii", "solve: theta_R radii for local energy probes", false},
        {"freeze-velocity", "solve: pure harmonic map flow", true},
        {"report", "counterexample: residual | liouville", false},
        {"seeds", "size of random batteries", false},
        {"run", "trajectory directory written by solve", false},
        {"span", "local-energy window length", false},
        {"stride", "local-energy window stride", false},
        {"scheme", "spectral | fd4, for states read from a directory", false},
        {"window", "score only nodes with max|x_i| <= window (0: all)", false},
    };
    return t;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v.empty()) return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> number_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ','))
        if (!cell.empty()) out.push_back(to_double(key, cell));
    return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& v) {
    if (key.rfind("tol.", 0) == 0) {
        const std::string name = key.substr(4);
        const double x = to_double(key, v);
        tol.set(name, x);
        tol_overrides[name] = x;
        return;
    }
    if (key == "n") {
        n = to_int(key, v);
        if (n < 16) throw ConfigError("n must be >= 16");
    } else if (key == "box") {
        box = to_double(key, v);
        if (!(*box > 0.0) || !std::isfinite(*box)) throw ConfigError("box must be positive");
    } else if (key == "gamma") {
        gamma = v;
    } else if (key == "p") {
        p = v;
    } else if (key == "radii") {
        radii = v;
    } else if (key == "ladder") {
        ladder = v;
    } else if (key == "dt") {
        dt = to_double(key, v);
    } else if (key == "T") {
        T = to_double(key, v);
    } else if (key == "out") {
        out = v;
    } else if (key == "dump-spectra") {
        dump_spectra = to_bool(key, v);
    } else if (key == "input") {
        input = v;
    } else if (key == "director") {
        director = v;
    } else if (key == "space") {
        if (v != "local" && v != "weighted" && v != "homogeneous")
            throw ConfigError("space must be local, weighted or homogeneous");
        space = v;
    } else if (key == "r") {
        r = to_double(key, v);
    } else if (key == "state") {
        state = v;
    } else if (key == "R") {
        R = to_double(key, v);
    } else if (key == "preset") {
        preset = v;
    } else if (key == "amplitude") {
        amplitude = to_double(key, v);
    } else if (key == "snapshot-every") {
        snapshot_every = to_int(key, v);
    } else if (key == "probe-radii") {
        number_list(key, v);  // syntax check
        probe_radii = v;
    } else if (key == "freeze-velocity") {
        freeze_velocity = to_bool(key, v);
    } else if (key == "report") {
        if (v != "residual" && v != "liouville") throw ConfigError("report must be residual or liouville");
        report = v;
    } else if (key == "seeds") {
        seeds = to_int(key, v);
        if (seeds < 1) throw ConfigError("seeds must be >= 1");
    } else if (key == "run") {
        run = v;
    } else if (key == "span") {
        span = to_double(key, v);
    } else if (key == "stride") {
        stride = to_double(key, v);
    } else if (key == "scheme") {
        if (v != "spectral" && v != "fd4") throw ConfigError("scheme must be spectral or fd4");
        scheme = v;
    } else if (key == "window") {
        window = to_double(key, v);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.emplace_back(k.name);
    for (const auto& t : verify::Tolerances::names()) out.push_back("tol." + t);
    return out;
}

bool RunConfig::is_flag(const std::string& key) {
    for (const auto& k : key_table())
        if (key == k.name) return k.flag;
    return false;
}

Json RunConfig::to_json() const {
    auto opt_str = [](const std::optional<std::string>& s) -> Json { return s ? Json(*s) : Json(nullptr); };
    Json j{{"subcommand", subcommand},
           {"n", n},
           {"box", box ? num(*box) : Json(nullptr)},
           {"gamma", opt_str(gamma)},
           {"p", opt_str(p)},
           {"radii", radii},
           {"ladder", ladder},
           {"dt", num(dt)},
           {"T", num(T)},
           {"out", out},
           {"dump_spectra", dump_spectra},
           {"input", input},
           {"director", director},
           {"space", space},
           {"r", num(r)},
           {"state", state},
           {"R", num(R)},
           {"preset", preset},
           {"amplitude", num(amplitude)},
           {"snapshot_every", snapshot_every},
           {"probe_radii", probe_radii},
           {"freeze_velocity", freeze_velocity},
           {"report", report},
           {"seeds", seeds},
           {"run", run},
           {"span", num(span)},
           {"stride", num(stride)},
           {"scheme", scheme},
           {"window", num(window)},
           {"tolerances", report::to_json(tol)}};
    return j;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// ---------------------------------------------------------------- commands

namespace {

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Ctx {
    RunConfig cfg;
    std::string stamp = utc_timestamp();
    report::Digest digest;
    Json result = Json::object();
    bool holds = true;
    std::vector<std::string> written;

    double box(double fallback) const { return cfg.box.value_or(fallback); }

    double number(const std::optional<std::string>& s, double fallback, const char* key) const {
        if (!s) return fallback;
        const auto v = morrey::parse_range(*s);
        if (v.size() != 1) throw ConfigError(std::string(key) + " expects a single number here");
        return v.front();
    }
    double gamma() const { return number(cfg.gamma, 1.0, "gamma"); }
    double p() const { return number(cfg.p, 3.0, "p"); }

    std::vector<double> radii(const Grid3& g) const {
        const double rmax = 0.9 * g.box_half();
        if (!cfg.radii.empty() && !cfg.ladder.empty()) throw ConfigError("give either --radii or --ladder, not both");
        std::vector<double> r;
        if (!cfg.radii.empty())
            r = morrey::parse_ladder(cfg.radii, rmax);
        else if (!cfg.ladder.empty())
            r = morrey::parse_ladder(cfg.ladder, rmax);
        else
            r = morrey::geometric_ladder(rmax);
        morrey::validate_radii(r, g);
        return r;
    }

    fs::path out_dir(const char* why) const {
        if (cfg.out.empty()) throw ConfigError(std::string(why) + " needs --out <dir>");
        fs::create_directories(cfg.out);
        return cfg.out;
    }

    /// Provenance lines for CSV outputs; the timestamp is on its own line.
    std::string csv_header() const {
        return "# generated: " + stamp + "\n# config: " + cfg.to_json().dump() + "\n# input_digest: " +
               digest.hex() + "\n";
    }

    void write_text(const fs::path& p, const std::string& body) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw ConfigError("cannot write " + p.string());
        os << body;
        written.push_back(p.string());
    }

    void write_csv(const std::string& name, const std::string& body) {
        if (cfg.out.empty()) return;
        write_text(out_dir("csv output") / name, csv_header() + body);
    }

    template <class F>
    void write_elf3(const fs::path& p, const F& f) {
        write_field(p, f);
        written.push_back(p.string());
    }
};

Scheme scheme_of(const std::string& s) { return s == "fd4" ? Scheme::fd4 : Scheme::spectral; }

// -- eta-map

void cmd_eta_map(Ctx& c) {
    const std::string gs = c.cfg.gamma.value_or("0.1:2.9:0.1"), ps = c.cfg.p.value_or("3:10:0.5");
    c.digest.add("gamma=" + gs + ";p=" + ps);
    const auto pts = morrey::eta_region_map(morrey::parse_range(gs), morrey::parse_range(ps));
    std::ostringstream csv;
    morrey::write_eta_csv(csv, pts);
    c.write_csv("eta_map.csv", csv.str());
    std::map<std::string, int> counts;
    Json rows = Json::array();
    for (const auto& pt : pts) {
        ++counts[morrey::to_string(pt.region)];
        rows.push_back({{"gamma", num(pt.gamma)}, {"p", num(pt.p)}, {"eta", num(pt.eta)},
                        {"region", morrey::to_string(pt.region)}});
    }
    Json cj = Json::object();
    for (const auto& [k, v] : counts) cj[k] = v;
    c.result = {{"points", pts.size()},
                {"counts", cj},
                {"anchor", {{"gamma", 1.0}, {"p", 3.0}, {"eta", num(morrey::eta(1.0, 3.0))}}},
                {"rows", rows}};
}

// -- norm / profile

FieldFile read_input(Ctx& c) {
    if (c.cfg.input.empty()) throw ConfigError(c.cfg.subcommand + " needs --input <file.elf3>");
    c.digest.add_file(c.cfg.input);
    return read_field(c.cfg.input);
}

void cmd_norm(Ctx& c) {
    const FieldFile ff = read_input(c);
    const Grid3& g = ff.grid;
    const std::size_t nc = ff.components.size();
    c.result["ncomp"] = nc;
    c.result["space"] = c.cfg.space;
    if (c.cfg.space == "local") {
        const morrey::MorreyParams mp(c.gamma(), c.p());
        const auto radii = c.radii(g);
        morrey::NormResult nr;
        morrey::AnnulusProfile prof;
        if (nc == 1) {
            nr = morrey::local_morrey_norm(ff.scalar(), mp, radii);
            prof = morrey::annulus_profile(ff.scalar(), mp, radii);
        } else if (nc == 3) {
            nr = morrey::local_morrey_norm(ff.vector(), mp, radii);
            prof = morrey::annulus_profile(ff.vector(), mp, radii);
        } else {
            nr = morrey::local_morrey_norm(ff.tensor(), mp, radii);
            prof = morrey::annulus_profile(ff.tensor(), mp, radii);
        }
        c.result["gamma"] = num(mp.gamma());
        c.result["p"] = num(mp.p());
        c.result["eta"] = num(mp.eta());
        c.result["norm"] = report::to_json(nr);
        c.result["decaying"] = prof.decaying();
        c.result["scaled_decaying"] = prof.scaled_decaying();
        c.result["profile"] = report::to_json(prof);
    } else if (c.cfg.space == "weighted") {
        const double gamma = c.gamma(), p = c.p();
        if (nc == 9) throw ConfigError("weighted norm takes scalar or vector fields");
        const auto w = nc == 1 ? morrey::weighted_lebesgue_norm(ff.scalar(), p, gamma)
                               : morrey::weighted_lebesgue_norm(ff.vector(), p, gamma);
        c.result["gamma"] = num(gamma);
        c.result["p"] = num(p);
        c.result["norm"] = report::to_json(w);
    } else {
        const ScalarField mag = nc == 1 ? ff.scalar() : nc == 3 ? morrey::magnitude(ff.vector())
                                                                : morrey::magnitude(ff.tensor());
        const auto h = morrey::homogeneous_morrey_norm(mag, c.p(), c.cfg.r, c.radii(g));
        c.result["p"] = num(c.p());
        c.result["r"] = num(c.cfg.r);
        c.result["norm"] = report::to_json(h);
    }
}

void cmd_profile(Ctx& c) {
    const FieldFile ff = read_input(c);
    const morrey::MorreyParams mp(c.gamma(), c.p());
    const auto radii = c.radii(ff.grid);
    const std::size_t nc = ff.components.size();
    const auto prof = nc == 1   ? morrey::annulus_profile(ff.scalar(), mp, radii)
                      : nc == 3 ? morrey::annulus_profile(ff.vector(), mp, radii)
                                : morrey::annulus_profile(ff.tensor(), mp, radii);
    std::ostringstream csv;
    morrey::write_profile_csv(csv, prof);
    c.write_csv("annulus_profile.csv", csv.str());
    c.result["profile"] = report::to_json(prof);
}

// -- Riesz and pressure

void cmd_riesz_test(Ctx& c) {
    const Grid3 g(c.cfg.n, c.box(4.0));
    const double w = std::numbers::pi / g.box_half();
    const std::vector<std::array<int, 3>> modes{{1, 0, 0}, {0, 2, 0}, {1, 1, 0}, {1, -2, 3}, {3, 1, 2}};
    double single = 0.0;
    Json mrows = Json::array();
    for (const auto& m : modes) {
        const double kx = w * m[0], ky = w * m[1], kz = w * m[2];
        const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
        const auto f = ScalarField::sample(g, [&](double x, double y, double z) { return std::cos(kx * x + ky * y + kz * z); });
        const std::array<double, 3> kv{kx, ky, kz};
        double err = 0.0;
        for (int a = 0; a < 3; ++a) {
            const auto rf = spectral::riesz(f, a);
            g.for_each([&](std::size_t i, double x, double y, double z) {
                err = std::max(err, std::abs(rf[i] + kv[a] / k * std::sin(kx * x + ky * y + kz * z)));
            });
        }
        single = std::max(single, err);
        mrows.push_back({{"mode", {m[0], m[1], m[2]}}, {"error", num(err)}});
    }
    double ident = 0.0;
    Json irows = Json::array();
    for (int s = 0; s < c.cfg.seeds; ++s) {
        samples::TrigBattery bat(static_cast<std::uint64_t>(1000 + s), std::min(6, c.cfg.n / 8));
        const ScalarField f = bat.scalar(g);
        c.digest.add(f);
        const ScalarField sum = spectral::riesz(spectral::riesz(f, 0), 0) + spectral::riesz(spectral::riesz(f, 1), 1) +
                                spectral::riesz(spectral::riesz(f, 2), 2);
        const double err = (sum + f).max_abs();
        ident = std::max(ident, err);
        irows.push_back({{"seed", 1000 + s}, {"error", num(err)}});
        if (s == 0 && c.cfg.dump_spectra) {
            const fs::path d = c.out_dir("--dump-spectra") / "spectra";
            fs::create_directories(d);
            c.write_elf3(d / "riesz_input.elf3", f);
            for (int a = 0; a < 3; ++a) c.write_elf3(d / ("riesz_" + std::to_string(a) + ".elf3"), spectral::riesz(f, a));
        }
    }
    c.result = {{"single_mode", {{"rows", mrows}, {"max_error", num(single)}, {"tolerance", num(c.cfg.tol.riesz)}}},
                {"sum_riesz_squares", {{"rows", irows}, {"max_error", num(ident)},
                                       {"tolerance", num(c.cfg.tol.riesz_identity)}}}};
    c.holds = single <= c.cfg.tol.riesz && ident <= c.cfg.tol.riesz_identity;
}

Json pressure_row(const spectral::PressureResult& pr) {
    return {{"poisson_residual", num(pr.poisson_residual)},
            {"rhs_scale", num(pr.rhs_scale)},
            {"q_max", num(pr.q.max_abs())},
            {"q_mean", num(spectral::mean(pr.q))},
            {"div_u", num(pr.div_u)}};
}

void dump_pressure(Ctx& c, const spectral::PressureResult& pr) {
    const fs::path d = c.out_dir("--dump-spectra") / "spectra";
    fs::create_directories(d);
    c.write_elf3(d / "q.elf3", pr.q);
    c.write_elf3(d / "q_velocity.elf3", pr.q_velocity);
    c.write_elf3(d / "q_director.elf3", pr.q_director);
    c.write_elf3(d / "grad_q.elf3", pr.grad_q);
}

void cmd_pressure(Ctx& c) {
    double worst = 0.0;
    Json rows = Json::array();
    if (!c.cfg.input.empty()) {
        const FieldFile fu = read_input(c);
        const VectorField u = fu.vector();
        VectorField v = ericksen::trivial_state(fu.grid).v;
        if (!c.cfg.director.empty()) {
            c.digest.add_file(c.cfg.director);
            v = read_field(c.cfg.director).vector();
        }
        const auto pr = spectral::pressure_q(u, jacobian(v));
        worst = pr.poisson_residual;
        rows.push_back(pressure_row(pr));
        if (c.cfg.dump_spectra) dump_pressure(c, pr);
    } else {
        const Grid3 g(c.cfg.n, c.box(8.0));
        for (int s = 0; s < c.cfg.seeds; ++s) {
            samples::TrigBattery bat(static_cast<std::uint64_t>(2000 + s));
            const VectorField u = bat.solenoidal(g);
            const VectorField v = bat.unit(g);
            c.digest.add(u);
            c.digest.add(v);
            const auto pr = spectral::pressure_q(u, jacobian(v));
            worst = std::max(worst, pr.poisson_residual);
            Json row = pressure_row(pr);
            row["seed"] = 2000 + s;
            rows.push_back(row);
            if (s == 0 && c.cfg.dump_spectra) dump_pressure(c, pr);
        }
    }
    c.result = {{"rows", rows}, {"max_poisson_residual", num(worst)}, {"tolerance", num(c.cfg.tol.poisson)}};
    c.holds = worst <= c.cfg.tol.poisson;
}

// -- counterexample state

void cmd_counterexample(Ctx& c) {
    const double L = c.box(4.0);
    std::vector<int> ns;
    if (c.cfg.n / 2 >= 16) ns.push_back(c.cfg.n / 2);
    ns.push_back(c.cfg.n);
    Json ladder = Json::array();
    std::vector<double> sampled;
    ericksen::CounterexampleReport last;
    for (int m : ns) {
        const auto cs = ericksen::counterexample_state(Grid3(m, L));
        last = ericksen::check_counterexample(cs);
        sampled.push_back(last.sampled());
        ladder.push_back({{"n", m}, {"window", num(last.window)}, {"sampled", num(last.sampled())}});
    }
    const bool closed_zero = last.closed_momentum == 0.0 && last.closed_director == 0.0 && last.closed_div == 0.0;
    c.result["report"] = report::to_json(last);
    c.result["closed_form_zero"] = closed_zero;
    c.result["ladder"] = ladder;
    if (sampled.size() == 2)
        c.result["decrease_factor"] = num(sampled[1] > 0.0 ? sampled[0] / sampled[1] : INFINITY);
    c.result["tolerance"] = num(c.cfg.tol.residual);
    c.holds = closed_zero && sampled.back() <= c.cfg.tol.residual;

    const Grid3 g(c.cfg.n, L);
    const auto cs = ericksen::counterexample_state(g);
    c.digest.add(cs.state.u);
    c.digest.add(cs.state.p);
    c.digest.add(cs.state.v);
    if (c.cfg.report == "liouville") {
        const auto lv = verify::liouville_check(cs.state, morrey::MorreyParams(c.gamma(), c.p()), c.radii(g), c.cfg.tol,
                                                verify::StateOptions{Scheme::fd4, cs.window});
        c.result["liouville"] = report::to_json(lv);
        c.holds = c.holds && lv.holds();
    }
}

// -- solve

std::vector<double> probe_radii_of(const RunConfig& cfg) { return number_list("probe-radii", cfg.probe_radii); }

ericksen::SolverConfig solver_config(const RunConfig& cfg) {
    ericksen::SolverConfig sc;
    sc.dt = cfg.dt;
    sc.T = cfg.T;
    sc.snapshot_every = cfg.snapshot_every;
    sc.freeze_velocity = cfg.freeze_velocity;
    sc.probe_radii = probe_radii_of(cfg);
    sc.validate();
    return sc;
}

ericksen::Trajectory run_preset(Ctx& c, std::vector<double> probe_radii = {}) {
    if (c.cfg.preset.empty()) throw ConfigError(c.cfg.subcommand + " needs --preset <name>");
    const Grid3 g(c.cfg.n, c.box(std::numbers::pi));
    const auto pr = ericksen::make_preset(c.cfg.preset, g, c.cfg.amplitude);
    c.digest.add(pr.u0);
    c.digest.add(pr.v0);
    auto sc = solver_config(c.cfg);
    if (sc.probe_radii.empty()) sc.probe_radii = std::move(probe_radii);
    return ericksen::evolve(pr.u0, pr.v0, sc);
}

void cmd_solve(Ctx& c) {
    const auto tr = run_preset(c);
    c.result["preset"] = c.cfg.preset;
    c.result["trajectory"] = report::to_json(tr);
    if (!c.cfg.out.empty()) {
        const fs::path d = c.out_dir("solve");
        Json snaps = Json::array();
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
            char base[32];
            std::snprintf(base, sizeof base, "snap_%04zu", i);
            const std::string su = std::string(base) + "_u.elf3", sv = std::string(base) + "_v.elf3";
            c.write_elf3(d / su, tr.snapshots[i].u);
            c.write_elf3(d / sv, tr.snapshots[i].v);
            snaps.push_back({{"t", num(tr.snapshots[i].t)}, {"u", su}, {"v", sv}});
        }
        c.result["snapshots"] = snaps;
        std::ostringstream led, bal;
        tr.ledger.write_csv(led);
        tr.ledger.write_balance_csv(bal);
        c.write_csv("ledger.csv", led.str());
        c.write_csv("ledger_balance.csv", bal.str());
        if (!tr.probes.empty()) {
            std::ostringstream pr;
            report::write_probes_csv(pr, tr.probes);
            c.write_csv("probes.csv", pr.str());
        }
    }
    c.holds = tr.status == ericksen::RunStatus::completed;
}

// -- checks on trajectories

fs::path run_dir(const Ctx& c) {
    const std::string d = c.cfg.run.empty() ? c.cfg.out : c.cfg.run;
    if (d.empty()) throw ConfigError(c.cfg.subcommand + " needs --run <dir> (written by solve) or --preset");
    return d;
}

std::ifstream open_in(Ctx& c, const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw FormatError("cannot read " + p.string());
    c.digest.add_file(p);
    return in;
}

void cmd_check_energy(Ctx& c) {
    ericksen::EnergyLedger led;
    if (!c.cfg.preset.empty() && c.cfg.run.empty()) {
        const auto tr = run_preset(c);
        if (tr.status != ericksen::RunStatus::completed) throw InstabilityError("run stopped: " + tr.message);
        led = tr.ledger;
    } else {
        const fs::path d = run_dir(c);
        auto in = open_in(c, d / "ledger.csv");
        led = ericksen::EnergyLedger::read_csv(in);
        if (fs::exists(d / "ledger_balance.csv")) {
            auto bin = open_in(c, d / "ledger_balance.csv");
            led.read_balance_csv(bin);
        }
    }
    bool coupled = false;
    for (const auto& r : led.rows) coupled = coupled || r.kdv2 > 0.0;
    const double tol = coupled ? c.cfg.tol.energy_coupled : c.cfg.tol.energy;
    const auto rep = verify::global_energy_check(led, tol);
    c.result = report::to_json(rep);
    c.result["coupled"] = coupled;
    c.holds = rep.holds;
}

void cmd_check_local_energy(Ctx& c) {
    std::vector<ericksen::ProbeSeries> probes;
    double dt = 0.0;
    if (!c.cfg.preset.empty() && c.cfg.run.empty()) {
        const auto tr = run_preset(c, {1.5, 2.5});
        if (tr.status != ericksen::RunStatus::completed) throw InstabilityError("run stopped: " + tr.message);
        probes = tr.probes;
        dt = tr.dt;
    } else {
        const fs::path d = run_dir(c);
        if (!fs::exists(d / "probes.csv"))
            throw PreconditionError("trajectory in " + d.string() + " has no probes; rerun solve with --probe-radii");
        auto in = open_in(c, d / "probes.csv");
        probes = report::read_probes_csv(in);
        auto jin = open_in(c, d / "solve.json");
        try {
            dt = Json::parse(jin).at("result").at("trajectory").at("dt").get<double>();
        } catch (const Json::exception& e) {
            throw FormatError(std::string("solve.json: ") + e.what());
        }
    }
    if (probes.empty() || probes.front().samples.size() < 4) throw PreconditionError("too few probe samples");
    const double t0 = probes.front().samples.front().t, t1 = probes.front().samples.back().t;
    const double span = c.cfg.span > 0.0 ? c.cfg.span : std::min(0.1, 0.5 * (t1 - t0));
    const double stride = c.cfg.stride > 0.0 ? c.cfg.stride : 0.5 * span;
    const auto windows = verify::sliding_windows(t0, t1, dt, span, stride);
    const auto rep = verify::local_energy_defect(probes, windows, dt, c.cfg.tol);
    c.result = report::to_json(rep);
    c.holds = rep.holds;
}

// -- checks on stationary states

struct LoadedState {
    ericksen::StationaryState s;
    verify::StateOptions opt;
};

LoadedState load_state(Ctx& c) {
    const std::string& st = c.cfg.state;
    if (st == "trivial") {
        const Grid3 g(c.cfg.n, c.box(4.0));
        LoadedState ls{ericksen::trivial_state(g), {}};
        c.digest.add("trivial");
        c.digest.add(ls.s.v);
        return ls;
    }
    if (st == "appendix-a") {
        const auto cs = ericksen::counterexample_state(Grid3(c.cfg.n, c.box(4.0)));
        c.digest.add(cs.state.u);
        c.digest.add(cs.state.p);
        c.digest.add(cs.state.v);
        return {cs.state, verify::StateOptions{Scheme::fd4, cs.window}};
    }
    const fs::path d = st;
    if (!fs::is_directory(d)) throw ConfigError("state must be trivial, appendix-a or a directory, got '" + st + "'");
    c.digest.add_file(d / "u.elf3");
    c.digest.add_file(d / "v.elf3");
    VectorField u = read_field(d / "u.elf3").vector();
    VectorField v = read_field(d / "v.elf3").vector();
    require_same_grid(u.grid(), v.grid(), "state");
    ScalarField p(u.grid());
    if (fs::exists(d / "p.elf3")) {
        c.digest.add_file(d / "p.elf3");
        p = read_field(d / "p.elf3").scalar();
    } else {
        p = ericksen::reconstructed_pressure(u, v);
    }
    return {{std::move(u), std::move(p), std::move(v)}, verify::StateOptions{scheme_of(c.cfg.scheme), c.cfg.window}};
}

void cmd_check_caccioppoli(Ctx& c) {
    const auto ls = load_state(c);
    const auto rep = verify::caccioppoli_check(ls.s, c.cfg.R, morrey::MorreyParams(c.gamma(), c.p()), c.cfg.tol, ls.opt);
    c.result = report::to_json(rep);
    c.holds = rep.holds;
}

void cmd_check_liouville(Ctx& c) {
    const auto ls = load_state(c);
    const auto lv = verify::liouville_check(ls.s, morrey::MorreyParams(c.gamma(), c.p()), c.radii(ls.s.u.grid()),
                                            c.cfg.tol, ls.opt);
    c.result = report::to_json(lv);
    c.holds = lv.holds();
}

void cmd_check_embedding(Ctx& c) {
    const Grid3 g(c.cfg.n, c.box(16.0));
    const auto fam = verify::embedding_family(g);
    for (const auto& m : fam) c.digest.add(m.f);
    const auto rep = verify::embedding_suite(fam, c.radii(g));
    c.result = report::to_json(rep);
    c.holds = rep.holds;
}

void cmd_check_sobolev(Ctx& c) {
    if (!c.cfg.input.empty()) {
        const FieldFile ff = read_input(c);
        const auto rep = verify::improved_sobolev_check(ff.vector());
        c.result["report"] = report::to_json(rep);
        c.holds = std::isfinite(rep.ratio);
        return;
    }
    const double L = c.box(8.0);
    const auto a = samples::gaussian_vector(Grid3(c.cfg.n, L));
    const auto b = samples::gaussian_vector(Grid3(2 * c.cfg.n, L));
    c.digest.add(a);
    const auto ra = verify::improved_sobolev_check(a);
    const auto rb = verify::improved_sobolev_check(b);
    const double drift = std::abs(rb.ratio - ra.ratio) / ra.ratio;
    c.result["report"] = report::to_json(ra);
    c.result["resampled"] = {{"n", 2 * c.cfg.n}, {"report", report::to_json(rb)}};
    c.result["drift"] = num(drift);
    c.result["tolerance"] = num(c.cfg.tol.sobolev_stability);
    c.holds = std::isfinite(ra.ratio) && drift <= c.cfg.tol.sobolev_stability;
}

// -- gen

void cmd_gen(Ctx& c, const std::string& name) {
    const auto names = samples::sample_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw ConfigError("unknown preset '" + name + "'");
    const fs::path d = c.out_dir("gen");
    Json files = Json::array();
    auto put = [&](const std::string& file, const auto& f) {
        c.write_elf3(d / file, f);
        report::Digest fd;
        fd.add_file(d / file);
        c.digest.add(f);
        files.push_back({{"file", file}, {"digest", fd.hex()}});
    };
    if (name == "bump") {
        put("bump.elf3", samples::radial_bump(Grid3(c.cfg.n, c.box(4.0)), c.cfg.R));
    } else if (name == "gaussian") {
        put("gaussian.elf3", samples::gaussian(Grid3(c.cfg.n, c.box(4.0))));
    } else if (name == "appendix-a") {
        const auto cs = ericksen::counterexample_state(Grid3(c.cfg.n, c.box(4.0)));
        put("u.elf3", cs.state.u);
        put("p.elf3", cs.state.p);
        put("v.elf3", cs.state.v);
        c.result["window"] = num(cs.window);
    } else {
        const auto pr = ericksen::make_preset(name, Grid3(c.cfg.n, c.box(std::numbers::pi)), c.cfg.amplitude);
        put("u.elf3", pr.u0);
        put("v.elf3", pr.v0);
    }
    c.result["preset"] = name;
    c.result["files"] = files;
}

}  // namespace

// ---------------------------------------------------------------- entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local Morrey norms, Riesz/pressure calculus and Ericksen-Leslie verification", "elk"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key=value file; flags override it");
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    for (const auto& k : key_table()) {
        if (k.flag)
            opts[k.name] = app.add_flag(std::string("--") + k.name, k.help);
        else
            opts[k.name] = app.add_option(std::string("--") + k.name, raw[k.name], k.help);
    }
    for (const auto& t : verify::Tolerances::names()) {
        const std::string key = "tol." + t;
        opts[key] = app.add_option("--" + key, raw[key], "tolerance override");
    }
    using Handler = std::function<void(Ctx&)>;
    std::vector<std::pair<CLI::App*, Handler>> handlers;
    auto sub = [&](CLI::App& parent, const char* name, const char* desc, Handler h) {
        handlers.emplace_back(parent.add_subcommand(name, desc), std::move(h));
    };
    sub(app, "eta-map", "eta(gamma,p) region map (eta_map.csv)", cmd_eta_map);
    sub(app, "norm", "local, weighted or homogeneous Morrey norm of an ELF3 field", cmd_norm);
    sub(app, "profile", "annulus profile a(R) of an ELF3 field (annulus_profile.csv)", cmd_profile);
    sub(app, "riesz-test", "Riesz transform checks against closed forms", cmd_riesz_test);
    sub(app, "pressure", "pressure reconstruction and its Poisson residual", cmd_pressure);
    sub(app, "counterexample", "explicit stationary counterexample: residuals and Liouville report", cmd_counterexample);
    sub(app, "solve", "time-dependent run from a preset (ELF3 snapshots, ledger.csv)", cmd_solve);
    CLI::App* check = app.add_subcommand("check", "checker batteries");
    check->require_subcommand(1);
    sub(*check, "energy", "global energy inequality on a ledger", cmd_check_energy);
    sub(*check, "local-energy", "local energy defect on probe series", cmd_check_local_energy);
    sub(*check, "caccioppoli", "Caccioppoli estimate on a stationary state", cmd_check_caccioppoli);
    sub(*check, "embedding", "embedding battery on the sample family", cmd_check_embedding);
    sub(*check, "liouville", "Liouville hypotheses and conclusion on a stationary state", cmd_check_liouville);
    sub(*check, "sobolev", "improved Sobolev ratio", cmd_check_sobolev);
    CLI::App* gen = app.add_subcommand("gen", "write a preset or sample field as ELF3");
    std::string gen_name;
    gen->add_option("preset", gen_name, "zero | taylor-green | director-winding | coupled | appendix-a | bump | gaussian")
        ->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Ctx c;
    Handler handler;
    std::string cmdname;
    for (auto& [a, h] : handlers)
        if (a->parsed()) {
            handler = h;
            cmdname = a->get_parent() == check ? "check " + a->get_name() : a->get_name();
        }
    if (gen->parsed()) {
        cmdname = "gen " + gen_name;
        handler = [&gen_name](Ctx& cx) { cmd_gen(cx, gen_name); };
    }
    if (!handler) {
        err << "error: a subcommand is required (see --help)\n";
        return 2;
    }
    c.cfg.subcommand = cmdname;

    int code = 0;
    try {
        if (!config_path.empty())
            for (const auto& [k, v] : read_config_file(config_path)) c.cfg.set(k, v);
        for (const auto& [k, o] : opts)
            if (o->count() > 0) c.cfg.set(k, RunConfig::is_flag(k) ? "true" : raw[k]);
        handler(c);
        code = c.holds ? 0 : 1;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << '\n';
        return 3;
    } catch (const InstabilityError& e) {
        err << "unstable: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    Json doc;
    doc["generated"] = c.stamp;
    doc["tool"] = "elk";
    doc["command"] = cmdname;
    doc["config"] = c.cfg.to_json();
    doc["input_digest"] = c.digest.hex();
    doc["result"] = c.result;
    doc["holds"] = c.holds;
    doc["exit_code"] = code;
    const std::string text = doc.dump(2) + "\n";
    if (!c.cfg.out.empty()) {
        std::string file = cmdname;
        std::replace(file.begin(), file.end(), ' ', '_');
        if (cmdname.rfind("gen ", 0) == 0) file = "gen";
        fs::create_directories(c.cfg.out);
        std::ofstream os(fs::path(c.cfg.out) / (file + ".json"), std::ios::binary);
        os << text;
    }
    out << text;
    return code;
}

}  // namespace elk::cli
