// Runs the ten acceptance criteria at their stated tolerances and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "elk/cli.hpp"
#include "elk/diff.hpp"
#include "elk/ericksen.hpp"
#include "elk/morrey.hpp"
#include "elk/samples.hpp"
#include "elk/spectral.hpp"
#include "elk/verify.hpp"
#include "support.hpp"

using namespace elk;
using report::Json;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

Json cli_json(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "elk");
    std::ostringstream out, err;
    code = cli::run(args, out, err);
    if (out.str().empty()) return Json::object();
    return Json::parse(out.str());
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- 1

Outcome eta_anchor() {
    int code = 0;
    const Json j = cli_json({"eta-map", "--gamma", "0.1:2.9:0.1", "--p", "3:10:0.5"}, code);
    bool anchor = code == 0 && j["result"]["anchor"]["eta"].get<double>() == 0.0;
    for (const auto& row : j["result"]["rows"])
        if (std::abs(row["gamma"].get<double>() - 1.0) < 1e-12 && row["p"].get<double>() == 3.0)
            anchor = anchor && row["eta"].get<double>() == 0.0 && row["region"] == "eta_nonpositive";
    int boundary = 0;
    for (int k = 0; k < 50; ++k) {
        const double p = 3.0 + 1.5 * k / 50.0;
        const double gamma = 3.0 - 2.0 * p / 3.0;
        const double d = 1e-6;
        const bool on = morrey::classify(gamma, p).region == morrey::Region::eta_nonpositive;
        const bool above = morrey::classify(gamma + d, p).region == morrey::Region::eta_positive;
        const bool below = morrey::classify(gamma - d, p).region == morrey::Region::eta_nonpositive &&
                           morrey::eta(gamma - d, p) < 0.0;
        boundary += on && above && below;
    }
    return {anchor && boundary == 50,
            fmt("eta(1,3)=%g, %d/50 curve points separate the regions", morrey::eta(1.0, 3.0), boundary)};
}

// ---------------------------------------------------------------- 2

Outcome appendix_residuals() {
    const auto r32 = ericksen::check_counterexample(ericksen::counterexample_state(Grid3(32, 4.0)));
    const auto r64 = ericksen::check_counterexample(ericksen::counterexample_state(Grid3(64, 4.0)));
    const bool closed = r64.closed_momentum == 0.0 && r64.closed_director == 0.0 && r64.closed_div == 0.0 &&
                        r32.closed_momentum == 0.0 && r32.closed_director == 0.0 && r32.closed_div == 0.0;
    const double factor = r64.sampled() > 0.0 ? r32.sampled() / r64.sampled() : INFINITY;
    const bool small = r64.sampled() <= 1e-8;
    const bool decrease = factor >= 16.0;
    return {closed && small && decrease,
            fmt("closed-form residuals %s; fd4 window residual n=32 %.3e, n=64 %.3e (<=1e-8: %s); decrease x%.3g "
                "(need >=16)",
                closed ? "all 0" : "nonzero", r32.sampled(), r64.sampled(), small ? "yes" : "no", factor)};
}

// ---------------------------------------------------------------- 3

Outcome appendix_liouville() {
    int code = 0;
    const Json j = cli_json({"counterexample", "--n", "64", "--box", "4", "--report", "liouville", "--gamma", "1",
                             "--p", "3"},
                            code);
    const auto& lv = j["result"]["liouville"];
    const std::string verdict = lv["verdict"];
    const bool inc = lv["hypotheses"]["u_profile"]["increasing"];
    const auto& vals = lv["hypotheses"]["u_profile"]["values"];
    return {verdict == "hypotheses_not_met" && inc,
            fmt("verdict %s, a(R) increasing: %s (a from %.4g to %.4g over %zu radii)", verdict.c_str(),
                inc ? "yes" : "no", vals.front().get<double>(), vals.back().get<double>(), vals.size())};
}

// ---------------------------------------------------------------- 4

Outcome riesz_pressure() {
    int c1 = 0, c2 = 0;
    const Json r = cli_json({"riesz-test", "--n", "64", "--seeds", "10"}, c1);
    const Json p = cli_json({"pressure", "--n", "64", "--seeds", "10"}, c2);
    const double single = r["result"]["single_mode"]["max_error"], ident = r["result"]["sum_riesz_squares"]["max_error"];
    const double pois = p["result"]["max_poisson_residual"];
    return {c1 == 0 && c2 == 0 && single <= 1e-12 && ident <= 1e-10 && pois <= 1e-8,
            fmt("single-mode %.2e (<=1e-12), sum R_iR_i + Id %.2e (<=1e-10), Poisson residual %.2e over 10 seeds "
                "(<=1e-8)",
                single, ident, pois)};
}

// ---------------------------------------------------------------- 5

Outcome ibp_suite() {
    const Grid3 g(64, 8.0);
    double worst = 0.0;
    std::string worst_row;
    for (int s = 0; s < 10; ++s) {
        samples::TrigBattery bat(static_cast<std::uint64_t>(500 + s));
        const VectorField u = bat.solenoidal(g);
        const VectorField v = bat.unit(g);
        const ScalarField p = bat.scalar(g);
        const auto rep = verify::ibp_identity_suite(u, v, p, 8.0);
        for (const auto& row : rep.rows)
            if (row.defect >= worst) {
                worst = row.defect;
                worst_row = row.name;
            }
    }
    return {worst <= 1e-7, fmt("max defect %.2e (%s) over 13 rows x 10 periodic fields, R=8 (<=1e-7)", worst,
                               worst_row.c_str())};
}

// ---------------------------------------------------------------- 6

Outcome zero_preset() {
    int code = 0;
    const Json j = cli_json({"solve", "--preset", "zero", "--n", "32"}, code);
    const auto& led = j["result"]["trajectory"]["ledger"];
    // sum of the two maxima bounds the max of the sum
    const double m = led["max_u_inf"].get<double>() + led["max_grad_v_inf"].get<double>();
    return {code == 0 && m <= 1e-14, fmt("max_t ||u||_inf + ||grad v||_inf <= %.3g over %d steps (<=1e-14)", m,
                                         j["result"]["trajectory"]["steps"].get<int>())};
}

// ---------------------------------------------------------------- 7, 8

struct Runs {
    ericksen::Trajectory ns64{Grid3(16, pi)}, c64{Grid3(16, pi)}, ns128{Grid3(16, pi)}, c128{Grid3(16, pi)};
    double seconds = 0.0;
};

constexpr double kTref = 0.05;  // horizon of the n = 128 refinement runs

ericksen::Trajectory run(const std::string& preset, int n, double dt, double T, std::vector<double> probes) {
    const Grid3 g(n, pi);
    const auto pr = ericksen::make_preset(preset, g);
    ericksen::SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.probe_radii = std::move(probes);
    return ericksen::evolve(pr.u0, pr.v0, cfg);
}

double max_abs_balance(const ericksen::EnergyLedger& led, double tmax) {
    double m = 0.0;
    for (const auto& r : led.rows)
        if (r.t <= tmax + 1e-12) m = std::max(m, std::abs(r.balance));
    return m;
}

Outcome global_energy(Runs& R) {
    const auto t0 = Clock::now();
    R.ns64 = run("taylor-green", 64, 1e-3, 0.5, {1.5, 2.5});
    R.c64 = run("coupled", 64, 1e-3, 0.5, {1.5, 2.5});
    R.ns128 = run("taylor-green", 128, 5e-4, kTref, {});
    R.c128 = run("coupled", 128, 5e-4, kTref, {});
    R.seconds = seconds_since(t0);
    bool ok = true;
    for (const auto* tr : {&R.ns64, &R.c64, &R.ns128, &R.c128}) ok = ok && tr->status == ericksen::RunStatus::completed;
    const auto ns = verify::global_energy_check(R.ns64.ledger, 1e-3);
    const auto cp = verify::global_energy_check(R.c64.ledger, 5e-3);
    const double b_ns64 = max_abs_balance(R.ns64.ledger, kTref), b_ns128 = max_abs_balance(R.ns128.ledger, kTref);
    const double b_c64 = max_abs_balance(R.c64.ledger, kTref), b_c128 = max_abs_balance(R.c128.ledger, kTref);
    const bool shrink = b_ns128 < b_ns64 && b_c128 < b_c64;
    const bool fast = R.seconds < 600.0;
    return {ok && ns.holds && cp.holds && shrink && fast,
            fmt("NS max D/E0 %.2e (<=1e-3), coupled max D/E0 %.2e (<=5e-3); max|balance| on t<=%.2f n=64->128: NS "
                "%.2e->%.2e, coupled %.2e->%.2e; %.0f s (<600)",
                ns.max_defect / ns.e0, cp.max_defect / cp.e0, kTref, b_ns64, b_ns128, b_c64, b_c128, R.seconds)};
}

Outcome local_energy(const Runs& R) {
    const double dt = 1e-3;
    const auto windows = verify::sliding_windows(0.0, 0.5, dt, 0.1, 0.05);
    const auto ns = verify::local_energy_defect(R.ns64.probes, windows, dt);
    const auto cp = verify::local_energy_defect(R.c64.probes, windows, dt);
    double cp_gap = 0.0;
    for (const auto& row : cp.rows) cp_gap = std::max(cp_gap, row.relative_without_gap);
    return {ns.max_relative <= 1e-3 && cp.max_relative <= 1e-3,
            fmt("max |mu_hat| relative: NS %.2e, coupled %.2e (<=1e-3) over %zu windows each; coupled after removing "
                "int (|grad grad v|^2 - |lap v|^2) theta alpha: %.2e",
                ns.max_relative, cp.max_relative, ns.rows.size(), cp_gap)};
}

// ---------------------------------------------------------------- 9

Outcome norm_anchors() {
    const Grid3 g(64, 4.0);
    const auto radii = morrey::geometric_ladder(0.9 * 4.0);
    const auto nr = morrey::local_morrey_norm(samples::radial_bump(g, 2.0), morrey::MorreyParams(1.0, 3.0), radii);
    double oracle = 0.0;
    for (double R : radii) {
        const double I = elk::testing::radial_ball(
            [](double r) { return std::pow(samples::radial_bump_value(r, 2.0), 3); }, std::min(R, 2.0));
        oracle = std::max(oracle, std::cbrt(I / R));
    }
    const double bump_err = std::abs(nr.value - oracle) / oracle;

    const Grid3 gf(64, 16.0);
    const auto fam = verify::embedding_family(gf);
    const auto fr = morrey::geometric_ladder(0.9 * 16.0);
    int pairs = 0, violations = 0;
    for (const auto& m : fam)
        for (double p : {3.0, 4.0, 6.0}) {
            double prev = INFINITY;
            for (double gamma : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 2.9}) {
                const double v = morrey::local_morrey_norm(m.f, morrey::MorreyParams(gamma, p), fr).value;
                if (prev != INFINITY) {
                    ++pairs;
                    violations += v > prev;
                }
                prev = v;
            }
        }

    const Grid3 gb(64, 8.0);
    const double s = 0.5;
    const auto gauss = ScalarField::sample(gb, [s](double x, double y, double z) {
        return std::pow(4 * pi * s, -1.5) * std::exp(-(x * x + y * y + z * z) / (4 * s));
    });
    const double closed = 2.0 / (3.0 * std::sqrt(3.0) * std::pow(4 * pi, 1.5) * s);
    const double besov_err = std::abs(spectral::besov_minus1_norm(gauss).value - closed) / closed;
    return {bump_err <= 0.02 && violations == 0 && besov_err <= 0.02,
            fmt("bump M3_1 %.5f vs radial %.5f (%.2f%%, <=2%%); gamma monotone on %d/%d pairs; Besov Gaussian off "
                "by %.2f%% (<=2%%)",
                nr.value, oracle, 100 * bump_err, pairs - violations, pairs, 100 * besov_err)};
}

// ---------------------------------------------------------------- 10

Outcome caccioppoli_anchor() {
    const auto cs = ericksen::counterexample_state(Grid3(128, 4.0));
    std::string d;
    bool ok = true;
    for (double R : {2.0, 4.0}) {
        const auto r = verify::caccioppoli_check(cs.state, R, morrey::MorreyParams(1.0, 3.0), {},
                                                 verify::StateOptions{Scheme::fd4, cs.window});
        const double oracle = 4.0 * pi * R * R * R;
        const double rel = std::abs(r.lhs - oracle) / oracle;
        ok = ok && rel <= 0.01;
        d += fmt("R=%g lhs %.4f vs 4 pi R^3 %.4f (%.3f%%) ", R, r.lhs, oracle, 100 * rel);
    }
    return {ok, d + "(<=1%)"};
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    Runs runs;
    struct Item {
        int id;
        const char* name;
        double limit;  // seconds, 0: none
        std::function<Outcome()> fn;
    };
    const std::vector<Item> items{
        {1, "eta anchor", 1.0, eta_anchor},
        {2, "counterexample residuals", 10.0, appendix_residuals},
        {3, "counterexample vs Liouville", 10.0, appendix_liouville},
        {4, "Riesz/pressure calculus", 30.0, riesz_pressure},
        {5, "integration-by-parts suite", 60.0, ibp_suite},
        {6, "zero preset", 30.0, zero_preset},
        {7, "global energy inequality", 600.0, [&] { return global_energy(runs); }},
        {8, "local energy defect", 0.0, [&] { return local_energy(runs); }},
        {9, "norm engine anchors", 0.0, norm_anchors},
        {10, "Caccioppoli lhs anchor", 60.0, caccioppoli_anchor},
    };
    int failures = 0;
    for (const auto& it : items) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = it.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = seconds_since(t0);
        const bool in_time = it.limit <= 0.0 || sec < it.limit;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(),
                    sec, in_time ? "" : fmt(", limit %.0f s", it.limit).c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failures, items.size());
    return failures;
}
