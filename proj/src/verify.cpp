#include "elk/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "elk/cutoff.hpp"
#include "elk/quadrature.hpp"
#include "elk/spectral.hpp"

namespace elk::verify {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// |a| / b with the conventions 0/0 = 0 and a/0 = inf.
double implied(double a, double b) {
    a = std::abs(a);
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a / b;
}

double masked_max_norm(const VectorField& f, const ScalarField& mask) {
    double m = 0.0;
    for (std::size_t i = 0; i < f[0].size(); ++i)
        if (mask[i] != 0.0) m = std::max(m, f[0][i] * f[0][i] + f[1][i] * f[1][i] + f[2][i] * f[2][i]);
    return std::sqrt(m);
}

double masked_max_norm(const TensorField& f, const ScalarField& mask) {
    const ScalarField n2 = norm_sq(f);
    double m = 0.0;
    for (std::size_t i = 0; i < n2.size(); ++i)
        if (mask[i] != 0.0) m = std::max(m, n2[i]);
    return std::sqrt(m);
}

double residual_of(const ericksen::StationaryState& s, const StateOptions& opt) {
    ericksen::ResidualOptions ro;
    ro.scheme = opt.scheme;
    ro.window = opt.window;
    return ericksen::stationary_residual(s, ro).max();
}

void require_solution(double residual, double limit, const char* who) {
    if (!(residual <= limit))
        throw PreconditionError(std::string(who) + ": stationary residual " + fmt(residual) + " exceeds " +
                                fmt(limit) + "; input is not a solution");
}

// terms: sum of the absolute values of the pieces, or the integral of the
// absolute integrand; the larger of these sets the scale of the defect.
IdentityRow make_row(std::string name, double lhs, double rhs, double terms) {
    IdentityRow r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.scale = std::max({std::abs(lhs), std::abs(rhs), terms});
    r.defect = r.scale > 0.0 ? std::abs(lhs - rhs) / r.scale : 0.0;
    return r;
}

// int |a . b|
// int |a| |b|: what round-off in the pairing is relative to, and it does not
// collapse when a and b happen to be orthogonal pointwise.
double abs_pairing(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a[0].size(); ++i)
        s += std::sqrt((a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i]) *
                       (b[0][i] * b[0][i] + b[1][i] * b[1][i] + b[2][i] * b[2][i]));
    return s * a.grid().cell_volume();
}

double abs_integral(const ScalarField& f, const ScalarField& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] * w[i]);
    return s * f.grid().cell_volume();
}

// Pointwise identity a = b measured as max |a - b| / max(|a|, |b|).
IdentityRow pointwise_row(std::string name, const VectorField& a, const VectorField& b) {
    double diff = 0.0, sa = 0.0, sb = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a[0].size(); ++i) {
            diff = std::max(diff, std::abs(a[c][i] - b[c][i]));
            sa = std::max(sa, std::abs(a[c][i]));
            sb = std::max(sb, std::abs(b[c][i]));
        }
    IdentityRow r;
    r.name = std::move(name);
    r.lhs = sa;
    r.rhs = sb;
    r.scale = std::max(sa, sb);
    r.defect = r.scale > 0.0 ? diff / r.scale : 0.0;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- tolerances

namespace {
struct TolEntry {
    const char* name;
    double Tolerances::*field;
};
constexpr std::array<TolEntry, 12> kTolTable{{
    {"identity", &Tolerances::identity},
    {"inequality", &Tolerances::inequality},
    {"residual", &Tolerances::residual},
    {"energy", &Tolerances::energy},
    {"energy_coupled", &Tolerances::energy_coupled},
    {"local_energy", &Tolerances::local_energy},
    {"tension", &Tolerances::tension},
    {"velocity", &Tolerances::velocity},
    {"sobolev_stability", &Tolerances::sobolev_stability},
    {"riesz", &Tolerances::riesz},
    {"riesz_identity", &Tolerances::riesz_identity},
    {"poisson", &Tolerances::poisson},
}};
}  // namespace

void Tolerances::set(const std::string& name, double value) {
    for (const auto& e : kTolTable)
        if (name == e.name) {
            if (!(value > 0.0) || !std::isfinite(value))
                throw ConfigError("tolerance " + name + " must be positive and finite");
            this->*e.field = value;
            return;
        }
    throw ConfigError("unknown tolerance '" + name + "'");
}

double Tolerances::get(const std::string& name) const {
    for (const auto& e : kTolTable)
        if (name == e.name) return this->*e.field;
    throw ConfigError("unknown tolerance '" + name + "'");
}

std::vector<std::string> Tolerances::names() {
    std::vector<std::string> out;
    for (const auto& e : kTolTable) out.emplace_back(e.name);
    return out;
}

// ---------------------------------------------------------------- Caccioppoli

CaccioppoliReport caccioppoli_check(const ericksen::StationaryState& s, double R, const morrey::MorreyParams& mp,
                                    const Tolerances& tol, const StateOptions& opt) {
    const Grid3& g = s.u.grid();
    CaccioppoliReport out;
    out.R = R;
    out.gamma = mp.gamma();
    out.p = mp.p();
    out.tolerance = tol.inequality;
    const CutoffFields cf = cutoff_field(g, R);  // validates 1 <= R <= L
    out.residual = residual_of(s, opt);
    require_solution(out.residual, tol.residual, "caccioppoli");

    const TensorField gu = jacobian(s.u, opt.scheme);
    const TensorField gv = jacobian(s.v, opt.scheme);
    const MaskedIntegral inner = BallIntegrator(norm_sq(gu)).ball(0.5 * R);
    out.lhs = inner.smoothed;
    out.lhs_sharp = inner.sharp;

    const ScalarField u2 = norm_sq(s.u);
    const ScalarField gv2 = norm_sq(gv);
    const ScalarField ugt = dot(s.u, cf.grad);
    out.i1 = 0.5 * integrate(u2, ugt);
    out.i2 = 0.5 * integrate(gv2, ugt);
    out.i3 = integrate(s.p, ugt);
    out.i4 = 0.5 * integrate(u2, cf.lap);
    out.rhs_identity = out.i1 + out.i2 + out.i3 + out.i4;

    const double p = mp.p();
    const double shell_u = BallIntegrator(abs_pow(s.u, p)).shell(R).smoothed;
    const double shell_v = BallIntegrator(abs_pow(gv, p)).shell(R).smoothed;
    const double shell_p = BallIntegrator(abs_pow(s.p, 0.5 * p)).shell(R).smoothed;
    const double shell_u2 = BallIntegrator(u2).shell(R).smoothed;
    out.x_u = std::pow(shell_u, 2.0 / p);
    out.x_v = std::pow(shell_v, 2.0 / p);
    out.x_p = std::pow(shell_p, 2.0 / p);
    out.y = std::pow(R, 2.0 - 9.0 / p) * std::pow(shell_u, 1.0 / p);
    out.z = shell_u2 / (R * R);
    out.c1 = implied(out.i1, out.x_u * out.y);
    out.c2 = implied(out.i2, out.x_v * out.y);
    out.c3 = implied(out.i3, out.x_p * out.y);
    out.c4 = implied(out.i4, out.z);
    out.c_implied = std::max({out.c1, out.c2, out.c3, out.c4});
    out.rhs_closed = out.c_implied == 0.0 ? 0.0
                                          : out.c_implied * ((out.x_u + out.x_v + out.x_p) * out.y + out.z);

    const double scale =
        std::max(out.lhs, std::abs(out.i1) + std::abs(out.i2) + std::abs(out.i3) + std::abs(out.i4));
    out.holds = out.lhs <= out.rhs_identity + tol.inequality * scale;
    return out;
}

// ---------------------------------------------------------------- identities

const IdentityRow& IdentityReport::row(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return r;
    throw ConfigError("no identity row '" + name + "'");
}

IdentityReport ibp_identity_suite(const VectorField& u, const VectorField& v, const ScalarField& p, double R,
                                  const Tolerances& tol, Scheme scheme) {
    const Grid3& g = u.grid();
    require_same_grid(g, v.grid(), "ibp_identity_suite");
    require_same_grid(g, p.grid(), "ibp_identity_suite");
    const CutoffFields cf = cutoff_field(g, R);

    const TensorField gu = jacobian(u, scheme);
    const TensorField gv = jacobian(v, scheme);
    const VectorField lu = laplacian(u, scheme);
    const VectorField lv = laplacian(v, scheme);
    const VectorField gp = gradient(p, scheme);

    const double div_u = divergence(u, scheme).max_abs();
    const double div_scale = std::max(1.0, std::sqrt(norm_sq(gu).max_abs()));
    if (div_u > 1e-8 * div_scale)
        throw PreconditionError("ibp_identity_suite: max |div u| = " + fmt(div_u) + " is not zero");
    double unit = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        unit = std::max(unit, std::abs(std::sqrt(v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]) - 1.0));
    if (unit > 1e-10) throw PreconditionError("ibp_identity_suite: max ||v| - 1| = " + fmt(unit));

    IdentityReport out;
    out.R = R;
    out.tolerance = tol.identity;
    {
        ScalarField gvm = morrey::magnitude(gv);
        out.boundary_contaminated = !decay_margin_ok(morrey::magnitude(u)) || !decay_margin_ok(gvm) ||
                                    !decay_margin_ok(morrey::magnitude(gp));
    }

    const ScalarField& th = cf.theta;
    const VectorField thu = scale(u, th);
    const ScalarField u2 = norm_sq(u);
    const ScalarField gv2 = norm_sq(gv);
    const ScalarField gu2 = norm_sq(gu);
    const ScalarField ugt = dot(u, cf.grad);
    ScalarField ugt_abs(g);  // |u| |grad theta|, the scale of ugt
    for (std::size_t i = 0; i < g.size(); ++i)
        ugt_abs[i] = std::sqrt((u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i]) *
                               (cf.grad[0][i] * cf.grad[0][i] + cf.grad[1][i] * cf.grad[1][i] +
                                cf.grad[2][i] * cf.grad[2][i]));

    // Stress-type pairings: X = sum int lap v_j d_i v_j theta u_i, Y = sum int lap v_i d_j v_i theta u_j.
    const VectorField gv_lv = contract_second(gv, lv);
    const VectorField adv_v = contract_first(u, gv);
    const VectorField thlv = scale(lv, th);
    const double X = integrate(dot(gv_lv, thu)), Xabs = abs_pairing(gv_lv, thu);
    const double Y = integrate(dot(adv_v, thlv)), Yabs = abs_pairing(adv_v, thlv);

    // momentum pairings against theta u, term by term
    {
        const double lhs = -integrate(dot(lu, thu));
        const double a = -0.5 * integrate(u2, cf.lap), b = integrate(gu2, th);
        out.rows.push_back(make_row("momentum.viscous", lhs, a + b,
                                    std::max(abs_pairing(lu, thu), 0.5 * abs_integral(u2, cf.lap) + std::abs(b))));
    }
    {
        TensorField uu(g);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) uu(i, j) = hadamard(u[i], u[j]);
        const VectorField d = tensor_divergence(uu, scheme);
        const double lhs = integrate(dot(d, thu));
        const double rhs = -0.5 * integrate(u2, ugt);
        out.rows.push_back(make_row("momentum.convective", lhs, rhs,
                                    std::max(abs_pairing(d, thu), 0.5 * abs_integral(u2, ugt_abs))));
    }
    const VectorField div_stress = tensor_divergence(row_gram(gv, gv), scheme);
    {
        const double lhs = integrate(dot(div_stress, thu));
        const double a = -0.5 * integrate(gv2, ugt);
        out.rows.push_back(make_row("momentum.stress", lhs, a + X,
                                    std::max(abs_pairing(div_stress, thu), 0.5 * abs_integral(gv2, ugt_abs) + Xabs)));
    }
    {
        const double lhs = integrate(dot(gp, thu));
        const double rhs = -integrate(p, ugt);
        out.rows.push_back(make_row("momentum.pressure", lhs, rhs, std::max(abs_pairing(gp, thu), abs_integral(p, ugt_abs))));
    }

    // director pairings against theta lap v, term by term
    const ScalarField lv2 = norm_sq(lv);
    const ScalarField vlv = dot(v, lv);
    {
        double lhs = 0.0;
        for (int c = 0; c < 3; ++c) lhs += integrate(hadamard(lv[c], th), lv[c]);
        out.rows.push_back(make_row("director.dissipation", lhs, integrate(lv2, th), 0.0));
    }
    {
        TensorField vu(g);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) vu(i, j) = hadamard(v[i], u[j]);
        const VectorField d = tensor_divergence(vu, scheme);
        const double lhs = -integrate(dot(d, thlv));
        out.rows.push_back(make_row("director.transport", lhs, -Y, std::max(abs_pairing(d, thlv), Yabs)));
    }
    {
        const VectorField w = scale(v, gv2);
        const double lhs = integrate(dot(w, thlv));
        const double rhs = integrate(hadamard(gv2, vlv), th);
        out.rows.push_back(make_row("director.tension", lhs, rhs, abs_pairing(w, thlv)));
    }

    // (a) = -X + Y vanishes; the two sums are assembled along different contractions.
    out.rows.push_back(make_row("a_cancellation", X, Y, std::max(Xabs, Yabs)));

    // the two energy balances with the equation residuals substituted.
    const ericksen::StationaryState st{u, p, v};
    ericksen::ResidualOptions ro;
    ro.scheme = scheme;
    ro.check_constraints = false;
    const ericksen::ResidualReport res = ericksen::stationary_residual(st, ro);
    {
        const double lhs = integrate(gu2, th);
        const double a = integrate(u2 * 0.5 + gv2 * 0.5 + p, ugt);
        const double b = 0.5 * integrate(u2, cf.lap);
        const double m = integrate(dot(res.momentum, thu));
        out.rows.push_back(make_row("grad_u_balance", lhs, a + b - X + m,
                                    abs_integral(u2 * 0.5 + gv2 * 0.5 + p, ugt_abs) + 0.5 * abs_integral(u2, cf.lap) +
                                        Xabs + abs_pairing(res.momentum, thu)));
    }
    {
        const double lhs = integrate(lv2, th);
        const double a = -integrate(hadamard(gv2, vlv), th);
        const double nres = -integrate(dot(res.director, thlv));
        out.rows.push_back(make_row("lap_v_balance", lhs, Y + a + nres,
                                    Yabs + abs_integral(hadamard(gv2, vlv), th) + abs_pairing(res.director, thlv)));
    }

    // Pointwise identities.
    {
        VectorField rhs = gradient(gv2 * 0.5, scheme) + contract_second(gv, lv);
        out.rows.push_back(pointwise_row("tensor_identity", div_stress, rhs));
    }
    {
        VectorField a(g), b(g);
        a[0] = gv2 * -1.0;
        b[0] = vlv;
        out.rows.push_back(pointwise_row("unit_field", a, b));
    }
    {
        const double lhs = -integrate(hadamard(gv2, vlv), th);
        const double rhs = integrate(hadamard(vlv, vlv), th);
        out.rows.push_back(make_row("tension_square", lhs, rhs, abs_integral(hadamard(gv2, vlv), th)));
    }

    for (const auto& r : out.rows) out.max_defect = std::max(out.max_defect, r.defect);
    out.holds = out.max_defect <= tol.identity;
    return out;
}

// ---------------------------------------------------------------- elliptic estimate

EllipticReport elliptic_v_check(const VectorField& v, const std::vector<double>& radii, const Tolerances& tol) {
    const Grid3& g = v.grid();
    morrey::validate_radii(radii, g);
    double unit = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        unit = std::max(unit, std::abs(std::sqrt(v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]) - 1.0));
    if (unit > 1e-10) throw PreconditionError("elliptic_v_check: max ||v| - 1| = " + fmt(unit));

    const TensorField gv = jacobian(v);
    const ScalarField gv2 = norm_sq(gv);
    const VectorField res = laplacian(v) * -1.0 - scale(v, gv2);
    EllipticReport out;
    out.residual = res.max_norm();
    if (!(out.residual <= tol.residual))
        throw PreconditionError("elliptic_v_check: director residual " + fmt(out.residual) + " exceeds " +
                                fmt(tol.residual));

    const BallIntegrator bi(gv2);
    double cmin = std::numeric_limits<double>::infinity();
    for (double R : radii) {
        EllipticRow row;
        row.R = R;
        row.inner = bi.ball(0.5 * R).smoothed;
        row.outer = bi.shell(R).smoothed;
        row.c = implied(row.inner, row.outer);
        if (!std::isfinite(row.c)) out.diverging = true;
        if (row.c > out.c_max) {
            out.c_max = row.c;
            out.c_max_R = R;
        }
        if (row.c > 0.0) cmin = std::min(cmin, row.c);
        out.rows.push_back(row);
    }
    const std::size_t m = out.rows.size();
    if (!out.diverging && m >= 3) {
        const double a = out.rows[m - 3].c, b = out.rows[m - 2].c, c = out.rows[m - 1].c;
        if (a < b && b < c && c > 10.0 * cmin) out.diverging = true;
    }
    out.holds = !out.diverging;
    return out;
}

// ---------------------------------------------------------------- global energy

GlobalEnergyReport global_energy_check(const ericksen::EnergyLedger& ledger, double tolerance) {
    if (ledger.rows.empty() || !ledger.valid()) throw PreconditionError("energy ledger is empty or invalid");
    GlobalEnergyReport out;
    out.e0 = ledger.e0();
    out.tolerance = tolerance;
    out.max_defect = -std::numeric_limits<double>::infinity();
    for (const auto& r : ledger.rows) {
        out.t.push_back(r.t);
        out.defect.push_back(r.defect);
        out.balance.push_back(r.balance);
        if (r.defect > out.max_defect) {
            out.max_defect = r.defect;
            out.max_defect_t = r.t;
        }
        out.max_abs_balance = std::max(out.max_abs_balance, std::abs(r.balance));
    }
    out.holds = out.max_defect <= tolerance * out.e0;
    return out;
}

// ---------------------------------------------------------------- local energy

double time_alpha(double s) {
    if (s <= 0.5) return 0.0;
    if (s >= 1.0) return 1.0;
    const double x = 2.0 * (s - 0.5);
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double time_alpha_derivative(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const double x = 2.0 * (s - 0.5);
    return 2.0 * 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

namespace {

// Cubic Lagrange interpolant of uniformly sampled data.
class SampledSeries {
public:
    SampledSeries(double t0, double dt, std::vector<double> y) : t0_(t0), dt_(dt), y_(std::move(y)) {}
    double operator()(double t) const {
        const int n = static_cast<int>(y_.size());
        if (n == 1) return y_[0];
        const double s = (t - t0_) / dt_;
        int k = static_cast<int>(std::floor(s));
        k = std::clamp(k, 0, n - 2);
        if (n < 4) {
            const double w = s - k;
            return (1.0 - w) * y_[k] + w * y_[k + 1];
        }
        int first = std::clamp(k - 1, 0, n - 4);
        double sum = 0.0;
        for (int a = 0; a < 4; ++a) {
            double l = 1.0;
            for (int b = 0; b < 4; ++b)
                if (b != a) l *= (s - (first + b)) / static_cast<double>(a - b);
            sum += l * y_[first + a];
        }
        return sum;
    }

private:
    double t0_, dt_;
    std::vector<double> y_;
};

// Integral over [a, b] of f, split at the sample times and at the extra breakpoints,
// with 6-point Gauss-Legendre on each piece.
template <class F>
double piecewise_gauss(F&& f, double a, double b, double t0, double dt, const std::vector<double>& breaks) {
    static constexpr std::array<double, 6> x{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                             0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
    static constexpr std::array<double, 6> w{0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                             0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
    std::vector<double> pts{a, b};
    for (double t = t0 + dt * std::ceil((a - t0) / dt); t < b; t += dt)
        if (t > a) pts.push_back(t);
    for (double t : breaks)
        if (t > a && t < b) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) continue;
        const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
        for (int q = 0; q < 6; ++q) sum += w[q] * r * f(c + r * x[q]);
    }
    return sum;
}

}  // namespace

std::vector<LocalWindow> sliding_windows(double t_first, double t_last, double dt, double span, double stride) {
    if (!(span > 0.0) || !(stride > 0.0)) throw ConfigError("window span and stride must be positive");
    std::vector<LocalWindow> out;
    const double eps = 4.0 * dt;
    for (double t0 = t_first; t0 + span + eps <= t_last * (1.0 + 1e-12) + 1e-12; t0 += stride)
        out.push_back({t0, t0 + span});
    return out;
}

LocalEnergyReport local_energy_defect(const std::vector<ericksen::ProbeSeries>& probes,
                                      const std::vector<LocalWindow>& windows, double dt, const Tolerances& tol) {
    if (!(dt > 0.0)) throw ConfigError("local_energy_defect: dt must be positive");
    LocalEnergyReport out;
    out.tolerance = tol.local_energy;
    out.min_mu_hat = std::numeric_limits<double>::infinity();
    const double eps = 4.0 * dt;
    for (const auto& series : probes) {
        const auto& s = series.samples;
        if (s.empty()) throw PreconditionError("local_energy_defect: empty probe series");
        const double tf = s.front().t, tl = s.back().t;
        auto column = [&](double ericksen::ProbeSample::*m) {
            std::vector<double> y;
            y.reserve(s.size());
            for (const auto& x : s) y.push_back(x.*m);
            return SampledSeries(tf, dt, std::move(y));
        };
        using PS = ericksen::ProbeSample;
        const SampledSeries A = column(&PS::energy), B = column(&PS::grad_u), C = column(&PS::lap_v),
                            D = column(&PS::diffusion), E = column(&PS::flux), F = column(&PS::transport),
                            G = column(&PS::tension), J = column(&PS::tension_sq), H = column(&PS::hessian_gap);

        for (const auto& win : windows) {
            const double slack = 1e-9 * std::max(1.0, tl);
            if (win.t0 < tf - slack || win.t1 + eps > tl + slack || !(win.t1 > win.t0))
                throw PreconditionError("local_energy_defect: window [" + fmt(win.t0) + ", " + fmt(win.t1) +
                                        "] + eps is not covered by samples on [" + fmt(tf) + ", " + fmt(tl) + "]");
            auto alpha = [&](double t) { return time_alpha((t - win.t0) / eps) - time_alpha((t - win.t1) / eps); };
            auto dalpha = [&](double t) {
                return (time_alpha_derivative((t - win.t0) / eps) - time_alpha_derivative((t - win.t1) / eps)) / eps;
            };
            const double a = win.t0, b = std::min(win.t1 + eps, tl);
            const std::vector<double> breaks{win.t0 + 0.5 * eps, win.t0 + eps, win.t1 + 0.5 * eps, win.t1 + eps};
            auto pair = [&](const SampledSeries& f) {
                return piecewise_gauss([&](double t) { return f(t) * alpha(t); }, a, b, tf, dt, breaks);
            };
            auto pair_abs = [&](const SampledSeries& f) {
                return piecewise_gauss([&](double t) { return std::abs(f(t)) * alpha(t); }, a, b, tf, dt, breaks);
            };
            const double iA = piecewise_gauss([&](double t) { return A(t) * dalpha(t); }, a, b, tf, dt, breaks);
            const double iAabs =
                piecewise_gauss([&](double t) { return std::abs(A(t) * dalpha(t)); }, a, b, tf, dt, breaks);

            LocalWindowRow row;
            row.R = series.R;
            row.t0 = win.t0;
            row.t1 = win.t1;
            row.eps = eps;
            row.lhs = -iA + pair(B) + pair(C);
            row.rhs = pair(D) + pair(E) + pair(F) + pair(G);
            row.mu_hat = row.rhs - row.lhs;
            row.scale = iAabs + pair_abs(B) + pair_abs(C) + pair_abs(D) + pair_abs(E) + pair_abs(F) + pair_abs(G);
            row.hessian_gap = pair(H);
            row.relative = row.scale > 0.0 ? std::abs(row.mu_hat) / row.scale : 0.0;
            row.relative_without_gap = row.scale > 0.0 ? std::abs(row.mu_hat - row.hessian_gap) / row.scale : 0.0;
            row.tension = pair(G);
            row.tension_sq = pair(J);
            const double ts = std::max(std::abs(row.tension), std::abs(row.tension_sq));
            row.tension_defect = ts > 0.0 ? std::abs(row.tension - row.tension_sq) / ts : 0.0;

            out.max_relative = std::max(out.max_relative, row.relative);
            out.min_mu_hat = std::min(out.min_mu_hat, row.mu_hat);
            out.max_tension_defect = std::max(out.max_tension_defect, row.tension_defect);
            out.rows.push_back(row);
        }
    }
    if (out.rows.empty()) out.min_mu_hat = 0.0;
    out.holds = out.max_relative <= tol.local_energy && out.max_tension_defect <= tol.tension;
    return out;
}

// ---------------------------------------------------------------- embeddings

std::vector<FamilyMember> embedding_family(const Grid3& g) {
    std::vector<FamilyMember> out;
    auto add = [&](std::string name, bool in_l92, auto&& fn) {
        FamilyMember m{std::move(name), ScalarField::sample(g, [&](double x, double y, double z) {
                           return fn(std::sqrt(x * x + y * y + z * z), x);
                       }),
                       false, in_l92};
        m.decay_ok = decay_margin_ok(m.f);
        out.push_back(std::move(m));
    };
    for (double a : {0.5, 2.0 / 3.0, 1.0, 2.0, 3.0}) {
        std::ostringstream name;
        name.precision(4);
        name << "power a=" << a;
        // (1+r)^-a is in L^{9/2}(R^3) iff 9a/2 > 3
        add(name.str(), 4.5 * a > 3.0 + 1e-12, [a](double r, double) { return std::pow(1.0 + r, -a); });
    }
    add("bump radius 2", true, [](double r, double) {
        const double s = r * r / 4.0;
        return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
    });
    add("gaussian", true, [](double r, double) { return std::exp(-r * r); });
    add("oscillating gaussian", true, [](double r, double x) { return std::cos(3.0 * x) * std::exp(-0.5 * r * r); });
    return out;
}

EmbeddingReport embedding_suite(const std::vector<FamilyMember>& family, const std::vector<double>& radii) {
    if (family.empty()) throw ConfigError("embedding_suite: empty family");
    const Grid3& g = family.front().f.grid();
    morrey::validate_radii(radii, g);
    EmbeddingReport out;
    for (const auto& m : family)
        if (!m.decay_ok)
            out.notices.push_back("'" + m.name + "' fails the decay margin; dropped from the global-norm rows");

    auto fit = [&](InclusionRow row, bool need_decay, auto&& ratio) {
        row.fitted = 0.0;
        for (const auto& m : family) {
            if (need_decay && !m.decay_ok) continue;
            const double r = ratio(m);
            ++row.members;
            if (r > row.fitted || row.argmax.empty()) {
                row.fitted = std::max(row.fitted, r);
                row.argmax = m.name;
            }
        }
        return row;
    };
    constexpr double slack = 1e-3;  // smoothed-mask quadrature against an analytic constant

    // gamma monotonicity on the shared ladder: exact
    for (double p : {3.0, 4.0})
        for (auto [g1, g2] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.0, 2.0}}) {
            std::ostringstream name;
            name << "M" << p << "_" << g1 << " < M" << p << "_" << g2;
            InclusionRow row;
            row.name = name.str();
            row.bound = 1.0;
            row = fit(row, false, [&](const FamilyMember& m) {
                const double big = morrey::local_morrey_norm(m.f, morrey::MorreyParams(g1, p), radii).value;
                const double small = morrey::local_morrey_norm(m.f, morrey::MorreyParams(g2, p), radii).value;
                return big > 0.0 ? small / big : 0.0;
            });
            row.holds = row.fitted <= 1.0;
            out.inclusions.push_back(row);
        }

    // weighted Lebesgue into local Morrey: constant 2^(gamma/p)
    {
        InclusionRow row;
        row.name = "L3_w(1) < M3_1";
        row.bound = std::pow(2.0, 1.0 / 3.0);
        row = fit(row, true, [&](const FamilyMember& m) {
            const double w = morrey::weighted_lebesgue_norm(m.f, 3.0, 1.0).value;
            return w > 0.0 ? morrey::local_morrey_norm(m.f, morrey::MorreyParams(1.0, 3.0), radii).value / w : 0.0;
        });
        row.holds = row.fitted <= row.bound * (1.0 + slack);
        out.inclusions.push_back(row);
    }
    // Hoelder endpoint: ||f||_{M3_1} <= (4 pi / 3)^(1/9) ||f||_{L^{9/2}}
    {
        InclusionRow row;
        row.name = "L9/2 < M3_1";
        row.bound = std::pow(4.0 * std::numbers::pi / 3.0, 1.0 / 9.0);
        row = fit(row, true, [&](const FamilyMember& m) {
            const double l = std::pow(integrate(abs_pow(m.f, 4.5)), 1.0 / 4.5);
            return l > 0.0 ? morrey::local_morrey_norm(m.f, morrey::MorreyParams(1.0, 3.0), radii).value / l : 0.0;
        });
        row.holds = row.fitted <= row.bound * (1.0 + slack);
        out.inclusions.push_back(row);
    }
    // the homogeneous (3, 9/2) functional at the origin coincides with M3_1
    {
        InclusionRow row;
        row.name = "M3_1 = Mdot(3,9/2) at 0";
        row.bound = 1.0;
        double worst = 0.0;
        row = fit(row, false, [&](const FamilyMember& m) {
            const double a = morrey::local_morrey_norm(m.f, morrey::MorreyParams(1.0, 3.0), radii).value;
            const double b = morrey::homogeneous_morrey_at_origin(m.f, 3.0, 4.5, radii).value;
            if (a > 0.0) worst = std::max(worst, std::abs(b / a - 1.0));
            return a > 0.0 ? b / a : 0.0;
        });
        row.holds = worst <= 1e-10;
        out.inclusions.push_back(row);
    }

    // decay-rule consequence for the L^{9/2} members
    bool decay_ok = true;
    for (const auto& m : family) {
        const auto prof = morrey::annulus_profile(m.f, morrey::MorreyParams(1.0, 3.0), radii);
        DecayRow row;
        row.member = m.name;
        row.radii = prof.radii;
        row.values = prof.values;
        row.in_l92 = m.in_l92;
        row.certified = prof.decaying();
        row.non_decreasing = true;
        for (std::size_t i = 1; i < prof.values.size(); ++i)
            if (prof.values[i] < prof.values[i - 1]) row.non_decreasing = false;
        // sharp shells R/2 < |x| < R miss the support once R/2 >= radius
        row.exact_zero_tail = false;
        for (std::size_t i = 0; i < prof.radii.size(); ++i)
            if (prof.radii[i] >= 4.0) row.exact_zero_tail = row.exact_zero_tail || prof.values_sharp[i] == 0.0;
        if (m.in_l92 && m.decay_ok && !row.certified) decay_ok = false;
        out.decay.push_back(row);
    }
    out.holds = decay_ok;
    for (const auto& r : out.inclusions) out.holds = out.holds && r.holds;
    return out;
}

// ---------------------------------------------------------------- improved Sobolev

SobolevReport improved_sobolev_check(const VectorField& u) {
    const ScalarField mag = morrey::magnitude(u);
    const double tr = tail_ratio(mag);
    if (tr > 1e-8) throw PreconditionError("improved_sobolev_check: decay margin violated (tail ratio " + fmt(tr) + ")");
    SobolevReport out;
    out.l4 = std::pow(integrate(abs_pow(u, 4.0)), 0.25);
    double h = 0.0;
    for (int c = 0; c < 3; ++c) h += spectral::hdot1_sq(u[c]);
    out.h1 = std::sqrt(h);
    out.besov = spectral::besov_minus1_norm(u).value;
    const double den = std::sqrt(out.h1 * out.besov);
    if (den == 0.0) {
        out.degenerate = true;
        out.ratio = 0.0;
    } else {
        out.ratio = out.l4 / den;
    }
    return out;
}

// ---------------------------------------------------------------- Liouville

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::counterexample_flag: return "counterexample_flag";
        case Verdict::hypotheses_not_met: return "hypotheses_not_met";
    }
    return "unknown";
}

Verdict derive_verdict(const Hypotheses& h, const Conclusion& c, double velocity_tolerance) {
    const bool base = h.u_decaying && h.grad_v_finite && h.grad_v_shells_finite;
    const bool met = h.eta_nonpositive ? base : (base && h.u_scaled_decaying);
    if (!met) return Verdict::hypotheses_not_met;
    return c.u_inf > velocity_tolerance ? Verdict::counterexample_flag : Verdict::consistent;
}

LiouvilleVerdict liouville_check(const ericksen::StationaryState& s, const morrey::MorreyParams& mp,
                                 const std::vector<double>& radii, const Tolerances& tol, const StateOptions& opt) {
    const Grid3& g = s.u.grid();
    morrey::validate_radii(radii, g);
    LiouvilleVerdict out;
    out.tolerance = tol.velocity;
    out.residual = residual_of(s, opt);
    require_solution(out.residual, tol.residual, "liouville");

    const TensorField gv = jacobian(s.v, opt.scheme);
    Hypotheses& h = out.hypotheses;
    h.gamma = mp.gamma();
    h.p = mp.p();
    h.eta = mp.eta();
    h.eta_nonpositive = morrey::classify(mp.gamma(), mp.p()).region == morrey::Region::eta_nonpositive;
    h.u_profile = morrey::annulus_profile(s.u, mp, radii);
    h.u_decaying = h.u_profile.decaying();
    h.u_scaled_decaying = h.u_profile.scaled_decaying();
    const auto nv = morrey::local_morrey_norm(gv, mp, radii);
    h.grad_v_norm = nv.value;
    h.grad_v_finite = std::isfinite(nv.value) && !nv.edge_suspect;
    h.grad_v_shells = morrey::shell_energy_profile(gv, radii);
    h.grad_v_shells_finite = std::isfinite(h.grad_v_shells.sup) && !h.grad_v_shells.edge_suspect;

    const ScalarField mask = ericksen::window_mask(g, opt.window);
    out.conclusion.u_inf = masked_max_norm(s.u, mask);
    out.conclusion.grad_v_inf = masked_max_norm(gv, mask);
    out.conclusion.grad_p_inf = masked_max_norm(gradient(s.p, opt.scheme), mask);
    out.verdict = derive_verdict(h, out.conclusion, tol.velocity);
    return out;
}

}  // namespace elk::verify
