#include "elk/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace elk {

namespace bump {
namespace {

double f0(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double f1(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
double f2(double t) { return t > 0.0 ? std::exp(-1.0 / t) * (1.0 - 2.0 * t) / (t * t * t * t) : 0.0; }

struct Parts {
    double a, b, da, db, d2a, d2b;
};

Parts parts(double s) {
    const double ta = 1.0 - s, tb = s - 0.5;
    return {f0(ta), f0(tb), -f1(ta), f1(tb), f2(ta), f2(tb)};
}

double scan(bool lap) {
    constexpr int N = 400000;
    double m = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double s = 0.5 + 0.5 * i / N;
        const double v = lap ? std::abs(d2psi(s) + 2.0 * dpsi(s) / s) : std::abs(dpsi(s));
        m = std::max(m, v);
    }
    return m;
}

}  // namespace

double psi(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    const Parts p = parts(s);
    return p.a / (p.a + p.b);
}

double dpsi(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const Parts p = parts(s);
    const double S = p.a + p.b;
    return (p.da * p.b - p.a * p.db) / (S * S);
}

double d2psi(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    const Parts p = parts(s);
    const double S = p.a + p.b;
    const double dS = p.da + p.db;
    const double N = p.da * p.b - p.a * p.db;
    const double dN = p.d2a * p.b - p.a * p.d2b;
    return dN / (S * S) - 2.0 * N * dS / (S * S * S);
}

double dpsi_sup() {
    static const double v = scan(false);
    return v;
}

double lap_sup() {
    static const double v = scan(true);
    return v;
}

}  // namespace bump

Cutoff::Cutoff(double R, double max_radius) : R_(R) {
    if (!(R >= 1.0) || !std::isfinite(R)) throw DomainError("cutoff radius must be >= 1, got " + std::to_string(R));
    if (max_radius > 0.0 && R > max_radius)
        throw DomainError("cutoff radius " + std::to_string(R) + " exceeds the box limit " + std::to_string(max_radius));
}

double Cutoff::laplacian(double r) const {
    const double s = r / R_;
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return bump::d2psi(s) / (R_ * R_) + 2.0 * bump::dpsi(s) / (R_ * r);
}

CutoffFields cutoff_field(const Grid3& grid, double R) {
    const Cutoff c(R, grid.box_half());
    CutoffFields out{ScalarField(grid), VectorField(grid), ScalarField(grid)};
    grid.for_each([&](std::size_t idx, double x, double y, double z) {
        const double r = std::sqrt(x * x + y * y + z * z);
        out.theta[idx] = c.value(r);
        const double dr = c.radial_derivative(r);
        if (dr != 0.0) {
            out.grad[0][idx] = dr * x / r;
            out.grad[1][idx] = dr * y / r;
            out.grad[2][idx] = dr * z / r;
        }
        out.lap[idx] = c.laplacian(r);
    });
    return out;
}

}  // namespace elk
