#include "elk/samples.hpp"

#include <cmath>
#include <numbers>

#include "elk/diff.hpp"
#include "elk/ericksen.hpp"

namespace elk::samples {

double radial_bump_value(double r, double rho) {
    const double s = r * r / (rho * rho);
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

ScalarField radial_bump(const Grid3& g, double rho) {
    if (!(rho > 0.0)) throw DomainError("bump radius must be positive");
    return ScalarField::sample(
        g, [rho](double x, double y, double z) { return radial_bump_value(std::sqrt(x * x + y * y + z * z), rho); });
}

ScalarField gaussian(const Grid3& g, double s) {
    if (!(s > 0.0)) throw DomainError("gaussian width must be positive");
    return ScalarField::sample(g, [s](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z) / (s * s)); });
}

VectorField gaussian_vector(const Grid3& g, double lambda) {
    return VectorField::sample(g, [lambda](double x, double y, double z) {
        x *= lambda, y *= lambda, z *= lambda;
        const double e = lambda * std::exp(-(x * x + y * y + z * z));
        return std::array<double, 3>{e, -0.5 * e, 0.25 * e * x};
    });
}

ScalarField TrigBattery::scalar(const Grid3& g, bool mean_free) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> M(-mmax_, mmax_);
    struct Term {
        double kx, ky, kz, a, b;
    };
    std::vector<Term> terms;
    const double w = std::numbers::pi / g.box_half();
    for (int t = 0; t < 8; ++t) {
        // evaluation order of function arguments is unspecified; draw explicitly
        const double kx = w * M(rng_), ky = w * M(rng_), kz = w * M(rng_);
        const double a = U(rng_), b = U(rng_);
        terms.push_back({kx, ky, kz, a, b});
    }
    ScalarField f = ScalarField::sample(g, [&](double x, double y, double z) {
        double s = 0.0;
        for (const auto& t : terms) {
            const double ph = t.kx * x + t.ky * y + t.kz * z;
            s += t.a * std::cos(ph) + t.b * std::sin(ph);
        }
        return s;
    });
    if (mean_free) {
        double mean = 0.0;
        for (double v : f.values()) mean += v;
        mean /= static_cast<double>(f.size());
        for (double& v : f.values()) v -= mean;
    }
    return f;
}

VectorField TrigBattery::solenoidal(const Grid3& g) {
    ScalarField a = scalar(g), b = scalar(g), c = scalar(g);
    return curl(VectorField(std::move(a), std::move(b), std::move(c)));
}

VectorField TrigBattery::unit(const Grid3& g) {
    ScalarField a = scalar(g, false);
    ScalarField b = scalar(g, false);
    const double sa = 0.8 / std::max(a.max_abs(), 1e-300), sb = 1.5 / std::max(b.max_abs(), 1e-300);
    VectorField v(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double th = 0.8 + sa * a[i], ph = sb * b[i];
        v[0][i] = std::sin(th) * std::cos(ph);
        v[1][i] = std::sin(th) * std::sin(ph);
        v[2][i] = std::cos(th);
    }
    return v;
}

std::vector<std::string> sample_names() {
    auto names = ericksen::preset_names();
    names.push_back("bump");
    names.push_back("gaussian");
    return names;
}

}  // namespace elk::samples
