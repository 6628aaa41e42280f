#pragma once
// Shared generators for the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>

#include "elk/diff.hpp"
#include "elk/grid.hpp"

namespace elk::testing {

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
    return m;
}

/// Random trigonometric polynomial with modes |m| <= mmax on each axis.
inline ScalarField random_trig(const Grid3& g, std::mt19937_64& rng, int mmax = 3, bool mean_free = true) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> M(-mmax, mmax);
    struct Term {
        double kx, ky, kz, a, b;
    };
    std::vector<Term> terms;
    const double w = std::numbers::pi / g.box_half();
    for (int t = 0; t < 8; ++t) terms.push_back({w * M(rng), w * M(rng), w * M(rng), U(rng), U(rng)});
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

/// Sum of a few Gaussians centred in [-c,c]^3 with widths in [s0,s1].
inline ScalarField random_gaussians(const Grid3& g, std::mt19937_64& rng, double c = 1.0, double s0 = 1.0,
                                    double s1 = 1.4, int count = 3) {
    std::uniform_real_distribution<double> C(-c, c), S(s0, s1), A(-1.0, 1.0);
    struct Bump {
        double x, y, z, s, a;
    };
    std::vector<Bump> b;
    for (int i = 0; i < count; ++i) b.push_back({C(rng), C(rng), C(rng), S(rng), A(rng)});
    return ScalarField::sample(g, [&](double x, double y, double z) {
        double s = 0.0;
        for (const auto& q : b) {
            const double r2 = (x - q.x) * (x - q.x) + (y - q.y) * (y - q.y) + (z - q.z) * (z - q.z);
            s += q.a * std::exp(-r2 / (q.s * q.s));
        }
        return s;
    });
}

inline VectorField random_gaussian_vector(const Grid3& g, std::mt19937_64& rng, double c = 1.0, double s0 = 1.0,
                                          double s1 = 1.4) {
    ScalarField a = random_gaussians(g, rng, c, s0, s1);
    ScalarField b = random_gaussians(g, rng, c, s0, s1);
    ScalarField d = random_gaussians(g, rng, c, s0, s1);
    return VectorField(std::move(a), std::move(b), std::move(d));
}

/// Localized divergence-free field: curl of a Gaussian potential.
inline VectorField random_solenoidal(const Grid3& g, std::mt19937_64& rng, double c = 1.0, double s0 = 1.0,
                                     double s1 = 1.4) {
    return curl(random_gaussian_vector(g, rng, c, s0, s1));
}

/// Unit field normalize(e + eps * localized perturbation), e a random unit vector.
inline VectorField random_unit(const Grid3& g, std::mt19937_64& rng, double eps = 0.25, double c = 1.0,
                               double s0 = 1.0, double s1 = 1.4) {
    std::normal_distribution<double> N(0.0, 1.0);
    double e[3] = {N(rng), N(rng), N(rng)};
    const double ne = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
    VectorField w = random_gaussian_vector(g, rng, c, s0, s1);
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < w[k].size(); ++i) w[k][i] = e[k] / ne + eps * w[k][i];
    for (std::size_t i = 0; i < w[0].size(); ++i) {
        const double n = std::sqrt(w[0][i] * w[0][i] + w[1][i] * w[1][i] + w[2][i] * w[2][i]);
        for (int c = 0; c < 3; ++c) w[c][i] /= n;
    }
    return w;
}

/// Smooth periodic unit field (sin a cos b, sin a sin b, cos a) with a, b
/// random trigonometric polynomials; every node has |v| = 1 to round-off.
inline VectorField random_unit_trig(const Grid3& g, std::mt19937_64& rng, int mmax = 2) {
    ScalarField a = random_trig(g, rng, mmax, false);
    ScalarField b = random_trig(g, rng, mmax, false);
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

}  // namespace elk::testing

namespace elk::testing {

/// Composite Simpson rule on [a,b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels = 20000) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// 4 pi int_0^R g(r) r^2 dr for a radial integrand g.
template <class G>
double radial_ball(G&& g, double R, int panels = 20000) {
    return 4.0 * std::numbers::pi * simpson([&](double r) { return g(r) * r * r; }, 0.0, R, panels);
}

}  // namespace elk::testing
