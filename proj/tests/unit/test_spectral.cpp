#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "elk/diff.hpp"
#include "elk/morrey.hpp"
#include "elk/spectral.hpp"
#include "support.hpp"

using namespace elk;
using namespace elk::spectral;
using elk::testing::max_abs_diff;
constexpr double pi = std::numbers::pi;

TEST_CASE("riesz examples") {
    const double L = 4.0;
    Grid3 g(32, L);
    const double k = pi / L;
    auto f = ScalarField::sample(g, [&](double x, double, double) { return std::cos(k * x); });
    auto ex = ScalarField::sample(g, [&](double x, double, double) { return -std::sin(k * x); });
    CHECK(max_abs_diff(riesz(f, 0), ex) <= 1e-12);
    CHECK(riesz(f, 1).max_abs() <= 1e-12);
    CHECK(riesz(ScalarField(g, 3.0), 2).max_abs() == 0.0);
    CHECK(mean(ScalarField(g, 3.0)) == 3.0);

    std::mt19937_64 rng(21);
    for (int t = 0; t < 3; ++t) {
        auto r = elk::testing::random_trig(g, rng, 6);
        ScalarField sum = riesz(riesz(r, 0), 0) + riesz(riesz(r, 1), 1) + riesz(riesz(r, 2), 2);
        CHECK(max_abs_diff(sum, r * -1.0) <= 1e-10);
    }
}

TEST_CASE("property: Riesz transforms commute with each other and with the Laplacian") {
    std::mt19937_64 rng(22);
    Grid3 g(32, 2.0);
    for (int t = 0; t < 3; ++t) {
        auto f = elk::testing::random_trig(g, rng, 5);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(max_abs_diff(riesz(riesz(f, i), j), riesz(riesz(f, j), i)) <= 1e-12);
            }
        const double s = laplacian(f).max_abs();
        CHECK(max_abs_diff(riesz(laplacian(f), 1), laplacian(riesz(f, 1))) <= 1e-12 * s);
        CHECK(max_abs_diff(riesz_pair(f, 0, 2), riesz(riesz(f, 0), 2)) <= 1e-12);
    }
}

TEST_CASE("property: Riesz is bounded on sampled local Morrey families") {
    std::mt19937_64 rng(23);
    Grid3 g(64, 8.0);
    const auto radii = morrey::geometric_ladder(7.2);
    for (auto [gamma, p] : std::vector<std::pair<double, double>>{{1.0, 3.0}, {2.0, 4.0}}) {
        const morrey::MorreyParams mp(gamma, p);
        double fitted = 0.0;
        int arg = -1;
        for (int t = 0; t < 6; ++t) {
            auto f = elk::testing::random_gaussians(g, rng, 2.0, 0.5, 1.2);
            for (int i = 0; i < 3; ++i) {
                const double c = morrey::local_morrey_norm(riesz(f, i), mp, radii).value /
                                 morrey::local_morrey_norm(f, mp, radii).value;
                if (c > fitted) {
                    fitted = c;
                    arg = t;
                }
            }
        }
        MESSAGE("Riesz fitted constant (gamma=" << gamma << ", p=" << p << "): " << fitted << " at member " << arg);
        CHECK(fitted < 5.0);
    }
}

TEST_CASE("leray examples and properties") {
    std::mt19937_64 rng(24);
    Grid3 g(32, pi);
    for (int t = 0; t < 3; ++t) {
        auto f = elk::testing::random_trig(g, rng, 6);
        CHECK(leray_project(gradient(f)).max_norm() <= 1e-10);
        VectorField w(elk::testing::random_trig(g, rng, 5), elk::testing::random_trig(g, rng, 5),
                      elk::testing::random_trig(g, rng, 5));
        auto c = curl(w);
        CHECK(max_abs_diff(leray_project(c), c) <= 1e-10);
        auto once = leray_project(w);
        CHECK(max_abs_diff(leray_project(once), once) <= 1e-12);
        CHECK(divergence(once).max_abs() <= 1e-10);
    }
}

TEST_CASE("pressure examples") {
    SUBCASE("zero data") {
        Grid3 g(32, 2.0);
        auto r = pressure_q(VectorField(g), TensorField(g));
        CHECK(r.q.max_abs() == 0.0);
        CHECK(r.grad_q.max_norm() == 0.0);
    }
    SUBCASE("Taylor-Green with constant director matches the Navier-Stokes pressure") {
        Grid3 g(32, pi);
        auto u = VectorField::sample(g, [](double x, double y, double z) {
            return std::array<double, 3>{std::sin(x) * std::cos(y) * std::cos(z), -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
        });
        auto r = pressure_q(u, jacobian(VectorField(ScalarField(g, 0.0), ScalarField(g, 0.0), ScalarField(g, 1.0))));
        // classical closed form, mean removed
        auto p = ScalarField::sample(g, [](double x, double y, double z) {
            return (std::cos(2 * x) + std::cos(2 * y)) * (std::cos(2 * z) + 2.0) / 16.0;
        });
        p -= ScalarField(g, mean(p));
        CHECK(max_abs_diff(r.q, p) <= 1e-9);
        // direct Poisson solve of -lap p = div div(u (x) u)
        TensorField uu(g);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) uu(i, j) = hadamard(u[i], u[j]);
        auto rhs = divergence(tensor_divergence(uu));
        SpectralPlan plan(g);
        auto direct = apply_multiplier(plan, rhs, [](double kx, double ky, double kz) {
            const double k2 = kx * kx + ky * ky + kz * kz;
            return Complex(k2 == 0 ? 0.0 : 1.0 / k2, 0.0);
        });
        CHECK(max_abs_diff(r.q, direct) <= 1e-9);
        CHECK(r.q_director.max_abs() == 0.0);
        CHECK(max_abs_diff(r.grad_q, gradient(r.q)) <= 1e-10);
    }
    SUBCASE("random battery: Poisson residual, symmetry, zero mean") {
        std::mt19937_64 rng(25);
        Grid3 g(64, 8.0);
        for (int t = 0; t < 3; ++t) {
            auto u = elk::testing::random_solenoidal(g, rng);
            auto v = elk::testing::random_unit(g, rng);
            auto J = jacobian(v);
            auto r = pressure_q(u, J);
            CHECK(r.poisson_residual <= 1e-8);
            CHECK(std::abs(mean(r.q)) <= 1e-14);
            auto rm = pressure_q(u * -1.0, J);
            CHECK(max_abs_diff(r.q, rm.q) <= 1e-13 * std::max(1.0, r.q.max_abs()));
        }
    }
    SUBCASE("divergence violation is refused") {
        Grid3 g(32, pi);
        auto u = VectorField::sample(g, [](double x, double, double) { return std::array<double, 3>{std::sin(x), 0, 0}; });
        CHECK_THROWS_AS(pressure_q(u, TensorField(g)), PreconditionError);
    }
}

TEST_CASE("heat examples") {
    const double L = 8.0;
    Grid3 g(64, L);
    std::mt19937_64 rng(26);
    auto f = elk::testing::random_gaussians(g, rng);
    CHECK_THROWS_AS(heat_convolve(f, 0.0), DomainError);
    CHECK_THROWS_AS(heat_convolve(f, -1.0), DomainError);
    CHECK(max_abs_diff(heat_convolve(f, 1e-12), f) <= 1e-6 * f.max_abs());
    CHECK(max_abs_diff(heat_convolve(heat_convolve(f, 0.3), 0.2), heat_convolve(f, 0.5)) <= 1e-12);
    const double s = 0.5, t = 0.4;
    auto hs = ScalarField::sample(g, [&](double x, double y, double z) {
        return std::pow(4 * pi * s, -1.5) * std::exp(-(x * x + y * y + z * z) / (4 * s));
    });
    const double expect = std::pow(4 * pi * (t + s), -1.5);
    CHECK(heat_convolve(hs, t).max_abs() == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("besov examples") {
    const double L = 8.0;
    Grid3 g(64, L);
    CHECK(besov_minus1_norm(ScalarField(g)).value == 0.0);
    auto gauss = [&](double s, double lambda) {
        return ScalarField::sample(g, [=](double x, double y, double z) {
            x *= lambda, y *= lambda, z *= lambda;
            return lambda * std::pow(4 * pi * s, -1.5) * std::exp(-(x * x + y * y + z * z) / (4 * s));
        });
    };
    const double s = 0.5;
    auto r = besov_minus1_norm(gauss(s, 1.0));
    const double closed = 2.0 / (3.0 * std::sqrt(3.0) * std::pow(4 * pi, 1.5) * s);
    CHECK(std::abs(r.value - closed) <= 0.02 * closed);
    CHECK(r.argmax_t == doctest::Approx(s / 2).epsilon(0.05));
    CHECK(r.value >= r.ladder_value);
    CHECK_FALSE(r.wraparound);
    CHECK_FALSE(r.boundary_contaminated);
    CHECK(r.t_min == g.spacing() * g.spacing());
    CHECK(r.t_max == 16.0);
    auto r2 = besov_minus1_norm(gauss(s, 2.0));
    CHECK(std::abs(r2.value - r.value) <= 0.05 * r.value);
}

TEST_CASE("Parseval gradient energy") {
    Grid3 g(32, pi);
    auto f = ScalarField::sample(g, [](double x, double y, double) { return std::sin(x) + std::cos(2 * y); });
    // int |grad f|^2 = int cos^2 x + 4 sin^2 2y = (1/2 + 2) (2 pi)^3
    CHECK(hdot1_sq(f) == doctest::Approx(2.5 * std::pow(2 * pi, 3)).epsilon(1e-12));
}
