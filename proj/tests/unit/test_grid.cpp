#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "elk/cutoff.hpp"
#include "elk/diff.hpp"
#include "elk/field_io.hpp"
#include "elk/quadrature.hpp"
#include "support.hpp"

using namespace elk;
using elk::testing::max_abs_diff;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid geometry") {
    Grid3 g(32, 4.0);
    CHECK(g.spacing() == 0.25);
    CHECK(g.coord(0) == -4.0);
    CHECK(g.coord(16) == 0.0);
    CHECK(g.cell_volume() == 0.25 * 0.25 * 0.25);
    CHECK(g.index(1, 2, 3) == (1u * 32 + 2) * 32 + 3);
    CHECK(g.wrap(-1) == 31);
    CHECK(g.wrap(32) == 0);
    CHECK(g.is_power_of_two());
    CHECK_FALSE(Grid3(24, 1.0).is_power_of_two());
    CHECK_THROWS_AS(Grid3(8, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid3(32, 0.0), ConfigError);
}

TEST_CASE("spectral scheme refuses non power-of-two grids") {
    Grid3 g(24, 1.0);
    ScalarField f(g, 1.0);
    CHECK_THROWS_AS(gradient(f, Scheme::spectral), ConfigError);
    CHECK_NOTHROW(gradient(f, Scheme::fd4));
}

TEST_CASE("gradient examples") {
    const double L = 8.0;
    Grid3 g(64, L);
    SUBCASE("single mode") {
        auto f = ScalarField::sample(g, [&](double x, double, double) { return std::sin(pi * x / L); });
        auto d = gradient(f);
        auto ex = ScalarField::sample(g, [&](double x, double, double) { return pi / L * std::cos(pi * x / L); });
        CHECK(max_abs_diff(d[0], ex) <= 1e-12);
        CHECK(d[1].max_abs() <= 1e-12);
    }
    SUBCASE("constant") {
        auto d = gradient(ScalarField(g, 1.0));
        CHECK(d.max_norm() == 0.0);
        auto d4 = gradient(ScalarField(g, 1.0), Scheme::fd4);
        CHECK(d4.max_norm() == 0.0);
    }
    SUBCASE("gaussian") {
        auto f = ScalarField::sample(g, [](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z)); });
        auto d = gradient(f);
        auto ex = VectorField::sample(g, [](double x, double y, double z) {
            const double e = std::exp(-(x * x + y * y + z * z));
            return std::array<double, 3>{-2 * x * e, -2 * y * e, -2 * z * e};
        });
        CHECK(max_abs_diff(d, ex) <= 1e-8);
    }
}

TEST_CASE("jacobian examples") {
    SUBCASE("periodized linear field, interior") {
        // u = (2x, 2y, -4z) * chi, chi = 1 on |x_i| <= L/2 and smoothly 0 at the faces.
        const double L = 8.0;
        Grid3 g(64, L);
        auto chi = [&](double s) { return bump::psi(std::abs(s) / L); };
        auto u = VectorField::sample(g, [&](double x, double y, double z) {
            const double c = chi(x) * chi(y) * chi(z);
            return std::array<double, 3>{2 * x * c, 2 * y * c, -4 * z * c};
        });
        auto interior_error = [&](const TensorField& J) {
            const double diag[3] = {2, 2, -4};
            double err = 0.0;
            g.for_each([&](std::size_t i, double x, double y, double z) {
                if (std::max({std::abs(x), std::abs(y), std::abs(z)}) > 0.5 * L - 2 * g.spacing()) return;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) err = std::max(err, std::abs(J(a, b)[i] - (a == b ? diag[a] : 0.0)));
            });
            return err;
        };
        // fd4 is exact on polynomials of degree <= 4, so the window result is round-off only.
        CHECK(interior_error(jacobian(u, Scheme::fd4)) <= 1e-8);
        // The spectral scheme sees the finite smoothness scale of the periodization.
        CHECK(interior_error(jacobian(u, Scheme::spectral)) <= 1e-2);
        auto div = divergence(u, Scheme::fd4);
        double derr = 0.0;
        g.for_each([&](std::size_t i, double x, double y, double z) {
            if (std::max({std::abs(x), std::abs(y), std::abs(z)}) <= 0.5 * L - 2 * g.spacing())
                derr = std::max(derr, std::abs(div[i]));
        });
        CHECK(derr <= 1e-8);
    }
    SUBCASE("constant field") {
        Grid3 g(32, 1.0);
        VectorField v(ScalarField(g, 0.3), ScalarField(g, -1.0), ScalarField(g, 2.0));
        CHECK(jacobian(v).max_norm() == 0.0);
    }
    SUBCASE("single mode (sin y, 0, 0)") {
        Grid3 g(32, pi);
        auto v = VectorField::sample(g, [](double, double y, double) { return std::array<double, 3>{std::sin(y), 0, 0}; });
        auto J = jacobian(v);
        auto ex = ScalarField::sample(g, [](double, double y, double) { return std::cos(y); });
        CHECK(max_abs_diff(J(1, 0), ex) <= 1e-12);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (!(a == 1 && b == 0)) CHECK(J(a, b).max_abs() <= 1e-12);
    }
}

TEST_CASE("laplacian examples") {
    const double L = 8.0;
    Grid3 g(64, L);
    auto f = ScalarField::sample(g, [&](double x, double, double) { return std::sin(pi * x / L); });
    auto ex = ScalarField::sample(g, [&](double x, double, double) { return -(pi / L) * (pi / L) * std::sin(pi * x / L); });
    CHECK(max_abs_diff(laplacian(f), ex) <= 1e-12);
    CHECK(laplacian(ScalarField(g, 5.0)).max_abs() == 0.0);
    auto gauss = ScalarField::sample(g, [](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z)); });
    auto gex = ScalarField::sample(g, [](double x, double y, double z) {
        const double r2 = x * x + y * y + z * z;
        return (4 * r2 - 6) * std::exp(-r2);
    });
    CHECK(max_abs_diff(laplacian(gauss), gex) <= 1e-7);
}

TEST_CASE("fd4 converges at fourth order") {
    const double L = pi;
    double e[2];
    for (int t = 0; t < 2; ++t) {
        Grid3 g(t == 0 ? 32 : 64, L);
        auto f = ScalarField::sample(g, [](double x, double y, double z) { return std::sin(x) * std::cos(2 * y) + std::sin(z); });
        auto d = derivative(f, 0, Scheme::fd4);
        auto an = ScalarField::sample(g, [](double x, double y, double) { return std::cos(x) * std::cos(2 * y); });
        e[t] = max_abs_diff(d, an);
    }
    CHECK(e[0] / e[1] > 14.0);
}

TEST_CASE("divergence examples") {
    Grid3 g(32, 2.0);
    TensorField id(g);
    for (int a = 0; a < 3; ++a) id(a, a) = ScalarField(g, 1.0);
    CHECK(tensor_divergence(id).max_norm() == 0.0);
}

TEST_CASE("property: div grad = lap for smooth periodic fields") {
    std::mt19937_64 rng(11);
    Grid3 g(32, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = elk::testing::random_trig(g, rng, 5);
        const double scale = laplacian(f).max_abs();
        CHECK(max_abs_diff(divergence(gradient(f)), laplacian(f)) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("property: tensor identity div(grad v . grad v) = grad(|grad v|^2/2) + (lap v)(grad v)") {
    std::mt19937_64 rng(12);
    Grid3 g(64, pi);
    for (int trial = 0; trial < 5; ++trial) {
        VectorField v(elk::testing::random_trig(g, rng, 3), elk::testing::random_trig(g, rng, 3),
                      elk::testing::random_trig(g, rng, 3));
        auto J = jacobian(v);
        auto lhs = tensor_divergence(row_gram(J, J));
        auto half = norm_sq(J) * 0.5;
        auto rhs = gradient(half) + contract_second(J, laplacian(v));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-7);
    }
}

TEST_CASE("property: unit field identity -|grad v|^2 = v . lap v") {
    std::mt19937_64 rng(13);
    Grid3 g(64, pi);
    for (int trial = 0; trial < 5; ++trial) {
        auto v = elk::testing::random_unit_trig(g, rng);
        auto lhs = norm_sq(jacobian(v)) * -1.0;
        auto rhs = dot(v, laplacian(v));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-6);
    }
}

TEST_CASE("cutoff profile") {
    CHECK(bump::psi(0.25) == 1.0);
    CHECK(bump::psi(0.5) == 1.0);
    CHECK(bump::psi(1.0) == 0.0);
    CHECK(bump::psi(0.75) == doctest::Approx(0.5));
    // derivatives against central differences of the closed form
    for (double s : {0.55, 0.6, 0.7, 0.8, 0.9, 0.95}) {
        const double h = 1e-5;
        CHECK(bump::dpsi(s) == doctest::Approx((bump::psi(s + h) - bump::psi(s - h)) / (2 * h)).epsilon(1e-6));
        CHECK(bump::d2psi(s) == doctest::Approx((bump::dpsi(s + h) - bump::dpsi(s - h)) / (2 * h)).epsilon(1e-5));
    }
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        CHECK(bump::psi(s) >= 0.0);
        CHECK(bump::psi(s) <= 1.0);
        CHECK(bump::dpsi(s) <= 0.0);
    }
}

TEST_CASE("cutoff examples") {
    Cutoff c(4.0);
    CHECK(c.value(1.0) == 1.0);
    CHECK(c.value(8.0) == 0.0);
    CHECK(c.radial_derivative(8.0) == 0.0);
    CHECK_THROWS_AS(Cutoff(0.5), DomainError);
    Grid3 g(32, 2.0);
    CHECK_THROWS_AS(cutoff_field(g, 3.0), DomainError);

    // Scale invariance: R * ||grad theta_R|| is the same constant for every R.
    const double ref = Cutoff(1.0).grad_sup() * 1.0;
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
        CHECK(std::abs(R * Cutoff(R).grad_sup() - ref) <= 1e-10);
        CHECK(std::abs(R * R * Cutoff(R).lap_sup() - Cutoff(1.0).lap_sup()) <= 1e-10);
    }
}

TEST_CASE("property: sampled cutoff obeys the c/R and c/R^2 bounds") {
    Grid3 g(64, 9.0);
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
        auto cf = cutoff_field(g, R);
        CHECK(cf.grad.max_norm() * R <= bump::dpsi_sup() * (1 + 1e-9));
        CHECK(cf.lap.max_abs() * R * R <= bump::lap_sup() * (1 + 1e-9));
        g.for_each([&](std::size_t i, double x, double y, double z) {
            const double r = std::sqrt(x * x + y * y + z * z);
            if (r < R / 2) REQUIRE(cf.theta[i] == 1.0);
            if (r >= R) REQUIRE(cf.theta[i] == 0.0);
        });
    }
    // closed-form derivatives agree with spectral differentiation of the sampled bump,
    // with the gap shrinking fast under refinement
    double eg[2], el[2];
    for (int t = 0; t < 2; ++t) {
        Grid3 g2(t == 0 ? 64 : 128, 8.0);
        auto cf = cutoff_field(g2, 7.0);
        eg[t] = max_abs_diff(gradient(cf.theta), cf.grad) / cf.grad.max_norm();
        el[t] = max_abs_diff(laplacian(cf.theta), cf.lap) / cf.lap.max_abs();
    }
    MESSAGE("cutoff spectral/closed-form gap: grad " << eg[0] << " -> " << eg[1] << ", lap " << el[0] << " -> " << el[1]);
    CHECK(eg[0] <= 5e-3);
    CHECK(eg[1] <= eg[0] / 10);
    CHECK(el[1] <= el[0] / 10);
}

TEST_CASE("annulus examples") {
    SUBCASE("unit integrand gives the shell volume") {
        Grid3 g(128, 8.0);
        auto r = annulus_integral(ScalarField(g, 1.0), 4.0, 1.0);
        const double exact = 7.0 * pi / 6.0 * 64.0;
        CHECK(std::abs(r.smoothed - exact) <= 5e-3 * exact);
        CHECK(std::abs(r.sharp - exact) <= 2e-2 * exact);
        CHECK_FALSE(r.under_resolved);
    }
    SUBCASE("support inside B(R/4) gives exactly zero") {
        Grid3 g(64, 8.0);
        const double R = 4.0;
        auto f = ScalarField::sample(g, [&](double x, double y, double z) {
            const double r = std::sqrt(x * x + y * y + z * z);
            return r < R / 4 ? 1.0 + x : 0.0;
        });
        auto a = annulus_integral(f, R, 2.0);
        CHECK(a.smoothed == 0.0);
        CHECK(a.sharp == 0.0);
    }
    SUBCASE("constant |grad u|^2 = 24") {
        Grid3 g(128, 8.0);
        TensorField J(g);
        J(0, 0) = ScalarField(g, 2.0);
        J(1, 1) = ScalarField(g, 2.0);
        J(2, 2) = ScalarField(g, -4.0);
        const double R = 4.0;
        const BallIntegrator bi(abs_pow(J, 2.0));
        const double exact = 24.0 * 7.0 * pi / 6.0 * R * R * R;
        CHECK(std::abs(bi.shell(R).smoothed - exact) <= 1e-2 * exact);
    }
    SUBCASE("under-resolved annuli are flagged") {
        Grid3 g(16, 8.0);
        CHECK(annulus_integral(ScalarField(g, 1.0), 2.0, 1.0).under_resolved);
    }
}

TEST_CASE("property: annulus additivity") {
    std::mt19937_64 rng(5);
    Grid3 g(64, 8.0);
    for (int t = 0; t < 5; ++t) {
        auto f = abs_pow(elk::testing::random_gaussians(g, rng, 2.0), 2.0);
        const BallIntegrator bi(f);
        for (double R : {1.5, 2.0, 3.3, 5.0, 7.0}) {
            const double diff = bi.ball(R).smoothed - bi.ball(R / 2).smoothed;
            CHECK(bi.shell(R).smoothed == doctest::Approx(diff).epsilon(1e-12));
            CHECK(bi.shell(R).sharp <= bi.ball(R).sharp + 1e-15);
        }
    }
}

TEST_CASE("ball integrator matches a brute-force sum") {
    std::mt19937_64 rng(6);
    Grid3 g(32, 4.0);
    auto f = elk::testing::random_gaussians(g, rng, 1.0);
    const std::array<int, 3> c{10, 20, 5};
    const BallIntegrator bi(f, c);
    const double h = g.spacing();
    for (double R : {0.7, 1.3, 2.9}) {
        double smooth = 0.0, sharp = 0.0;
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j)
                for (int k = 0; k < 32; ++k) {
                    auto md = [&](int a, int b) {
                        int d = ((a - b) % 32 + 32) % 32;
                        return d >= 16 ? d - 32 : d;
                    };
                    const double dx = md(i, c[0]) * h, dy = md(j, c[1]) * h, dz = md(k, c[2]) * h;
                    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                    const double v = f[g.index(i, j, k)];
                    smooth += v * std::clamp((R - r) / h + 0.5, 0.0, 1.0);
                    if (r < R) sharp += v;
                }
        CHECK(bi.ball(R).smoothed == doctest::Approx(smooth * g.cell_volume()).epsilon(1e-11));
        CHECK(bi.ball(R).sharp == doctest::Approx(sharp * g.cell_volume()).epsilon(1e-11));
    }
}

TEST_CASE("decay margin") {
    Grid3 g(64, 8.0);
    auto gauss = ScalarField::sample(g, [](double x, double y, double z) { return std::exp(-(x * x + y * y + z * z)); });
    CHECK(decay_margin_ok(gauss));
    auto slow = ScalarField::sample(g, [](double x, double y, double z) { return 1.0 / (1.0 + x * x + y * y + z * z); });
    CHECK_FALSE(decay_margin_ok(slow));
    CHECK(tail_ratio(ScalarField(g)) == 0.0);
}

TEST_CASE("ELF3 round trip and format errors") {
    const auto dir = std::filesystem::temp_directory_path() / "elk_io_test";
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(7);
    Grid3 g(16, 2.5);
    auto f = elk::testing::random_trig(g, rng);
    write_field(dir / "s.elf3", f);
    CHECK(std::filesystem::file_size(dir / "s.elf3") == 64u + 8u * 16u * 16u * 16u);
    auto back = read_field(dir / "s.elf3");
    CHECK(back.grid == g);
    REQUIRE(back.components.size() == 1);
    CHECK(std::memcmp(back.components[0].data(), f.data(), 8 * g.size()) == 0);

    VectorField v(f, f * 2.0, f * -1.0);
    write_field(dir / "v.elf3", v);
    auto vb = read_field(dir / "v.elf3").vector();
    CHECK(max_abs_diff(vb, v) == 0.0);
    CHECK_THROWS_AS(read_field(dir / "v.elf3").scalar(), FormatError);

    TensorField t(g);
    for (int k = 0; k < 9; ++k) t.flat(k) = f * double(k);
    write_field(dir / "t.elf3", t);
    auto tb = read_field(dir / "t.elf3").tensor();
    for (int k = 0; k < 9; ++k) CHECK(max_abs_diff(tb.flat(k), t.flat(k)) == 0.0);

    {  // bad magic
        std::fstream io(dir / "s.elf3", std::ios::in | std::ios::out | std::ios::binary);
        io.write("ELF4", 4);
    }
    CHECK_THROWS_AS(read_field(dir / "s.elf3"), FormatError);

    write_field(dir / "s.elf3", f);
    std::filesystem::resize_file(dir / "s.elf3", 64 + 8 * 100);
    CHECK_THROWS_AS(read_field(dir / "s.elf3"), FormatError);
    CHECK_THROWS_AS(read_field(dir / "missing.elf3"), FormatError);
    std::filesystem::remove_all(dir);
}
