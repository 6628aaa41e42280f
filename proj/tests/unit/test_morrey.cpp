#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "elk/morrey.hpp"
#include "elk/quadrature.hpp"
#include "support.hpp"

using namespace elk;
using namespace elk::morrey;
constexpr double pi = std::numbers::pi;

namespace {
ScalarField smoothed_ball_indicator(const Grid3& g, double rho) {
    const double h = g.spacing();
    return ScalarField::sample(g, [&](double x, double y, double z) {
        return std::clamp((rho - std::sqrt(x * x + y * y + z * z)) / h + 0.5, 0.0, 1.0);
    });
}
}  // namespace

TEST_CASE("eta anchors") {
    CHECK(eta(1.0, 3.0) == 0.0);
    CHECK(classify(1.0, 3.0).region == Region::eta_nonpositive);
    // threshold curve gamma = 3 - 2p/3
    CHECK(3.0 - 2.0 * 3.0 / 3.0 == 1.0);
    CHECK(3.0 - 2.0 * 4.5 / 3.0 == 0.0);
    CHECK(eta(2.9, 100.0) == doctest::Approx(2.9 / 100 - 3.0 / 100 + 2.0 / 3.0).epsilon(1e-15));
    CHECK(eta(2.9, 100.0) == doctest::Approx(0.6656666666666666));
    CHECK(classify(2.9, 100.0).region == Region::eta_positive);
    CHECK(classify(0.0, 3.0).region == Region::undefined);
    CHECK(classify(3.0, 5.0).region == Region::undefined);
    CHECK(classify(1.0, 2.5).region == Region::undefined);
    CHECK_THROWS_AS(MorreyParams(1.0, 2.0), DomainError);
    CHECK_THROWS_AS(MorreyParams(0.0, 3.0), DomainError);
    CHECK(MorreyParams(1.0, 3.0).eta() == 0.0);
}

TEST_CASE("property: eta monotone and the sign boundary is gamma = 3 - 2p/3") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> G(0.01, 2.99), P(3.0, 50.0), D(1e-6, 0.5);
    for (int i = 0; i < 2000; ++i) {
        const double g = G(rng), p = P(rng), d = D(rng);
        if (g + d < 3.0) CHECK(eta(g + d, p) > eta(g, p));
        CHECK(eta(g, p + d) > eta(g, p));
        const double gb = 3.0 - 2.0 * p / 3.0;
        if (gb > 0.0) {
            CHECK(std::abs(eta(gb, p)) <= kEtaZeroTolerance);
        }
        const bool below = g < gb - 1e-9, above = g > gb + 1e-9;
        if (below) CHECK(classify(g, p).region == Region::eta_nonpositive);
        if (above) CHECK(classify(g, p).region == Region::eta_positive);
    }
}

TEST_CASE("eta map and ranges") {
    auto gs = parse_range("0.1:2.9:0.1");
    auto ps = parse_range("3:10:0.5");
    CHECK(gs.size() == 29);
    CHECK(ps.size() == 15);
    auto pts = eta_region_map(gs, ps);
    bool found = false;
    for (const auto& q : pts)
        if (q.gamma == 1.0 && q.p == 3.0) {
            found = true;
            CHECK(q.region == Region::eta_nonpositive);
            CHECK(q.eta == 0.0);
        }
    CHECK(found);
    std::ostringstream os;
    write_eta_csv(os, eta_region_map({2.9}, {100}));
    CHECK(os.str().find("2.8999999999999999,100,0.66566666666666663,eta_positive") != std::string::npos);
    CHECK_THROWS_AS(parse_range("3:1:0.5"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_range("a:b:c"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
}

TEST_CASE("ladders") {
    auto l = geometric_ladder(7.2);
    REQUIRE(l.size() == 6);
    CHECK(l[0] == 1.0);
    CHECK(l[2] == doctest::Approx(2.0));
    CHECK(l.back() == doctest::Approx(4 * std::sqrt(2.0)));
    CHECK(parse_ladder("1,2,4", 7.2) == std::vector<double>{1, 2, 4});
    CHECK(parse_ladder("geometric:2", 7.2) == std::vector<double>{1, 2, 4});
    Grid3 g(32, 4.0);
    CHECK_THROWS_AS(validate_radii({}, g), DomainError);
    CHECK_THROWS_AS(validate_radii({0.5, 1.0}, g), DomainError);
    CHECK_THROWS_AS(validate_radii({1.0, 3.7}, g), DomainError);
    CHECK_THROWS_AS(validate_radii({2.0, 1.0}, g), DomainError);
}

TEST_CASE("local Morrey norm examples") {
    SUBCASE("indicator of the unit ball") {
        Grid3 g(128, 4.0);
        auto f = smoothed_ball_indicator(g, 1.0);
        auto r = local_morrey_norm(f, MorreyParams(1.0, 3.0), geometric_ladder(3.6));
        const double exact = std::cbrt(4.0 * pi / 3.0);
        CHECK(std::abs(r.value - exact) <= 0.02 * exact);
        CHECK(r.argmax_R == doctest::Approx(std::sqrt(2.0)).epsilon(0.3));
        CHECK_FALSE(r.edge_suspect);
        CHECK_FALSE(r.boundary_contaminated);
    }
    SUBCASE("zero") {
        Grid3 g(32, 4.0);
        auto r = local_morrey_norm(ScalarField(g), MorreyParams(1.0, 3.0), geometric_ladder(3.6));
        CHECK(r.value == 0.0);
    }
    SUBCASE("algebraic decay against a radial oracle") {
        const double L = 16.0;
        Grid3 g(128, L);
        auto f = ScalarField::sample(g, [](double x, double y, double z) {
            return std::pow(1.0 + std::sqrt(x * x + y * y + z * z), -2.0);
        });
        const auto radii = geometric_ladder(0.9 * L);
        auto r = local_morrey_norm(f, MorreyParams(1.0, 3.0), radii);
        double oracle = 0.0;
        for (double R : radii)
            oracle = std::max(oracle, std::cbrt(elk::testing::radial_ball([](double s) { return std::pow(1 + s, -6.0); }, R) / R));
        CHECK(std::isfinite(r.value));
        CHECK(std::abs(r.value - oracle) <= 0.02 * oracle);
        CHECK(r.boundary_contaminated);  // (1+|x|)^-2 is far above 1e-8 near the faces
    }
}

TEST_CASE("homogeneous Morrey norm examples") {
    SUBCASE("zero") {
        Grid3 g(32, 4.0);
        CHECK(homogeneous_morrey_norm(ScalarField(g), 3.0, 4.5, {0.5, 1.0, 2.0}).value == 0.0);
    }
    SUBCASE("indicator, direct evaluation at (0,1)") {
        Grid3 g(64, 4.0);
        auto f = smoothed_ball_indicator(g, 1.0);
        auto full = homogeneous_morrey_norm(f, 3.0, 4.5, {0.5, 1.0, 2.0, 3.0});
        auto at0 = homogeneous_morrey_at_origin(f, 3.0, 4.5, {1.0});
        const BallIntegrator bi(abs_pow(f, 3.0));
        CHECK(at0.value == doctest::Approx(std::cbrt(bi.ball(1.0).smoothed)).epsilon(1e-14));
        // once the ball clears the one-cell ramp of f, R^(2/3-1) (int)^(1/3) sees the full volume
        const double R1 = 1.0 + g.spacing();
        const double v1 = homogeneous_morrey_at_origin(f, 3.0, 4.5, {R1}).value;
        const double h = g.spacing();
        const double oracle = elk::testing::radial_ball(
            [&](double r) { return std::pow(std::clamp((1.0 - r) / h + 0.5, 0.0, 1.0), 3.0); }, R1, 200000);
        CHECK(std::abs(v1 - std::cbrt(oracle / R1)) <= 0.02 * v1);
        CHECK(full.value >= at0.value);
        CHECK(full.centers == 512);
        CHECK_THROWS_AS(homogeneous_morrey_norm(f, 3.0, 2.0, {1.0}), DomainError);
    }
    SUBCASE("identity with M^3_1 on R >= 1") {
        std::mt19937_64 rng(3);
        Grid3 g(64, 8.0);
        const auto radii = geometric_ladder(7.2);
        for (int t = 0; t < 5; ++t) {
            auto f = elk::testing::random_gaussians(g, rng);
            const double h = homogeneous_morrey_at_origin(f, 3.0, 4.5, radii).value;
            const double l = local_morrey_norm(f, MorreyParams(1.0, 3.0), radii).value;
            CHECK(std::abs(h - l) <= 1e-10 * std::max(1.0, l));
        }
    }
}

TEST_CASE("weighted Lebesgue norm examples") {
    SUBCASE("zero") {
        Grid3 g(32, 4.0);
        CHECK(weighted_lebesgue_norm(ScalarField(g), 3.0, 1.0).value == 0.0);
    }
    SUBCASE("ball volume") {
        Grid3 g(128, 4.0);
        auto r = weighted_lebesgue_norm(smoothed_ball_indicator(g, 1.0), 1.0, 0.0);
        CHECK(std::abs(r.value - 4 * pi / 3) <= 0.01 * 4 * pi / 3);
    }
    SUBCASE("embedding into local Morrey with C <= 2^(gamma/p)") {
        std::mt19937_64 rng(4);
        Grid3 g(64, 8.0);
        const auto radii = geometric_ladder(7.2);
        for (double gamma : {0.5, 1.0, 2.0})
            for (double p : {3.0, 4.5}) {
                double fitted = 0.0;
                for (int t = 0; t < 10; ++t) {
                    auto f = elk::testing::random_gaussians(g, rng, 2.0, 0.5, 1.2);
                    const double m = local_morrey_norm(f, MorreyParams(gamma, p), radii).value;
                    const double w = weighted_lebesgue_norm(f, p, gamma).value;
                    fitted = std::max(fitted, m / w);
                }
                MESSAGE("gamma=" << gamma << " p=" << p << " fitted C=" << fitted);
                CHECK(fitted <= std::pow(2.0, gamma / p) * (1 + 1e-12));
            }
    }
}

TEST_CASE("annulus profile examples") {
    SUBCASE("support in B(0,1) gives exact zeros from R = 2") {
        Grid3 g(64, 8.0);
        std::mt19937_64 rng(8);
        auto w = elk::testing::random_gaussians(g, rng);
        ScalarField f = ScalarField::sample(g, [](double x, double y, double z) {
            return std::sqrt(x * x + y * y + z * z) < 1.0 ? 1.0 + 0.3 * x * y : 0.0;
        });
        f = hadamard(f, w);
        auto prof = annulus_profile(f, MorreyParams(1.5, 4.0), {1.0, 1.5, 2.0, 3.0, 5.0, 7.0});
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            if (prof.radii[i] >= 2.0) CHECK(prof.values_sharp[i] == 0.0);
            if (prof.radii[i] >= 2.0 + g.spacing()) CHECK(prof.values[i] == 0.0);
        }
        CHECK(prof.decaying());
    }
    SUBCASE("algebraic decay is strictly decreasing on {2,4,8}") {
        Grid3 g(128, 16.0);
        auto f = ScalarField::sample(g, [](double x, double y, double z) {
            return std::pow(1.0 + std::sqrt(x * x + y * y + z * z), -2.0);
        });
        auto prof = annulus_profile(f, MorreyParams(1.0, 3.0), {2.0, 4.0, 8.0});
        CHECK(prof.values[0] > prof.values[1]);
        CHECK(prof.values[1] > prof.values[2]);
        // radial oracle for each shell
        for (std::size_t i = 0; i < 3; ++i) {
            const double R = prof.radii[i];
            auto g6 = [](double s) { return std::pow(1 + s, -6.0); };
            const double shell = elk::testing::radial_ball(g6, R) - elk::testing::radial_ball(g6, R / 2);
            CHECK(prof.values[i] == doctest::Approx(std::cbrt(shell / R)).epsilon(0.02));
        }
    }
    SUBCASE("linear growth gives an increasing profile") {
        Grid3 g(64, 8.0);
        auto u = VectorField::sample(g, [](double x, double y, double z) { return std::array<double, 3>{2 * x, 2 * y, -4 * z}; });
        auto prof = annulus_profile(u, MorreyParams(1.0, 3.0), geometric_ladder(7.2));
        CHECK(prof.increasing());
        CHECK_FALSE(prof.decaying());
    }
}

TEST_CASE("decay rule") {
    CHECK(decay_rule({5, 4, 3, 0.4}));
    CHECK_FALSE(decay_rule({5, 4, 3, 2}));        // final not below 0.1 max
    CHECK_FALSE(decay_rule({1, 3, 0.2, 0.25}));   // not strictly decreasing
    CHECK(decay_rule({0, 0, 0}));
    CHECK(decay_rule({3, 1, 0, 0}));
    CHECK_FALSE(decay_rule({1, 0.01}));           // too short
    CHECK_FALSE(decay_rule({}));
}

TEST_CASE("property: gamma monotonicity, radius-set growth, scaled profile") {
    std::mt19937_64 rng(9);
    Grid3 g(64, 8.0);
    const auto radii = geometric_ladder(7.2);
    std::uniform_real_distribution<double> G(0.05, 2.95), P(3.0, 8.0);
    for (int t = 0; t < 8; ++t) {
        auto f = elk::testing::random_gaussians(g, rng, 2.0, 0.4, 1.5);
        const double p = P(rng);
        double g1 = G(rng), g2 = G(rng);
        if (g1 > g2) std::swap(g1, g2);
        CHECK(local_morrey_norm(f, MorreyParams(g2, p), radii).value <= local_morrey_norm(f, MorreyParams(g1, p), radii).value);

        std::vector<double> sub;
        for (std::size_t i = 0; i < radii.size(); i += 2) sub.push_back(radii[i]);
        const MorreyParams mp(g1, p);
        CHECK(local_morrey_norm(f, mp, sub).value <= local_morrey_norm(f, mp, radii).value);

        auto prof = annulus_profile(f, mp, radii);
        for (std::size_t i = 0; i < radii.size(); ++i)
            CHECK(prof.scaled_values[i] == std::pow(radii[i], 3.0 * mp.eta()) * prof.values[i]);
    }
}

TEST_CASE("shell energy profile") {
    Grid3 g(64, 8.0);
    TensorField J(g);
    J(0, 0) = ScalarField(g, 1.0);
    auto s = shell_energy_profile(J, {1.0, 2.0, 4.0});
    CHECK(s.edge_suspect);
    CHECK(s.sup == doctest::Approx(7 * pi / 6 * 64).epsilon(0.02));
}
