#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "elk/grid.hpp"

namespace elk::samples {

/// exp(1 - 1/(1 - |x|^2/rho^2)) inside |x| < rho, 0 outside; max 1 at the origin.
ScalarField radial_bump(const Grid3& g, double rho = 2.0);
/// The same profile as a function of r, for oracles.
double radial_bump_value(double r, double rho = 2.0);

/// exp(-|x|^2 / s^2).
ScalarField gaussian(const Grid3& g, double s = 1.0);
/// lambda e (1, -1/2, x/4) with e = exp(-lambda^2 |x|^2), the Sobolev sample.
VectorField gaussian_vector(const Grid3& g, double lambda = 1.0);

/// Periodic random fields built from trigonometric polynomials with wave
/// numbers up to mmax in units of pi/L. Fully resolved for n >= 16 mmax.
class TrigBattery {
public:
    TrigBattery(std::uint64_t seed, int mmax = 2) : rng_(seed), mmax_(mmax) {}
    ScalarField scalar(const Grid3& g, bool mean_free = true);
    VectorField solenoidal(const Grid3& g);  ///< curl of a random potential
    VectorField unit(const Grid3& g);        ///< (sin a cos b, sin a sin b, cos a)

private:
    std::mt19937_64 rng_;
    int mmax_;
};

/// Names accepted by `gen`: the solver presets plus "bump" and "gaussian".
std::vector<std::string> sample_names();

}  // namespace elk::samples
