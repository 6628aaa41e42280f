#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "elk/grid.hpp"

namespace elk::morrey {

/// (3 gamma + 2p - 9) / (3p), i.e. gamma/p - 3/p + 2/3 with one rounding
/// step, so the zero set gamma = 3 - 2p/3 is hit exactly whenever
/// 3 gamma + 2p - 9 is.
double eta(double gamma, double p);

/// Local Morrey exponents with 0 < gamma < 3 <= p.
class MorreyParams {
public:
    MorreyParams(double gamma, double p);
    double gamma() const { return gamma_; }
    double p() const { return p_; }
    double eta() const { return eta_; }

private:
    double gamma_, p_, eta_;
};

/// {1, b, b^2, ...} up to rmax.
std::vector<double> geometric_ladder(double rmax, double base = 1.4142135623730951, double rmin = 1.0);
/// "geometric:<base>" or a comma list "r1,r2,...".
std::vector<double> parse_ladder(const std::string& spec, double rmax);

/// |f|^p with |.| the pointwise Euclidean length.
ScalarField power_density(const ScalarField& f, double p);
ScalarField power_density(const VectorField& f, double p);
ScalarField power_density(const TensorField& f, double p);
/// |f| pointwise.
ScalarField magnitude(const VectorField& f);
ScalarField magnitude(const TensorField& f);

struct RadiusRow {
    double R = 0.0;
    double integral = 0.0;        ///< smoothed-mask ball integral of |f|^p
    double integral_sharp = 0.0;  ///< sharp-mask ball integral
    double value = 0.0;           ///< (R^-gamma * integral)^(1/p)
    double value_sharp = 0.0;
};

struct NormResult {
    double value = 0.0;  ///< max over the ladder (smoothed masks); a lower bound of the sup
    double value_sharp = 0.0;
    double argmax_R = 0.0;
    /// argmax sits on the last rung with the profile still rising: the sup
    /// over [1, inf) is probably not attained on the ladder.
    bool edge_suspect = false;
    bool boundary_contaminated = false;
    double tail_ratio = 0.0;
    std::vector<RadiusRow> table;
};

/// Checks radii are strictly increasing inside [rmin, 0.9 L]; throws DomainError otherwise.
void validate_radii(const std::vector<double>& radii, const Grid3& g, double rmin = 1.0);

/// sup_R (R^-gamma int_{B(0,R)} |f|^p)^(1/p) on the ladder. `density` is |f|^p and
/// `mag` is |f| (used only for the decay-margin check).
NormResult local_morrey_norm_density(const ScalarField& density, const ScalarField& mag, double gamma, double p,
                                     const std::vector<double>& radii);
NormResult local_morrey_norm(const ScalarField& f, const MorreyParams& mp, const std::vector<double>& radii);
NormResult local_morrey_norm(const VectorField& f, const MorreyParams& mp, const std::vector<double>& radii);
NormResult local_morrey_norm(const TensorField& f, const MorreyParams& mp, const std::vector<double>& radii);

struct HomogeneousResult {
    double value = 0.0;  ///< lower bound of the sup over (x0, R)
    std::array<double, 3> best_center{};
    double best_R = 0.0;
    int centers = 0;
    bool boundary_contaminated = false;
};

/// max over sublattice centers (stride n/8) and radii of R^(3/r) (R^-3 int_{B(x0,R)} |f|^p)^(1/p).
HomogeneousResult homogeneous_morrey_norm(const ScalarField& f, double p, double r, const std::vector<double>& radii,
                                          int stride = 0);
/// Same functional with the center pinned at the origin node.
HomogeneousResult homogeneous_morrey_at_origin(const ScalarField& f, double p, double r,
                                               const std::vector<double>& radii);

struct WeightedResult {
    double value = 0.0;
    bool boundary_contaminated = false;
    double tail_ratio = 0.0;
};

/// (int |f|^p (1+|x|)^-gamma dx)^(1/p); gamma >= 0.
WeightedResult weighted_lebesgue_norm(const ScalarField& f, double p, double gamma);
WeightedResult weighted_lebesgue_norm(const VectorField& f, double p, double gamma);

enum class Flag { ok, under_resolved };

struct AnnulusProfile {
    double gamma = 0.0, p = 0.0, eta = 0.0;
    std::vector<double> radii;
    std::vector<double> values;         ///< a(R) = (R^-gamma int_{C(R/2,R)} |f|^p)^(1/p), smoothed masks
    std::vector<double> values_sharp;   ///< same with the sharp shell R/2 < |x| < R
    std::vector<double> scaled_values;  ///< R^(3 eta) a(R)
    std::vector<Flag> flags;
    bool boundary_contaminated = false;

    bool decaying() const;         ///< decision rule on values
    bool scaled_decaying() const;  ///< decision rule on scaled_values
    bool increasing() const;       ///< values strictly increasing along the ladder
};

/// "decaying" iff the last three values are strictly decreasing and the final
/// value is below 0.1 x max. An identically zero profile, or one whose final
/// value is exactly zero, also counts as decaying.
bool decay_rule(const std::vector<double>& values, double ratio = 0.1);

AnnulusProfile annulus_profile_density(const ScalarField& density, const ScalarField& mag, double gamma, double p,
                                       const std::vector<double>& radii);
AnnulusProfile annulus_profile(const ScalarField& f, const MorreyParams& mp, const std::vector<double>& radii);
AnnulusProfile annulus_profile(const VectorField& f, const MorreyParams& mp, const std::vector<double>& radii);
AnnulusProfile annulus_profile(const TensorField& f, const MorreyParams& mp, const std::vector<double>& radii);

/// Shell energies int_{C(R/2,R)} |f|^2 (the p = 2, gamma = 0 mode) and their max.
struct ShellEnergy {
    std::vector<double> radii, values;
    double sup = 0.0;
    bool edge_suspect = false;  ///< max on the last rung and still rising
};
ShellEnergy shell_energy_profile(const TensorField& f, const std::vector<double>& radii);
ShellEnergy shell_energy_profile(const VectorField& f, const std::vector<double>& radii);

enum class Region { eta_nonpositive, eta_positive, undefined };
std::string to_string(Region r);

struct RegionPoint {
    double gamma = 0.0, p = 0.0, eta = 0.0;
    Region region = Region::undefined;
};

/// Points with |eta| <= 1e-12 are classified as nonpositive.
inline constexpr double kEtaZeroTolerance = 1e-12;
RegionPoint classify(double gamma, double p);
std::vector<RegionPoint> eta_region_map(const std::vector<double>& gammas, const std::vector<double>& ps);
void write_eta_csv(std::ostream& os, const std::vector<RegionPoint>& pts);
void write_profile_csv(std::ostream& os, const AnnulusProfile& prof);

/// "a:b:step" inclusive range or a single number; throws ConfigError on bad syntax or empty ranges.
std::vector<double> parse_range(const std::string& spec);

}  // namespace elk::morrey
