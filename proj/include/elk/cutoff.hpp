#pragma once

#include "elk/grid.hpp"

namespace elk {

/// Radial C-infinity bump: psi(s) = 1 for s <= 1/2, 0 for s >= 1, with
/// psi(s) = f(1-s) / (f(1-s) + f(s-1/2)), f(t) = exp(-1/t) on t > 0.
namespace bump {
double psi(double s);
double dpsi(double s);
double d2psi(double s);
/// sup |psi'| over [0,1], from a dense 1-D scan.
double dpsi_sup();
/// sup |psi'' + 2 psi'/s| over (0,1]; the Laplacian of psi(|x|) in 3-D.
double lap_sup();
}  // namespace bump

/// theta_R(x) = psi(|x|/R).
class Cutoff {
public:
    /// Throws DomainError unless R >= 1 (and R <= max_radius when given).
    explicit Cutoff(double R, double max_radius = 0.0);

    double radius() const { return R_; }
    double value(double r) const { return bump::psi(r / R_); }
    /// d theta / d r
    double radial_derivative(double r) const { return bump::dpsi(r / R_) / R_; }
    double laplacian(double r) const;

    /// Closed-form sup norms: exactly dpsi_sup()/R and lap_sup()/R^2.
    double grad_sup() const { return bump::dpsi_sup() / R_; }
    double lap_sup() const { return bump::lap_sup() / (R_ * R_); }

private:
    double R_;
};

struct CutoffFields {
    ScalarField theta;
    VectorField grad;
    ScalarField lap;
};

/// Samples theta_R and its closed-form gradient and Laplacian. R must satisfy
/// 1 <= R <= L so the support fits inside one period.
CutoffFields cutoff_field(const Grid3& grid, double R);

}  // namespace elk
