#pragma once

#include <vector>

#include "elk/fft.hpp"
#include "elk/grid.hpp"

namespace elk::spectral {

/// R_i f with symbol i xi_i / |xi|. The zero mode (and any mode with |xi| = 0
/// after the Nyquist convention) is mapped to 0, so a nonzero mean is discarded.
ScalarField riesz(const ScalarField& f, int axis);
/// R_i R_j f with symbol -xi_i xi_j / |xi|^2.
ScalarField riesz_pair(const ScalarField& f, int i, int j);
/// Mean of f, i.e. what the zero-mode convention drops.
double mean(const ScalarField& f);

VectorField leray_project(const VectorField& u);

/// e^{-|xi|^2 t} multiplier; throws DomainError for t <= 0.
ScalarField heat_convolve(const ScalarField& f, double t);
VectorField heat_convolve(const VectorField& f, double t);

struct PressureOptions {
    bool dealias = true;
    double div_tolerance = 1e-8;  ///< max |div u| accepted
};

struct PressureResult {
    ScalarField q;
    VectorField grad_q;
    ScalarField q_velocity;  ///< sum_ij R_i R_j (u_i u_j)
    ScalarField q_director;  ///< sum_ijk R_i R_j (d_i v_k d_j v_k)
    /// max |-lap q - div div(u (x) u + grad v (.) grad v)| evaluated through an
    /// independent physical-space path.
    double poisson_residual = 0.0;
    double rhs_scale = 0.0;  ///< max |div div(...)|
    double div_u = 0.0;      ///< max |div u| seen on input
};

/// q = sum R_i R_j (u_i u_j) + sum R_i R_j (d_i v_k d_j v_k); grad_v(i,k) = d_i v_k.
/// Throws PreconditionError when max |div u| exceeds the tolerance.
PressureResult pressure_q(const VectorField& u, const TensorField& grad_v, const PressureOptions& opt = {});

/// Symmetric stress u (x) u + grad v (.) grad v, each product dealiased when requested.
TensorField quadratic_stress(const VectorField& u, const TensorField& grad_v, bool dealias);
/// Zeroes Fourier modes outside the 2/3 box.
ScalarField dealiased(const ScalarField& f);

struct BesovRow {
    double t = 0.0, value = 0.0;
};

struct BesovResult {
    double value = 0.0;         ///< refined lower bound of sup_t t^(1/2) ||h_t * f||_inf
    double ladder_value = 0.0;  ///< max over the dyadic ladder only
    double argmax_t = 0.0;
    double t_min = 0.0, t_max = 0.0;
    /// argmax time large enough that the periodic heat kernel wraps around
    /// (e^{-L^2/(4t)} > 1e-8).
    bool wraparound = false;
    bool boundary_contaminated = false;
    std::vector<BesovRow> ladder;
};

/// Dyadic ladder t = t_min 2^j in [h^2, (L/2)^2] followed by a golden-section
/// refinement between the neighbours of the best rung.
BesovResult besov_minus1_norm(const ScalarField& f);
BesovResult besov_minus1_norm(const VectorField& f);

/// sum |xi|^2 |f^|^2 h^3 = ||grad f||^2_{L^2} from the spectrum.
double hdot1_sq(const ScalarField& f);

}  // namespace elk::spectral
