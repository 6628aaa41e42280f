#pragma once

#include <string>
#include <vector>

#include "elk/diff.hpp"
#include "elk/ericksen.hpp"
#include "elk/grid.hpp"
#include "elk/morrey.hpp"

namespace elk::verify {

/// Named tolerances; every one is a config key (`--tol.<name>`).
struct Tolerances {
    double identity = 1e-7;         ///< integration-by-parts identities
    double inequality = 1e-3;       ///< relative slack of inequality checks
    double residual = 1e-6;         ///< stationary residual accepted as a solution
    double energy = 1e-3;           ///< global defect / E(0), Navier-Stokes runs
    double energy_coupled = 5e-3;   ///< global defect / E(0), coupled runs
    double local_energy = 1e-3;     ///< |mu_hat| relative to the term scale
    double tension = 1e-5;          ///< director tension pairing vs |v . lap v|^2 pairing
    double velocity = 1e-6;         ///< ||u||_inf above this is a nontrivial solution
    double sobolev_stability = 0.1; ///< relative drift of the improved Sobolev ratio
    double riesz = 1e-12;           ///< single-mode Riesz transform against its closed form
    double riesz_identity = 1e-10;  ///< sum R_i R_i f + f on mean-free f
    double poisson = 1e-8;          ///< Poisson residual of the reconstructed pressure

    /// Throws ConfigError for unknown names or non-positive values.
    void set(const std::string& name, double value);
    double get(const std::string& name) const;
    static std::vector<std::string> names();
};

/// How derivatives of a stationary state are taken.
struct StateOptions {
    Scheme scheme = Scheme::spectral;
    double window = 0.0;  ///< see ResidualOptions::window
};

// ---------------------------------------------------------------- Caccioppoli

struct CaccioppoliReport {
    double R = 0.0;
    double gamma = 0.0, p = 0.0;
    double residual = 0.0;    ///< stationary residual of the input
    double lhs = 0.0;         ///< int_{B_{R/2}} |grad u|^2, smoothed ball
    double lhs_sharp = 0.0;
    double i1 = 0.0;  ///< int |u|^2/2 (u . grad theta)
    double i2 = 0.0;  ///< int |grad v|^2/2 (u . grad theta)
    double i3 = 0.0;  ///< int p (u . grad theta)
    double i4 = 0.0;  ///< int |u|^2/2 lap theta
    double rhs_identity = 0.0;
    /// Pieces of the closed-form bound over the shell C = C(R/2, R):
    /// x_u = (int_C |u|^p)^(2/p), x_v = (int_C |grad v|^p)^(2/p),
    /// x_p = (int_C |p|^(p/2))^(2/p), y = R^(2 - 9/p) (int_C |u|^p)^(1/p),
    /// z = R^-2 int_C |u|^2.
    double x_u = 0.0, x_v = 0.0, x_p = 0.0, y = 0.0, z = 0.0;
    /// Implied constants |I_k| / bound_k (0 when both vanish, inf when only the bound does).
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double c_implied = 0.0;   ///< max of c1..c4
    double rhs_closed = 0.0;  ///< c_implied ((x_u + x_v + x_p) y + z)
    double tolerance = 0.0;
    bool holds = false;       ///< lhs <= rhs_identity + tol * scale
};

/// Throws PreconditionError when the residual exceeds tol.residual, DomainError
/// for R outside [1, L].
CaccioppoliReport caccioppoli_check(const ericksen::StationaryState& s, double R, const morrey::MorreyParams& mp,
                                    const Tolerances& tol = {}, const StateOptions& opt = {});

// ---------------------------------------------------------------- identities

struct IdentityRow {
    std::string name;
    double lhs = 0.0, rhs = 0.0;
    double scale = 0.0;   ///< magnitude the defect is measured against
    double defect = 0.0;  ///< |lhs - rhs| / scale (0 when scale is 0)
};

struct IdentityReport {
    double R = 0.0;
    std::vector<IdentityRow> rows;
    double max_defect = 0.0;
    double tolerance = 0.0;
    bool boundary_contaminated = false;  ///< some field fails the decay margin
    bool holds = false;
    const IdentityRow& row(const std::string& name) const;
};

/// Integration-by-parts ledger against theta_R for smooth periodic (u, v, p).
/// u must be divergence free; v must be a unit field for the rows that use it
/// (unit_field, tension). Equation residuals are substituted, so the rows are
/// identities for arbitrary fields.
IdentityReport ibp_identity_suite(const VectorField& u, const VectorField& v, const ScalarField& p, double R,
                                  const Tolerances& tol = {}, Scheme scheme = Scheme::spectral);

// ---------------------------------------------------------------- elliptic estimate

struct EllipticRow {
    double R = 0.0;
    double inner = 0.0;  ///< int_{B_{R/2}} |grad v|^2
    double outer = 0.0;  ///< int_{C(R/2,R)} |grad v|^2
    double c = 0.0;      ///< inner / outer (0 when both vanish)
};

struct EllipticReport {
    double residual = 0.0;
    std::vector<EllipticRow> rows;
    double c_max = 0.0;
    double c_max_R = 0.0;
    bool diverging = false;
    bool holds = false;
};

/// Requires max |-lap v - |grad v|^2 v| <= tol.residual and |v| = 1.
/// Diverging means some inner > 0 with outer = 0, or c growing over the last
/// three rungs to more than 10x its smallest value.
EllipticReport elliptic_v_check(const VectorField& v, const std::vector<double>& radii, const Tolerances& tol = {});

// ---------------------------------------------------------------- energy

struct GlobalEnergyReport {
    double e0 = 0.0;
    std::vector<double> t, defect, balance;
    double max_defect = 0.0;      ///< max_t D(t)
    double max_defect_t = 0.0;
    double max_abs_balance = 0.0;
    double tolerance = 0.0;       ///< relative to E(0)
    bool holds = false;           ///< max D <= tolerance E(0)
};

/// Throws PreconditionError for an invalid (empty, non-finite) ledger.
GlobalEnergyReport global_energy_check(const ericksen::EnergyLedger& ledger, double tolerance);

/// alpha: quintic smoothstep, 0 below 1/2, 1 above 1.
double time_alpha(double s);
double time_alpha_derivative(double s);

struct LocalWindow {
    double t0 = 0.0, t1 = 0.0;
};

struct LocalWindowRow {
    double R = 0.0, t0 = 0.0, t1 = 0.0, eps = 0.0;
    double lhs = 0.0;  ///< -int A alpha' + int (B + C) alpha
    double rhs = 0.0;  ///< int (D + E + F + G) alpha
    double mu_hat = 0.0;
    double scale = 0.0;  ///< sum of the absolute term integrals
    double relative = 0.0;
    /// int (|grad grad v|^2 - |lap v|^2) theta alpha: the part of mu_hat the
    /// |lap v|^2 form of the identity does not see.
    double hessian_gap = 0.0;
    double relative_without_gap = 0.0;  ///< |mu_hat - hessian_gap| / scale
    double tension = 0.0, tension_sq = 0.0;
    double tension_defect = 0.0;  ///< |tension - tension_sq| / max(|tension|, |tension_sq|)
};

struct LocalEnergyReport {
    std::vector<LocalWindowRow> rows;
    double max_relative = 0.0;
    double min_mu_hat = 0.0;
    double max_tension_defect = 0.0;
    double tolerance = 0.0;
    bool holds = false;  ///< max_relative <= tolerance and tension pairings agree
};

/// Pairs the probe series of a trajectory with alpha_{eps,t0,t1} theta_R,
/// eps = 4 dt. Time integrals use cubic interpolation of the samples with
/// Gauss-Legendre sub-quadrature. Throws PreconditionError when a window is
/// not covered, i.e. t0 < t_first or t1 + eps > t_last.
LocalEnergyReport local_energy_defect(const std::vector<ericksen::ProbeSeries>& probes,
                                      const std::vector<LocalWindow>& windows, double dt, const Tolerances& tol = {});
/// Windows of length span sliding by stride inside [t_first, t_last - 4 dt].
std::vector<LocalWindow> sliding_windows(double t_first, double t_last, double dt, double span, double stride);

// ---------------------------------------------------------------- embeddings

struct FamilyMember {
    std::string name;
    ScalarField f;
    bool decay_ok = false;  ///< passes the decay margin
    bool in_l92 = false;    ///< integrable to the power 9/2 on R^3
};

/// Power laws (1+|x|)^-a for a in {1/2, 2/3, 1, 2, 3}, a compact bump of
/// radius 2, a Gaussian and an oscillating Gaussian.
std::vector<FamilyMember> embedding_family(const Grid3& g);

struct InclusionRow {
    std::string name;        ///< "X < Y"
    double fitted = 0.0;     ///< max ||f||_Y / ||f||_X
    std::string argmax;      ///< member attaining it
    double bound = 0.0;      ///< analytic constant when known, else 0
    int members = 0;
    bool holds = false;
};

struct DecayRow {
    std::string member;
    std::vector<double> radii, values;
    bool in_l92 = false;
    bool certified = false;  ///< decay rule passes
    bool non_decreasing = false;
    bool exact_zero_tail = false;  ///< profile exactly 0 for R >= 2 x support
};

struct EmbeddingReport {
    std::vector<InclusionRow> inclusions;
    std::vector<DecayRow> decay;
    std::vector<std::string> notices;  ///< members dropped from global-norm rows
    bool holds = false;
};

EmbeddingReport embedding_suite(const std::vector<FamilyMember>& family, const std::vector<double>& radii);

// ---------------------------------------------------------------- improved Sobolev

struct SobolevReport {
    double l4 = 0.0;
    double h1 = 0.0;     ///< ||u||_{H^1 hom}
    double besov = 0.0;  ///< heat-kernel B^-1_{inf,inf}
    double ratio = 0.0;
    bool degenerate = false;  ///< 0/0
};

/// Throws PreconditionError when u fails the decay margin.
SobolevReport improved_sobolev_check(const VectorField& u);

// ---------------------------------------------------------------- Liouville

enum class Verdict { consistent, counterexample_flag, hypotheses_not_met };
std::string to_string(Verdict v);

struct Hypotheses {
    double gamma = 0.0, p = 0.0, eta = 0.0;
    bool eta_nonpositive = false;
    morrey::AnnulusProfile u_profile;   ///< velocity annulus profile
    bool u_decaying = false;            ///< decay rule on u_profile
    bool u_scaled_decaying = false;     ///< decay rule on R^(3 eta) a(R)
    double grad_v_norm = 0.0;           ///< local Morrey norm of grad v
    bool grad_v_finite = false;         ///< finite and not edge-suspect
    morrey::ShellEnergy grad_v_shells;
    bool grad_v_shells_finite = false;
};

struct Conclusion {
    double u_inf = 0.0;
    double grad_v_inf = 0.0;
    double grad_p_inf = 0.0;  ///< pressure gradient of the candidate
};

struct LiouvilleVerdict {
    double residual = 0.0;
    Hypotheses hypotheses;
    Conclusion conclusion;
    double tolerance = 0.0;
    Verdict verdict = Verdict::hypotheses_not_met;
    bool holds() const { return verdict != Verdict::counterexample_flag; }
};

/// The decision rule, a pure function of the two records.
Verdict derive_verdict(const Hypotheses& h, const Conclusion& c, double velocity_tolerance);

/// Throws PreconditionError when the residual exceeds tol.residual. Norms and
/// sup values are taken over the window when opt.window > 0.
LiouvilleVerdict liouville_check(const ericksen::StationaryState& s, const morrey::MorreyParams& mp,
                                 const std::vector<double>& radii, const Tolerances& tol = {},
                                 const StateOptions& opt = {});

}  // namespace elk::verify
