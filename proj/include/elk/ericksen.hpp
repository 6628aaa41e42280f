#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elk/diff.hpp"
#include "elk/grid.hpp"

namespace elk::ericksen {

/// Stationary triple (u, p, v); v is the unit director.
struct StationaryState {
    VectorField u;
    ScalarField p;
    VectorField v;
};

/// u = 0, p = 0 and v the constant unit vector e.
StationaryState trivial_state(const Grid3& g, std::array<double, 3> e = {0.0, 0.0, 1.0});

struct ResidualOptions {
    Scheme scheme = Scheme::spectral;
    /// > 0 restricts scoring (and the constraint checks) to nodes with
    /// max_i |x_i| <= window. Needed for growing fields evaluated with fd4.
    double window = 0.0;
    double unit_tolerance = 1e-10;
    double div_tolerance = 1e-8;
    bool check_constraints = true;
};

struct ResidualReport {
    VectorField momentum;  ///< -lap u + (u.grad)u + div(grad v (.) grad v) + grad p
    VectorField director;  ///< -lap v + (u.grad)v - |grad v|^2 v
    ScalarField div_defect;
    double momentum_max = 0.0, director_max = 0.0, div_max = 0.0;
    double unit_max = 0.0;  ///< max ||v| - 1| over scored nodes
    std::size_t scored_nodes = 0;
    double max() const { return std::max(momentum_max, director_max); }
};

/// 1 on nodes with max_i |x_i| <= window, 0 elsewhere; all ones for window <= 0.
ScalarField window_mask(const Grid3& g, double window);

/// Residuals of the stationary system. Throws PreconditionError naming the
/// worst node when |v| = 1 or div u = 0 fails on a scored node.
ResidualReport stationary_residual(const StationaryState& s, const ResidualOptions& opt = {});

/// -lap u + div(u (x) u) + grad p through the divergence form; an independent
/// path for the v = const case.
VectorField ns_residual(const VectorField& u, const ScalarField& p, Scheme scheme = Scheme::spectral);

inline constexpr double kConstantDirectorThreshold = 1e-12;
/// True when max |grad v| <= threshold, i.e. the coupled system reduces to Navier-Stokes.
bool ns_special_case(const VectorField& v, double threshold = kConstantDirectorThreshold);
bool ns_special_case(const StationaryState& s, double threshold = kConstantDirectorThreshold);

/// Derivatives needed by the checkers, either computed or supplied in closed form.
struct Kinematics {
    TensorField grad_u;  ///< (i,j) = d_i u_j
    TensorField grad_v;
    VectorField lap_u;
    VectorField lap_v;
    VectorField grad_p;
};
Kinematics kinematics(const StationaryState& s, Scheme scheme = Scheme::spectral);

/// Stationary velocity (2x1, 2x2, -4x3) with p = -(2x1^2 + 2x2^2 + 8x3^2).
///
/// The director is a.e. constant, v = (1,1,1)/sqrt(3); on the cylinder
/// x1^2 + x2^2 = 1 it is (x1, x2, 0). `state.v` is the a.e. representative;
/// the cylinder branch is exercised on the band |x1^2 + x2^2 - 1| < band.
struct CounterexampleState {
    StationaryState state;
    VectorField cylinder_branch;
    VectorField composite;  ///< cylinder branch on the band, constant branch elsewhere
    ScalarField band_mask;  ///< 1 on band nodes
    double window = 0.0;
    double band = 0.0;
    Kinematics exact;           ///< closed-form derivatives of `state`
    TensorField exact_grad_cylinder;  ///< diag(1, 1, 0)
};

/// window <= 0 picks the widest admissible window L - 5h; band <= 0 picks 2h.
/// Throws DomainError when the window leaves less than five cells to the box face.
CounterexampleState counterexample_state(const Grid3& g, double window = 0.0, double band = 0.0);

struct CounterexampleReport {
    int n = 0;
    double box_half = 0.0, window = 0.0, band = 0.0;
    /// From the closed-form derivative pack; exactly zero.
    double closed_momentum = 0.0, closed_director = 0.0, closed_div = 0.0;
    double closed_grad_u_sq_min = 0.0, closed_grad_u_sq_max = 0.0;  ///< |grad u|^2, 24 everywhere
    /// fd4 residuals of each branch over its own region of the window.
    double constant_branch = 0.0, cylinder_branch = 0.0, div_fd4 = 0.0;
    double cylinder_unit_defect = 0.0;  ///< max ||v| - 1| of the cylinder branch on the band
    std::size_t window_nodes = 0, band_nodes = 0;
    double sampled() const { return std::max({constant_branch, cylinder_branch, div_fd4}); }
};
CounterexampleReport check_counterexample(const CounterexampleState& cs);

// ---------------------------------------------------------------- evolution

struct SolverConfig {
    double dt = 1e-3;
    double T = 0.5;
    /// CFL-scaled policy: dt = min(dt, cfl h / max|u0|), fixed for the run.
    bool cfl_scaled = false;
    double cfl = 0.5;
    bool dealias = true;
    bool renormalize = true;  ///< v <- v/|v| after every step
    /// Pure harmonic map flow: u is held at zero and the director terms in
    /// the momentum equation are dropped.
    bool freeze_velocity = false;
    double viscosity = 1.0;  ///< only 1 is supported
    int snapshot_every = 0;  ///< 0 keeps only the first and last states
    /// theta_R radii for the local energy probes (empty: no probes).
    std::vector<double> probe_radii;
    double div_tolerance = 1e-8;
    double unit_tolerance = 1e-10;

    /// Throws ConfigError for dt <= 0, T <= 0, viscosity != 1 and similar.
    void validate() const;
};

struct EvolutionState {
    explicit EvolutionState(const Grid3& g) : u(g), v(g) {}
    double t = 0.0;
    VectorField u;
    VectorField v;
};

/// One ledger row per accepted step (plus t = 0).
struct LedgerRow {
    double t = 0.0;
    double ku2 = 0.0;         ///< ||u||^2
    double kdv2 = 0.0;        ///< ||grad v||^2
    double cum_diss_u = 0.0;  ///< 2 int_0^t ||grad u||^2
    double cum_diss_v = 0.0;  ///< int_0^t ||lap v||^2
    double defect = 0.0;      ///< ku2 + cum_diss_u + kdv2 - (ku2 + kdv2)(0)
    // balance columns
    double rate_u = 0.0;        ///< ||grad u||^2
    double rate_lap_v = 0.0;    ///< ||lap v||^2
    double rate_tension = 0.0;  ///< ||lap v + |grad v|^2 v||^2
    double cum_tension = 0.0;   ///< 2 int_0^t rate_tension
    double balance = 0.0;       ///< defect + cum_tension; zero for exact smooth solutions
    double max_div_u = 0.0;
    double max_unit_defect = 0.0;
    double max_u = 0.0;       ///< ||u||_inf
    double max_grad_v = 0.0;  ///< ||grad v||_inf
};

struct EnergyLedger {
    std::vector<LedgerRow> rows;
    double e0() const { return rows.empty() ? 0.0 : rows.front().ku2 + rows.front().kdv2; }
    /// Entries finite and times strictly increasing.
    bool valid() const;
    /// t,ku2,kdv2,cum_diss_u,cum_diss_v,defect
    void write_csv(std::ostream& os) const;
    /// The balance and constraint columns.
    void write_balance_csv(std::ostream& os) const;
    /// Leading '#' comment lines are skipped. Throws FormatError.
    static EnergyLedger read_csv(std::istream& is);
    /// Fills the balance columns from write_balance_csv output with matching times.
    void read_balance_csv(std::istream& is);
};

/// Spatial integrals against theta_R sampled at one time; see local_energy_defect.
struct ProbeSample {
    double t = 0.0;
    double energy = 0.0;      ///< int e theta, e = (|u|^2 + |grad v|^2)/2
    double grad_u = 0.0;      ///< int |grad u|^2 theta
    double lap_v = 0.0;       ///< int |lap v|^2 theta
    double diffusion = 0.0;   ///< int e lap theta
    double flux = 0.0;        ///< int ([e + q] u) . grad theta
    double transport = 0.0;   ///< sum_k int ([(u.grad) v] . d_k v) d_k theta
    double tension = 0.0;     ///< -int |grad v|^2 (v . lap v) theta
    double tension_sq = 0.0;  ///< int |v . lap v|^2 theta
    double hessian_gap = 0.0; ///< int (|grad grad v|^2 - |lap v|^2) theta
};

struct ProbeSeries {
    double R = 0.0;
    std::vector<ProbeSample> samples;
};

enum class RunStatus { completed, unstable };

struct Snapshot {
    double t = 0.0;
    VectorField u, v;
};

struct Trajectory {
    explicit Trajectory(const Grid3& g) : final_state(g) {}
    RunStatus status = RunStatus::completed;
    std::string message;
    EvolutionState final_state;  ///< last accepted (finite) state
    EnergyLedger ledger;
    std::vector<ProbeSeries> probes;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
    double dt = 0.0;
    int steps = 0;
    bool ns_path = false;  ///< constant director detected; director left untouched
};

/// Integrating-factor Heun stepping with Leray projection and director
/// renormalisation. Throws PreconditionError if div u0 or |v0| - 1 exceeds
/// its tolerance. A non-finite step stops the run with status `unstable`
/// and the last finite state.
Trajectory evolve(const VectorField& u0, const VectorField& v0, const SolverConfig& cfg);

/// One step of the same scheme for Navier-Stokes alone, written without the
/// coupled machinery; used as an oracle for the constant-director path.
VectorField ns_step(const VectorField& u, double dt, bool dealias = true);

/// Pressure reconstructed from the current velocity and director.
ScalarField reconstructed_pressure(const VectorField& u, const VectorField& v);

// ---------------------------------------------------------------- presets

struct Preset {
    std::string name;
    VectorField u0, v0;
};

/// Built-in initial data:
///   zero             u = 0, v = e3
///   taylor-green     small Taylor-Green vortex, v = e3 (box should be pi)
///   director-winding u = 0, localized unit tilt of e3 that winds once around the x3 axis
///   coupled          the Taylor-Green velocity with the director-winding field
///   appendix-a       not time-dependent; rejected here (see counterexample_state)
/// Throws ConfigError for unknown names.
Preset make_preset(const std::string& name, const Grid3& g, double amplitude = -1.0);
std::vector<std::string> preset_names();

}  // namespace elk::ericksen
