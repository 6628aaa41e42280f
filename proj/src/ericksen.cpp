#include "elk/ericksen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "elk/cutoff.hpp"
#include "elk/fft.hpp"
#include "elk/spectral.hpp"

namespace elk::ericksen {

namespace {

std::string node_text(const Grid3& g, std::size_t idx) {
    const int n = g.n();
    const int k = static_cast<int>(idx % n), j = static_cast<int>((idx / n) % n), i = static_cast<int>(idx / n / n);
    std::ostringstream os;
    os << "node (" << i << "," << j << "," << k << ") at x = (" << g.coord(i) << ", " << g.coord(j) << ", "
       << g.coord(k) << ")";
    return os.str();
}

double masked_max_norm(const VectorField& f, const ScalarField& mask) {
    double m = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == 0.0) continue;
        m = std::max(m, f[0][i] * f[0][i] + f[1][i] * f[1][i] + f[2][i] * f[2][i]);
    }
    return std::sqrt(m);
}

}  // namespace

StationaryState trivial_state(const Grid3& g, std::array<double, 3> e) {
    const double ne = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
    if (!(ne > 0.0)) throw DomainError("trivial_state: director must be nonzero");
    VectorField v(ScalarField(g, e[0] / ne), ScalarField(g, e[1] / ne), ScalarField(g, e[2] / ne));
    return {VectorField(g), ScalarField(g), std::move(v)};
}

ScalarField window_mask(const Grid3& g, double window) {
    if (window <= 0.0) return ScalarField(g, 1.0);
    const double w = window * (1.0 + 1e-12);
    return ScalarField::sample(g, [w](double x, double y, double z) {
        return (std::abs(x) <= w && std::abs(y) <= w && std::abs(z) <= w) ? 1.0 : 0.0;
    });
}

ResidualReport stationary_residual(const StationaryState& s, const ResidualOptions& opt) {
    const Grid3& g = s.u.grid();
    require_same_grid(g, s.p.grid(), "stationary_residual");
    require_same_grid(g, s.v.grid(), "stationary_residual");
    const ScalarField mask = window_mask(g, opt.window);

    ScalarField div = divergence(s.u, opt.scheme);
    double unit = 0.0, divmax = 0.0;
    std::size_t worst_unit = 0, worst_div = 0, scored = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i] == 0.0) continue;
        ++scored;
        const double len = std::sqrt(s.v[0][i] * s.v[0][i] + s.v[1][i] * s.v[1][i] + s.v[2][i] * s.v[2][i]);
        if (std::abs(len - 1.0) > unit) {
            unit = std::abs(len - 1.0);
            worst_unit = i;
        }
        if (std::abs(div[i]) > divmax) {
            divmax = std::abs(div[i]);
            worst_div = i;
        }
    }
    if (opt.check_constraints) {
        if (!(unit <= opt.unit_tolerance))
            throw PreconditionError("stationary_residual: ||v| - 1| = " + std::to_string(unit) + " at " +
                                    node_text(g, worst_unit));
        if (!(divmax <= opt.div_tolerance))
            throw PreconditionError("stationary_residual: |div u| = " + std::to_string(divmax) + " at " +
                                    node_text(g, worst_div));
    }

    const TensorField Ju = jacobian(s.u, opt.scheme);
    const TensorField Gv = jacobian(s.v, opt.scheme);
    VectorField mom = laplacian(s.u, opt.scheme) * -1.0;
    mom += contract_first(s.u, Ju);
    mom += tensor_divergence(row_gram(Gv, Gv), opt.scheme);
    mom += gradient(s.p, opt.scheme);

    VectorField dir = laplacian(s.v, opt.scheme) * -1.0;
    dir += contract_first(s.u, Gv);
    dir -= scale(s.v, norm_sq(Gv));

    ResidualReport r{std::move(mom), std::move(dir), std::move(div)};
    r.momentum_max = masked_max_norm(r.momentum, mask);
    r.director_max = masked_max_norm(r.director, mask);
    r.div_max = divmax;
    r.unit_max = unit;
    r.scored_nodes = scored;
    return r;
}

VectorField ns_residual(const VectorField& u, const ScalarField& p, Scheme scheme) {
    TensorField uu(u.grid());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) uu(i, j) = hadamard(u[i], u[j]);
    VectorField r = tensor_divergence(uu, scheme);
    r -= laplacian(u, scheme);
    r += gradient(p, scheme);
    return r;
}

bool ns_special_case(const VectorField& v, double threshold) { return jacobian(v).max_norm() <= threshold; }

bool ns_special_case(const StationaryState& s, double threshold) { return ns_special_case(s.v, threshold); }

Kinematics kinematics(const StationaryState& s, Scheme scheme) {
    return {jacobian(s.u, scheme), jacobian(s.v, scheme), laplacian(s.u, scheme), laplacian(s.v, scheme),
            gradient(s.p, scheme)};
}

// ---------------------------------------------------------------- counterexample state

CounterexampleState counterexample_state(const Grid3& g, double window, double band) {
    const double h = g.spacing(), L = g.box_half();
    const double wmax = L - 5.0 * h;
    if (window <= 0.0) window = wmax;
    if (window > wmax * (1.0 + 1e-12) || wmax <= 0.0)
        throw DomainError("counterexample window " + std::to_string(window) + " must stay five cells inside the box (<= " +
                          std::to_string(wmax) + ")");
    if (band <= 0.0) band = 2.0 * h;

    VectorField u = VectorField::sample(g, [](double x, double y, double z) {
        return std::array<double, 3>{2.0 * x, 2.0 * y, -4.0 * z};
    });
    ScalarField p = ScalarField::sample(g, [](double x, double y, double z) {
        return -(2.0 * x * x + 2.0 * y * y + 8.0 * z * z);
    });
    const double c = 1.0 / std::sqrt(3.0);
    VectorField v(ScalarField(g, c), ScalarField(g, c), ScalarField(g, c));
    VectorField cyl = VectorField::sample(g, [](double x, double y, double) {
        return std::array<double, 3>{x, y, 0.0};
    });
    ScalarField mask = ScalarField::sample(g, [band](double x, double y, double) {
        return std::abs(x * x + y * y - 1.0) < band ? 1.0 : 0.0;
    });
    VectorField comp = v;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (mask[i] != 0.0)
            for (int a = 0; a < 3; ++a) comp[a][i] = cyl[a][i];

    Kinematics ex{TensorField(g), TensorField(g), VectorField(g), VectorField(g), VectorField(g)};
    ex.grad_u(0, 0) = ScalarField(g, 2.0);
    ex.grad_u(1, 1) = ScalarField(g, 2.0);
    ex.grad_u(2, 2) = ScalarField(g, -4.0);
    ex.grad_p = VectorField::sample(g, [](double x, double y, double z) {
        return std::array<double, 3>{-4.0 * x, -4.0 * y, -16.0 * z};
    });
    TensorField gcyl(g);
    gcyl(0, 0) = ScalarField(g, 1.0);
    gcyl(1, 1) = ScalarField(g, 1.0);

    return {StationaryState{std::move(u), std::move(p), std::move(v)},
            std::move(cyl),
            std::move(comp),
            std::move(mask),
            window,
            band,
            std::move(ex),
            std::move(gcyl)};
}

CounterexampleReport check_counterexample(const CounterexampleState& cs) {
    const Grid3& g = cs.state.u.grid();
    const StationaryState& s = cs.state;
    CounterexampleReport r;
    r.n = g.n();
    r.box_half = g.box_half();
    r.window = cs.window;
    r.band = cs.band;

    // Closed forms, valid at every node. The stress of either branch has a
    // constant gradient, so its divergence vanishes identically.
    VectorField mom = cs.exact.lap_u * -1.0;
    mom += contract_first(s.u, cs.exact.grad_u);
    mom += cs.exact.grad_p;
    r.closed_momentum = mom.max_norm();
    VectorField dir_const = cs.exact.lap_v * -1.0;
    dir_const += contract_first(s.u, cs.exact.grad_v);
    dir_const -= scale(s.v, norm_sq(cs.exact.grad_v));
    VectorField dir_cyl = contract_first(s.u, cs.exact_grad_cylinder);
    dir_cyl -= scale(cs.cylinder_branch, norm_sq(cs.exact_grad_cylinder));
    r.closed_director = std::max(dir_const.max_norm(), dir_cyl.max_norm());
    ScalarField tr = cs.exact.grad_u(0, 0) + cs.exact.grad_u(1, 1) + cs.exact.grad_u(2, 2);
    r.closed_div = tr.max_abs();
    const ScalarField gu2 = norm_sq(cs.exact.grad_u);
    r.closed_grad_u_sq_min = *std::min_element(gu2.values().begin(), gu2.values().end());
    r.closed_grad_u_sq_max = *std::max_element(gu2.values().begin(), gu2.values().end());

    // fd4 on the window, each branch on its own region.
    ResidualOptions opt;
    opt.scheme = Scheme::fd4;
    opt.window = cs.window;
    const ResidualReport rc = stationary_residual(s, opt);
    const ScalarField win = window_mask(g, cs.window);
    ScalarField off_band(g), on_band(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        off_band[i] = (win[i] != 0.0 && cs.band_mask[i] == 0.0) ? 1.0 : 0.0;
        on_band[i] = (win[i] != 0.0 && cs.band_mask[i] != 0.0) ? 1.0 : 0.0;
    }
    r.window_nodes = rc.scored_nodes;
    r.constant_branch = std::max(masked_max_norm(rc.momentum, off_band), masked_max_norm(rc.director, off_band));
    r.div_fd4 = rc.div_max;

    opt.check_constraints = false;
    const ResidualReport ry = stationary_residual(StationaryState{s.u, s.p, cs.cylinder_branch}, opt);
    r.cylinder_branch = std::max(masked_max_norm(ry.momentum, on_band), masked_max_norm(ry.director, on_band));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (on_band[i] == 0.0) continue;
        ++r.band_nodes;
        const auto& y = cs.cylinder_branch;
        const double len = std::sqrt(y[0][i] * y[0][i] + y[1][i] * y[1][i] + y[2][i] * y[2][i]);
        r.cylinder_unit_defect = std::max(r.cylinder_unit_defect, std::abs(len - 1.0));
    }
    return r;
}

// ---------------------------------------------------------------- ledger

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
    if (cfl_scaled && !(cfl > 0.0)) throw ConfigError("cfl must be positive");
    if (viscosity != 1.0) throw ConfigError("only viscosity = 1 is supported");
    if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
    for (double R : probe_radii)
        if (!(R >= 1.0)) throw ConfigError("probe radii must be >= 1");
}

bool EnergyLedger::valid() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        for (double x : {r.t, r.ku2, r.kdv2, r.cum_diss_u, r.cum_diss_v, r.defect})
            if (!std::isfinite(x)) return false;
        if (i > 0 && !(r.t > rows[i - 1].t)) return false;
    }
    return true;
}

void EnergyLedger::write_csv(std::ostream& os) const {
    os << "t,ku2,kdv2,cum_diss_u,cum_diss_v,defect\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.t << ',' << r.ku2 << ',' << r.kdv2 << ',' << r.cum_diss_u << ',' << r.cum_diss_v << ',' << r.defect
           << '\n';
}

void EnergyLedger::write_balance_csv(std::ostream& os) const {
    os << "t,rate_u,rate_lap_v,rate_tension,cum_tension,balance,max_div_u,max_unit_defect,max_u,max_grad_v\n"
       << std::setprecision(17);
    for (const auto& r : rows)
        os << r.t << ',' << r.rate_u << ',' << r.rate_lap_v << ',' << r.rate_tension << ',' << r.cum_tension << ','
           << r.balance << ',' << r.max_div_u << ',' << r.max_unit_defect << ',' << r.max_u << ',' << r.max_grad_v
           << '\n';
}

namespace {

// Reads a CSV whose header starts with `header`; '#' lines before it are
// provenance comments and skipped. Each row is handed to `row` as numbers.
template <class F>
void read_numeric_csv(std::istream& is, const std::string& header, std::size_t ncols, const char* what, F&& row) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] != '#') break;
    }
    if (line.rfind(header, 0) != 0) throw FormatError(std::string(what) + ": missing or unexpected header");
    std::vector<double> vals(ncols);
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        for (double& c : vals) {
            std::string cell;
            if (!std::getline(ls, cell, ','))
                throw FormatError(std::string(what) + ": short row at line " + std::to_string(lineno));
            try {
                c = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError(std::string(what) + ": bad number at line " + std::to_string(lineno));
            }
        }
        row(vals);
    }
}

}  // namespace

EnergyLedger EnergyLedger::read_csv(std::istream& is) {
    EnergyLedger out;
    read_numeric_csv(is, "t,ku2,kdv2,cum_diss_u,cum_diss_v,defect", 6, "ledger", [&](const std::vector<double>& c) {
        LedgerRow r;
        r.t = c[0], r.ku2 = c[1], r.kdv2 = c[2], r.cum_diss_u = c[3], r.cum_diss_v = c[4], r.defect = c[5];
        out.rows.push_back(r);
    });
    return out;
}

void EnergyLedger::read_balance_csv(std::istream& is) {
    std::size_t i = 0;
    read_numeric_csv(is, "t,rate_u,rate_lap_v,rate_tension,cum_tension,balance", 10, "balance ledger",
                     [&](const std::vector<double>& c) {
                         if (i >= rows.size() || c[0] != rows[i].t)
                             throw FormatError("balance ledger: rows do not match the ledger times");
                         LedgerRow& r = rows[i++];
                         r.rate_u = c[1], r.rate_lap_v = c[2], r.rate_tension = c[3], r.cum_tension = c[4];
                         r.balance = c[5], r.max_div_u = c[6], r.max_unit_defect = c[7], r.max_u = c[8];
                         r.max_grad_v = c[9];
                     });
    if (i != rows.size()) throw FormatError("balance ledger: fewer rows than the ledger");
}

// ---------------------------------------------------------------- stepping

namespace {

using Spec3 = std::array<Spectrum, 3>;

inline Complex times_ik(double k, Complex s) { return {-k * s.imag(), k * s.real()}; }

/// Per-mode tables and the pseudo-spectral right-hand side.
class Stepper {
public:
    Stepper(const Grid3& g, const SolverConfig& cfg, bool ns_path)
        : g_(g), plan_(g), cfg_(cfg), ns_(ns_path), M_(plan_.spectrum_size()), N_(g.size()) {
        kx_.resize(M_);
        ky_.resize(M_);
        kz_.resize(M_);
        k2_.resize(M_);
        keep_.resize(M_);
        plan_.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int a, int b, int c) {
            kx_[m] = kx;
            ky_[m] = ky;
            kz_[m] = kz;
            k2_[m] = kx * kx + ky * ky + kz * kz;
            keep_[m] = plan_.keep(a) && plan_.keep(b) && plan_.keep(c);
        });
        for (auto& b : phys_) b = RealBuffer(N_);
        for (auto& b : grad_) b = RealBuffer(N_);
        scratch_ = Spectrum(M_);
        prod_ = RealBuffer(N_);
    }

    const SpectralPlan& plan() const { return plan_; }
    std::size_t modes() const { return M_; }
    double k(int axis, std::size_t m) const { return axis == 0 ? kx_[m] : axis == 1 ? ky_[m] : kz_[m]; }
    double k2(std::size_t m) const { return k2_[m]; }

    Spec3 zeros() const { return {Spectrum(M_), Spectrum(M_), Spectrum(M_)}; }

    void forward3(const VectorField& f, Spec3& out) const {
        for (int c = 0; c < 3; ++c) plan_.forward(f[c].data(), out[c].data());
    }

    void project(Spec3& s) const {
        for (std::size_t m = 0; m < M_; ++m) {
            if (k2_[m] == 0.0) continue;
            const Complex d = (kx_[m] * s[0][m] + ky_[m] * s[1][m] + kz_[m] * s[2][m]) / k2_[m];
            s[0][m] -= kx_[m] * d;
            s[1][m] -= ky_[m] * d;
            s[2][m] -= kz_[m] * d;
        }
    }

    void maybe_dealias(Spectrum& s) const {
        if (!cfg_.dealias) return;
        for (std::size_t m = 0; m < M_; ++m)
            if (!keep_[m]) s[m] = 0.0;
    }

    /// Nonlinear terms at (uh, vh). When `v_phys` is given it must equal the
    /// inverse of vh and saves three transforms. Leaves u, grad v and v in
    /// the physical buffers; q_hat receives the reconstructed pressure when
    /// non-null.
    void rhs(const Spec3& uh, const Spec3& vh, const VectorField* v_phys, Spec3& Nu, Spec3& Nv, Spectrum* q_hat) {
        const bool frozen = cfg_.freeze_velocity;
        for (int c = 0; c < 3; ++c) {
            std::fill(Nu[c].begin(), Nu[c].end(), Complex(0.0));
            std::fill(Nv[c].begin(), Nv[c].end(), Complex(0.0));
        }
        if (q_hat) std::fill(q_hat->begin(), q_hat->end(), Complex(0.0));
        // physical u -> phys_[0..2], v -> phys_[3..5], grad v -> grad_[3i+k] = d_i v_k
        for (int c = 0; c < 3; ++c) {
            if (frozen) {
                std::fill(phys_[c].begin(), phys_[c].end(), 0.0);
            } else {
                std::copy(uh[c].begin(), uh[c].end(), scratch_.begin());
                plan_.inverse_destroy(scratch_.data(), phys_[c].data());
            }
        }
        if (!ns_) {
            for (int c = 0; c < 3; ++c) {
                if (v_phys) {
                    std::copy((*v_phys)[c].data(), (*v_phys)[c].data() + N_, phys_[3 + c].data());
                } else {
                    std::copy(vh[c].begin(), vh[c].end(), scratch_.begin());
                    plan_.inverse_destroy(scratch_.data(), phys_[3 + c].data());
                }
                for (int i = 0; i < 3; ++i) {
                    for (std::size_t m = 0; m < M_; ++m) scratch_[m] = times_ik(k(i, m), vh[c][m]);
                    plan_.inverse_destroy(scratch_.data(), grad_[3 * i + c].data());
                }
            }
        }

        // Momentum: -P div(u (x) u + grad v (.) grad v)
        if (!frozen) {
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    const double* ui = phys_[i].data();
                    const double* uj = phys_[j].data();
                    for (std::size_t x = 0; x < N_; ++x) prod_[x] = ui[x] * uj[x];
                    if (!ns_)
                        for (int c = 0; c < 3; ++c) {
                            const double* a = grad_[3 * i + c].data();
                            const double* b = grad_[3 * j + c].data();
                            for (std::size_t x = 0; x < N_; ++x) prod_[x] += a[x] * b[x];
                        }
                    plan_.forward(prod_.data(), scratch_.data());
                    maybe_dealias(scratch_);
                    const double sym = (i == j) ? 1.0 : 2.0;
                    for (std::size_t m = 0; m < M_; ++m) {
                        const Complex s = scratch_[m];
                        Nu[i][m] -= times_ik(k(j, m), s);
                        if (i != j) Nu[j][m] -= times_ik(k(i, m), s);
                        if (q_hat && k2_[m] != 0.0) (*q_hat)[m] -= sym * k(i, m) * k(j, m) / k2_[m] * s;
                    }
                }
            project(Nu);
        }

        // Director: -(u . grad) v + |grad v|^2 v
        if (!ns_) {
            for (int c = 0; c < 3; ++c) {
                for (std::size_t x = 0; x < N_; ++x) {
                    double g2 = 0.0;
                    for (int q = 0; q < 9; ++q) g2 += grad_[q][x] * grad_[q][x];
                    double adv = 0.0;
                    for (int j = 0; j < 3; ++j) adv += phys_[j][x] * grad_[3 * j + c][x];
                    prod_[x] = -adv + g2 * phys_[3 + c][x];
                }
                plan_.forward(prod_.data(), Nv[c].data());
                maybe_dealias(Nv[c]);
            }
        }
    }

    const RealBuffer& phys(int c) const { return phys_[c]; }
    const RealBuffer& grad(int q) const { return grad_[q]; }

    double parseval(const Spectrum& s, int power) const {
        double sum = 0.0;
        plan_.for_each_mode([&](std::size_t m, double, double, double, int, int, int c) {
            double w = plan_.plane_weight(c) * std::norm(s[m]);
            for (int p = 0; p < power; ++p) w *= k2_[m];
            sum += w;
        });
        return sum / static_cast<double>(N_) * g_.cell_volume();
    }

    /// max |div u| from the spectrum.
    double max_div(const Spec3& uh) {
        for (std::size_t m = 0; m < M_; ++m)
            scratch_[m] = times_ik(kx_[m], uh[0][m]) + times_ik(ky_[m], uh[1][m]) + times_ik(kz_[m], uh[2][m]);
        plan_.inverse_destroy(scratch_.data(), prod_.data());
        double mx = 0.0;
        for (std::size_t x = 0; x < N_; ++x) mx = std::max(mx, std::abs(prod_[x]));
        return mx;
    }

    /// Physical field of i k_axis s (or of -|k|^2 s when axis < 0).
    void spectral_derivative(const Spectrum& s, int axis, double* out) {
        for (std::size_t m = 0; m < M_; ++m) scratch_[m] = axis < 0 ? -k2_[m] * s[m] : times_ik(k(axis, m), s[m]);
        plan_.inverse_destroy(scratch_.data(), out);
    }
    void second_derivative(const Spectrum& s, int a, int b, double* out) {
        for (std::size_t m = 0; m < M_; ++m) scratch_[m] = -k(a, m) * k(b, m) * s[m];
        plan_.inverse_destroy(scratch_.data(), out);
    }

private:
    Grid3 g_;
    SpectralPlan plan_;
    const SolverConfig& cfg_;
    bool ns_;
    std::size_t M_, N_;
    std::vector<double> kx_, ky_, kz_, k2_;
    std::vector<char> keep_;
    std::array<RealBuffer, 6> phys_;
    std::array<RealBuffer, 9> grad_;
    Spectrum scratch_;
    RealBuffer prod_;
};

bool finite_spec(const Spec3& s) {
    for (const auto& c : s)
        for (const auto& z : c)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace

VectorField ns_step(const VectorField& u, double dt, bool dealias) {
    const Grid3& g = u.grid();
    SpectralPlan plan(g);
    auto nonlinear = [&](const std::array<Spectrum, 3>& uh) {
        std::array<ScalarField, 3> up{plan.inverse(uh[0]), plan.inverse(uh[1]), plan.inverse(uh[2])};
        std::array<Spectrum, 3> out{Spectrum(plan.spectrum_size()), Spectrum(plan.spectrum_size()),
                                    Spectrum(plan.spectrum_size())};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Spectrum s = plan.forward(hadamard(up[i], up[j]));
                if (dealias) plan.dealias(s);
                plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
                    const double kj = j == 0 ? kx : j == 1 ? ky : kz;
                    out[i][m] -= Complex(0.0, kj) * s[m];
                });
            }
        plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
            const double k2 = kx * kx + ky * ky + kz * kz;
            if (k2 == 0.0) return;
            const Complex d = (kx * out[0][m] + ky * out[1][m] + kz * out[2][m]) / k2;
            out[0][m] -= kx * d;
            out[1][m] -= ky * d;
            out[2][m] -= kz * d;
        });
        return out;
    };
    std::array<Spectrum, 3> uh{plan.forward(u[0]), plan.forward(u[1]), plan.forward(u[2])};
    const auto n1 = nonlinear(uh);
    std::array<Spectrum, 3> ys = uh;
    plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
        const double E = std::exp(-(kx * kx + ky * ky + kz * kz) * dt);
        for (int c = 0; c < 3; ++c) ys[c][m] = E * (uh[c][m] + dt * n1[c][m]);
    });
    const auto n2 = nonlinear(ys);
    plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
        const double E = std::exp(-(kx * kx + ky * ky + kz * kz) * dt);
        for (int c = 0; c < 3; ++c) uh[c][m] = E * uh[c][m] + 0.5 * dt * (E * n1[c][m] + n2[c][m]);
    });
    return VectorField(plan.inverse(uh[0]), plan.inverse(uh[1]), plan.inverse(uh[2]));
}

ScalarField reconstructed_pressure(const VectorField& u, const VectorField& v) {
    return spectral::pressure_q(u, jacobian(v)).q;
}

Trajectory evolve(const VectorField& u0, const VectorField& v0, const SolverConfig& cfg) {
    cfg.validate();
    const Grid3& g = u0.grid();
    require_same_grid(g, v0.grid(), "evolve");
    if (!g.is_power_of_two()) throw ConfigError("evolve needs a power-of-two grid");
    if (!u0.all_finite() || !v0.all_finite()) throw PreconditionError("evolve: non-finite initial data");

    const double div0 = divergence(u0).max_abs();
    if (!(div0 <= cfg.div_tolerance))
        throw PreconditionError("evolve: initial max |div u| = " + std::to_string(div0) + " exceeds " +
                                std::to_string(cfg.div_tolerance));
    double unit0 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double len = std::sqrt(v0[0][i] * v0[0][i] + v0[1][i] * v0[1][i] + v0[2][i] * v0[2][i]);
        unit0 = std::max(unit0, std::abs(len - 1.0));
    }
    if (!(unit0 <= cfg.unit_tolerance))
        throw PreconditionError("evolve: initial max ||v| - 1| = " + std::to_string(unit0) + " exceeds " +
                                std::to_string(cfg.unit_tolerance));
    if (cfg.freeze_velocity && u0.max_norm() != 0.0)
        throw PreconditionError("evolve: freeze_velocity requires u0 = 0");

    Trajectory out(g);
    out.ns_path = ns_special_case(v0);
    const double h = g.spacing();
    double dt = cfg.dt;
    if (cfg.cfl_scaled) {
        const double umax = u0.max_norm();
        if (umax > 0.0) dt = std::min(dt, cfg.cfl * h / umax);
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(cfg.T / dt - 1e-9)));
    dt = cfg.T / steps;
    out.dt = dt;

    Stepper st(g, cfg, out.ns_path);
    const std::size_t M = st.modes(), N = g.size();
    std::vector<double> E(M);
    for (std::size_t m = 0; m < M; ++m) E[m] = std::exp(-st.k2(m) * dt);

    Spec3 uh = st.zeros(), vh = st.zeros();
    st.forward3(u0, uh);
    st.project(uh);
    VectorField v = v0;
    st.forward3(v, vh);

    std::vector<CutoffFields> cuts;
    for (double R : cfg.probe_radii) cuts.push_back(cutoff_field(g, R));
    out.probes.resize(cfg.probe_radii.size());
    for (std::size_t p = 0; p < cuts.size(); ++p) out.probes[p].R = cfg.probe_radii[p];

    Spec3 N1 = st.zeros(), N2 = st.zeros(), ys = st.zeros();
    Spectrum qh(M);
    const bool probing = !cuts.empty();

    auto snapshot = [&](double t) {
        VectorField u(g);
        for (int c = 0; c < 3; ++c) u[c] = st.plan().inverse(uh[c]);
        return Snapshot{t, std::move(u), v};
    };

    // Diagnostics at the current state, using the buffers of the stage-1 evaluation.
    auto record = [&](double t) {
        LedgerRow row;
        row.t = t;
        for (int c = 0; c < 3; ++c) {
            row.ku2 += st.parseval(uh[c], 0);
            row.rate_u += st.parseval(uh[c], 1);
        }
        row.max_div_u = st.max_div(uh);
        double mu = 0.0;
        for (std::size_t x = 0; x < N; ++x)
            mu = std::max(mu, st.phys(0)[x] * st.phys(0)[x] + st.phys(1)[x] * st.phys(1)[x] +
                                  st.phys(2)[x] * st.phys(2)[x]);
        row.max_u = std::sqrt(mu);
        for (std::size_t x = 0; x < N; ++x) {
            const double len = std::sqrt(v[0][x] * v[0][x] + v[1][x] * v[1][x] + v[2][x] * v[2][x]);
            row.max_unit_defect = std::max(row.max_unit_defect, std::abs(len - 1.0));
        }
        if (!out.ns_path) {
            for (int c = 0; c < 3; ++c) {
                row.kdv2 += st.parseval(vh[c], 1);
                row.rate_lap_v += st.parseval(vh[c], 2);
            }
            std::array<ScalarField, 3> lap{ScalarField(g), ScalarField(g), ScalarField(g)};
            for (int c = 0; c < 3; ++c) st.spectral_derivative(vh[c], -1, lap[c].data());
            double tension = 0.0, mg = 0.0;
            for (std::size_t x = 0; x < N; ++x) {
                double g2 = 0.0;
                for (int q = 0; q < 9; ++q) g2 += st.grad(q)[x] * st.grad(q)[x];
                mg = std::max(mg, g2);
                for (int c = 0; c < 3; ++c) {
                    const double w = lap[c][x] + g2 * v[c][x];
                    tension += w * w;
                }
            }
            row.rate_tension = tension * g.cell_volume();
            row.max_grad_v = std::sqrt(mg);

            if (probing) {
                // probe-only fields: grad u, the Hessian gap density, q
                std::array<ScalarField, 9> gu{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                                              ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                                              ScalarField(g)};
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) st.spectral_derivative(uh[j], i, gu[3 * i + j].data());
                ScalarField hess2(g), tmp(g);
                for (int c = 0; c < 3; ++c)
                    for (int a = 0; a < 3; ++a)
                        for (int b = a; b < 3; ++b) {
                            st.second_derivative(vh[c], a, b, tmp.data());
                            const double w = a == b ? 1.0 : 2.0;
                            for (std::size_t x = 0; x < N; ++x) hess2[x] += w * tmp[x] * tmp[x];
                        }
                ScalarField q = st.plan().inverse(qh);
                for (std::size_t p = 0; p < cuts.size(); ++p) {
                    const auto& cf = cuts[p];
                    ProbeSample s;
                    s.t = t;
                    for (std::size_t x = 0; x < N; ++x) {
                        const double th = cf.theta[x];
                        const double gx[3] = {cf.grad[0][x], cf.grad[1][x], cf.grad[2][x]};
                        if (th == 0.0 && gx[0] == 0.0 && gx[1] == 0.0 && gx[2] == 0.0 && cf.lap[x] == 0.0) continue;
                        const double u[3] = {st.phys(0)[x], st.phys(1)[x], st.phys(2)[x]};
                        double g2 = 0.0, gu2 = 0.0, l2 = 0.0, vl = 0.0;
                        for (int qq = 0; qq < 9; ++qq) {
                            g2 += st.grad(qq)[x] * st.grad(qq)[x];
                            gu2 += gu[qq][x] * gu[qq][x];
                        }
                        for (int c = 0; c < 3; ++c) {
                            l2 += lap[c][x] * lap[c][x];
                            vl += v[c][x] * lap[c][x];
                        }
                        const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
                        const double e = 0.5 * (u2 + g2);
                        const double ugt = u[0] * gx[0] + u[1] * gx[1] + u[2] * gx[2];
                        double transport = 0.0;
                        for (int kk = 0; kk < 3; ++kk) {
                            if (gx[kk] == 0.0) continue;
                            double dot = 0.0;  // [(u.grad) v] . d_k v
                            for (int c = 0; c < 3; ++c) {
                                double adv = 0.0;
                                for (int j = 0; j < 3; ++j) adv += u[j] * st.grad(3 * j + c)[x];
                                dot += adv * st.grad(3 * kk + c)[x];
                            }
                            transport += dot * gx[kk];
                        }
                        s.energy += e * th;
                        s.grad_u += gu2 * th;
                        s.lap_v += l2 * th;
                        s.diffusion += e * cf.lap[x];
                        s.flux += (e + q[x]) * ugt;
                        s.transport += transport;
                        s.tension += -g2 * vl * th;
                        s.tension_sq += vl * vl * th;
                        s.hessian_gap += (hess2[x] - l2) * th;
                    }
                    const double w = g.cell_volume();
                    for (double* f : {&s.energy, &s.grad_u, &s.lap_v, &s.diffusion, &s.flux, &s.transport, &s.tension,
                                      &s.tension_sq, &s.hessian_gap})
                        *f *= w;
                    out.probes[p].samples.push_back(s);
                }
            }
        } else if (probing) {
            std::array<ScalarField, 9> gu{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                                          ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                                          ScalarField(g)};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) st.spectral_derivative(uh[j], i, gu[3 * i + j].data());
            ScalarField q = st.plan().inverse(qh);
            for (std::size_t p = 0; p < cuts.size(); ++p) {
                const auto& cf = cuts[p];
                ProbeSample s;
                s.t = t;
                for (std::size_t x = 0; x < N; ++x) {
                    const double u[3] = {st.phys(0)[x], st.phys(1)[x], st.phys(2)[x]};
                    double gu2 = 0.0;
                    for (int qq = 0; qq < 9; ++qq) gu2 += gu[qq][x] * gu[qq][x];
                    const double e = 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
                    const double ugt = u[0] * cf.grad[0][x] + u[1] * cf.grad[1][x] + u[2] * cf.grad[2][x];
                    s.energy += e * cf.theta[x];
                    s.grad_u += gu2 * cf.theta[x];
                    s.diffusion += e * cf.lap[x];
                    s.flux += (e + q[x]) * ugt;
                }
                const double w = g.cell_volume();
                s.energy *= w;
                s.grad_u *= w;
                s.diffusion *= w;
                s.flux *= w;
                out.probes[p].samples.push_back(s);
            }
        }

        if (!out.ledger.rows.empty()) {
            const auto& prev = out.ledger.rows.back();
            const double dtt = t - prev.t;
            row.cum_diss_u = prev.cum_diss_u + dtt * (prev.rate_u + row.rate_u);  // 2 * trapezoid
            row.cum_diss_v = prev.cum_diss_v + 0.5 * dtt * (prev.rate_lap_v + row.rate_lap_v);
            row.cum_tension = prev.cum_tension + dtt * (prev.rate_tension + row.rate_tension);
        }
        const double e0 = out.ledger.rows.empty() ? row.ku2 + row.kdv2 : out.ledger.e0();
        row.defect = row.ku2 + row.cum_diss_u + row.kdv2 - e0;
        row.balance = row.defect + row.cum_tension;
        out.ledger.rows.push_back(row);
    };

    out.snapshots.push_back(snapshot(0.0));
    Spec3 Nu2 = st.zeros(), Nv2 = st.zeros(), vs = st.zeros();
    double t = 0.0;
    bool cfl_warned = false;
    for (int step = 0; step <= steps; ++step) {
        st.rhs(uh, vh, &v, N1, N2, probing ? &qh : nullptr);  // stage 1: N1 momentum, N2 director
        record(t);
        if (step == steps) break;
        if (!cfl_warned && out.ledger.rows.back().max_u * dt / h > 1.0) {
            out.warnings.push_back("CFL number above 1 at t = " + std::to_string(t));
            cfl_warned = true;
        }
        for (int c = 0; c < 3; ++c)
            for (std::size_t m = 0; m < M; ++m) {
                ys[c][m] = E[m] * (uh[c][m] + dt * N1[c][m]);
                vs[c][m] = out.ns_path ? vh[c][m] : E[m] * (vh[c][m] + dt * N2[c][m]);
            }
        st.rhs(ys, vs, nullptr, Nu2, Nv2, nullptr);
        // the new state is written into ys / vs
        for (int c = 0; c < 3; ++c)
            for (std::size_t m = 0; m < M; ++m) {
                ys[c][m] = E[m] * uh[c][m] + 0.5 * dt * (E[m] * N1[c][m] + Nu2[c][m]);
                vs[c][m] = out.ns_path ? vh[c][m] : E[m] * vh[c][m] + 0.5 * dt * (E[m] * N2[c][m] + Nv2[c][m]);
            }
        st.project(ys);

        VectorField vnew = v;
        if (!out.ns_path) {
            for (int c = 0; c < 3; ++c) vnew[c] = st.plan().inverse(vs[c]);
            if (cfg.renormalize)
                for (std::size_t x = 0; x < N; ++x) {
                    const double len =
                        std::sqrt(vnew[0][x] * vnew[0][x] + vnew[1][x] * vnew[1][x] + vnew[2][x] * vnew[2][x]);
                    for (int c = 0; c < 3; ++c) vnew[c][x] /= len;
                }
        }
        if (!finite_spec(ys) || !vnew.all_finite()) {
            out.status = RunStatus::unstable;
            out.message = "non-finite values after the step from t = " + std::to_string(t);
            break;
        }
        std::swap(uh, ys);
        v = std::move(vnew);
        if (!out.ns_path) st.forward3(v, vh);
        t = (step + 1) * dt;
        ++out.steps;
        if (cfg.snapshot_every > 0 && out.steps % cfg.snapshot_every == 0 && out.steps != steps)
            out.snapshots.push_back(snapshot(t));
    }

    out.final_state.t = t;
    out.final_state.u = VectorField(g);
    for (int c = 0; c < 3; ++c) out.final_state.u[c] = st.plan().inverse(uh[c]);
    out.final_state.v = v;
    if (out.snapshots.empty() || out.snapshots.back().t != t) out.snapshots.push_back(snapshot(t));
    return out;
}

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names() { return {"zero", "taylor-green", "director-winding", "coupled", "appendix-a"}; }

namespace {

VectorField taylor_green(const Grid3& g, double A) {
    return VectorField::sample(g, [A](double x, double y, double z) {
        return std::array<double, 3>{A * std::sin(x) * std::cos(y) * std::cos(z),
                                     -A * std::cos(x) * std::sin(y) * std::cos(z), 0.0};
    });
}

/// normalize(a x g, a y g, 1), g = exp(-r^2 / s^2): the in-plane part winds
/// once around the x3 axis and the tilt is confined to |x| of order s.
VectorField winding(const Grid3& g, double a, double s) {
    return VectorField::sample(g, [a, s](double x, double y, double z) {
        const double w = a * std::exp(-(x * x + y * y + z * z) / (s * s));
        const double vx = w * x, vy = w * y;
        const double len = std::sqrt(vx * vx + vy * vy + 1.0);
        return std::array<double, 3>{vx / len, vy / len, 1.0 / len};
    });
}

VectorField e3(const Grid3& g) { return VectorField(ScalarField(g), ScalarField(g), ScalarField(g, 1.0)); }

}  // namespace

Preset make_preset(const std::string& name, const Grid3& g, double amplitude) {
    if (name == "zero") return {name, VectorField(g), e3(g)};
    if (name == "taylor-green") return {name, taylor_green(g, amplitude < 0 ? 0.1 : amplitude), e3(g)};
    if (name == "director-winding") return {name, VectorField(g), winding(g, amplitude < 0 ? 2.0 : amplitude, 0.8)};
    if (name == "coupled")
        return {name, taylor_green(g, amplitude < 0 ? 0.1 : amplitude), winding(g, 1.0, 0.8)};
    if (name == "appendix-a")
        throw ConfigError("appendix-a is a stationary state; use the counterexample routines");
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace elk::ericksen
