#include "elk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elk/diff.hpp"
#include "elk/quadrature.hpp"

namespace elk::spectral {

namespace {

double axis_k(double kx, double ky, double kz, int a) { return a == 0 ? kx : a == 1 ? ky : kz; }

void check_axis(int a) {
    if (a < 0 || a > 2) throw ConfigError("axis must be 0, 1 or 2");
}

// sup over nodes of the pointwise length of a list of components
double sup_length(const std::vector<const ScalarField*>& comps) {
    double m = 0.0;
    const std::size_t N = comps.front()->size();
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (const auto* c : comps) s += (*c)[i] * (*c)[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

}  // namespace

ScalarField riesz(const ScalarField& f, int axis) {
    check_axis(axis);
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [axis](double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return Complex(0.0, 0.0);
        return Complex(0.0, axis_k(kx, ky, kz, axis) / std::sqrt(k2));
    });
}

ScalarField riesz_pair(const ScalarField& f, int i, int j) {
    check_axis(i);
    check_axis(j);
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [i, j](double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return Complex(0.0, 0.0);
        return Complex(-axis_k(kx, ky, kz, i) * axis_k(kx, ky, kz, j) / k2, 0.0);
    });
}

double mean(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
}

VectorField leray_project(const VectorField& u) {
    SpectralPlan plan(u.grid());
    std::array<Spectrum, 3> s{plan.forward(u[0]), plan.forward(u[1]), plan.forward(u[2])};
    plan.for_each_mode([&](std::size_t i, double kx, double ky, double kz, int, int, int) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return;
        const Complex d = (kx * s[0][i] + ky * s[1][i] + kz * s[2][i]) / k2;
        s[0][i] -= kx * d;
        s[1][i] -= ky * d;
        s[2][i] -= kz * d;
    });
    return VectorField(plan.inverse(s[0]), plan.inverse(s[1]), plan.inverse(s[2]));
}

ScalarField heat_convolve(const ScalarField& f, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat time must be positive, got " + std::to_string(t));
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [t](double kx, double ky, double kz) {
        return Complex(std::exp(-(kx * kx + ky * ky + kz * kz) * t), 0.0);
    });
}

VectorField heat_convolve(const VectorField& f, double t) {
    return VectorField(heat_convolve(f[0], t), heat_convolve(f[1], t), heat_convolve(f[2], t));
}

ScalarField dealiased(const ScalarField& f) {
    SpectralPlan plan(f.grid());
    Spectrum s = plan.forward(f);
    plan.dealias(s);
    return plan.inverse(s);
}

TensorField quadratic_stress(const VectorField& u, const TensorField& grad_v, bool dealias) {
    require_same_grid(u.grid(), grad_v.grid(), "quadratic_stress");
    TensorField uu(u.grid());
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) uu(i, j) = hadamard(u[i], u[j]);
    TensorField vv = row_gram(grad_v, grad_v);
    TensorField out(u.grid());
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            ScalarField a = dealias ? dealiased(uu(i, j)) : uu(i, j);
            ScalarField b = dealias ? dealiased(vv(i, j)) : vv(i, j);
            out(i, j) = a + b;
            if (j != i) out(j, i) = out(i, j);
        }
    return out;
}

PressureResult pressure_q(const VectorField& u, const TensorField& grad_v, const PressureOptions& opt) {
    require_same_grid(u.grid(), grad_v.grid(), "pressure_q");
    SpectralPlan plan(u.grid());
    const double div_u = divergence(u).max_abs();
    if (div_u > opt.div_tolerance)
        throw PreconditionError("pressure: max |div u| = " + std::to_string(div_u) + " exceeds tolerance " +
                                std::to_string(opt.div_tolerance));

    // Accumulate the velocity and director parts separately in Fourier space.
    Spectrum qv(plan.spectrum_size()), qd(plan.spectrum_size());
    TensorField vv = row_gram(grad_v, grad_v);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const double mult = (i == j) ? 1.0 : 2.0;  // symmetric pair counted twice
            Spectrum a = plan.forward(hadamard(u[i], u[j]));
            Spectrum b = plan.forward(vv(i, j));
            if (opt.dealias) {
                plan.dealias(a);
                plan.dealias(b);
            }
            plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
                const double k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0.0) return;
                const double sym = -mult * axis_k(kx, ky, kz, i) * axis_k(kx, ky, kz, j) / k2;
                qv[m] += sym * a[m];
                qd[m] += sym * b[m];
            });
        }
    Spectrum q(plan.spectrum_size());
    for (std::size_t m = 0; m < q.size(); ++m) q[m] = qv[m] + qd[m];

    PressureResult out{plan.inverse(q), VectorField(u.grid()), plan.inverse(qv), plan.inverse(qd), 0.0, 0.0, div_u};
    for (int a = 0; a < 3; ++a) {
        Spectrum d(q.size());
        plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
            d[m] = q[m] * Complex(0.0, axis_k(kx, ky, kz, a));
        });
        plan.inverse(d.data(), out.grad_q[a].data());
    }

    // Independent residual: physical-space products, nested divergences, Laplacian of q.
    const TensorField T = quadratic_stress(u, grad_v, opt.dealias);
    const VectorField divT = tensor_divergence(T);
    const ScalarField rhs = divergence(divT);
    const ScalarField lhs = laplacian(out.q) * -1.0;
    out.rhs_scale = rhs.max_abs();
    for (std::size_t m = 0; m < lhs.size(); ++m) out.poisson_residual = std::max(out.poisson_residual, std::abs(lhs[m] - rhs[m]));
    return out;
}

namespace {

BesovResult besov_impl(const std::vector<const ScalarField*>& comps) {
    const Grid3& g = comps.front()->grid();
    SpectralPlan plan(g);
    std::vector<Spectrum> spec;
    for (const auto* c : comps) spec.push_back(plan.forward(*c));
    std::vector<ScalarField> work(comps.size(), ScalarField(g));
    Spectrum tmp(plan.spectrum_size());

    auto eval = [&](double t) {
        for (std::size_t c = 0; c < comps.size(); ++c) {
            plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int) {
                tmp[m] = spec[c][m] * std::exp(-(kx * kx + ky * ky + kz * kz) * t);
            });
            plan.inverse(tmp.data(), work[c].data());
        }
        std::vector<const ScalarField*> w;
        for (const auto& f : work) w.push_back(&f);
        return std::sqrt(t) * sup_length(w);
    };

    BesovResult out;
    const double h = g.spacing(), L = g.box_half();
    out.t_min = h * h;
    out.t_max = 0.25 * L * L;
    {
        ScalarField m(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s = 0.0;
            for (const auto* c : comps) s += (*c)[i] * (*c)[i];
            m[i] = std::sqrt(s);
        }
        out.boundary_contaminated = tail_ratio(m) > 1e-8;
    }

    std::size_t best = 0;
    for (double t = out.t_min; t <= out.t_max * (1 + 1e-12); t *= 2.0) {
        out.ladder.push_back({t, eval(t)});
        if (out.ladder.back().value > out.ladder[best].value) best = out.ladder.size() - 1;
    }
    out.ladder_value = out.ladder[best].value;
    out.value = out.ladder_value;
    out.argmax_t = out.ladder[best].t;

    if (out.ladder_value > 0.0) {
        // golden-section search in log t between the neighbouring rungs
        double a = std::log(out.ladder[best == 0 ? 0 : best - 1].t);
        double b = std::log(out.ladder[std::min(best + 1, out.ladder.size() - 1)].t);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = eval(std::exp(x1)), f2 = eval(std::exp(x2));
        for (int it = 0; it < 40 && b - a > 1e-6; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(std::exp(x2));
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(std::exp(x1));
            }
        }
        const double tb = f1 > f2 ? std::exp(x1) : std::exp(x2);
        const double vb = std::max(f1, f2);
        if (vb > out.value) {
            out.value = vb;
            out.argmax_t = tb;
        }
    }
    out.wraparound = std::exp(-L * L / (4.0 * out.argmax_t)) > 1e-8;
    return out;
}

}  // namespace

BesovResult besov_minus1_norm(const ScalarField& f) { return besov_impl({&f}); }
BesovResult besov_minus1_norm(const VectorField& f) { return besov_impl({&f[0], &f[1], &f[2]}); }

double hdot1_sq(const ScalarField& f) {
    SpectralPlan plan(f.grid());
    const Spectrum s = plan.forward(f);
    double sum = 0.0;
    plan.for_each_mode([&](std::size_t m, double kx, double ky, double kz, int, int, int c) {
        sum += plan.plane_weight(c) * (kx * kx + ky * ky + kz * kz) * std::norm(s[m]);
    });
    return sum / static_cast<double>(f.size()) * f.grid().cell_volume();
}

}  // namespace elk::spectral
