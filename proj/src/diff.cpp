#include "elk/diff.hpp"

#include <string>

#include "elk/fft.hpp"

namespace elk {

Scheme parse_scheme(std::string_view s) {
    if (s == "spectral") return Scheme::spectral;
    if (s == "fd4") return Scheme::fd4;
    throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

namespace {

void check_axis(int axis) {
    if (axis < 0 || axis > 2) throw ConfigError("axis must be 0, 1 or 2");
}

// Applies a 1-D periodic stencil along `axis`.
template <int W>
ScalarField stencil(const ScalarField& f, int axis, const double (&w)[2 * W + 1], double scale) {
    const Grid3& g = f.grid();
    const int n = g.n();
    ScalarField out(g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int o = -W; o <= W; ++o) {
                    if (w[o + W] == 0.0) continue;
                    int a = i, b = j, c = k;
                    (axis == 0 ? a : axis == 1 ? b : c) += o;
                    s += w[o + W] * f[g.index(g.wrap(a), g.wrap(b), g.wrap(c))];
                }
                out[g.index(i, j, k)] = s * scale;
            }
    return out;
}

ScalarField fd4_first(const ScalarField& f, int axis) {
    static constexpr double w[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
    const double h = f.grid().spacing();
    return stencil<2>(f, axis, w, 1.0 / (12.0 * h));
}

ScalarField fd4_second(const ScalarField& f, int axis) {
    static constexpr double w[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
    const double h = f.grid().spacing();
    return stencil<2>(f, axis, w, 1.0 / (12.0 * h * h));
}

double axis_k(double kx, double ky, double kz, int axis) { return axis == 0 ? kx : axis == 1 ? ky : kz; }

}  // namespace

ScalarField derivative(const ScalarField& f, int axis, Scheme scheme) {
    check_axis(axis);
    if (scheme == Scheme::fd4) return fd4_first(f, axis);
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [axis](double kx, double ky, double kz) {
        return Complex(0.0, axis_k(kx, ky, kz, axis));
    });
}

ScalarField second_derivative(const ScalarField& f, int a, int b, Scheme scheme) {
    check_axis(a);
    check_axis(b);
    if (scheme == Scheme::fd4) return a == b ? fd4_second(f, a) : fd4_first(fd4_first(f, a), b);
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [a, b](double kx, double ky, double kz) {
        return Complex(-axis_k(kx, ky, kz, a) * axis_k(kx, ky, kz, b), 0.0);
    });
}

VectorField gradient(const ScalarField& f, Scheme scheme) {
    if (scheme == Scheme::fd4) return VectorField(fd4_first(f, 0), fd4_first(f, 1), fd4_first(f, 2));
    SpectralPlan plan(f.grid());
    const Spectrum s = plan.forward(f);
    VectorField out(f.grid());
    Spectrum d(s.size());
    for (int a = 0; a < 3; ++a) {
        plan.for_each_mode([&](std::size_t i, double kx, double ky, double kz, int, int, int) {
            d[i] = s[i] * Complex(0.0, axis_k(kx, ky, kz, a));
        });
        plan.inverse(d.data(), out[a].data());
    }
    return out;
}

TensorField jacobian(const VectorField& v, Scheme scheme) {
    TensorField out(v.grid());
    for (int j = 0; j < 3; ++j) {
        VectorField g = gradient(v[j], scheme);
        for (int i = 0; i < 3; ++i) out(i, j) = std::move(g[i]);
    }
    return out;
}

TensorField hessian(const ScalarField& f, Scheme scheme) {
    TensorField out(f.grid());
    if (scheme == Scheme::fd4) {
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                out(a, b) = second_derivative(f, a, b, scheme);
                if (b != a) out(b, a) = out(a, b);
            }
        return out;
    }
    SpectralPlan plan(f.grid());
    const Spectrum s = plan.forward(f);
    Spectrum d(s.size());
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            plan.for_each_mode([&](std::size_t i, double kx, double ky, double kz, int, int, int) {
                d[i] = s[i] * (-axis_k(kx, ky, kz, a) * axis_k(kx, ky, kz, b));
            });
            plan.inverse(d.data(), out(a, b).data());
            if (b != a) out(b, a) = out(a, b);
        }
    return out;
}

ScalarField laplacian(const ScalarField& f, Scheme scheme) {
    if (scheme == Scheme::fd4) return fd4_second(f, 0) + fd4_second(f, 1) + fd4_second(f, 2);
    SpectralPlan plan(f.grid());
    return apply_multiplier(plan, f, [](double kx, double ky, double kz) {
        return Complex(-(kx * kx + ky * ky + kz * kz), 0.0);
    });
}

VectorField laplacian(const VectorField& v, Scheme scheme) {
    return VectorField(laplacian(v[0], scheme), laplacian(v[1], scheme), laplacian(v[2], scheme));
}

ScalarField divergence(const VectorField& v, Scheme scheme) {
    if (scheme == Scheme::fd4) return fd4_first(v[0], 0) + fd4_first(v[1], 1) + fd4_first(v[2], 2);
    SpectralPlan plan(v.grid());
    Spectrum acc(plan.spectrum_size());
    for (int a = 0; a < 3; ++a) {
        const Spectrum s = plan.forward(v[a]);
        plan.for_each_mode([&](std::size_t i, double kx, double ky, double kz, int, int, int) {
            acc[i] += s[i] * Complex(0.0, axis_k(kx, ky, kz, a));
        });
    }
    return plan.inverse(acc);
}

VectorField tensor_divergence(const TensorField& t, Scheme scheme) {
    VectorField out(t.grid());
    for (int i = 0; i < 3; ++i) out[i] = divergence(VectorField(t(i, 0), t(i, 1), t(i, 2)), scheme);
    return out;
}

VectorField curl(const VectorField& v, Scheme scheme) {
    return VectorField(derivative(v[2], 1, scheme) - derivative(v[1], 2, scheme),
                       derivative(v[0], 2, scheme) - derivative(v[2], 0, scheme),
                       derivative(v[1], 0, scheme) - derivative(v[0], 1, scheme));
}

}  // namespace elk
