#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "elk/grid.hpp"

namespace elk {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex, AlignedAllocator<Complex>>;

/// Wavenumber tables and transforms for one grid.
///
/// Storage is the real-to-complex half spectrum: n x n x (n/2+1), last axis
/// fastest. Wavenumbers are pi*m/L with m the signed mode index; the Nyquist
/// row (|m| = n/2) is assigned wavenumber 0 on every axis so that all
/// derivative-based multipliers agree with each other and stay real-valued.
///
/// Transforms are deterministic (estimate-mode plans), shared per n and
/// guarded by a mutex during planning, and reentrant afterwards.
class SpectralPlan {
public:
    explicit SpectralPlan(const Grid3& grid);

    const Grid3& grid() const { return grid_; }
    int n() const { return grid_.n(); }
    int nz() const { return grid_.n() / 2 + 1; }
    std::size_t spectrum_size() const { return static_cast<std::size_t>(n()) * n() * nz(); }

    /// Wavenumber along a full axis (x or y) for storage index m in [0, n).
    double k(int m) const { return k_[m]; }
    /// Wavenumber along the half axis (z), m in [0, n/2].
    double kz(int m) const { return k_[m]; }
    /// Signed mode number for storage index m.
    int mode(int m) const { return m <= n() / 2 ? m : m - n(); }
    /// 2/3-rule: keep iff 3|m| < n.
    bool keep(int m) const { return keep_[m]; }

    /// Parseval weight of half-spectrum plane mz: 1 for mz = 0 and the Nyquist plane, 2 otherwise.
    double plane_weight(int mz) const { return (mz == 0 || mz == n() / 2) ? 1.0 : 2.0; }

    Spectrum forward(const ScalarField& f) const;
    /// Unnormalized transform into `out` (size spectrum_size()).
    void forward(const double* in, Complex* out) const;
    /// Normalized inverse; the input is left untouched.
    ScalarField inverse(const Spectrum& s) const;
    void inverse(const Complex* in, double* out) const;
    /// Same as inverse() but uses `in` as scratch (its contents are lost).
    void inverse_destroy(Complex* in, double* out) const;

    /// Calls f(index, kx, ky, kz, ix, iy, iz) over the half spectrum in storage order.
    template <class F>
    void for_each_mode(F&& f) const {
        const int N = n(), NZ = nz();
        std::size_t idx = 0;
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                for (int c = 0; c < NZ; ++c, ++idx) f(idx, k_[a], k_[b], k_[c], a, b, c);
    }

    /// Zeroes modes outside the 2/3 box.
    void dealias(Spectrum& s) const;

    /// sum_x f(x) g(x) h^3 computed from spectra of real fields.
    double inner(const Spectrum& a, const Spectrum& b) const;

private:
    Grid3 grid_;
    std::vector<double> k_;
    std::vector<bool> keep_;
};

/// Applies a real or complex multiplier m(kx,ky,kz) and transforms back.
template <class M>
ScalarField apply_multiplier(const SpectralPlan& plan, const ScalarField& f, M&& m) {
    Spectrum s = plan.forward(f);
    plan.for_each_mode([&](std::size_t i, double kx, double ky, double kz, int, int, int) { s[i] *= m(kx, ky, kz); });
    return plan.inverse(s);
}

}  // namespace elk
