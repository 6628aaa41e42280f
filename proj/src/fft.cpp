#include "elk/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace elk {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// Process-wide cache; plans are never destroyed so references stay valid.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    const PlanPair& get(int n) {
        std::lock_guard lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        const std::size_t real = static_cast<std::size_t>(n) * n * n;
        const std::size_t cplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);
        double* r = fftw_alloc_real(real);
        fftw_complex* c = fftw_alloc_complex(cplx);
        PlanPair p;
        p.r2c = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);
        fftw_free(r);
        fftw_free(c);
        if (!p.r2c || !p.c2r) throw ConfigError("fft: planning failed for n=" + std::to_string(n));
        return plans_.emplace(n, p).first->second;
    }

private:
    std::mutex mu_;
    std::map<int, PlanPair> plans_;
};

bool aligned_like_fftw(const void* p) { return reinterpret_cast<std::uintptr_t>(p) % 16 == 0; }

}  // namespace

SpectralPlan::SpectralPlan(const Grid3& grid) : grid_(grid) {
    if (!grid.is_power_of_two())
        throw ConfigError("spectral scheme requires a power-of-two grid, got n=" + std::to_string(grid.n()));
    const int N = grid.n();
    k_.resize(N);
    keep_.resize(N);
    for (int m = 0; m < N; ++m) {
        const int s = mode(m);
        k_[m] = (2 * std::abs(s) == N) ? 0.0 : std::numbers::pi * s / grid.box_half();
        keep_[m] = 3 * std::abs(s) < N;
    }
    PlanCache::instance().get(N);
}

void SpectralPlan::forward(const double* in, Complex* out) const {
    const auto& p = PlanCache::instance().get(n());
    if (!aligned_like_fftw(in) || !aligned_like_fftw(out)) throw ConfigError("fft: misaligned buffer");
    // r2c does not modify its input in practice but the API takes a non-const pointer.
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

Spectrum SpectralPlan::forward(const ScalarField& f) const {
    require_same_grid(grid_, f.grid(), "fft forward");
    Spectrum out(spectrum_size());
    forward(f.data(), out.data());
    return out;
}

void SpectralPlan::inverse(const Complex* in, double* out) const {
    const auto& p = PlanCache::instance().get(n());
    // c2r destroys its input.
    Spectrum scratch(in, in + spectrum_size());
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i] *= scale;
}

void SpectralPlan::inverse_destroy(Complex* in, double* out) const {
    const auto& p = PlanCache::instance().get(n());
    if (!aligned_like_fftw(in) || !aligned_like_fftw(out)) throw ConfigError("fft: misaligned buffer");
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in), out);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i] *= scale;
}

ScalarField SpectralPlan::inverse(const Spectrum& s) const {
    ScalarField out(grid_);
    inverse(s.data(), out.data());
    return out;
}

void SpectralPlan::dealias(Spectrum& s) const {
    for_each_mode([&](std::size_t i, double, double, double, int a, int b, int c) {
        if (!(keep_[a] && keep_[b] && keep_[c])) s[i] = 0.0;
    });
}

double SpectralPlan::inner(const Spectrum& a, const Spectrum& b) const {
    double sum = 0.0;
    for_each_mode([&](std::size_t i, double, double, double, int, int, int c) {
        sum += plane_weight(c) * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    });
    const double N3 = static_cast<double>(grid_.size());
    return sum / N3 * grid_.cell_volume();
}

}  // namespace elk
