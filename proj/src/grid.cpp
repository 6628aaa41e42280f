#include "elk/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <new>
#include <string>

namespace elk {

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (!p) throw std::bad_alloc();
    return p;
}
void aligned_free(void* p) noexcept { fftw_free(p); }
}  // namespace detail

Grid3::Grid3(int n, double box_half) : n_(n), box_half_(box_half) {
    if (n < 16) throw ConfigError("grid: n must be >= 16, got " + std::to_string(n));
    if (!(box_half > 0.0) || !std::isfinite(box_half))
        throw ConfigError("grid: box half-width must be positive and finite");
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* what) {
    if (a != b) throw ConfigError(std::string(what) + ": fields live on different grids");
}

ScalarField::ScalarField(const Grid3& grid, double value) : grid_(grid), data_(grid.size(), value) {}

ScalarField::ScalarField(const Grid3& grid, std::span<const double> values) : grid_(grid) {
    if (values.size() != grid.size())
        throw ConfigError("scalar field: expected " + std::to_string(grid.size()) + " values, got " +
                          std::to_string(values.size()));
    data_.assign(values.begin(), values.end());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "scalar +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "scalar -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "hadamard");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

VectorField::VectorField(const Grid3& grid) : c_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

VectorField::VectorField(ScalarField x, ScalarField y, ScalarField z)
    : c_{std::move(x), std::move(y), std::move(z)} {
    require_same_grid(c_[0].grid(), c_[1].grid(), "vector field");
    require_same_grid(c_[0].grid(), c_[2].grid(), "vector field");
}

double VectorField::max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < c_[0].size(); ++i)
        m = std::max(m, c_[0][i] * c_[0][i] + c_[1][i] * c_[1][i] + c_[2][i] * c_[2][i]);
    return std::sqrt(m);
}

bool VectorField::all_finite() const { return c_[0].all_finite() && c_[1].all_finite() && c_[2].all_finite(); }

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int c = 0; c < 3; ++c) c_[c] += o.c_[c];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (int c = 0; c < 3; ++c) c_[c] -= o.c_[c];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(VectorField a, double s) { return a *= s; }

TensorField::TensorField(const Grid3& grid)
    : c_{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid),
         ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

double TensorField::max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < c_[0].size(); ++i) {
        double s = 0.0;
        for (const auto& c : c_) s += c[i] * c[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "dot");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i];
    return out;
}

ScalarField norm_sq(const VectorField& a) { return dot(a, a); }

ScalarField norm_sq(const TensorField& t) {
    ScalarField out(t.grid());
    for (int k = 0; k < 9; ++k) {
        const auto& c = t.flat(k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * c[i];
    }
    return out;
}

VectorField contract_first(const VectorField& a, const TensorField& t) {
    require_same_grid(a.grid(), t.grid(), "contract_first");
    VectorField out(a.grid());
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const auto& ai = a[i];
            const auto& tij = t(i, j);
            auto& oj = out[j];
            for (std::size_t n = 0; n < oj.size(); ++n) oj[n] += ai[n] * tij[n];
        }
    return out;
}

VectorField contract_second(const TensorField& t, const VectorField& b) {
    require_same_grid(b.grid(), t.grid(), "contract_second");
    VectorField out(b.grid());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto& bj = b[j];
            const auto& tij = t(i, j);
            auto& oi = out[i];
            for (std::size_t n = 0; n < oi.size(); ++n) oi[n] += tij[n] * bj[n];
        }
    return out;
}

VectorField scale(const VectorField& a, const ScalarField& s) {
    return VectorField(hadamard(a[0], s), hadamard(a[1], s), hadamard(a[2], s));
}

TensorField row_gram(const TensorField& a, const TensorField& b) {
    require_same_grid(a.grid(), b.grid(), "row_gram");
    TensorField out(a.grid());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const auto& aik = a(i, k);
                const auto& bjk = b(j, k);
                auto& o = out(i, j);
                for (std::size_t n = 0; n < o.size(); ++n) o[n] += aik[n] * bjk[n];
            }
    return out;
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double integrate(const ScalarField& f, const ScalarField& w) {
    require_same_grid(f.grid(), w.grid(), "integrate");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * w[i];
    return s * f.grid().cell_volume();
}

}  // namespace elk
