#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elk/error.hpp"

namespace elk {

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned storage so field buffers can be handed
/// straight to the FFT backend.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) { return static_cast<T*>(detail::aligned_alloc_bytes(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { detail::aligned_free(p); }
    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealBuffer = std::vector<double, AlignedAllocator<double>>;

/// Periodic cubic lattice on [-L, L)^3 with n nodes per axis.
///
/// Node (i,j,k) sits at (-L + i h, -L + j h, -L + k h), h = 2L/n, and the
/// flat index is k-fastest. The quadrature weight of every node is h^3.
class Grid3 {
public:
    Grid3(int n, double box_half);

    int n() const { return n_; }
    double box_half() const { return box_half_; }
    double spacing() const { return 2.0 * box_half_ / n_; }
    double cell_volume() const {
        const double h = spacing();
        return h * h * h;
    }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
    bool is_power_of_two() const { return (n_ & (n_ - 1)) == 0; }

    double coord(int i) const { return -box_half_ + i * spacing(); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    /// Periodic wrap of an integer node coordinate.
    int wrap(int i) const { return ((i % n_) + n_) % n_; }

    /// Calls f(index, x, y, z) for every node in storage order.
    template <class F>
    void for_each(F&& f) const {
        std::size_t idx = 0;
        for (int i = 0; i < n_; ++i) {
            const double x = coord(i);
            for (int j = 0; j < n_; ++j) {
                const double y = coord(j);
                for (int k = 0; k < n_; ++k, ++idx) f(idx, x, y, coord(k));
            }
        }
    }

    bool operator==(const Grid3& o) const { return n_ == o.n_ && box_half_ == o.box_half_; }
    bool operator!=(const Grid3& o) const { return !(*this == o); }

private:
    int n_;
    double box_half_;
};

/// Throws ConfigError unless both grids are identical.
void require_same_grid(const Grid3& a, const Grid3& b, const char* what);

class ScalarField {
public:
    explicit ScalarField(const Grid3& grid, double value = 0.0);
    ScalarField(const Grid3& grid, std::span<const double> values);

    template <class F>
    static ScalarField sample(const Grid3& grid, F&& f) {
        ScalarField out(grid);
        grid.for_each([&](std::size_t idx, double x, double y, double z) { out.data_[idx] = f(x, y, z); });
        return out;
    }

    const Grid3& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return {data_.data(), data_.size()}; }
    std::span<const double> values() const { return {data_.data(), data_.size()}; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

private:
    Grid3 grid_;
    RealBuffer data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Three components on one grid (u, v, gradients).
class VectorField {
public:
    explicit VectorField(const Grid3& grid);
    VectorField(ScalarField x, ScalarField y, ScalarField z);

    template <class F>
    static VectorField sample(const Grid3& grid, F&& f) {
        VectorField out(grid);
        grid.for_each([&](std::size_t idx, double x, double y, double z) {
            const std::array<double, 3> v = f(x, y, z);
            for (int c = 0; c < 3; ++c) out.c_[c][idx] = v[c];
        });
        return out;
    }

    const Grid3& grid() const { return c_[0].grid(); }
    ScalarField& operator[](int c) { return c_[c]; }
    const ScalarField& operator[](int c) const { return c_[c]; }

    /// max over nodes of the Euclidean length.
    double max_norm() const;
    bool all_finite() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

private:
    std::array<ScalarField, 3> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(VectorField a, double s);

/// Nine components; entry (i,j) conventionally holds d_i(.)_j.
class TensorField {
public:
    explicit TensorField(const Grid3& grid);

    const Grid3& grid() const { return c_[0].grid(); }
    ScalarField& operator()(int i, int j) { return c_[3 * i + j]; }
    const ScalarField& operator()(int i, int j) const { return c_[3 * i + j]; }
    ScalarField& flat(int k) { return c_[k]; }
    const ScalarField& flat(int k) const { return c_[k]; }

    /// max over nodes of the Frobenius norm.
    double max_norm() const;

private:
    std::array<ScalarField, 9> c_;
};

// Pointwise algebra used throughout the residual and energy code.
ScalarField dot(const VectorField& a, const VectorField& b);
ScalarField norm_sq(const VectorField& a);
ScalarField norm_sq(const TensorField& t);  // |T|^2 = sum_ij T_ij^2
/// (T^T a)_j = sum_i a_i T(i,j); for T = grad v this is (a . grad) v.
VectorField contract_first(const VectorField& a, const TensorField& t);
/// (T b)_i = sum_j T(i,j) b_j.
VectorField contract_second(const TensorField& t, const VectorField& b);
VectorField scale(const VectorField& a, const ScalarField& s);
/// (A (.) B)_ij = sum_k A(i,k) B(j,k); for A = B = grad v this is the Ericksen stress.
TensorField row_gram(const TensorField& a, const TensorField& b);

/// h^3-weighted sum over all nodes.
double integrate(const ScalarField& f);
/// h^3-weighted sum of w * f.
double integrate(const ScalarField& f, const ScalarField& w);

}  // namespace elk
