#pragma once

#include <array>
#include <memory>
#include <vector>

#include "elk/grid.hpp"

namespace elk {

/// A ball or shell integral with both mask conventions.
struct MaskedIntegral {
    double smoothed = 0.0;  ///< indicator ramped linearly over one cell width
    double sharp = 0.0;     ///< plain node indicator
};

/// Fast ball integrals of one integrand about one grid node, for any radius.
///
/// Node offsets are sorted once per n by (minimum-image) distance; the
/// integrand is gathered in that order and prefix-summed, so each query is a
/// pair of binary searches. The smoothed ball mask is
/// w(r) = clamp((R - r)/h + 1/2, 0, 1).
class BallIntegrator {
public:
    /// center: node indices of the ball center; defaults to the origin node.
    explicit BallIntegrator(const ScalarField& g);
    BallIntegrator(const ScalarField& g, std::array<int, 3> center);

    /// Integral over B(center, R) (sharp: r < R).
    MaskedIntegral ball(double R) const;
    /// Integral over the shell C(R/2, R) = B(R) minus B(R/2) (sharp: R/2 < r < R).
    MaskedIntegral shell(double R) const;

    double spacing() const { return h_; }

private:
    void build(const ScalarField& g, std::array<int, 3> center);
    double smoothed_ball(double R) const;
    std::size_t count_below(double r) const;        // nodes with dist < r
    std::size_t count_at_or_below(double r) const;  // nodes with dist <= r

    double h_ = 0.0;
    double cell_ = 0.0;
    std::shared_ptr<const std::vector<double>> unit_dist_;  // sorted, in units of h
    std::vector<double> p0_, p1_;                      // prefix sums of g and r*g
};

/// Integral of |f|^p over the shell C(R/2, R) about the origin.
struct AnnulusResult {
    double smoothed = 0.0;
    double sharp = 0.0;
    bool under_resolved = false;  // R/2 < 4h
};

AnnulusResult annulus_integral(const ScalarField& f, double R, double p);
AnnulusResult annulus_integral(const VectorField& f, double R, double p);

/// |f|^p (pointwise Euclidean length for vectors).
ScalarField abs_pow(const ScalarField& f, double p);
ScalarField abs_pow(const VectorField& f, double p);
ScalarField abs_pow(const TensorField& f, double p);

/// Max over |x| > 0.9 L of |f| relative to max |f|; the field passes the
/// decay margin when this is below 1e-8.
double tail_ratio(const ScalarField& magnitude, double fraction = 0.9);
bool decay_margin_ok(const ScalarField& magnitude, double threshold = 1e-8, double fraction = 0.9);

}  // namespace elk
