#include "elk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace elk {

namespace {

// Offsets about a node sorted by squared minimum-image distance (index units).
struct OffsetTable {
    std::vector<std::array<int, 3>> offset;
    std::vector<double> unit_dist;
};

std::shared_ptr<const OffsetTable> offsets_for(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const OffsetTable>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    const int lo = -n / 2, hi = n - n / 2;  // offsets in [lo, hi)
    std::vector<std::pair<long, std::array<int, 3>>> items;
    items.reserve(static_cast<std::size_t>(n) * n * n);
    for (int a = lo; a < hi; ++a)
        for (int b = lo; b < hi; ++b)
            for (int c = lo; c < hi; ++c) items.push_back({long(a) * a + long(b) * b + long(c) * c, {a, b, c}});
    std::stable_sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    auto t = std::make_shared<OffsetTable>();
    t->offset.reserve(items.size());
    t->unit_dist.reserve(items.size());
    for (const auto& [d2, o] : items) {
        t->offset.push_back(o);
        t->unit_dist.push_back(std::sqrt(static_cast<double>(d2)));
    }
    cache.emplace(n, t);
    return t;
}

}  // namespace

BallIntegrator::BallIntegrator(const ScalarField& g) {
    const int c = g.grid().n() / 2;
    build(g, {c, c, c});
}

BallIntegrator::BallIntegrator(const ScalarField& g, std::array<int, 3> center) { build(g, center); }

void BallIntegrator::build(const ScalarField& g, std::array<int, 3> center) {
    const Grid3& grid = g.grid();
    h_ = grid.spacing();
    cell_ = grid.cell_volume();
    const auto table = offsets_for(grid.n());
    const std::size_t N = table->offset.size();

    unit_dist_ = std::shared_ptr<const std::vector<double>>(table, &table->unit_dist);

    p0_.assign(N + 1, 0.0);
    p1_.assign(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const auto& o = table->offset[i];
        const double v = g[grid.index(grid.wrap(center[0] + o[0]), grid.wrap(center[1] + o[1]),
                                      grid.wrap(center[2] + o[2]))];
        p0_[i + 1] = p0_[i] + v;
        p1_[i + 1] = p1_[i] + v * table->unit_dist[i] * h_;
    }
}

std::size_t BallIntegrator::count_below(double r) const {
    return static_cast<std::size_t>(std::lower_bound(unit_dist_->begin(), unit_dist_->end(), r / h_) - unit_dist_->begin());
}

std::size_t BallIntegrator::count_at_or_below(double r) const {
    return static_cast<std::size_t>(std::upper_bound(unit_dist_->begin(), unit_dist_->end(), r / h_) - unit_dist_->begin());
}

double BallIntegrator::smoothed_ball(double R) const {
    const std::size_t lo = count_below(R - 0.5 * h_);
    const std::size_t hi = count_below(R + 0.5 * h_);
    const double band = (R / h_ + 0.5) * (p0_[hi] - p0_[lo]) - (p1_[hi] - p1_[lo]) / h_;
    return (p0_[lo] + band) * cell_;
}

MaskedIntegral BallIntegrator::ball(double R) const {
    return {smoothed_ball(R), p0_[count_below(R)] * cell_};
}

MaskedIntegral BallIntegrator::shell(double R) const {
    const double sharp = (p0_[count_below(R)] - p0_[count_at_or_below(0.5 * R)]) * cell_;
    return {smoothed_ball(R) - smoothed_ball(0.5 * R), sharp};
}

ScalarField abs_pow(const ScalarField& f, double p) {
    ScalarField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::pow(std::abs(f[i]), p);
    return out;
}

ScalarField abs_pow(const VectorField& f, double p) {
    ScalarField out = norm_sq(f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(out[i], 0.5 * p);
    return out;
}

ScalarField abs_pow(const TensorField& f, double p) {
    ScalarField out = norm_sq(f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(out[i], 0.5 * p);
    return out;
}

namespace {
AnnulusResult annulus_from(const ScalarField& g, double R) {
    if (!(R > 0.0)) throw DomainError("annulus radius must be positive");
    const BallIntegrator bi(g);
    const MaskedIntegral s = bi.shell(R);
    return {s.smoothed, s.sharp, 0.5 * R < 4.0 * g.grid().spacing()};
}
}  // namespace

AnnulusResult annulus_integral(const ScalarField& f, double R, double p) { return annulus_from(abs_pow(f, p), R); }
AnnulusResult annulus_integral(const VectorField& f, double R, double p) { return annulus_from(abs_pow(f, p), R); }

double tail_ratio(const ScalarField& magnitude, double fraction) {
    const Grid3& g = magnitude.grid();
    const double cut = fraction * g.box_half();
    double tail = 0.0, peak = 0.0;
    g.for_each([&](std::size_t idx, double x, double y, double z) {
        const double v = std::abs(magnitude[idx]);
        peak = std::max(peak, v);
        if (x * x + y * y + z * z > cut * cut) tail = std::max(tail, v);
    });
    return peak > 0.0 ? tail / peak : 0.0;
}

bool decay_margin_ok(const ScalarField& magnitude, double threshold, double fraction) {
    return tail_ratio(magnitude, fraction) <= threshold;
}

}  // namespace elk
