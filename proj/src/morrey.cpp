#include "elk/morrey.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "elk/quadrature.hpp"

namespace elk::morrey {

namespace {
constexpr double kDecayMargin = 1e-8;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace

double eta(double gamma, double p) { return (3.0 * gamma + 2.0 * p - 9.0) / (3.0 * p); }

MorreyParams::MorreyParams(double gamma, double p) : gamma_(gamma), p_(p), eta_(morrey::eta(gamma, p)) {
    if (!(gamma > 0.0 && gamma < 3.0)) throw DomainError("gamma must lie in (0,3), got " + fmt(gamma));
    if (!(p >= 3.0) || !std::isfinite(p)) throw DomainError("p must lie in [3,inf), got " + fmt(p));
}

std::vector<double> geometric_ladder(double rmax, double base, double rmin) {
    if (!(base > 1.0)) throw ConfigError("ladder base must exceed 1");
    if (!(rmin > 0.0) || rmax < rmin) throw ConfigError("empty radius ladder");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double R = rmin * std::pow(base, k);
        if (R > rmax * (1.0 + 1e-12)) break;
        out.push_back(R);
    }
    return out;
}

std::vector<double> parse_ladder(const std::string& spec, double rmax) {
    if (spec.rfind("geometric:", 0) == 0) return geometric_ladder(rmax, parse_number(spec.substr(10)));
    if (spec == "geometric") return geometric_ladder(rmax);
    std::vector<double> out;
    for (const auto& part : split(spec, ',')) {
        if (part.empty()) continue;
        out.push_back(parse_number(part));
    }
    if (out.empty()) throw ConfigError("empty radius list");
    return out;
}

ScalarField power_density(const ScalarField& f, double p) { return abs_pow(f, p); }
ScalarField power_density(const VectorField& f, double p) { return abs_pow(f, p); }
ScalarField power_density(const TensorField& f, double p) { return abs_pow(f, p); }
ScalarField magnitude(const VectorField& f) { return abs_pow(f, 1.0); }
ScalarField magnitude(const TensorField& f) { return abs_pow(f, 1.0); }

void validate_radii(const std::vector<double>& radii, const Grid3& g, double rmin) {
    if (radii.empty()) throw DomainError("empty radius set");
    const double rmax = 0.9 * g.box_half();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double R = radii[i];
        if (!(R >= rmin * (1 - 1e-12)) || R > rmax * (1 + 1e-12))
            throw DomainError("radius " + fmt(R) + " outside [" + fmt(rmin) + ", " + fmt(rmax) + "]");
        if (i > 0 && !(R > radii[i - 1])) throw DomainError("radii must be strictly increasing");
    }
}

NormResult local_morrey_norm_density(const ScalarField& density, const ScalarField& mag, double gamma, double p,
                                     const std::vector<double>& radii) {
    validate_radii(radii, density.grid());
    NormResult out;
    out.tail_ratio = tail_ratio(mag);
    out.boundary_contaminated = out.tail_ratio > kDecayMargin;
    const BallIntegrator bi(density);
    std::size_t best = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double R = radii[i];
        const MaskedIntegral b = bi.ball(R);
        RadiusRow row{R, b.smoothed, b.sharp, std::pow(std::max(0.0, std::pow(R, -gamma) * b.smoothed), 1.0 / p),
                      std::pow(std::max(0.0, std::pow(R, -gamma) * b.sharp), 1.0 / p)};
        out.table.push_back(row);
        if (row.value > out.table[best].value) best = i;
        out.value_sharp = std::max(out.value_sharp, row.value_sharp);
    }
    out.value = out.table[best].value;
    out.argmax_R = out.table[best].R;
    const std::size_t m = out.table.size();
    out.edge_suspect = m >= 2 && best == m - 1 && out.table[m - 1].value > out.table[m - 2].value;
    return out;
}

NormResult local_morrey_norm(const ScalarField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return local_morrey_norm_density(power_density(f, mp.p()), abs_pow(f, 1.0), mp.gamma(), mp.p(), radii);
}
NormResult local_morrey_norm(const VectorField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return local_morrey_norm_density(power_density(f, mp.p()), magnitude(f), mp.gamma(), mp.p(), radii);
}
NormResult local_morrey_norm(const TensorField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return local_morrey_norm_density(power_density(f, mp.p()), magnitude(f), mp.gamma(), mp.p(), radii);
}

namespace {
HomogeneousResult homogeneous_impl(const ScalarField& f, double p, double r, const std::vector<double>& radii,
                                   const std::vector<std::array<int, 3>>& centers) {
    if (!(p > 1.0 && p < r)) throw DomainError("homogeneous Morrey norm needs 1 < p < r");
    if (radii.empty()) throw DomainError("empty radius set");
    for (double R : radii)
        if (!(R > 0.0) || R > 0.9 * f.grid().box_half()) throw DomainError("radius " + fmt(R) + " outside (0, 0.9L]");
    const ScalarField dens = abs_pow(f, p);
    HomogeneousResult out;
    out.boundary_contaminated = tail_ratio(abs_pow(f, 1.0)) > kDecayMargin;
    out.centers = static_cast<int>(centers.size());
    const Grid3& g = f.grid();
    bool first = true;
    for (const auto& c : centers) {
        const BallIntegrator bi(dens, c);
        for (double R : radii) {
            const double v = std::pow(R, 3.0 / r) * std::pow(std::max(0.0, std::pow(R, -3.0) * bi.ball(R).smoothed), 1.0 / p);
            if (first || v > out.value) {
                out.value = v;
                out.best_R = R;
                out.best_center = {g.coord(c[0]), g.coord(c[1]), g.coord(c[2])};
                first = false;
            }
        }
    }
    return out;
}
}  // namespace

HomogeneousResult homogeneous_morrey_norm(const ScalarField& f, double p, double r, const std::vector<double>& radii,
                                          int stride) {
    const int n = f.grid().n();
    if (stride <= 0) stride = std::max(1, n / 8);
    std::vector<std::array<int, 3>> centers;
    for (int i = 0; i < n; i += stride)
        for (int j = 0; j < n; j += stride)
            for (int k = 0; k < n; k += stride) centers.push_back({i, j, k});
    return homogeneous_impl(f, p, r, radii, centers);
}

HomogeneousResult homogeneous_morrey_at_origin(const ScalarField& f, double p, double r,
                                               const std::vector<double>& radii) {
    const int c = f.grid().n() / 2;
    return homogeneous_impl(f, p, r, radii, {{c, c, c}});
}

namespace {
WeightedResult weighted_impl(const ScalarField& dens, const ScalarField& mag, double p, double gamma) {
    if (!(p > 0.0)) throw DomainError("p must be positive");
    if (!(gamma >= 0.0)) throw DomainError("weight exponent must be >= 0");
    WeightedResult out;
    out.tail_ratio = tail_ratio(mag);
    out.boundary_contaminated = out.tail_ratio > kDecayMargin;
    double s = 0.0;
    dens.grid().for_each([&](std::size_t i, double x, double y, double z) {
        s += dens[i] * std::pow(1.0 + std::sqrt(x * x + y * y + z * z), -gamma);
    });
    out.value = std::pow(s * dens.grid().cell_volume(), 1.0 / p);
    return out;
}
}  // namespace

WeightedResult weighted_lebesgue_norm(const ScalarField& f, double p, double gamma) {
    return weighted_impl(abs_pow(f, p), abs_pow(f, 1.0), p, gamma);
}
WeightedResult weighted_lebesgue_norm(const VectorField& f, double p, double gamma) {
    return weighted_impl(abs_pow(f, p), magnitude(f), p, gamma);
}

bool decay_rule(const std::vector<double>& v, double ratio) {
    if (v.empty()) return false;
    const double mx = *std::max_element(v.begin(), v.end());
    if (mx == 0.0 || v.back() == 0.0) return true;
    const std::size_t m = v.size();
    if (m < 3) return false;
    return v[m - 3] > v[m - 2] && v[m - 2] > v[m - 1] && v[m - 1] < ratio * mx;
}

bool AnnulusProfile::decaying() const { return decay_rule(values); }
bool AnnulusProfile::scaled_decaying() const { return decay_rule(scaled_values); }
bool AnnulusProfile::increasing() const {
    if (values.size() < 2) return false;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) return false;
    return true;
}

AnnulusProfile annulus_profile_density(const ScalarField& density, const ScalarField& mag, double gamma, double p,
                                       const std::vector<double>& radii) {
    validate_radii(radii, density.grid());
    AnnulusProfile out;
    out.gamma = gamma;
    out.p = p;
    out.eta = eta(gamma, p);
    out.radii = radii;
    out.boundary_contaminated = tail_ratio(mag) > kDecayMargin;
    const BallIntegrator bi(density);
    const double h = density.grid().spacing();
    for (double R : radii) {
        const MaskedIntegral s = bi.shell(R);
        const double a = std::pow(std::max(0.0, std::pow(R, -gamma) * s.smoothed), 1.0 / p);
        out.values.push_back(a);
        out.values_sharp.push_back(std::pow(std::max(0.0, std::pow(R, -gamma) * s.sharp), 1.0 / p));
        out.scaled_values.push_back(std::pow(R, 3.0 * out.eta) * a);
        out.flags.push_back(0.5 * R < 4.0 * h ? Flag::under_resolved : Flag::ok);
    }
    return out;
}

AnnulusProfile annulus_profile(const ScalarField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return annulus_profile_density(power_density(f, mp.p()), abs_pow(f, 1.0), mp.gamma(), mp.p(), radii);
}
AnnulusProfile annulus_profile(const VectorField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return annulus_profile_density(power_density(f, mp.p()), magnitude(f), mp.gamma(), mp.p(), radii);
}
AnnulusProfile annulus_profile(const TensorField& f, const MorreyParams& mp, const std::vector<double>& radii) {
    return annulus_profile_density(power_density(f, mp.p()), magnitude(f), mp.gamma(), mp.p(), radii);
}

namespace {
ShellEnergy shell_energy_impl(const ScalarField& dens, const std::vector<double>& radii) {
    validate_radii(radii, dens.grid());
    ShellEnergy out;
    out.radii = radii;
    const BallIntegrator bi(dens);
    std::size_t best = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        out.values.push_back(bi.shell(radii[i]).smoothed);
        if (out.values[i] > out.values[best]) best = i;
    }
    out.sup = out.values[best];
    const std::size_t m = out.values.size();
    out.edge_suspect = m >= 2 && best == m - 1 && out.values[m - 1] > out.values[m - 2];
    return out;
}
}  // namespace

ShellEnergy shell_energy_profile(const TensorField& f, const std::vector<double>& radii) {
    return shell_energy_impl(abs_pow(f, 2.0), radii);
}
ShellEnergy shell_energy_profile(const VectorField& f, const std::vector<double>& radii) {
    return shell_energy_impl(abs_pow(f, 2.0), radii);
}

std::string to_string(Region r) {
    switch (r) {
        case Region::eta_nonpositive: return "eta_nonpositive";
        case Region::eta_positive: return "eta_positive";
        case Region::undefined: return "undefined";
    }
    return "undefined";
}

RegionPoint classify(double gamma, double p) {
    RegionPoint pt{gamma, p, eta(gamma, p), Region::undefined};
    if (!(gamma > 0.0 && gamma < 3.0 && p >= 3.0 && std::isfinite(p))) return pt;
    pt.region = pt.eta <= kEtaZeroTolerance ? Region::eta_nonpositive : Region::eta_positive;
    return pt;
}

std::vector<RegionPoint> eta_region_map(const std::vector<double>& gammas, const std::vector<double>& ps) {
    std::vector<RegionPoint> out;
    out.reserve(gammas.size() * ps.size());
    for (double g : gammas)
        for (double p : ps) out.push_back(classify(g, p));
    return out;
}

void write_eta_csv(std::ostream& os, const std::vector<RegionPoint>& pts) {
    os << "gamma,p,eta,region\n" << std::setprecision(17);
    for (const auto& q : pts) os << q.gamma << ',' << q.p << ',' << q.eta << ',' << to_string(q.region) << '\n';
}

void write_profile_csv(std::ostream& os, const AnnulusProfile& prof) {
    os << "R,a,scaled,flag\n" << std::setprecision(17);
    for (std::size_t i = 0; i < prof.radii.size(); ++i)
        os << prof.radii[i] << ',' << prof.values[i] << ',' << prof.scaled_values[i] << ','
           << (prof.flags[i] == Flag::ok ? "ok" : "under_resolved") << '\n';
}

std::vector<double> parse_range(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() == 1) return {parse_number(parts[0])};
    if (parts.size() != 3) throw ConfigError("range must be 'a:b:step', got '" + spec + "'");
    const double a = parse_number(parts[0]), b = parse_number(parts[1]), st = parse_number(parts[2]);
    if (!(st > 0.0)) throw ConfigError("range step must be positive");
    if (b < a) throw ConfigError("empty range '" + spec + "'");
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((b - a) / st + 1e-9));
    for (long i = 0; i <= count; ++i) {
        double v = a + static_cast<double>(i) * st;
        // snap to a short decimal so 0.1:2.9:0.1 yields 1.0 and not 0.9999999999999999
        const double snapped = std::round(v * 1e9) / 1e9;
        out.push_back(snapped);
    }
    return out;
}

}  // namespace elk::morrey
