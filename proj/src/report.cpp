#include "elk/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace elk::report {

void Digest::add(std::span<const std::byte> bytes) {
    for (std::byte b : bytes) {
        h_ ^= static_cast<std::uint64_t>(b);
        h_ *= 0x100000001b3ull;
    }
}

void Digest::add(std::string_view s) { add(std::as_bytes(std::span(s.data(), s.size()))); }

void Digest::add(const ScalarField& f) {
    const std::uint32_t n = static_cast<std::uint32_t>(f.grid().n());
    const double L = f.grid().box_half();
    add(std::as_bytes(std::span(&n, 1)));
    add(std::as_bytes(std::span(&L, 1)));
    add(std::as_bytes(std::span(f.values().data(), f.values().size())));
}

void Digest::add(const VectorField& f) {
    for (int c = 0; c < 3; ++c) add(f[c]);
}

void Digest::add_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot read " + p.string());
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        add(std::as_bytes(std::span(buf.data(), static_cast<std::size_t>(in.gcount()))));
    }
}

std::string Digest::hex() const {
    char s[32];
    std::snprintf(s, sizeof s, "fnv1a64:%016llx", static_cast<unsigned long long>(h_));
    return s;
}

Json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

namespace {

Json nums(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

}  // namespace

Json to_json(const verify::Tolerances& t) {
    Json j;
    for (const auto& n : verify::Tolerances::names()) j[n] = num(t.get(n));
    return j;
}

Json to_json(const morrey::NormResult& r) {
    Json table = Json::array();
    for (const auto& row : r.table)
        table.push_back({{"R", num(row.R)},
                         {"integral", num(row.integral)},
                         {"integral_sharp", num(row.integral_sharp)},
                         {"value", num(row.value)},
                         {"value_sharp", num(row.value_sharp)}});
    return {{"value", num(r.value)},
            {"value_sharp", num(r.value_sharp)},
            {"argmax_R", num(r.argmax_R)},
            {"edge_suspect", r.edge_suspect},
            {"boundary_contaminated", r.boundary_contaminated},
            {"tail_ratio", num(r.tail_ratio)},
            {"table", table}};
}

Json to_json(const morrey::AnnulusProfile& p) {
    Json flags = Json::array();
    for (auto f : p.flags) flags.push_back(f == morrey::Flag::ok ? "ok" : "under_resolved");
    return {{"gamma", num(p.gamma)},
            {"p", num(p.p)},
            {"eta", num(p.eta)},
            {"radii", nums(p.radii)},
            {"values", nums(p.values)},
            {"values_sharp", nums(p.values_sharp)},
            {"scaled_values", nums(p.scaled_values)},
            {"flags", flags},
            {"boundary_contaminated", p.boundary_contaminated},
            {"decaying", p.decaying()},
            {"scaled_decaying", p.scaled_decaying()},
            {"increasing", p.increasing()}};
}

Json to_json(const morrey::HomogeneousResult& r) {
    return {{"value", num(r.value)},
            {"best_center", {num(r.best_center[0]), num(r.best_center[1]), num(r.best_center[2])}},
            {"best_R", num(r.best_R)},
            {"centers", r.centers},
            {"boundary_contaminated", r.boundary_contaminated}};
}

Json to_json(const morrey::WeightedResult& r) {
    return {{"value", num(r.value)},
            {"boundary_contaminated", r.boundary_contaminated},
            {"tail_ratio", num(r.tail_ratio)}};
}

Json to_json(const morrey::ShellEnergy& s) {
    return {{"radii", nums(s.radii)}, {"values", nums(s.values)}, {"sup", num(s.sup)}, {"edge_suspect", s.edge_suspect}};
}

Json to_json(const spectral::BesovResult& r) {
    Json ladder = Json::array();
    for (const auto& row : r.ladder) ladder.push_back({{"t", num(row.t)}, {"value", num(row.value)}});
    return {{"value", num(r.value)},
            {"ladder_value", num(r.ladder_value)},
            {"argmax_t", num(r.argmax_t)},
            {"t_min", num(r.t_min)},
            {"t_max", num(r.t_max)},
            {"wraparound", r.wraparound},
            {"boundary_contaminated", r.boundary_contaminated},
            {"ladder", ladder}};
}

Json to_json(const ericksen::CounterexampleReport& r) {
    return {{"n", r.n},
            {"box_half", num(r.box_half)},
            {"window", num(r.window)},
            {"band", num(r.band)},
            {"closed_form", {{"momentum", num(r.closed_momentum)},
                             {"director", num(r.closed_director)},
                             {"divergence", num(r.closed_div)},
                             {"grad_u_sq_min", num(r.closed_grad_u_sq_min)},
                             {"grad_u_sq_max", num(r.closed_grad_u_sq_max)}}},
            {"sampled_fd4", {{"constant_branch", num(r.constant_branch)},
                             {"cylinder_branch", num(r.cylinder_branch)},
                             {"divergence", num(r.div_fd4)},
                             {"max", num(r.sampled())}}},
            {"cylinder_unit_defect", num(r.cylinder_unit_defect)},
            {"window_nodes", r.window_nodes},
            {"band_nodes", r.band_nodes}};
}

Json to_json(const ericksen::Trajectory& tr) {
    Json j{{"status", tr.status == ericksen::RunStatus::completed ? "completed" : "unstable"},
           {"message", tr.message},
           {"dt", num(tr.dt)},
           {"steps", tr.steps},
           {"t_final", num(tr.final_state.t)},
           {"ns_path", tr.ns_path},
           {"snapshots", tr.snapshots.size()},
           {"warnings", tr.warnings}};
    if (!tr.ledger.rows.empty()) {
        const auto& last = tr.ledger.rows.back();
        double max_defect = -INFINITY, max_u = 0.0, max_gv = 0.0, max_bal = 0.0;
        for (const auto& r : tr.ledger.rows) {
            max_defect = std::max(max_defect, r.defect);
            max_u = std::max(max_u, r.max_u);
            max_gv = std::max(max_gv, r.max_grad_v);
            max_bal = std::max(max_bal, std::abs(r.balance));
        }
        j["ledger"] = {{"e0", num(tr.ledger.e0())},
                       {"final_energy", num(last.ku2 + last.kdv2)},
                       {"max_defect", num(max_defect)},
                       {"max_abs_balance", num(max_bal)},
                       {"max_u_inf", num(max_u)},
                       {"max_grad_v_inf", num(max_gv)}};
    }
    return j;
}

Json to_json(const verify::CaccioppoliReport& r) {
    return {{"R", num(r.R)},
            {"gamma", num(r.gamma)},
            {"p", num(r.p)},
            {"residual", num(r.residual)},
            {"lhs", num(r.lhs)},
            {"lhs_sharp", num(r.lhs_sharp)},
            {"terms", {{"i1", num(r.i1)}, {"i2", num(r.i2)}, {"i3", num(r.i3)}, {"i4", num(r.i4)}}},
            {"rhs_identity", num(r.rhs_identity)},
            {"closed_form", {{"x_u", num(r.x_u)},
                             {"x_v", num(r.x_v)},
                             {"x_p", num(r.x_p)},
                             {"y", num(r.y)},
                             {"z", num(r.z)},
                             {"c1", num(r.c1)},
                             {"c2", num(r.c2)},
                             {"c3", num(r.c3)},
                             {"c4", num(r.c4)},
                             {"c_implied", num(r.c_implied)},
                             {"rhs", num(r.rhs_closed)}}},
            {"tolerance", num(r.tolerance)},
            {"holds", r.holds}};
}

Json to_json(const verify::IdentityReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"name", row.name},
                        {"lhs", num(row.lhs)},
                        {"rhs", num(row.rhs)},
                        {"scale", num(row.scale)},
                        {"defect", num(row.defect)}});
    return {{"R", num(r.R)},
            {"rows", rows},
            {"max_defect", num(r.max_defect)},
            {"tolerance", num(r.tolerance)},
            {"boundary_contaminated", r.boundary_contaminated},
            {"holds", r.holds}};
}

Json to_json(const verify::EllipticReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"R", num(row.R)}, {"inner", num(row.inner)}, {"outer", num(row.outer)}, {"c", num(row.c)}});
    return {{"residual", num(r.residual)},
            {"rows", rows},
            {"c_max", num(r.c_max)},
            {"c_max_R", num(r.c_max_R)},
            {"diverging", r.diverging},
            {"holds", r.holds}};
}

Json to_json(const verify::GlobalEnergyReport& r) {
    return {{"e0", num(r.e0)},
            {"max_defect", num(r.max_defect)},
            {"max_defect_t", num(r.max_defect_t)},
            {"relative_max_defect", num(r.e0 > 0 ? r.max_defect / r.e0 : r.max_defect)},
            {"max_abs_balance", num(r.max_abs_balance)},
            {"tolerance", num(r.tolerance)},
            {"samples", r.t.size()},
            {"holds", r.holds}};
}

Json to_json(const verify::LocalEnergyReport& r) {
    Json rows = Json::array();
    for (const auto& w : r.rows)
        rows.push_back({{"R", num(w.R)},
                        {"t0", num(w.t0)},
                        {"t1", num(w.t1)},
                        {"eps", num(w.eps)},
                        {"lhs", num(w.lhs)},
                        {"rhs", num(w.rhs)},
                        {"mu_hat", num(w.mu_hat)},
                        {"scale", num(w.scale)},
                        {"relative", num(w.relative)},
                        {"hessian_gap", num(w.hessian_gap)},
                        {"relative_without_gap", num(w.relative_without_gap)},
                        {"tension", num(w.tension)},
                        {"tension_sq", num(w.tension_sq)},
                        {"tension_defect", num(w.tension_defect)}});
    return {{"rows", rows},
            {"max_relative", num(r.max_relative)},
            {"min_mu_hat", num(r.min_mu_hat)},
            {"max_tension_defect", num(r.max_tension_defect)},
            {"tolerance", num(r.tolerance)},
            {"holds", r.holds}};
}

Json to_json(const verify::EmbeddingReport& r) {
    Json inc = Json::array();
    for (const auto& row : r.inclusions)
        inc.push_back({{"name", row.name},
                       {"fitted", num(row.fitted)},
                       {"argmax", row.argmax},
                       {"bound", num(row.bound)},
                       {"members", row.members},
                       {"holds", row.holds}});
    Json dec = Json::array();
    for (const auto& d : r.decay)
        dec.push_back({{"member", d.member},
                       {"radii", nums(d.radii)},
                       {"values", nums(d.values)},
                       {"in_l92", d.in_l92},
                       {"certified", d.certified},
                       {"non_decreasing", d.non_decreasing},
                       {"exact_zero_tail", d.exact_zero_tail}});
    return {{"inclusions", inc}, {"decay", dec}, {"notices", r.notices}, {"holds", r.holds}};
}

Json to_json(const verify::SobolevReport& r) {
    return {{"l4", num(r.l4)}, {"h1", num(r.h1)}, {"besov", num(r.besov)}, {"ratio", num(r.ratio)},
            {"degenerate", r.degenerate}};
}

Json to_json(const verify::LiouvilleVerdict& r) {
    const auto& h = r.hypotheses;
    return {{"residual", num(r.residual)},
            {"hypotheses", {{"gamma", num(h.gamma)},
                            {"p", num(h.p)},
                            {"eta", num(h.eta)},
                            {"eta_nonpositive", h.eta_nonpositive},
                            {"u_profile", to_json(h.u_profile)},
                            {"u_decaying", h.u_decaying},
                            {"u_scaled_decaying", h.u_scaled_decaying},
                            {"grad_v_norm", num(h.grad_v_norm)},
                            {"grad_v_finite", h.grad_v_finite},
                            {"grad_v_shells", to_json(h.grad_v_shells)},
                            {"grad_v_shells_finite", h.grad_v_shells_finite}}},
            {"conclusion", {{"u_inf", num(r.conclusion.u_inf)},
                            {"grad_v_inf", num(r.conclusion.grad_v_inf)},
                            {"grad_p_inf", num(r.conclusion.grad_p_inf)}}},
            {"tolerance", num(r.tolerance)},
            {"verdict", verify::to_string(r.verdict)},
            {"holds", r.holds()}};
}

void write_probes_csv(std::ostream& os, const std::vector<ericksen::ProbeSeries>& probes) {
    os << "R,t,energy,grad_u,lap_v,diffusion,flux,transport,tension,tension_sq,hessian_gap\n" << std::setprecision(17);
    for (const auto& ps : probes)
        for (const auto& s : ps.samples)
            os << ps.R << ',' << s.t << ',' << s.energy << ',' << s.grad_u << ',' << s.lap_v << ',' << s.diffusion
               << ',' << s.flux << ',' << s.transport << ',' << s.tension << ',' << s.tension_sq << ','
               << s.hessian_gap << '\n';
}

std::vector<ericksen::ProbeSeries> read_probes_csv(std::istream& is) {
    std::vector<ericksen::ProbeSeries> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] != '#') break;
    }
    if (line.rfind("R,t,energy,grad_u,lap_v,diffusion,flux,transport,tension,tension_sq,hessian_gap", 0) != 0)
        throw FormatError("probes: missing or unexpected header");
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double c[11];
        for (double& x : c) {
            std::string cell;
            if (!std::getline(ls, cell, ',')) throw FormatError("probes: short row at line " + std::to_string(lineno));
            try {
                x = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError("probes: bad number at line " + std::to_string(lineno));
            }
        }
        if (out.empty() || out.back().R != c[0]) out.push_back({c[0], {}});
        out.back().samples.push_back({c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8], c[9], c[10]});
    }
    return out;
}

}  // namespace elk::report
