#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

#include "elk/ericksen.hpp"
#include "elk/morrey.hpp"
#include "elk/spectral.hpp"
#include "elk/verify.hpp"

namespace elk::report {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a over everything fed to it, in order.
class Digest {
public:
    void add(std::span<const std::byte> bytes);
    void add(std::string_view s);
    void add(const ScalarField& f);  ///< n, box_half and the raw values
    void add(const VectorField& f);
    void add_file(const std::filesystem::path& p);  ///< throws FormatError if unreadable
    std::uint64_t value() const { return h_; }
    std::string hex() const;  ///< "fnv1a64:<16 hex digits>"

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

/// Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan"
/// (JSON has no literal for them).
Json num(double x);

Json to_json(const verify::Tolerances& t);
Json to_json(const morrey::NormResult& r);
Json to_json(const morrey::AnnulusProfile& p);
Json to_json(const morrey::HomogeneousResult& r);
Json to_json(const morrey::WeightedResult& r);
Json to_json(const morrey::ShellEnergy& s);
Json to_json(const spectral::BesovResult& r);
Json to_json(const ericksen::CounterexampleReport& r);
Json to_json(const ericksen::Trajectory& tr);  ///< summary, not the fields
Json to_json(const verify::CaccioppoliReport& r);
Json to_json(const verify::IdentityReport& r);
Json to_json(const verify::EllipticReport& r);
Json to_json(const verify::GlobalEnergyReport& r);
Json to_json(const verify::LocalEnergyReport& r);
Json to_json(const verify::EmbeddingReport& r);
Json to_json(const verify::SobolevReport& r);
Json to_json(const verify::LiouvilleVerdict& r);

/// Probe series as CSV: R,t,energy,grad_u,lap_v,diffusion,flux,transport,tension,tension_sq,hessian_gap.
void write_probes_csv(std::ostream& os, const std::vector<ericksen::ProbeSeries>& probes);
/// Inverse of write_probes_csv; lines starting with '#' are skipped. Throws FormatError.
std::vector<ericksen::ProbeSeries> read_probes_csv(std::istream& is);

}  // namespace elk::report
