#pragma once

#include <filesystem>
#include <vector>

#include "elk/grid.hpp"

namespace elk {

/// ELF3 layout: 64-byte header ("ELF3", u32 version=1, u32 n, u32 ncomp,
/// f64 box_half, zero padding) followed by ncomp*n^3 little-endian f64 in
/// (component, i, j, k) order, k fastest.
inline constexpr std::size_t kElf3HeaderBytes = 64;

struct FieldFile {
    Grid3 grid;
    std::vector<ScalarField> components;  // 1, 3 or 9 entries

    ScalarField scalar() const;
    VectorField vector() const;
    TensorField tensor() const;
};

void write_field(const std::filesystem::path& path, const ScalarField& f);
void write_field(const std::filesystem::path& path, const VectorField& f);
void write_field(const std::filesystem::path& path, const TensorField& f);
void write_components(const std::filesystem::path& path, const std::vector<const ScalarField*>& comps);

/// Throws FormatError on bad magic, version, component count, grid or size.
FieldFile read_field(const std::filesystem::path& path);

}  // namespace elk
