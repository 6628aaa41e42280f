#include "elk/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace elk {

namespace {

static_assert(sizeof(double) == 8);

template <class T>
T to_le(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::array<unsigned char, sizeof(T)> b;
        std::memcpy(b.data(), &v, sizeof(T));
        std::reverse(b.begin(), b.end());
        std::memcpy(&v, b.data(), sizeof(T));
    }
    return v;
}

template <class T>
void put(unsigned char* dst, T v) {
    v = to_le(v);
    std::memcpy(dst, &v, sizeof(T));
}

template <class T>
T get(const unsigned char* src) {
    T v;
    std::memcpy(&v, src, sizeof(T));
    return to_le(v);
}

}  // namespace

ScalarField FieldFile::scalar() const {
    if (components.size() != 1) throw FormatError("expected a scalar field, file has " + std::to_string(components.size()) + " components");
    return components[0];
}

VectorField FieldFile::vector() const {
    if (components.size() != 3) throw FormatError("expected a vector field, file has " + std::to_string(components.size()) + " components");
    return VectorField(components[0], components[1], components[2]);
}

TensorField FieldFile::tensor() const {
    if (components.size() != 9) throw FormatError("expected a tensor field, file has " + std::to_string(components.size()) + " components");
    TensorField t(grid);
    for (int k = 0; k < 9; ++k) t.flat(k) = components[k];
    return t;
}

void write_components(const std::filesystem::path& path, const std::vector<const ScalarField*>& comps) {
    if (comps.empty()) throw FormatError("no components to write");
    const Grid3& g = comps.front()->grid();
    for (const auto* c : comps) require_same_grid(g, c->grid(), "write_field");

    std::array<unsigned char, kElf3HeaderBytes> header{};
    std::memcpy(header.data(), "ELF3", 4);
    put<std::uint32_t>(header.data() + 4, 1);
    put<std::uint32_t>(header.data() + 8, static_cast<std::uint32_t>(g.n()));
    put<std::uint32_t>(header.data() + 12, static_cast<std::uint32_t>(comps.size()));
    put<double>(header.data() + 16, g.box_half());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(header.data()), header.size());
    std::vector<unsigned char> buf(g.size() * 8);
    for (const auto* c : comps) {
        for (std::size_t i = 0; i < g.size(); ++i) put<double>(buf.data() + 8 * i, (*c)[i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw FormatError("write failed for " + path.string());
}

void write_field(const std::filesystem::path& path, const ScalarField& f) { write_components(path, {&f}); }

void write_field(const std::filesystem::path& path, const VectorField& f) {
    write_components(path, {&f[0], &f[1], &f[2]});
}

void write_field(const std::filesystem::path& path, const TensorField& f) {
    std::vector<const ScalarField*> c;
    for (int k = 0; k < 9; ++k) c.push_back(&f.flat(k));
    write_components(path, c);
}

FieldFile read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::array<unsigned char, kElf3HeaderBytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != static_cast<std::streamsize>(header.size())) throw FormatError("truncated header in " + path.string());
    if (std::memcmp(header.data(), "ELF3", 4) != 0) throw FormatError("bad magic in " + path.string());
    const auto version = get<std::uint32_t>(header.data() + 4);
    if (version != 1) throw FormatError("unsupported ELF3 version " + std::to_string(version));
    const auto n = get<std::uint32_t>(header.data() + 8);
    const auto ncomp = get<std::uint32_t>(header.data() + 12);
    const double L = get<double>(header.data() + 16);
    if (ncomp != 1 && ncomp != 3 && ncomp != 9) throw FormatError("bad component count " + std::to_string(ncomp));
    if (n < 16 || n > 4096 || !(L > 0.0) || !std::isfinite(L)) throw FormatError("bad grid in header of " + path.string());

    Grid3 grid(static_cast<int>(n), L);
    FieldFile file{grid, {}};
    std::vector<unsigned char> buf(grid.size() * 8);
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw FormatError("truncated payload in " + path.string());
        ScalarField f(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) f[i] = get<double>(buf.data() + 8 * i);
        file.components.push_back(std::move(f));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload in " + path.string());
    return file;
}

}  // namespace elk
