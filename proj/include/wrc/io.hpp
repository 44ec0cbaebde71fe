#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "wrc/errors.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// WRCT binary format:
//   magic "WRCT", version 0x01, role byte (0x00 tensor, 0x01 weight-field,
//   0x02 kernel), three u32 LE dims (C,H,W), for kernels two extra u32 origin
//   values (oy,ox), then C*H*W little-endian IEEE-754 doubles.

namespace wrct {

constexpr char kMagic[4] = {'W', 'R', 'C', 'T'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint8_t kRoleTensor = 0x00;
constexpr std::uint8_t kRoleWeightField = 0x01;
constexpr std::uint8_t kRoleKernel = 0x02;

static_assert(std::endian::native == std::endian::little,
              "WRCT I/O assumes a little-endian host");

inline void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    if (!is) throw IoError("WRCT: truncated header");
    return v;
}

inline void write_header(std::ostream& os, std::uint8_t role,
                         std::uint32_t c, std::uint32_t h, std::uint32_t w) {
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    os.put(static_cast<char>(role));
    write_u32(os, c);
    write_u32(os, h);
    write_u32(os, w);
}

struct Header {
    std::uint8_t role;
    std::uint32_t c, h, w;
};

inline Header read_header(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("WRCT: bad magic bytes");
    }
    int version = is.get();
    if (version != kVersion) throw FormatError("WRCT: unsupported version");
    int role = is.get();
    if (role != kRoleTensor && role != kRoleWeightField && role != kRoleKernel) {
        throw FormatError("WRCT: unknown role byte");
    }
    Header hd;
    hd.role = static_cast<std::uint8_t>(role);
    hd.c = read_u32(is);
    hd.h = read_u32(is);
    hd.w = read_u32(is);
    return hd;
}

inline void write_payload(std::ostream& os, const std::vector<double>& data) {
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
}

inline std::vector<double> read_payload(std::istream& is, std::size_t n) {
    std::vector<double> data(n);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw IoError("WRCT: truncated payload");
    return data;
}

}  // namespace wrct

inline void write_tensor(const FeatureMap& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    wrct::write_header(os, wrct::kRoleTensor,
                       static_cast<std::uint32_t>(t.channels()),
                       static_cast<std::uint32_t>(t.height()),
                       static_cast<std::uint32_t>(t.width()));
    wrct::write_payload(os, t.data());
    if (!os) throw IoError("write failed: " + path);
}

inline FeatureMap read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    auto hd = wrct::read_header(is);
    if (hd.role != wrct::kRoleTensor) throw FormatError("WRCT: expected tensor role");
    auto data = wrct::read_payload(is, std::size_t(hd.c) * hd.h * hd.w);
    return FeatureMap(hd.c, hd.h, hd.w, std::move(data));
}

inline void write_weight_field(const WeightField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    wrct::write_header(os, wrct::kRoleWeightField,
                       static_cast<std::uint32_t>(f.channels()),
                       static_cast<std::uint32_t>(f.height()),
                       static_cast<std::uint32_t>(f.width()));
    wrct::write_payload(os, f.data());
    if (!os) throw IoError("write failed: " + path);
}

inline WeightField read_weight_field(const std::string& path, WeightRole role) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    auto hd = wrct::read_header(is);
    if (hd.role != wrct::kRoleWeightField) {
        throw FormatError("WRCT: expected weight-field role");
    }
    auto data = wrct::read_payload(is, std::size_t(hd.c) * hd.h * hd.w);
    return WeightField(hd.c, hd.h, hd.w, std::move(data), role);
}

inline void write_kernel(const Kernel& k, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    wrct::write_header(os, wrct::kRoleKernel,
                       static_cast<std::uint32_t>(k.channels()),
                       static_cast<std::uint32_t>(k.kh()),
                       static_cast<std::uint32_t>(k.kw()));
    wrct::write_u32(os, static_cast<std::uint32_t>(k.origin_y()));
    wrct::write_u32(os, static_cast<std::uint32_t>(k.origin_x()));
    wrct::write_payload(os, k.taps());
    if (!os) throw IoError("write failed: " + path);
}

inline Kernel read_kernel(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    auto hd = wrct::read_header(is);
    if (hd.role != wrct::kRoleKernel) throw FormatError("WRCT: expected kernel role");
    std::uint32_t oy = wrct::read_u32(is);
    std::uint32_t ox = wrct::read_u32(is);
    auto taps = wrct::read_payload(is, std::size_t(hd.c) * hd.h * hd.w);
    return Kernel(hd.c, hd.h, hd.w, std::move(taps), oy, ox);
}

}  // namespace wrc
