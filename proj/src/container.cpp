#include "mifi/container.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <vector>

namespace mifi {

namespace {

constexpr unsigned char kMagic[4] = {0x4D, 0x49, 0x46, 0x49}; // "MIFI"
constexpr unsigned char kVersion = 1;
constexpr std::size_t kMaxRank = 8;
// Payload cap keeps dim products sane on 64-bit hosts.
constexpr std::uint64_t kMaxElements = 1ull << 32;

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

} // namespace

std::size_t container_header_size(std::size_t ndim) {
    std::size_t raw = 8 + 4 * ndim;
    return (raw + 15) / 16 * 16;
}

void save_features(const Tensor& tensor, const std::filesystem::path& path) {
    if (tensor.rank() < 1 || tensor.rank() > kMaxRank) {
        throw InvalidInputError("save_features: rank must be 1.." + std::to_string(kMaxRank));
    }
    for (std::size_t d : tensor.dims) {
        if (d < 1 || d > std::numeric_limits<std::uint32_t>::max()) {
            throw InvalidInputError("save_features: dimension out of u32 range");
        }
    }
    std::vector<unsigned char> bytes;
    bytes.reserve(container_header_size(tensor.rank()) + 4 * tensor.size());
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    bytes.push_back(kVersion);
    bytes.push_back(static_cast<unsigned char>(tensor.rank()));
    bytes.push_back(0);
    bytes.push_back(0);
    for (std::size_t d : tensor.dims) write_u32le(bytes, static_cast<std::uint32_t>(d));
    bytes.resize(container_header_size(tensor.rank()), 0); // pad header
    for (float f : tensor.data) write_u32le(bytes, std::bit_cast<std::uint32_t>(f));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_features: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("save_features: write failed for " + path.string());
}

Tensor load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_features: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 8) throw FormatError("truncated header", bytes.size());
    for (std::size_t i = 0; i < 4; ++i) {
        if (bytes[i] != kMagic[i]) throw FormatError("bad magic", i);
    }
    if (bytes[4] != kVersion) {
        throw FormatError("unsupported version " + std::to_string(int(bytes[4])), 4);
    }
    std::size_t ndim = bytes[5];
    if (ndim < 1 || ndim > kMaxRank) {
        throw FormatError("bad ndim " + std::to_string(ndim), 5);
    }
    if (bytes[6] != 0) throw FormatError("reserved byte not zero", 6);
    if (bytes[7] != 0) throw FormatError("reserved byte not zero", 7);

    if (bytes.size() < 8 + 4 * ndim) throw FormatError("truncated dims", bytes.size());
    std::vector<std::size_t> dims(ndim);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        std::size_t off = 8 + 4 * i;
        std::uint32_t d = read_u32le(bytes.data() + off);
        if (d == 0) throw FormatError("zero dimension", off);
        if (count > kMaxElements / d) throw FormatError("dim overflow", off);
        count *= d;
        dims[i] = d;
    }

    std::size_t header = container_header_size(ndim);
    for (std::size_t i = 8 + 4 * ndim; i < header; ++i) {
        if (i >= bytes.size()) throw FormatError("truncated header padding", bytes.size());
        if (bytes[i] != 0) throw FormatError("header padding not zero", i);
    }

    std::size_t expected = header + 4 * static_cast<std::size_t>(count);
    if (bytes.size() < expected) throw FormatError("truncated payload", bytes.size());
    if (bytes.size() > expected) throw FormatError("trailing bytes", expected);

    Tensor t;
    t.dims = std::move(dims);
    t.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t u = read_u32le(bytes.data() + header + 4 * i);
        float f = std::bit_cast<float>(u);
        if (!std::isfinite(f)) throw FormatError("non-finite value", header + 4 * i);
        t.data[i] = f;
    }
    return t;
}

} // namespace mifi
