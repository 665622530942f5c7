#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <string>
#include <vector>

#include "nv/error.hpp"

namespace nv {

// FNV-1a 64-bit, used as the integrity checksum for binary containers.
class Fnv64 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv64_file(const std::string& path);

// Validates a container file's checksum trailer (last 8 bytes) against the
// body before any field is interpreted, so corruption anywhere in the file
// surfaces as ChecksumMismatch rather than a downstream parse error.
void verify_file_checksum(const std::string& path);

// Binary writer/reader for the little-endian container formats. Every write
// feeds the running checksum so a trailer can seal the whole file.
class BinWriter {
public:
    explicit BinWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t len);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void f64_array(const double* data, std::size_t count);
    void text_block(const std::string& text);  // u64 length + raw bytes
    void checksum_trailer();                   // u64 checksum of everything so far

private:
    std::ostream& out_;
    Fnv64 sum_;
};

class BinReader {
public:
    explicit BinReader(std::istream& in) : in_(in) {}

    void bytes(void* data, std::size_t len);
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    void f64_array(double* data, std::size_t count);
    std::string text_block(std::size_t max_len = 1 << 20);
    void verify_checksum_trailer();

private:
    std::istream& in_;
    Fnv64 sum_;
};

// Bit-exact double <-> text (hexfloat) for canonical metadata blocks.
std::string f64_to_text(double v);
double f64_from_text(const std::string& s);

static_assert(std::endian::native == std::endian::little,
              "container formats assume a little-endian host");

}  // namespace nv
