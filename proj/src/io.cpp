#include "nv/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

namespace nv {

std::uint64_t fnv64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::MissingInput, "cannot open " + path);
    Fnv64 sum;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        sum.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return sum.value();
}

void verify_file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), Errc::MissingInput, "cannot open " + path);
    auto size = static_cast<std::uint64_t>(in.tellg());
    require(size >= sizeof(std::uint64_t), Errc::TruncatedFile,
            path + " is smaller than a checksum trailer");
    in.seekg(0);
    Fnv64 sum;
    char buf[1 << 16];
    std::uint64_t remaining = size - sizeof(std::uint64_t);
    while (remaining > 0) {
        auto chunk = static_cast<std::streamsize>(std::min<std::uint64_t>(remaining, sizeof(buf)));
        in.read(buf, chunk);
        require(in.gcount() == chunk, Errc::TruncatedFile, "short read on " + path);
        sum.update(buf, static_cast<std::size_t>(chunk));
        remaining -= static_cast<std::uint64_t>(chunk);
    }
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    require(in.gcount() == sizeof(stored), Errc::TruncatedFile, "short read on " + path);
    require(stored == sum.value(), Errc::ChecksumMismatch,
            path + " checksum trailer does not match its contents");
}

void BinWriter::bytes(const void* data, std::size_t len) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    sum_.update(data, len);
}

void BinWriter::u32(std::uint32_t v) { bytes(&v, sizeof(v)); }
void BinWriter::u64(std::uint64_t v) { bytes(&v, sizeof(v)); }
void BinWriter::f64(double v) { bytes(&v, sizeof(v)); }

void BinWriter::f64_array(const double* data, std::size_t count) {
    bytes(data, count * sizeof(double));
}

void BinWriter::text_block(const std::string& text) {
    u64(text.size());
    bytes(text.data(), text.size());
}

void BinWriter::checksum_trailer() {
    std::uint64_t v = sum_.value();
    out_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void BinReader::bytes(void* data, std::size_t len) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    require(static_cast<std::size_t>(in_.gcount()) == len, Errc::TruncatedFile,
            "unexpected end of file");
    sum_.update(data, len);
}

std::uint32_t BinReader::u32() {
    std::uint32_t v;
    bytes(&v, sizeof(v));
    return v;
}

std::uint64_t BinReader::u64() {
    std::uint64_t v;
    bytes(&v, sizeof(v));
    return v;
}

double BinReader::f64() {
    double v;
    bytes(&v, sizeof(v));
    return v;
}

void BinReader::f64_array(double* data, std::size_t count) {
    bytes(data, count * sizeof(double));
}

std::string BinReader::text_block(std::size_t max_len) {
    std::uint64_t len = u64();
    require(len <= max_len, Errc::TruncatedFile, "metadata block length out of range");
    std::string s(len, '\0');
    bytes(s.data(), len);
    return s;
}

void BinReader::verify_checksum_trailer() {
    std::uint64_t expected = sum_.value();
    std::uint64_t stored;
    in_.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    require(static_cast<std::size_t>(in_.gcount()) == sizeof(stored), Errc::TruncatedFile,
            "missing checksum trailer");
    require(stored == expected, Errc::ChecksumMismatch, "payload checksum does not match");
}

std::string f64_to_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double f64_from_text(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    require(end != s.c_str() && *end == '\0', Errc::ConfigParse,
            "cannot parse float value '" + s + "'");
    return v;
}

}  // namespace nv
