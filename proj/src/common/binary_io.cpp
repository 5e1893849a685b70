#include "grove/common/binary_io.hpp"

#include <array>
#include <bit>
#include <string>

namespace grove::io {
namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
    std::array<char, sizeof(U)> buf{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::span<const unsigned char> buf) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        v |= static_cast<U>(buf[i]) << (8 * i);
    }
    return v;
}

}  // namespace

void BinaryWriter::magic(std::string_view tag) { out_.write(tag.data(), static_cast<std::streamsize>(tag.size())); }
void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v); }
void BinaryWriter::f32(float v) { put_le(out_, std::bit_cast<std::uint32_t>(v)); }
void BinaryWriter::f64(double v) { put_le(out_, std::bit_cast<std::uint64_t>(v)); }

void BinaryReader::read(std::span<unsigned char> buf) {
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in_.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw FormatError("unexpected end of binary data");
    }
}

void BinaryReader::expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    read({reinterpret_cast<unsigned char*>(got.data()), got.size()});
    if (got != tag) {
        throw FormatError("bad magic: expected '" + std::string(tag) + "'");
    }
}

std::uint32_t BinaryReader::u32() {
    std::array<unsigned char, 4> b{};
    read(b);
    return get_le<std::uint32_t>(b);
}

std::uint64_t BinaryReader::u64() {
    std::array<unsigned char, 8> b{};
    read(b);
    return get_le<std::uint64_t>(b);
}

float BinaryReader::f32() { return std::bit_cast<float>(u32()); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

}  // namespace grove::io
