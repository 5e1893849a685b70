#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace grove::io {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Little-endian writer independent of host byte order.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void magic(std::string_view tag);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);

private:
    std::ostream& out_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    /// Throws FormatError when the next bytes differ from `tag`.
    void expect_magic(std::string_view tag);
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();

private:
    void read(std::span<unsigned char> buf);
    std::istream& in_;
};

}  // namespace grove::io
