#pragma once

// Little-endian byte helpers shared by the file formats.

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>

#include "bigset/errors.hpp"

namespace bigset::detail {

template <typename T>
T byteswap(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

/// Reads a T stored with the given endianness.
template <typename T>
T load_scalar(const unsigned char* src, bool big_endian) {
    T value;
    std::memcpy(&value, src, sizeof(T));
    constexpr bool host_big = std::endian::native == std::endian::big;
    return big_endian != host_big ? byteswap(value) : value;
}

template <typename T>
void append_le(std::string& out, T value) {
    if constexpr (std::endian::native == std::endian::big) value = byteswap(value);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(bytes, sizeof(T));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

/// Sequential little-endian reader with bounds checks.
class ByteReader {
public:
    ByteReader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

    template <typename T>
    T read() {
        if (pos_ + sizeof(T) > bytes_.size()) throw DataError(source_ + " is truncated");
        const T v = load_scalar<T>(reinterpret_cast<const unsigned char*>(bytes_.data()) + pos_, false);
        pos_ += sizeof(T);
        return v;
    }

    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    const std::string& bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace bigset::detail
