#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "bigset/cube.hpp"

namespace bigset {

enum class Interleave { bsq, bil, bip };

/// Fields of an ENVI text header that the loader understands.
struct EnviHeader {
    std::size_t samples = 0;  // width
    std::size_t lines = 0;    // height
    std::size_t bands = 0;
    int data_type = 0;        // 1 u8, 2 i16, 3 i32, 4 f32, 5 f64, 12 u16
    Interleave interleave = Interleave::bsq;
    int byte_order = 0;       // 0 = little endian, 1 = big endian
    std::size_t header_offset = 0;
};

/// Parses the header text. Keys are case-insensitive; `{...}` values may span
/// lines. Throws DataError on a missing or malformed required field.
EnviHeader parse_envi_header(const std::string& text);

/// Finds the binary file that accompanies a header: the header path without
/// its `.hdr` suffix, or with `.img`, `.dat`, `.raw`, `.bsq`, `.bil`, `.bip`.
std::filesystem::path envi_data_path(const std::filesystem::path& header_path);

/// Loads an ENVI cube and converts it to band-sequential doubles. Integer
/// samples are cast without scaling.
HsiCube load_envi(const std::filesystem::path& header_path);

/// Writes `cube` as a float32 little-endian BSQ pair `<stem>.hdr` + `<stem>.img`.
void save_envi(const HsiCube& cube, const std::filesystem::path& header_path);

// Raw container: "HSIC", then H, W, L as little-endian uint32, then H*W*L
// little-endian float32 samples in band-sequential order.
inline constexpr char kRawMagic[4] = {'H', 'S', 'I', 'C'};
inline constexpr std::size_t kRawHeaderBytes = 16;

void save_raw(const HsiCube& cube, const std::filesystem::path& path);
HsiCube load_raw(const std::filesystem::path& path);

/// Score maps use the raw container with a single band.
void save_raw(const ErrorMap& map, const std::filesystem::path& path);
ErrorMap load_raw_map(const std::filesystem::path& path);

/// Binary 8-bit PGM (P5).
void write_pgm(const std::filesystem::path& path, std::size_t height, std::size_t width,
               std::span<const std::uint8_t> pixels);

struct PgmImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels;
};
PgmImage read_pgm(const std::filesystem::path& path);

/// Ground truth as PGM: 0 = background, 255 = anomaly. Any nonzero pixel
/// reads back as an anomaly.
void save_ground_truth_pgm(const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth load_ground_truth_pgm(const std::filesystem::path& path);

/// Ground truth as a single CSV column of 0/1 values in row-major order.
void save_ground_truth_csv(const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth load_ground_truth_csv(const std::filesystem::path& path, std::size_t height,
                                  std::size_t width);

/// Dispatches on the extension (`.pgm` or `.csv`). CSV requires the shape.
GroundTruth load_ground_truth(const std::filesystem::path& path, std::size_t height,
                              std::size_t width);

void save_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace bigset
