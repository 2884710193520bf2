#include "bigset/hsi_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <sstream>

#include "bigset/errors.hpp"
#include "binary_io.hpp"

namespace bigset {
namespace fs = std::filesystem;
using detail::append_le;
using detail::load_scalar;
using detail::read_file;
using detail::write_file;

namespace {

// Bytes per sample for the ENVI data types we read; 0 if unsupported.
std::size_t element_size(int data_type) noexcept {
    switch (data_type) {
        case 1: return 1;
        case 2: case 12: return 2;
        case 3: case 4: return 4;
        case 5: return 8;
        default: return 0;
    }
}

double load_sample(int data_type, const unsigned char* p, bool big) {
    switch (data_type) {
        case 1: return static_cast<double>(*p);
        case 2: return static_cast<double>(load_scalar<std::int16_t>(p, big));
        case 3: return static_cast<double>(load_scalar<std::int32_t>(p, big));
        case 4: return static_cast<double>(load_scalar<float>(p, big));
        case 5: return load_scalar<double>(p, big);
        default: return static_cast<double>(load_scalar<std::uint16_t>(p, big));
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::size_t parse_size(const std::map<std::string, std::string>& fields, const std::string& key) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw DataError("ENVI header is missing '" + key + "'");
    try {
        std::size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (used != it->second.size() || v < 0) throw std::invalid_argument(key);
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw DataError("ENVI header field '" + key + "' is not an integer: " + it->second);
    }
}

}  // namespace

EnviHeader parse_envi_header(const std::string& text) {
    std::map<std::string, std::string> fields;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            if (lower(trim(line)) == "envi") continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '{') {
            while (value.find('}') == std::string::npos && std::getline(in, line)) value += " " + trim(line);
        }
        // Collapse internal whitespace in keys such as "data   type".
        std::string compact;
        for (char c : key) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!compact.empty() && compact.back() != ' ') compact += ' ';
            } else {
                compact += c;
            }
        }
        fields[compact] = value;
    }

    EnviHeader h;
    h.samples = parse_size(fields, "samples");
    h.lines = parse_size(fields, "lines");
    h.bands = parse_size(fields, "bands");
    h.data_type = static_cast<int>(parse_size(fields, "data type"));
    if (fields.count("byte order")) h.byte_order = static_cast<int>(parse_size(fields, "byte order"));
    if (fields.count("header offset")) h.header_offset = parse_size(fields, "header offset");

    const auto il = fields.find("interleave");
    if (il == fields.end()) throw DataError("ENVI header is missing 'interleave'");
    const std::string mode = lower(il->second);
    if (mode == "bsq") h.interleave = Interleave::bsq;
    else if (mode == "bil") h.interleave = Interleave::bil;
    else if (mode == "bip") h.interleave = Interleave::bip;
    else throw DataError("unsupported ENVI interleave '" + il->second + "'");

    if (h.samples == 0 || h.lines == 0 || h.bands == 0) throw DataError("ENVI header declares an empty cube");
    if (element_size(h.data_type) == 0) {
        throw DataError("unsupported ENVI data type " + std::to_string(h.data_type) +
                        " (supported: 1, 2, 3, 4, 5, 12)");
    }
    if (h.byte_order != 0 && h.byte_order != 1) throw DataError("invalid ENVI byte order");
    return h;
}

fs::path envi_data_path(const fs::path& header_path) {
    if (lower(header_path.extension().string()) == ".hdr") {
        fs::path stem = header_path;
        stem.replace_extension();
        if (fs::is_regular_file(stem)) return stem;
        for (const char* ext : {".img", ".dat", ".raw", ".bsq", ".bil", ".bip"}) {
            fs::path candidate = stem;
            candidate += ext;
            if (fs::is_regular_file(candidate)) return candidate;
        }
    }
    throw DataError("no data file found next to header " + header_path.string());
}

HsiCube load_envi(const fs::path& header_path) {
    const EnviHeader h = parse_envi_header(read_file(header_path));
    const std::string raw = read_file(envi_data_path(header_path));

    const std::size_t elem = element_size(h.data_type);
    const std::size_t count = h.samples * h.lines * h.bands;
    if (raw.size() != h.header_offset + count * elem) {
        throw DataError("ENVI data file holds " + std::to_string(raw.size()) + " bytes, expected " +
                        std::to_string(h.header_offset + count * elem));
    }

    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data()) + h.header_offset;
    const bool big = h.byte_order == 1;
    const std::size_t H = h.lines, W = h.samples, L = h.bands;
    std::vector<double> data(count);
    for (std::size_t r = 0; r < H; ++r) {
        for (std::size_t c = 0; c < W; ++c) {
            for (std::size_t b = 0; b < L; ++b) {
                std::size_t src = 0;
                switch (h.interleave) {
                    case Interleave::bsq: src = (b * H + r) * W + c; break;
                    case Interleave::bil: src = (r * L + b) * W + c; break;
                    case Interleave::bip: src = (r * W + c) * L + b; break;
                }
                const unsigned char* p = bytes + src * elem;
                data[b * H * W + r * W + c] = load_sample(h.data_type, p, big);
            }
        }
    }
    return HsiCube(H, W, L, std::move(data));
}

void save_envi(const HsiCube& cube, const fs::path& header_path) {
    std::ostringstream hdr;
    hdr << "ENVI\n"
        << "samples = " << cube.width() << "\n"
        << "lines = " << cube.height() << "\n"
        << "bands = " << cube.bands() << "\n"
        << "header offset = 0\n"
        << "data type = 4\n"
        << "interleave = bsq\n"
        << "byte order = 0\n";
    write_file(header_path, hdr.str());

    std::string payload;
    payload.reserve(cube.size() * 4);
    for (double v : cube.data()) append_le(payload, static_cast<float>(v));
    fs::path data_path = header_path;
    data_path.replace_extension(".img");
    write_file(data_path, payload);
}

void save_raw(const HsiCube& cube, const fs::path& path) {
    std::string bytes(kRawMagic, sizeof(kRawMagic));
    bytes.reserve(kRawHeaderBytes + cube.size() * 4);
    append_le(bytes, static_cast<std::uint32_t>(cube.height()));
    append_le(bytes, static_cast<std::uint32_t>(cube.width()));
    append_le(bytes, static_cast<std::uint32_t>(cube.bands()));
    for (double v : cube.data()) append_le(bytes, static_cast<float>(v));
    write_file(path, bytes);
}

HsiCube load_raw(const fs::path& path) {
    const std::string raw = read_file(path);
    if (raw.size() < kRawHeaderBytes || std::memcmp(raw.data(), kRawMagic, 4) != 0) {
        throw DataError(path.string() + " is not a raw cube container (bad magic)");
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
    const std::size_t H = load_scalar<std::uint32_t>(bytes + 4, false);
    const std::size_t W = load_scalar<std::uint32_t>(bytes + 8, false);
    const std::size_t L = load_scalar<std::uint32_t>(bytes + 12, false);
    const std::size_t count = H * W * L;
    if (raw.size() != kRawHeaderBytes + count * 4) {
        throw DataError(path.string() + " is truncated: expected " +
                        std::to_string(kRawHeaderBytes + count * 4) + " bytes, found " +
                        std::to_string(raw.size()));
    }
    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        data[i] = load_scalar<float>(bytes + kRawHeaderBytes + 4 * i, false);
    }
    return HsiCube(H, W, L, std::move(data));
}

void save_raw(const ErrorMap& map, const fs::path& path) {
    save_raw(HsiCube(map.height(), map.width(), 1, map.values()), path);
}

ErrorMap load_raw_map(const fs::path& path) {
    HsiCube cube = load_raw(path);
    if (cube.bands() != 1) {
        throw DataError(path.string() + " holds " + std::to_string(cube.bands()) +
                        " bands; a score map has exactly one");
    }
    return ErrorMap(cube.height(), cube.width(), std::move(cube.data()));
}

void write_pgm(const fs::path& path, std::size_t height, std::size_t width,
               std::span<const std::uint8_t> pixels) {
    if (pixels.size() != height * width) throw DataError("PGM pixel count does not match its shape");
    std::string bytes = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    bytes.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    write_file(path, bytes);
}

PgmImage read_pgm(const fs::path& path) {
    const std::string raw = read_file(path);
    std::size_t pos = 0;
    // Header tokens may be separated by whitespace and '#' comments.
    auto next_token = [&]() -> std::string {
        while (pos < raw.size()) {
            if (raw[pos] == '#') {
                while (pos < raw.size() && raw[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(raw[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < raw.size() && !std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
        return raw.substr(start, pos - start);
    };
    if (next_token() != "P5") throw DataError(path.string() + " is not a binary PGM (P5)");
    PgmImage img;
    try {
        img.width = std::stoul(next_token());
        img.height = std::stoul(next_token());
        const unsigned long maxval = std::stoul(next_token());
        if (maxval == 0 || maxval > 255) throw DataError(path.string() + ": only 8-bit PGM is supported");
    } catch (const std::logic_error&) {
        throw DataError(path.string() + ": malformed PGM header");
    }
    ++pos;  // single whitespace byte after maxval
    const std::size_t n = img.width * img.height;
    if (raw.size() < pos + n) throw DataError(path.string() + ": truncated PGM payload");
    img.pixels.assign(raw.begin() + static_cast<std::ptrdiff_t>(pos),
                      raw.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

void save_ground_truth_pgm(const GroundTruth& gt, const fs::path& path) {
    std::vector<std::uint8_t> px(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) px[i] = gt[i] ? 255 : 0;
    write_pgm(path, gt.height(), gt.width(), px);
}

GroundTruth load_ground_truth_pgm(const fs::path& path) {
    PgmImage img = read_pgm(path);
    for (auto& p : img.pixels) p = p != 0 ? 1 : 0;
    return GroundTruth(img.height, img.width, std::move(img.pixels));
}

void save_ground_truth_csv(const GroundTruth& gt, const fs::path& path) {
    std::string out;
    out.reserve(gt.size() * 2);
    for (auto v : gt.values()) out += v ? "1\n" : "0\n";
    write_file(path, out);
}

GroundTruth load_ground_truth_csv(const fs::path& path, std::size_t height, std::size_t width) {
    std::istringstream in(read_file(path));
    std::vector<std::uint8_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string v = trim(line);
        if (v.empty()) continue;
        if (v == "0") labels.push_back(0);
        else if (v == "1") labels.push_back(1);
        else throw DataError(path.string() + ": ground-truth CSV value '" + v + "' is not 0 or 1");
    }
    if (labels.size() != height * width) {
        throw DataError(path.string() + " has " + std::to_string(labels.size()) + " labels, expected " +
                        std::to_string(height * width));
    }
    return GroundTruth(height, width, std::move(labels));
}

GroundTruth load_ground_truth(const fs::path& path, std::size_t height, std::size_t width) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".csv") return load_ground_truth_csv(path, height, width);
    GroundTruth gt = load_ground_truth_pgm(path);
    if (gt.height() != height || gt.width() != width) {
        throw DataError(path.string() + " is " + std::to_string(gt.height()) + "x" +
                        std::to_string(gt.width()) + ", expected " + std::to_string(height) + "x" +
                        std::to_string(width));
    }
    return gt;
}

void save_mask_pgm(const BinaryMask& mask, const fs::path& path) {
    std::vector<std::uint8_t> px(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) px[i] = mask[i] ? 255 : 0;
    write_pgm(path, mask.height(), mask.width(), px);
}

}  // namespace bigset
