#pragma once

// PFR raster container.
//
//   offset 0  char[4]  magic "PFR1"
//   offset 4  u8       dtype (0 = u8, 1 = f32, 2 = complex64 as f32 pairs)
//   offset 5  u32      height
//   offset 9  u32      width
//   offset 13 u32      channels
//   offset 17          row-major, channel-interleaved payload
//
// Every multi-byte value is little-endian regardless of host order.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace polsar::pfr {

enum class Dtype : std::uint8_t { u8 = 0, f32 = 1, complex64 = 2 };

inline constexpr std::size_t kHeaderBytes = 17;

std::size_t element_bytes(Dtype dtype);

struct Header {
    Dtype dtype = Dtype::u8;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;

    std::size_t sample_count() const {
        return std::size_t(height) * width * channels * (dtype == Dtype::complex64 ? 2 : 1);
    }
    std::size_t payload_bytes() const {
        return std::size_t(height) * width * channels * element_bytes(dtype);
    }
};

/// Decoded file. For f32 and complex64 the payload is widened into `floats`
/// (complex values as interleaved re/im); for u8 into `bytes`.
struct Image {
    Header header;
    std::vector<std::uint8_t> bytes;
    std::vector<float> floats;
};

void write_u8(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
              std::uint32_t channels, std::span<const std::uint8_t> payload);
void write_f32(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
               std::uint32_t channels, std::span<const float> payload);
// payload holds height*width*channels interleaved (re, im) pairs.
void write_complex64(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                     std::uint32_t channels, std::span<const float> payload);

/// Writes the header up front and payload in arbitrary chunks. finish()
/// checks that exactly header.payload_bytes() were appended.
class StreamWriter {
public:
    StreamWriter(const std::filesystem::path& path, const Header& header);
    ~StreamWriter();
    StreamWriter(const StreamWriter&) = delete;
    StreamWriter& operator=(const StreamWriter&) = delete;

    void append(std::span<const std::uint8_t> values);
    void append(std::span<const float> values);
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Image read(const std::filesystem::path& path);
Header read_header(const std::filesystem::path& path);

// In-memory codecs used by read/write; exposed for tests.
std::vector<std::uint8_t> encode(const Header& header, std::span<const std::uint8_t> u8_payload,
                                 std::span<const float> float_payload);
Image decode(std::span<const std::uint8_t> file_bytes);

/// "<dir>/<stem>.meta.json" for "<dir>/<stem>.pfr".
std::filesystem::path sidecar_path(const std::filesystem::path& pfr_path);
void write_sidecar(const std::filesystem::path& pfr_path, const nlohmann::json& meta);
// Returns an empty object when no sidecar exists.
nlohmann::json read_sidecar(const std::filesystem::path& pfr_path);

} // namespace polsar::pfr
