#include "polsar/pfr.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "polsar/error.hpp"

namespace polsar::pfr {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'R', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> header_bytes(const Header& header) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(static_cast<std::uint8_t>(header.dtype));
    put_u32(out, header.height);
    put_u32(out, header.width);
    put_u32(out, header.channels);
    return out;
}

Header parse_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) {
        throw FormatError("PFR header truncated: " + std::to_string(bytes.size()) + " of " +
                          std::to_string(kHeaderBytes) + " bytes");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("PFR magic mismatch: expected 'PFR1'");
    }
    Header h;
    const std::uint8_t code = bytes[4];
    if (code > 2) throw FormatError("PFR dtype code " + std::to_string(code) + " is not 0, 1 or 2");
    h.dtype = static_cast<Dtype>(code);
    h.height = get_u32(bytes.data() + 5);
    h.width = get_u32(bytes.data() + 9);
    h.channels = get_u32(bytes.data() + 13);
    return h;
}

} // namespace

std::size_t element_bytes(Dtype dtype) {
    switch (dtype) {
    case Dtype::u8: return 1;
    case Dtype::f32: return 4;
    case Dtype::complex64: return 8;
    }
    return 1;
}

std::vector<std::uint8_t> encode(const Header& header, std::span<const std::uint8_t> u8_payload,
                                 std::span<const float> float_payload) {
    std::vector<std::uint8_t> out = header_bytes(header);
    out.reserve(kHeaderBytes + header.payload_bytes());

    if (header.dtype == Dtype::u8) {
        if (u8_payload.size() != header.sample_count()) {
            throw ArgumentError("PFR payload size does not match header");
        }
        out.insert(out.end(), u8_payload.begin(), u8_payload.end());
    } else {
        if (float_payload.size() != header.sample_count()) {
            throw ArgumentError("PFR payload size does not match header");
        }
        for (float f : float_payload) put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

Image decode(std::span<const std::uint8_t> file_bytes) {
    Image img;
    img.header = parse_header(file_bytes);
    const auto payload = file_bytes.subspan(kHeaderBytes);
    const std::size_t need = img.header.payload_bytes();
    if (payload.size() < need) {
        throw FormatError("PFR payload truncated: " + std::to_string(payload.size()) + " of " +
                          std::to_string(need) + " bytes");
    }
    if (payload.size() > need) {
        throw FormatError("PFR payload has " + std::to_string(payload.size() - need) +
                          " trailing bytes");
    }
    if (img.header.dtype == Dtype::u8) {
        img.bytes.assign(payload.begin(), payload.end());
    } else {
        const std::size_t n = img.header.sample_count();
        img.floats.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            img.floats[i] = std::bit_cast<float>(get_u32(payload.data() + 4 * i));
        }
    }
    return img;
}

void write_u8(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
              std::uint32_t channels, std::span<const std::uint8_t> payload) {
    write_file(path, encode({Dtype::u8, height, width, channels}, payload, {}));
}

void write_f32(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
               std::uint32_t channels, std::span<const float> payload) {
    write_file(path, encode({Dtype::f32, height, width, channels}, {}, payload));
}

void write_complex64(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
                     std::uint32_t channels, std::span<const float> payload) {
    write_file(path, encode({Dtype::complex64, height, width, channels}, {}, payload));
}

struct StreamWriter::Impl {
    std::filesystem::path path;
    Header header;
    std::ofstream out;
    std::size_t written = 0;
    std::vector<std::uint8_t> buffer;
};

StreamWriter::StreamWriter(const std::filesystem::path& path, const Header& header)
    : impl_(std::make_unique<Impl>()) {
    impl_->path = path;
    impl_->header = header;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) throw IoError("cannot open '" + path.string() + "' for writing");
    const auto head = header_bytes(header);
    impl_->out.write(reinterpret_cast<const char*>(head.data()), std::streamsize(head.size()));
}

StreamWriter::~StreamWriter() = default;

void StreamWriter::append(std::span<const std::uint8_t> values) {
    if (impl_->header.dtype != Dtype::u8) throw ArgumentError("PFR stream: u8 data for float file");
    impl_->out.write(reinterpret_cast<const char*>(values.data()), std::streamsize(values.size()));
    impl_->written += values.size();
}

void StreamWriter::append(std::span<const float> values) {
    if (impl_->header.dtype == Dtype::u8) throw ArgumentError("PFR stream: float data for u8 file");
    impl_->buffer.clear();
    for (float f : values) put_u32(impl_->buffer, std::bit_cast<std::uint32_t>(f));
    impl_->out.write(reinterpret_cast<const char*>(impl_->buffer.data()),
                     std::streamsize(impl_->buffer.size()));
    impl_->written += impl_->buffer.size();
}

void StreamWriter::finish() {
    impl_->out.flush();
    if (!impl_->out) throw IoError("short write to '" + impl_->path.string() + "'");
    if (impl_->written != impl_->header.payload_bytes()) {
        throw ArgumentError("PFR stream: wrote " + std::to_string(impl_->written) + " of " +
                            std::to_string(impl_->header.payload_bytes()) + " payload bytes");
    }
    impl_->out.close();
}

Image read(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Header read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::uint8_t buf[kHeaderBytes] = {};
    in.read(reinterpret_cast<char*>(buf), kHeaderBytes);
    return parse_header({buf, std::size_t(in.gcount())});
}

std::filesystem::path sidecar_path(const std::filesystem::path& pfr_path) {
    auto p = pfr_path;
    p.replace_extension(".meta.json");
    return p;
}

void write_sidecar(const std::filesystem::path& pfr_path, const nlohmann::json& meta) {
    const auto path = sidecar_path(pfr_path);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

nlohmann::json read_sidecar(const std::filesystem::path& pfr_path) {
    const auto path = sidecar_path(pfr_path);
    if (!std::filesystem::exists(path)) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace polsar::pfr
