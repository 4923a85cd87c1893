#include "soccersum/features/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "soccersum/core/errors.hpp"

namespace soccersum::features {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open audio file " + path.string());
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

template <typename T>
T load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

}  // namespace

AudioTrack read_wav(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw ParseError(path.string() + ": not a RIFF/WAVE file");
    }
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const char* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* chunk = bytes.data() + pos;
        const auto size = load<std::uint32_t>(chunk + 4);
        if (pos + 8 + size > bytes.size()) throw ParseError(path.string() + ": truncated chunk at byte " + std::to_string(pos));
        if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
            format = load<std::uint16_t>(chunk + 8);
            channels = load<std::uint16_t>(chunk + 10);
            rate = load<std::uint32_t>(chunk + 12);
            bits = load<std::uint16_t>(chunk + 22);
            if (format == 0xFFFE && size >= 40) format = load<std::uint16_t>(chunk + 32);  // extensible
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = chunk + 8;
            data_size = size;
        }
        pos += 8 + size + (size & 1u);
    }
    if (data == nullptr || channels == 0 || rate == 0) throw ParseError(path.string() + ": missing fmt or data chunk");

    const std::size_t stride = static_cast<std::size_t>(bits / 8) * channels;
    const std::size_t frames = data_size / stride;
    AudioTrack track;
    track.sample_rate = rate;
    track.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const char* s = data + i * stride;
        float v = 0.0f;
        if (format == 1 && bits == 16) v = static_cast<float>(load<std::int16_t>(s)) / 32768.0f;
        else if (format == 1 && bits == 24) {
            std::int32_t x = (static_cast<unsigned char>(s[0])) | (static_cast<unsigned char>(s[1]) << 8) |
                             (static_cast<signed char>(s[2]) * 65536);
            v = static_cast<float>(x) / 8388608.0f;
        } else if (format == 1 && bits == 32) v = static_cast<float>(load<std::int32_t>(s) / 2147483648.0);
        else if (format == 3 && bits == 32) v = load<float>(s);
        else if (format == 3 && bits == 64) v = static_cast<float>(load<double>(s));
        else throw ParseError(path.string() + ": unsupported sample format");
        track.samples[i] = v;
    }
    return track;
}

void write_wav(const std::filesystem::path& path, const AudioTrack& track) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const auto data_bytes = static_cast<std::uint32_t>(track.samples.size() * sizeof(float));
    const auto rate = static_cast<std::uint32_t>(track.sample_rate);
    auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    out.write("RIFF", 4);
    put32(36 + data_bytes);
    out.write("WAVEfmt ", 8);
    put32(16);
    put16(3);  // IEEE float
    put16(1);
    put32(rate);
    put32(rate * 4);
    put16(4);
    put16(32);
    out.write("data", 4);
    put32(data_bytes);
    out.write(reinterpret_cast<const char*>(track.samples.data()), static_cast<std::streamsize>(data_bytes));
}

AudioTrack read_raw_f32(const std::filesystem::path& path, double sample_rate) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be > 0");
    const auto bytes = slurp(path);
    if (bytes.size() % 4 != 0) throw ParseError(path.string() + ": size is not a multiple of 4 bytes");
    AudioTrack track;
    track.sample_rate = sample_rate;
    track.samples.resize(bytes.size() / 4);
    std::memcpy(track.samples.data(), bytes.data(), bytes.size());
    return track;
}

}  // namespace soccersum::features
