#include "soccersum/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "soccersum/core/errors.hpp"

namespace soccersum::nn {
namespace {

constexpr char kMagic[8] = {'S', 'S', 'U', 'M', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const char* what) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError(std::string("checkpoint truncated reading ") + what);
    return v;
}

std::string get_string(std::istream& in, std::size_t n, const char* what) {
    std::string s(n, '\0');
    if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n)))
        throw ParseError(std::string("checkpoint truncated reading ") + what);
    return s;
}

nlohmann::json read_header(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ParseError("not a checkpoint (bad magic)");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
    const auto meta_len = get<std::uint64_t>(in, "metadata length");
    const std::string meta = get_string(in, meta_len, "metadata");
    try {
        return nlohmann::json::parse(meta);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("checkpoint metadata: ") + e.what());
    }
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamSet& params, const nlohmann::json& metadata) {
    out.write(kMagic, 8);
    put<std::uint32_t>(out, kCheckpointVersion);
    const std::string meta = metadata.dump();
    put<std::uint64_t>(out, meta.size());
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const Param& p : params) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
        out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        put<std::uint32_t>(out, 2);
        put<std::uint64_t>(out, p.rows);
        put<std::uint64_t>(out, p.cols);
        out.write(reinterpret_cast<const char*>(p.value.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    }
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params, const nlohmann::json& metadata) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    write_checkpoint(out, params, metadata);
    if (!out) throw std::runtime_error("write failed for checkpoint " + path.string());
}

nlohmann::json read_checkpoint(std::istream& in, ParamSet& params) {
    nlohmann::json meta = read_header(in);
    const auto count = get<std::uint32_t>(in, "record count");
    if (count != params.size()) {
        throw ParseError("checkpoint has " + std::to_string(count) + " tensors, model expects " +
                         std::to_string(params.size()));
    }
    for (Param& p : params) {
        const auto name_len = get<std::uint32_t>(in, "name length");
        const std::string name = get_string(in, name_len, "name");
        if (name != p.name) throw ParseError("checkpoint tensor '" + name + "' where '" + p.name + "' was expected");
        const auto ndims = get<std::uint32_t>(in, "ndims");
        if (ndims != 2) throw ParseError("tensor '" + name + "' has " + std::to_string(ndims) + " dims, expected 2");
        const auto rows = get<std::uint64_t>(in, "rows");
        const auto cols = get<std::uint64_t>(in, "cols");
        if (rows != p.rows || cols != p.cols) throw ParseError("tensor '" + name + "' shape mismatch");
        if (!in.read(reinterpret_cast<char*>(p.value.data()), static_cast<std::streamsize>(p.size() * sizeof(double))))
            throw ParseError("checkpoint truncated in tensor '" + name + "'");
    }
    return meta;
}

nlohmann::json load_checkpoint(const std::filesystem::path& path, ParamSet& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    return read_checkpoint(in, params);
}

nlohmann::json load_checkpoint_metadata(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    return read_header(in);
}

}  // namespace soccersum::nn
