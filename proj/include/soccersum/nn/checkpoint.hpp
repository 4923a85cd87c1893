#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "soccersum/nn/param_set.hpp"

namespace soccersum::nn {

// Binary layout (all integers little-endian):
//   "SSUMCKPT"  u32 version
//   u64 metadata length, metadata as UTF-8 JSON
//   u32 record count, then per record:
//     u32 name length, name, u32 ndims (= 2), u64 rows, u64 cols, rows*cols f64
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const ParamSet& params, const nlohmann::json& metadata);
void save_checkpoint(const std::filesystem::path& path, const ParamSet& params, const nlohmann::json& metadata);

// Fills `params`, whose names and shapes must match the stored records
// exactly. Returns the metadata. Throws ParseError on any mismatch.
nlohmann::json read_checkpoint(std::istream& in, ParamSet& params);
nlohmann::json load_checkpoint(const std::filesystem::path& path, ParamSet& params);

// Metadata only.
nlohmann::json load_checkpoint_metadata(const std::filesystem::path& path);

}  // namespace soccersum::nn
