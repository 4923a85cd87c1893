#pragma once

#include <filesystem>

#include "soccersum/features/audio.hpp"

namespace soccersum::features {

// Reads a RIFF/WAVE file (PCM 16/24/32-bit or IEEE float 32/64). Only the
// first channel is kept.
AudioTrack read_wav(const std::filesystem::path& path);

// Writes a mono 32-bit float WAV.
void write_wav(const std::filesystem::path& path, const AudioTrack& track);

// Headerless little-endian float32 samples at a declared rate.
AudioTrack read_raw_f32(const std::filesystem::path& path, double sample_rate);

}  // namespace soccersum::features
