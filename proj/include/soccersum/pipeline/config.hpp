#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "soccersum/features/audio.hpp"
#include "soccersum/stage1/mil.hpp"
#include "soccersum/stage2/hma.hpp"
#include "soccersum/stage3/ranking.hpp"
#include "soccersum/synth/generator.hpp"

namespace soccersum::pipeline {

// Bad configuration key or value (a usage error).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Flat key=value configuration over a fixed key set with defaults.
//
// File syntax: one `key = value` per line, `#` starts a comment, and
// `include <path>` splices another file (relative to the including file).
// Environment variables SOCCERSUM_<KEY> override files, where <KEY> is the
// key upper-cased with '.' replaced by '_'.
class PipelineConfig {
  public:
    PipelineConfig();  // all defaults

    static PipelineConfig load(const std::filesystem::path& file);

    void set(const std::string& key, const std::string& value);  // throws ConfigError
    const std::string& get(const std::string& key) const;
    bool has_key(const std::string& key) const { return values_.count(key) != 0; }

    void apply_file(const std::filesystem::path& file);
    void apply_environment();

    // Sorted "key=value" lines; the hash is FNV-1a 64 of this text.
    std::string canonical() const;
    std::string hash_hex() const;

    std::uint64_t seed() const;
    std::size_t folds() const;
    std::size_t max_folds() const;
    std::size_t qualifier_slots() const;
    PaddingConfig padding() const;
    synth::GenConfig gen() const;
    features::AudioConfig audio() const;
    stage1::MilConfig mil() const;
    stage2::HmaConfig hma() const;
    stage3::AssemblyConfig assembly() const;
    std::size_t candidates() const;
    double sigma() const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

  private:
    void apply_file(const std::filesystem::path& file, int depth);
    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;

    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace soccersum::pipeline
