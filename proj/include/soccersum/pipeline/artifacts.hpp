#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/matrix.hpp"

namespace soccersum::pipeline {

// Identity of a run. Every artifact carries it and readers reject a mismatch.
struct RunStamp {
    std::string config_hash;
    std::uint64_t seed = 0;

    friend bool operator==(const RunStamp&, const RunStamp&) = default;
};

// "# soccersum config_hash=<hash> seed=<seed>"
std::string stamp_line(const RunStamp& stamp);

struct MissingArtifact : DataError {
    MissingArtifact(const std::filesystem::path& path, const std::string& producer);
};

struct StaleArtifact : DataError {
    StaleArtifact(const std::filesystem::path& path, const RunStamp& found, const RunStamp& expected);
};

// Writes via a sibling temporary file and rename, creating parent directories.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// MissingArtifact naming `producer` when the file does not exist.
std::string read_artifact_text(const std::filesystem::path& path, const std::string& producer);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // ParseError when absent
};

// Stamp comment line, header line, then rows; fields must not contain commas.
std::string render_csv(const RunStamp& stamp, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const RunStamp& stamp, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path, const RunStamp& expected, const std::string& producer);

// JSON object with "config_hash" and "seed" members added.
void write_json_artifact(const std::filesystem::path& path, const RunStamp& stamp, nlohmann::json body);
nlohmann::json read_json_artifact(const std::filesystem::path& path, const RunStamp& expected,
                                  const std::string& producer);

// StaleArtifact unless `j` carries `expected`.
void check_stamp(const nlohmann::json& j, const RunStamp& expected, const std::filesystem::path& path);

// Per-event feature table: event_index, then one column per feature.
struct FeatureTable {
    std::vector<std::string> metadata_columns;
    std::vector<std::string> audio_columns;
    RowMatrix metadata;
    RowMatrix audio;
};

void write_feature_table(const std::filesystem::path& path, const RunStamp& stamp, const FeatureTable& table);
FeatureTable read_feature_table(const std::filesystem::path& path, const RunStamp& expected);

// Runs body(0..n-1) on up to `jobs` threads. The exception of the lowest
// failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace soccersum::pipeline
