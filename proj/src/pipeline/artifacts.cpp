#include "soccersum/pipeline/artifacts.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "soccersum/core/numeric_format.hpp"

namespace soccersum::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kStampPrefix = "# soccersum ";

std::string describe(const RunStamp& s) { return "config_hash=" + s.config_hash + " seed=" + std::to_string(s.seed); }

RunStamp parse_stamp_line(const std::string& line, const fs::path& path) {
    const std::string prefix = kStampPrefix;
    if (line.rfind(prefix, 0) != 0) throw ParseError(path.string() + ": missing run stamp", 1);
    std::istringstream in(line.substr(prefix.size()));
    RunStamp s;
    bool have_hash = false, have_seed = false;
    std::string tok;
    while (in >> tok) {
        if (tok.rfind("config_hash=", 0) == 0) {
            s.config_hash = tok.substr(12);
            have_hash = true;
        } else if (tok.rfind("seed=", 0) == 0) {
            s.seed = std::strtoull(tok.c_str() + 5, nullptr, 10);
            have_seed = true;
        }
    }
    if (!have_hash || !have_seed) throw ParseError(path.string() + ": malformed run stamp", 1);
    return s;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t comma = line.find(',', begin);
        out.push_back(line.substr(begin, comma - begin));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad number '" + s + "'", line);
    return v;
}

}  // namespace

std::string stamp_line(const RunStamp& stamp) { return kStampPrefix + describe(stamp); }

MissingArtifact::MissingArtifact(const fs::path& path, const std::string& producer)
    : DataError("missing artifact " + path.string() + " (produced by `" + producer + "`)") {}

StaleArtifact::StaleArtifact(const fs::path& path, const RunStamp& found, const RunStamp& expected)
    : DataError("stale artifact " + path.string() + ": has " + describe(found) + ", current run is " +
                describe(expected)) {}

void write_text_atomic(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_artifact_text(const fs::path& path, const std::string& producer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact(path, producer);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + name + "'");
}

std::string render_csv(const RunStamp& stamp, const CsvTable& table) {
    std::string out = stamp_line(stamp) + "\n";
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) emit(r);
    return out;
}

void write_csv(const fs::path& path, const RunStamp& stamp, const CsvTable& table) {
    write_text_atomic(path, render_csv(stamp, table));
}

CsvTable read_csv(const fs::path& path, const RunStamp& expected, const std::string& producer) {
    std::istringstream in(read_artifact_text(path, producer));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    const RunStamp found = parse_stamp_line(line, path);
    if (!(found == expected)) throw StaleArtifact(path, found, expected);
    CsvTable t;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header", 2);
    t.header = split_commas(line);
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_commas(line);
        if (fields.size() != t.header.size())
            throw ParseError(path.string() + ": expected " + std::to_string(t.header.size()) + " fields", lineno);
        t.rows.push_back(std::move(fields));
    }
    return t;
}

void check_stamp(const json& j, const RunStamp& expected, const fs::path& path) {
    if (!j.is_object() || !j.contains("config_hash") || !j.contains("seed"))
        throw ParseError(path.string() + ": missing run stamp");
    RunStamp found{j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>()};
    if (!(found == expected)) throw StaleArtifact(path, found, expected);
}

void write_json_artifact(const fs::path& path, const RunStamp& stamp, json body) {
    body["config_hash"] = stamp.config_hash;
    body["seed"] = stamp.seed;
    write_text_atomic(path, body.dump(1) + "\n");
}

json read_json_artifact(const fs::path& path, const RunStamp& expected, const std::string& producer) {
    const std::string text = read_artifact_text(path, producer);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    check_stamp(j, expected, path);
    return j;
}

void write_feature_table(const fs::path& path, const RunStamp& stamp, const FeatureTable& table) {
    const std::size_t n = table.metadata.rows();
    if (table.audio.rows() != n || table.metadata.cols() != table.metadata_columns.size() ||
        table.audio.cols() != table.audio_columns.size())
        throw ShapeError("feature table shape mismatch");
    std::string out = stamp_line(stamp) + "\nevent_index";
    for (const auto& c : table.metadata_columns) out += "," + c;
    for (const auto& c : table.audio_columns) out += "," + c;
    out += '\n';
    for (std::size_t r = 0; r < n; ++r) {
        out += std::to_string(r);
        for (double v : table.metadata.row(r)) out += "," + format_fixed6(v);
        for (double v : table.audio.row(r)) out += "," + format_fixed6(v);
        out += '\n';
    }
    write_text_atomic(path, out);
}

FeatureTable read_feature_table(const fs::path& path, const RunStamp& expected) {
    CsvTable csv = read_csv(path, expected, "extract-features");
    FeatureTable t;
    if (csv.header.empty() || csv.header[0] != "event_index") throw ParseError(path.string() + ": bad header", 2);
    std::size_t first_audio = csv.header.size();
    for (std::size_t c = 1; c < csv.header.size(); ++c) {
        if (csv.header[c].rfind("audio_", 0) == 0) {
            if (first_audio == csv.header.size()) first_audio = c;
            t.audio_columns.push_back(csv.header[c]);
        } else {
            if (first_audio != csv.header.size()) throw ParseError(path.string() + ": columns out of order", 2);
            t.metadata_columns.push_back(csv.header[c]);
        }
    }
    const std::size_t m = t.metadata_columns.size(), a = t.audio_columns.size();
    t.metadata = RowMatrix(csv.rows.size(), m);
    t.audio = RowMatrix(csv.rows.size(), a);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const std::size_t lineno = r + 3;
        if (parse_double(row[0], lineno) != static_cast<double>(r)) throw ParseError("event_index out of sequence", lineno);
        for (std::size_t c = 0; c < m; ++c) t.metadata(r, c) = parse_double(row[1 + c], lineno);
        for (std::size_t c = 0; c < a; ++c) t.audio(r, c) = parse_double(row[1 + m + c], lineno);
    }
    return t;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> threads;
    const std::size_t t = std::min(jobs, n);
    threads.reserve(t);
    for (std::size_t k = 0; k < t; ++k) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace soccersum::pipeline
