#include "soccersum/pipeline/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace soccersum::pipeline {
namespace {

enum class Kind { integer, real, probability, word };

struct KeySpec {
    const char* key;
    const char* fallback;
    Kind kind;
    const char* choices = nullptr;  // '|' separated, for words
};

const KeySpec kKeys[] = {
    {"seed", "7", Kind::integer},
    {"eval.folds", "10", Kind::integer},
    {"eval.max_folds", "10", Kind::integer},
    {"gen.matches", "60", Kind::integer},
    {"gen.events_per_match", "1500", Kind::real},
    {"gen.events_sd", "100", Kind::real},
    {"gen.actions_per_match", "24", Kind::integer},
    {"gen.max_goals", "3", Kind::integer},
    {"gen.clean_fraction", "0.3", Kind::probability},
    {"gen.insertion_rate", "0.1", Kind::probability},
    {"gen.swap_rate", "0.1", Kind::probability},
    {"gen.min_background_gap", "12", Kind::integer},
    {"gen.budget_min", "110", Kind::real},
    {"gen.budget_max", "270", Kind::real},
    {"gen.min_fill", "0.75", Kind::probability},
    {"gen.audio_gain", "10", Kind::real},
    {"gen.audio_rate", "8000", Kind::real},
    {"gen.audio_amplitude", "0.05", Kind::real},
    {"pad.pre", "5", Kind::real},
    {"pad.post", "10", Kind::real},
    {"features.qualifier_slots", "8", Kind::integer},
    {"audio.window_seconds", "2", Kind::real},
    {"audio.frame_seconds", "0.05", Kind::real},
    {"audio.frame_overlap", "0.5", Kind::probability},
    {"audio.entropy_blocks", "10", Kind::integer},
    {"audio.rolloff_fraction", "0.9", Kind::probability},
    {"audio.mel_filters", "26", Kind::integer},
    {"audio.log_floor", "1e-10", Kind::real},
    {"stage1.hidden", "16", Kind::integer},
    {"stage1.batch_size", "32", Kind::integer},
    {"stage1.max_epochs", "100", Kind::integer},
    {"stage1.patience", "20", Kind::integer},
    {"stage1.learning_rate", "0.001", Kind::real},
    {"stage1.clip_norm", "0", Kind::real},
    {"stage1.window", "5", Kind::integer},
    {"stage1.stride", "2", Kind::integer},
    {"stage1.r", "8", Kind::real},
    {"stage1.lse", "standard", Kind::word, "standard|literal"},
    {"stage1.overlap", "0.5", Kind::probability},
    {"stage2.modality_hidden", "32", Kind::integer},
    {"stage2.fusion_hidden", "16", Kind::integer},
    {"stage2.batch_size", "32", Kind::integer},
    {"stage2.max_epochs", "100", Kind::integer},
    {"stage2.patience", "20", Kind::integer},
    {"stage2.learning_rate", "0.001", Kind::real},
    {"stage2.clip_norm", "0", Kind::real},
    {"stage2.decision_threshold", "0.5", Kind::probability},
    {"stage3.candidates", "10", Kind::integer},
    {"stage3.sigma", "0.05", Kind::real},
    {"stage3.tolerance", "0.1", Kind::real},
    {"stage3.assembly", "stop", Kind::word, "stop|skip"},
};

const KeySpec* find_spec(const std::string& key) {
    for (const KeySpec& s : kKeys)
        if (key == s.key) return &s;
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

void check_value(const KeySpec& spec, const std::string& v) {
    auto fail = [&](const char* what) { throw ConfigError("config key '" + std::string(spec.key) + "': " + what + ", got '" + v + "'"); };
    if (spec.kind == Kind::word) {
        std::stringstream ss(spec.choices);
        std::string c;
        while (std::getline(ss, c, '|'))
            if (c == v) return;
        fail((std::string("expected one of ") + spec.choices).c_str());
    }
    char* end = nullptr;
    if (spec.kind == Kind::integer) {
        if (v.empty() || v[0] == '-') fail("expected a non-negative integer");
        std::strtoull(v.c_str(), &end, 10);
        if (*end != '\0') fail("expected a non-negative integer");
        return;
    }
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(d)) fail("expected a number");
    if (spec.kind == Kind::probability && (d < 0.0 || d > 1.0)) fail("expected a value in [0, 1]");
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

PipelineConfig::PipelineConfig() {
    for (const KeySpec& s : kKeys) values_[s.key] = s.fallback;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& file) {
    PipelineConfig c;
    c.apply_file(file);
    c.apply_environment();
    return c;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    const KeySpec* spec = find_spec(key);
    if (!spec) throw ConfigError("unknown config key '" + key + "'");
    check_value(*spec, value);
    values_[key] = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

void PipelineConfig::apply_file(const std::filesystem::path& file) { apply_file(file, 0); }

void PipelineConfig::apply_file(const std::filesystem::path& file, int depth) {
    if (depth > 16) throw ConfigError("config include depth exceeded at " + file.string());
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("include", 0) == 0 && line.size() > 7 && std::isspace(static_cast<unsigned char>(line[7]))) {
            std::filesystem::path inc = trim(line.substr(7));
            if (inc.is_relative()) inc = file.parent_path() / inc;
            apply_file(inc, depth + 1);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        try {
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void PipelineConfig::apply_environment() {
    for (const KeySpec& s : kKeys) {
        std::string env = "SOCCERSUM_";
        for (const char* p = s.key; *p; ++p) env += *p == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        if (const char* v = std::getenv(env.c_str())) {
            try {
                set(s.key, v);
            } catch (const ConfigError& e) {
                throw ConfigError("environment " + env + ": " + e.what());
            }
        }
    }
}

std::string PipelineConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

std::string PipelineConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

double PipelineConfig::number(const std::string& key) const { return std::strtod(get(key).c_str(), nullptr); }
std::size_t PipelineConfig::count(const std::string& key) const {
    return static_cast<std::size_t>(std::strtoull(get(key).c_str(), nullptr, 10));
}

std::uint64_t PipelineConfig::seed() const { return std::strtoull(get("seed").c_str(), nullptr, 10); }
std::size_t PipelineConfig::folds() const { return count("eval.folds"); }
std::size_t PipelineConfig::max_folds() const { return count("eval.max_folds"); }
std::size_t PipelineConfig::qualifier_slots() const { return count("features.qualifier_slots"); }
std::size_t PipelineConfig::candidates() const { return count("stage3.candidates"); }
double PipelineConfig::sigma() const { return number("stage3.sigma"); }

PaddingConfig PipelineConfig::padding() const { return {number("pad.pre"), number("pad.post")}; }

synth::GenConfig PipelineConfig::gen() const {
    synth::GenConfig g;
    g.matches = count("gen.matches");
    g.events_per_match = number("gen.events_per_match");
    g.events_sd = number("gen.events_sd");
    g.actions_per_match = count("gen.actions_per_match");
    g.max_goals = count("gen.max_goals");
    g.clean_fraction = number("gen.clean_fraction");
    g.insertion_rate = number("gen.insertion_rate");
    g.swap_rate = number("gen.swap_rate");
    g.min_background_gap = count("gen.min_background_gap");
    g.budget_min = number("gen.budget_min");
    g.budget_max = number("gen.budget_max");
    g.min_fill = number("gen.min_fill");
    g.audio_gain = number("gen.audio_gain");
    g.audio_rate = number("gen.audio_rate");
    g.audio_amplitude = number("gen.audio_amplitude");
    g.pad = padding();
    g.seed = seed();
    return g;
}

features::AudioConfig PipelineConfig::audio() const {
    features::AudioConfig a;
    a.window_seconds = number("audio.window_seconds");
    a.frame_seconds = number("audio.frame_seconds");
    a.frame_overlap = number("audio.frame_overlap");
    a.entropy_blocks = count("audio.entropy_blocks");
    a.rolloff_fraction = number("audio.rolloff_fraction");
    a.mel_filters = count("audio.mel_filters");
    a.log_floor = number("audio.log_floor");
    return a;
}

stage1::MilConfig PipelineConfig::mil() const {
    stage1::MilConfig m;
    m.hidden = count("stage1.hidden");
    m.batch_size = count("stage1.batch_size");
    m.max_epochs = count("stage1.max_epochs");
    m.patience = count("stage1.patience");
    m.adam.learning_rate = number("stage1.learning_rate");
    m.adam.clip_norm = number("stage1.clip_norm");
    m.overlap_ratio = number("stage1.overlap");
    m.scoring.window = count("stage1.window");
    m.scoring.stride = count("stage1.stride");
    m.scoring.r = number("stage1.r");
    m.scoring.mode = get("stage1.lse") == "literal" ? stage1::LseMode::literal : stage1::LseMode::standard;
    return m;
}

stage2::HmaConfig PipelineConfig::hma() const {
    stage2::HmaConfig h;
    h.shape.modality_hidden = count("stage2.modality_hidden");
    h.shape.fusion_hidden = count("stage2.fusion_hidden");
    h.batch_size = count("stage2.batch_size");
    h.max_epochs = count("stage2.max_epochs");
    h.patience = count("stage2.patience");
    h.adam.learning_rate = number("stage2.learning_rate");
    h.adam.clip_norm = number("stage2.clip_norm");
    h.decision_threshold = number("stage2.decision_threshold");
    return h;
}

stage3::AssemblyConfig PipelineConfig::assembly() const {
    stage3::AssemblyConfig a;
    a.tolerance = number("stage3.tolerance");
    a.mode = get("stage3.assembly") == "skip" ? stage3::AssemblyMode::skip_misfits : stage3::AssemblyMode::stop_at_first_misfit;
    return a;
}

}  // namespace soccersum::pipeline
