#include "soccersum/core/dataset.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/match.hpp"
#include "soccersum/core/numeric_format.hpp"

namespace soccersum {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "soccersum-dataset";
constexpr int kVersion = 1;

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what() + " (byte " + std::to_string(e.byte) + ")");
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

template <typename T>
T field(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", line);
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what(), line);
    }
}

}  // namespace

std::size_t Dataset::find_match(const std::string& id) const {
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (matches[i].id == id) return i;
    }
    throw std::out_of_range("no match with id '" + id + "'");
}

std::string event_to_jsonl(const Event& e, const std::string& match_id, const EventVocabulary& vocab) {
    std::ostringstream os;
    os << "{\"match_id\":" << json(match_id).dump() << ",\"index\":" << e.index << ",\"t\":" << format_fixed6(e.t)
       << ",\"type\":" << json(vocab.name(e.type)).dump() << ",\"team\":" << e.team << ",\"player\":" << e.player
       << ",\"sx\":" << format_fixed6(e.start.x) << ",\"sy\":" << format_fixed6(e.start.y)
       << ",\"ex\":" << format_fixed6(e.end.x) << ",\"ey\":" << format_fixed6(e.end.y)
       << ",\"outcome\":" << (e.outcome ? 1 : 0) << ",\"qualifier\":" << e.qualifier << "}";
    return os.str();
}

json actions_to_json(const std::vector<Action>& actions, bool with_summary_flag) {
    json arr = json::array();
    for (const Action& a : actions) {
        json o{{"start_index", a.start}, {"end_index", a.end}, {"type", std::string(to_string(a.type))}};
        if (with_summary_flag) o["in_summary"] = a.in_summary.value_or(false);
        arr.push_back(std::move(o));
    }
    return arr;
}

std::vector<Action> actions_from_json(const json& arr, const Match& match) {
    if (!arr.is_array()) throw ParseError("actions for match '" + match.id + "' must be an array");
    std::vector<Action> out;
    for (const json& o : arr) {
        Action a;
        a.start = field<std::size_t>(o, "start_index", 0);
        a.end = field<std::size_t>(o, "end_index", 0);
        a.type = parse_summary_action_type(field<std::string>(o, "type", 0));
        if (auto it = o.find("in_summary"); it != o.end()) a.in_summary = it->get<bool>();
        if (a.start > a.end || a.end >= match.events.size()) {
            throw ParseError("action range out of bounds in match '" + match.id + "'");
        }
        out.push_back(a);
    }
    return out;
}

void write_dataset(const fs::path& dir, const Dataset& dataset, const json& provenance) {
    fs::create_directories(dir);
    json meta{{"format", kFormat}, {"version", kVersion}, {"event_types", dataset.vocabulary->names()}};
    meta["provenance"] = provenance;
    json matches = json::array();
    for (const Match& m : dataset.matches) {
        json jm{{"match_id", m.id},
                {"attack_right",
                 {{m.attack_right[0][0], m.attack_right[0][1]}, {m.attack_right[1][0], m.attack_right[1][1]}}}};
        jm["audio"] = m.audio ? json(*m.audio) : json(nullptr);
        matches.push_back(std::move(jm));
    }
    meta["matches"] = std::move(matches);
    write_text(dir / "dataset.json", meta.dump(2) + "\n");

    std::string events;
    for (const Match& m : dataset.matches) {
        for (const Event& e : m.events) {
            events += event_to_jsonl(e, m.id, *dataset.vocabulary);
            events += '\n';
        }
    }
    write_text(dir / "events.jsonl", events);

    json summaries = json::array();
    for (std::size_t i = 0; i < dataset.matches.size(); ++i) {
        summaries.push_back({{"match_id", dataset.matches[i].id},
                             {"actions", actions_to_json(dataset.summaries.at(i), false)}});
    }
    write_text(dir / "summaries.json", summaries.dump(2) + "\n");

    if (dataset.has_reference_actions()) {
        json actions = json::array();
        for (std::size_t i = 0; i < dataset.matches.size(); ++i) {
            actions.push_back({{"match_id", dataset.matches[i].id},
                               {"actions", actions_to_json(dataset.reference_actions.at(i), true)}});
        }
        write_text(dir / "actions.json", actions.dump(2) + "\n");
    } else {
        fs::remove(dir / "actions.json");
    }
}

json read_dataset_provenance(const fs::path& dir) {
    json meta = read_json_file(dir / "dataset.json");
    return meta.value("provenance", json::object());
}

Dataset read_dataset(const fs::path& dir) {
    json meta = read_json_file(dir / "dataset.json");
    if (meta.value("format", "") != kFormat) throw ParseError("dataset.json: unexpected format tag");
    if (meta.value("version", 0) != kVersion) throw ParseError("dataset.json: unsupported version");

    Dataset ds;
    ds.vocabulary = std::make_shared<const EventVocabulary>(field<std::vector<std::string>>(meta, "event_types", 0));
    std::map<std::string, std::size_t> by_id;
    for (const json& jm : field<json>(meta, "matches", 0)) {
        Match m;
        m.id = field<std::string>(jm, "match_id", 0);
        auto ar = field<std::vector<std::vector<bool>>>(jm, "attack_right", 0);
        if (ar.size() != 2 || ar[0].size() != 2 || ar[1].size() != 2) throw ParseError("attack_right must be 2x2");
        for (int t = 0; t < 2; ++t)
            for (int h = 0; h < 2; ++h) m.attack_right[t][h] = ar[t][h];
        if (auto it = jm.find("audio"); it != jm.end() && !it->is_null()) m.audio = it->get<std::string>();
        m.vocabulary = ds.vocabulary;
        if (!by_id.emplace(m.id, ds.matches.size()).second) throw ParseError("duplicate match id '" + m.id + "'");
        ds.matches.push_back(std::move(m));
    }

    std::ifstream in(dir / "events.jsonl");
    if (!in) throw ParseError("cannot open " + (dir / "events.jsonl").string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json o;
        try {
            o = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON at offset ") + std::to_string(e.byte) + ": " + e.what(),
                             line_no);
        }
        const auto id = field<std::string>(o, "match_id", line_no);
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ParseError("event references unknown match '" + id + "'", line_no);
        Match& m = ds.matches[it->second];
        Event e;
        e.index = field<std::size_t>(o, "index", line_no);
        e.t = field<double>(o, "t", line_no);
        e.type = ds.vocabulary->id(field<std::string>(o, "type", line_no));
        e.team = field<int>(o, "team", line_no);
        e.player = field<std::int64_t>(o, "player", line_no);
        e.start = {field<double>(o, "sx", line_no), field<double>(o, "sy", line_no)};
        e.end = {field<double>(o, "ex", line_no), field<double>(o, "ey", line_no)};
        e.outcome = field<int>(o, "outcome", line_no) != 0;
        e.qualifier = field<int>(o, "qualifier", line_no);
        if (e.index != m.events.size()) {
            throw ParseError("event index " + std::to_string(e.index) + " out of order for match '" + id +
                                 "' (expected " + std::to_string(m.events.size()) + ")",
                             line_no);
        }
        m.events.push_back(e);
    }
    for (const Match& m : ds.matches) {
        if (m.events.empty()) throw ParseError("match '" + m.id + "' has no events: F >= 1 violated");
    }

    auto match_index = [&](const json& js, const char* file) {
        const auto id = field<std::string>(js, "match_id", 0);
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ParseError(std::string(file) + " references unknown match '" + id + "'");
        return it->second;
    };
    ds.summaries.assign(ds.matches.size(), {});
    for (const json& js : read_json_file(dir / "summaries.json")) {
        const auto idx = match_index(js, "summaries.json");
        ds.summaries[idx] = actions_from_json(field<json>(js, "actions", 0), ds.matches[idx]);
    }
    if (fs::exists(dir / "actions.json")) {
        ds.reference_actions.assign(ds.matches.size(), {});
        for (const json& js : read_json_file(dir / "actions.json")) {
            const auto idx = match_index(js, "actions.json");
            ds.reference_actions[idx] = actions_from_json(field<json>(js, "actions", 0), ds.matches[idx]);
        }
    }
    return ds;
}

}  // namespace soccersum
