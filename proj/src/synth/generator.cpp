#include "soccersum/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/match.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/synth/audio_synth.hpp"

namespace soccersum::synth {
namespace {

using Kind = Pattern::Kind;

Pattern open(std::string name, std::vector<PatternStep> steps, bool goal = false) {
    return {std::move(name), std::move(steps), goal, Kind::open_play};
}

constexpr bool A = true;
constexpr bool D = false;

struct Weighted {
    const char* type;
    double weight;
};

constexpr Weighted kBackground[] = {
    {"pass", 0.58},  {"tackle", 0.09}, {"interception", 0.09}, {"out", 0.06},           {"clearance", 0.08},
    {"foul", 0.03},  {"card", 0.005},  {"substitution", 0.01}, {"other", 0.045},
};

constexpr const char* kInserted[] = {"pass", "tackle", "interception", "clearance"};

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Builder keeping time, ball position and the event list of one match.
class Timeline {
  public:
    Timeline(Match& match, Rng& rng, const EventVocabulary& vocab) : match_(match), rng_(rng), vocab_(vocab) {}

    double t = 0.0;
    int half = 0;
    Point ball{50.0, 50.0};

    void push(const std::string& type, int team, Point start, Point end, bool outcome, int qualifier) {
        Event e;
        e.index = match_.events.size();
        e.t = t;
        e.type = vocab_.id(type);
        e.team = team;
        e.player = static_cast<std::int64_t>(team * 100 + rng_.between(1, 11));
        e.start = {clamp(start.x, 0.0, kFieldMax), clamp(start.y, 0.0, kFieldMax)};
        e.end = {clamp(end.x, 0.0, kFieldMax), clamp(end.y, 0.0, kFieldMax)};
        e.outcome = outcome;
        e.qualifier = qualifier;
        match_.events.push_back(e);
    }

    std::size_t size() const { return match_.events.size(); }

  private:
    Match& match_;
    Rng& rng_;
    const EventVocabulary& vocab_;
};

const char* draw_background_type(Rng& rng) {
    double u = rng.uniform01();
    for (const auto& w : kBackground) {
        if (u < w.weight) return w.type;
        u -= w.weight;
    }
    return "pass";
}

void emit_background(Timeline& tl, Rng& rng, std::size_t count, bool kick_off_first) {
    bool pending_free_kick = false;
    int last_team = static_cast<int>(rng.below(2));
    for (std::size_t k = 0; k < count; ++k) {
        tl.t += rng.uniform(1.5, 6.0);
        std::string type = draw_background_type(rng);
        int team = rng.bernoulli(0.7) ? last_team : 1 - last_team;
        if (k == 0 && kick_off_first) {
            type = "kick-off";
            tl.ball = {50.0, 50.0};
        } else if (pending_free_kick && rng.bernoulli(0.8)) {
            type = "free-kick";
            team = 1 - last_team;
        }
        pending_free_kick = type == "foul";
        const Point start = tl.ball;
        tl.ball.x = clamp(tl.ball.x + rng.normal(0.0, 8.0), 22.0, 78.0);
        tl.ball.y = clamp(tl.ball.y + rng.normal(0.0, 10.0), 5.0, 95.0);
        tl.push(type, team, start, tl.ball, rng.bernoulli(0.75), static_cast<int>(rng.between(0, 9)));
        last_team = team;
    }
}

// Location of step k of n in the attacking team's frame (x towards the goal).
Point attacking_frame_location(const std::string& type, std::size_t k, std::size_t n, Kind kind, Rng& rng) {
    if (kind != Kind::open_play) return {45.0 + 3.0 * static_cast<double>(k) + rng.uniform(-4, 4), rng.uniform(30, 70)};
    if (type == "corner-shot") return {99.5, rng.bernoulli(0.5) ? 0.5 : 99.5};
    if (type == "save") return {rng.uniform(97, 100), rng.uniform(44, 56)};
    if (type == "shot" || type == "goal-shot") return {rng.uniform(84, 95), rng.uniform(35, 65)};
    const double progress = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 1.0;
    return {68.0 + 25.0 * progress + rng.uniform(-3, 3), clamp(50.0 + rng.normal(0.0, 15.0), 5.0, 95.0)};
}

int qualifier_for(const std::string& type, Rng& rng) {
    if (type == "shot" || type == "goal-shot" || type == "save") return static_cast<int>(rng.between(10, 14));
    return static_cast<int>(rng.between(0, 9));
}

std::vector<PatternStep> noised_steps(const Pattern& p, const GenConfig& cfg, Rng& rng) {
    std::vector<PatternStep> steps = p.steps;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        if (rng.bernoulli(cfg.swap_rate)) {
            std::swap(steps[i], steps[i + 1]);
            ++i;
        }
    }
    std::vector<PatternStep> out;
    for (const PatternStep& s : steps) {
        out.push_back(s);
        if (rng.bernoulli(cfg.insertion_rate)) {
            out.push_back({kInserted[rng.below(std::size(kInserted))], rng.bernoulli(0.5)});
        }
    }
    return out;
}

// Emits an action and returns its inclusive event range.
Action emit_action(Timeline& tl, Rng& rng, const Match& match, const Pattern& pattern,
                   const std::vector<PatternStep>& steps, bool first_in_half) {
    const int attacker = static_cast<int>(rng.below(2));
    const bool right = match.attack_right[attacker][tl.half];
    Action a;
    a.start = tl.size();
    std::vector<Point> locs;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        Point p = attacking_frame_location(steps[k].type, k, steps.size(), pattern.kind, rng);
        if (!right) p.x = kFieldMax - p.x;
        locs.push_back(p);
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (!(first_in_half && k == 0)) tl.t += rng.uniform(1.0, 3.5);
        const int team = steps[k].attacking ? attacker : 1 - attacker;
        const Point end = k + 1 < steps.size() ? locs[k + 1] : locs[k];
        const std::string& type = steps[k].type;
        tl.push(type, team, locs[k], end, type == "goal-shot" || rng.bernoulli(0.6), qualifier_for(type, rng));
    }
    a.end = tl.size() - 1;
    tl.ball = locs.back();
    tl.ball.x = clamp(tl.ball.x, 22.0, 78.0);
    return a;
}

// Splits `total` into `parts` counts each >= min_each.
std::vector<std::size_t> split_counts(std::size_t total, std::size_t parts, std::size_t min_each, Rng& rng) {
    std::vector<std::size_t> out(parts, min_each);
    if (parts == 0) return out;
    const std::size_t spare = total > parts * min_each ? total - parts * min_each : 0;
    std::vector<double> w(parts);
    double sum = 0.0;
    for (double& v : w) sum += (v = rng.uniform(0.2, 1.0));
    std::size_t used = 0;
    for (std::size_t i = 0; i < parts; ++i) {
        const auto extra = static_cast<std::size_t>(std::floor(static_cast<double>(spare) * w[i] / sum));
        out[i] += extra;
        used += extra;
    }
    out.back() += spare - used;
    return out;
}

}  // namespace

const std::vector<Pattern>& pattern_library() {
    static const std::vector<Pattern> lib = {
        open("goal-build-up", {{"interception", A}, {"pass", A}, {"pass", A}, {"pass", A}, {"pass", A}, {"goal-shot", A}}, true),
        open("goal-counter", {{"tackle", A}, {"pass", A}, {"pass", A}, {"clearance", D}, {"pass", A}, {"pass", A}, {"goal-shot", A}}, true),
        open("goal-corner", {{"out", D}, {"corner-shot", A}, {"clearance", D}, {"pass", A}, {"pass", A}, {"goal-shot", A}}, true),
        open("shot-saved", {{"pass", A}, {"pass", A}, {"pass", A}, {"shot", A}, {"save", D}, {"clearance", D}}),
        open("shot-saved-corner", {{"interception", A}, {"pass", A}, {"shot", A}, {"save", D}, {"out", D}, {"corner-shot", A}, {"clearance", D}}),
        open("shot-wide", {{"tackle", A}, {"pass", A}, {"pass", A}, {"pass", A}, {"shot", A}, {"out", A}}),
        open("corner", {{"pass", A}, {"pass", A}, {"out", D}, {"corner-shot", A}, {"pass", A}, {"shot", A}, {"clearance", D}}),
        open("free-kick-shot", {{"pass", A}, {"foul", D}, {"card", D}, {"free-kick", A}, {"pass", A}, {"shot", A}, {"save", D}}),
        open("foul-card", {{"pass", A}, {"pass", A}, {"foul", D}, {"card", D}, {"free-kick", A}, {"pass", A}}),
        open("var-review", {{"pass", A}, {"pass", A}, {"foul", D}, {"var", A}, {"free-kick", A}, {"shot", A}, {"out", A}}),
        open("direct-free-kick", {{"foul", D}, {"free-kick", A}, {"pass", A}, {"pass", A}, {"shot", A}, {"clearance", D}}),
        open("shot-cleared", {{"interception", A}, {"pass", A}, {"pass", A}, {"shot", A}, {"clearance", D}, {"out", D}}),
        {"period-start", {{"start-period", A}, {"kick-off", A}, {"pass", A}, {"pass", A}, {"pass", A}, {"pass", A}}, false, Kind::period_start},
        {"period-end", {{"pass", A}, {"pass", A}, {"clearance", D}, {"pass", A}, {"end-period", A}}, false, Kind::period_end},
    };
    return lib;
}

void GenConfig::validate() const {
    auto rate = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    };
    rate(clean_fraction, "clean_fraction");
    rate(insertion_rate, "insertion_rate");
    rate(swap_rate, "swap_rate");
    rate(min_fill, "min_fill");
    if (matches < 1) throw std::invalid_argument("matches must be >= 1");
    if (actions_per_match < 4 + max_goals) throw std::invalid_argument("actions_per_match must cover period actions and goals");
    if (!(events_per_match >= 100.0)) throw std::invalid_argument("events_per_match must be >= 100");
    if (!(budget_min > 0.0 && budget_max >= budget_min)) throw std::invalid_argument("need 0 < budget_min <= budget_max");
    if (!(audio_rate > 0.0)) throw std::invalid_argument("audio_rate must be positive");
    if (!(audio_gain >= 0.0) || !(audio_amplitude > 0.0)) throw std::invalid_argument("audio gain/amplitude out of range");
}

nlohmann::json GenConfig::to_json() const {
    return {{"matches", matches},
            {"events_per_match", events_per_match},
            {"events_sd", events_sd},
            {"actions_per_match", actions_per_match},
            {"max_goals", max_goals},
            {"clean_fraction", clean_fraction},
            {"insertion_rate", insertion_rate},
            {"swap_rate", swap_rate},
            {"min_background_gap", min_background_gap},
            {"budget_min", budget_min},
            {"budget_max", budget_max},
            {"min_fill", min_fill},
            {"audio_gain", audio_gain},
            {"audio_rate", audio_rate},
            {"audio_amplitude", audio_amplitude},
            {"pad_pre", pad.pre},
            {"pad_post", pad.post},
            {"seed", seed}};
}

GenConfig GenConfig::from_json(const nlohmann::json& j) {
    GenConfig c;
    c.matches = j.at("matches").get<std::size_t>();
    c.events_per_match = j.at("events_per_match").get<double>();
    c.events_sd = j.at("events_sd").get<double>();
    c.actions_per_match = j.at("actions_per_match").get<std::size_t>();
    c.max_goals = j.at("max_goals").get<std::size_t>();
    c.clean_fraction = j.at("clean_fraction").get<double>();
    c.insertion_rate = j.at("insertion_rate").get<double>();
    c.swap_rate = j.at("swap_rate").get<double>();
    c.min_background_gap = j.at("min_background_gap").get<std::size_t>();
    c.budget_min = j.at("budget_min").get<double>();
    c.budget_max = j.at("budget_max").get<double>();
    c.min_fill = j.at("min_fill").get<double>();
    c.audio_gain = j.at("audio_gain").get<double>();
    c.audio_rate = j.at("audio_rate").get<double>();
    c.audio_amplitude = j.at("audio_amplitude").get<double>();
    c.pad.pre = j.at("pad_pre").get<double>();
    c.pad.post = j.at("pad_post").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

std::string match_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "m%03zu", index);
    return buf;
}

GeneratedMatch generate_match(const GenConfig& config, std::size_t match_index, std::uint64_t seed,
                              std::shared_ptr<const EventVocabulary> vocabulary) {
    config.validate();
    Rng rng(seed);
    const auto& lib = pattern_library();
    std::vector<const Pattern*> goals, plain;
    const Pattern* period_start = nullptr;
    const Pattern* period_end = nullptr;
    for (const Pattern& p : lib) {
        if (p.kind == Kind::period_start) period_start = &p;
        else if (p.kind == Kind::period_end) period_end = &p;
        else (p.goal ? goals : plain).push_back(&p);
    }

    GeneratedMatch out;
    Match& m = out.match;
    m.id = match_id(match_index);
    m.vocabulary = vocabulary;
    m.audio = synth_audio_reference(derive_seed(seed, {0x617564696fULL}));

    // Plan the open-play actions.
    struct Planned {
        const Pattern* pattern;
        bool clean;
    };
    const auto n_goals = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(config.max_goals)));
    const std::size_t rest = config.actions_per_match - 4 - n_goals;
    const std::size_t min_clean = n_goals >= 7 ? 0 : 7 - n_goals;
    const std::size_t n_clean =
        std::min(rest, std::max(min_clean, static_cast<std::size_t>(std::llround(config.clean_fraction * static_cast<double>(rest)))));
    std::vector<Planned> planned;
    for (std::size_t g = 0; g < n_goals; ++g) planned.push_back({goals[rng.below(goals.size())], true});
    for (std::size_t k = 0; k < rest; ++k) planned.push_back({plain[rng.below(plain.size())], k < n_clean});
    rng.shuffle(std::span<Planned>(planned));

    const double target = std::max(200.0, std::round(rng.normal(config.events_per_match, config.events_sd)));
    std::size_t planted_events = 0;
    for (const Planned& p : planned) planted_events += p.pattern->steps.size();
    planted_events += 2 * (period_start->steps.size() + period_end->steps.size());
    const std::size_t background = target > static_cast<double>(planted_events) ? static_cast<std::size_t>(target) - planted_events : 0;

    struct Placed {
        Action action;
        bool eligible;
        bool goal;
        int priority;  // 1 = match start/end, 0 otherwise
    };
    std::vector<Placed> placed;
    Timeline tl(m, rng, *vocabulary);
    tl.t = rng.uniform(5.0, 30.0);
    const std::size_t first_half_actions = planned.size() / 2;
    const std::size_t background_half[2] = {background / 2, background - background / 2};
    for (int half = 0; half < 2; ++half) {
        tl.half = half;
        if (half == 1) tl.t += rng.uniform(60.0, 120.0);
        tl.ball = {50.0, 50.0};
        const std::size_t a0 = half == 0 ? 0 : first_half_actions;
        const std::size_t a1 = half == 0 ? first_half_actions : planned.size();
        const std::size_t gaps = a1 - a0 + 1;
        const auto counts = split_counts(background_half[half], gaps, config.min_background_gap, rng);

        placed.push_back({emit_action(tl, rng, m, *period_start, period_start->steps, true), true, false, half == 0 ? 1 : 0});
        bool after_goal = false;
        for (std::size_t k = a0; k < a1; ++k) {
            emit_background(tl, rng, counts[k - a0], after_goal);
            const Planned& p = planned[k];
            const auto steps = p.clean ? p.pattern->steps : noised_steps(*p.pattern, config, rng);
            placed.push_back({emit_action(tl, rng, m, *p.pattern, steps, false), p.clean, p.pattern->goal, 0});
            after_goal = p.pattern->goal;
        }
        emit_background(tl, rng, counts.back(), after_goal);
        placed.push_back({emit_action(tl, rng, m, *period_end, period_end->steps, false), true, false, half == 1 ? 1 : 0});
    }

    for (Placed& p : placed) p.action.type = action_type(p.action, m);

    // Summary: every goal, then match start and end, then other clean
    // actions in random order while they fit the budget.
    out.budget = rng.uniform(config.budget_min, config.budget_max);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < placed.size(); ++i)
        if (placed[i].eligible && !placed[i].goal && placed[i].priority == 0) order.push_back(i);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<bool> chosen(placed.size(), false);
    double total = 0.0;
    for (std::size_t i = 0; i < placed.size(); ++i) {
        if (placed[i].goal) {
            chosen[i] = true;
            total += action_duration(placed[i].action, m, config.pad);
        }
    }
    auto try_add = [&](std::size_t i) {
        const double d = action_duration(placed[i].action, m, config.pad);
        if (total + d <= out.budget) {
            chosen[i] = true;
            total += d;
        }
    };
    for (std::size_t i = 0; i < placed.size(); ++i)
        if (placed[i].priority == 1) try_add(i);
    for (std::size_t i : order) try_add(i);
    if (total < config.min_fill * out.budget) {
        throw DataError("match " + m.id + ": summary budget " + std::to_string(out.budget) + " s unfillable (reached " +
                        std::to_string(total) + " s)");
    }
    for (std::size_t i = 0; i < placed.size(); ++i) {
        Action a = placed[i].action;
        a.in_summary = chosen[i];
        out.reference.push_back(a);
        if (chosen[i]) {
            a.in_summary.reset();
            out.summary.push_back(a);
        }
    }
    return out;
}

Dataset generate_dataset(const GenConfig& config) {
    config.validate();
    Dataset ds;
    auto vocab = std::make_shared<const EventVocabulary>(EventVocabulary::default_vocabulary());
    ds.vocabulary = vocab;
    for (std::size_t i = 0; i < config.matches; ++i) {
        GeneratedMatch g = generate_match(config, i, derive_seed(config.seed, {i}), vocab);
        ds.matches.push_back(std::move(g.match));
        ds.summaries.push_back(std::move(g.summary));
        ds.reference_actions.push_back(std::move(g.reference));
    }
    return ds;
}

}  // namespace soccersum::synth
