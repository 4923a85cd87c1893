#include "soccersum/synth/audio_synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "soccersum/core/random.hpp"

namespace soccersum::synth {

SynthAudio::SynthAudio(const Match& match, const std::vector<Action>& summary, const GenConfig& config,
                       std::uint64_t seed)
    : rate_(config.audio_rate), amplitude_(config.audio_amplitude), gain_(config.audio_gain), seed_(seed) {
    const double last = match.events.empty() ? 0.0 : match.events.back().t;
    length_ = static_cast<std::size_t>(std::ceil((last + 2.0) * rate_));
    std::vector<std::pair<double, double>> raw;
    for (const Action& a : summary)
        for (std::size_t i = a.start; i <= a.end; ++i) raw.emplace_back(match.events[i].t, match.events[i].t + 2.0);
    std::sort(raw.begin(), raw.end());
    for (const auto& iv : raw) {
        if (!bursts_.empty() && iv.first <= bursts_.back().second) bursts_.back().second = std::max(bursts_.back().second, iv.second);
        else bursts_.push_back(iv);
    }
}

void SynthAudio::read(long long start, std::span<double> out) const {
    // First burst that may still cover sample `start`.
    auto it = std::lower_bound(bursts_.begin(), bursts_.end(), static_cast<double>(start) / rate_,
                               [](const std::pair<double, double>& b, double t) { return b.second <= t; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        const long long n = start + static_cast<long long>(i);
        if (n < 0 || static_cast<std::size_t>(n) >= length_) {
            out[i] = 0.0;
            continue;
        }
        const double t = static_cast<double>(n) / rate_;
        while (it != bursts_.end() && it->second <= t) ++it;
        const bool burst = it != bursts_.end() && it->first <= t;
        const std::uint64_t bits = splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(n)));
        const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
        out[i] = amplitude_ * (2.0 * u - 1.0) * (burst ? 1.0 + gain_ : 1.0);
    }
}

features::SampleReader SynthAudio::reader() const {
    return [this](long long start, std::span<double> out) { read(start, out); };
}

features::AudioTrack SynthAudio::render() const {
    features::AudioTrack track;
    track.sample_rate = rate_;
    std::vector<double> buf(length_);
    read(0, buf);
    track.samples.assign(buf.begin(), buf.end());
    return track;
}

features::AudioTrack generate_audio_track(const Match& match, const std::vector<Action>& summary,
                                          const GenConfig& config, std::uint64_t seed) {
    return SynthAudio(match, summary, config, seed).render();
}

std::string synth_audio_reference(std::uint64_t seed) { return "synth:" + std::to_string(seed); }

bool parse_synth_audio_reference(const std::string& ref, std::uint64_t* seed) {
    constexpr std::string_view prefix = "synth:";
    if (ref.rfind(prefix, 0) != 0) return false;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(ref.substr(prefix.size()), &used);
        if (used != ref.size() - prefix.size()) return false;
        *seed = v;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace soccersum::synth
