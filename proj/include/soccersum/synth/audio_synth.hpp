#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "soccersum/features/audio.hpp"
#include "soccersum/synth/generator.hpp"

namespace soccersum::synth {

// Procedural crowd track: uniform noise of amplitude `amplitude`, multiplied
// by (1 + gain) inside the 2-s window after every event of a summary action.
// Any sample can be computed on its own, so windows can be read without
// rendering the whole track.
class SynthAudio {
  public:
    SynthAudio(const Match& match, const std::vector<Action>& summary, const GenConfig& config, std::uint64_t seed);

    double sample_rate() const noexcept { return rate_; }
    std::size_t length() const noexcept { return length_; }
    const std::vector<std::pair<double, double>>& bursts() const noexcept { return bursts_; }

    void read(long long start, std::span<double> out) const;
    features::SampleReader reader() const;
    features::AudioTrack render() const;

  private:
    double rate_;
    double amplitude_;
    double gain_;
    std::uint64_t seed_;
    std::size_t length_;
    std::vector<std::pair<double, double>> bursts_;  // merged [t0, t1) seconds
};

features::AudioTrack generate_audio_track(const Match& match, const std::vector<Action>& summary,
                                          const GenConfig& config, std::uint64_t seed);

// Audio references of generated matches are "synth:<seed>".
std::string synth_audio_reference(std::uint64_t seed);
bool parse_synth_audio_reference(const std::string& ref, std::uint64_t* seed);

}  // namespace soccersum::synth
