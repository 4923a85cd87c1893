#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "soccersum/core/matrix.hpp"
#include "soccersum/core/types.hpp"

namespace soccersum::features {

struct AudioTrack {
    std::vector<float> samples;  // mono
    double sample_rate = 48000.0;

    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }
};

struct AudioConfig {
    double window_seconds = 2.0;   // analysed interval after each event
    double frame_seconds = 0.05;
    double frame_overlap = 0.5;
    std::size_t entropy_blocks = 10;  // sub-frames / sub-bands for the entropy features
    double rolloff_fraction = 0.9;
    std::size_t mel_filters = 26;
    std::size_t mfcc_count = 13;
    double log_floor = 1e-10;

    std::size_t frame_length(double sample_rate) const;
    std::size_t hop_length(double sample_rate) const;
};

inline constexpr std::size_t kFrameFeatureCount = 8;
inline constexpr std::size_t kMfccCount = 13;
inline constexpr std::size_t kAudioVectorWidth = kFrameFeatureCount + kMfccCount;

// Offsets into an audio vector.
namespace audio {
inline constexpr std::size_t zcr = 0, energy = 1, energy_entropy = 2, centroid = 3, spread = 4,
                             spectral_entropy = 5, flux = 6, rolloff = 7, mfcc = 8;
}

struct FrameFeatures {
    double zcr = 0.0;
    double energy = 0.0;
    double energy_entropy = 0.0;
    double centroid = 0.0;  // Hz
    double spread = 0.0;    // Hz (square root of the second central moment)
    double spectral_entropy = 0.0;
    double flux = 0.0;
    double rolloff = 0.0;  // Hz
};

// Contiguous frames starting at multiples of `hop`; a trailing partial frame
// is dropped. Requires frame_len > 0 and 0 < hop <= frame_len.
std::vector<std::span<const double>> frame_signal(std::span<const double> samples, std::size_t frame_len,
                                                  std::size_t hop);

// Real DFT of a fixed frame length (no window function). Each instance owns
// its FFT plan and scratch buffers; use one per thread.
class SpectrumAnalyzer {
  public:
    explicit SpectrumAnalyzer(std::size_t frame_len);
    ~SpectrumAnalyzer();
    SpectrumAnalyzer(const SpectrumAnalyzer&) = delete;
    SpectrumAnalyzer& operator=(const SpectrumAnalyzer&) = delete;

    std::size_t frame_length() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    // |X_k|^2 for k = 0..N/2.
    void power(std::span<const double> frame, std::span<double> out);

  private:
    std::size_t n_;
    double* in_ = nullptr;
    void* out_ = nullptr;  // fftw_complex*
    void* plan_ = nullptr;
};

// Time- and spectral-domain descriptors of one frame. `magnitude` holds |X_k|
// for k = 0..N/2; `prev_magnitude` is the previous frame's spectrum or empty.
FrameFeatures compute_frame_features(std::span<const double> frame, std::span<const double> magnitude,
                                     std::span<const double> prev_magnitude, double sample_rate,
                                     const AudioConfig& config = {});

// Convenience overload computing the spectra itself.
FrameFeatures compute_frame_features(std::span<const double> frame, std::span<const double> prev_frame,
                                     double sample_rate, const AudioConfig& config = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular mel filterbank + log + orthonormal DCT-II.
class MfccExtractor {
  public:
    MfccExtractor(std::size_t frame_len, double sample_rate, const AudioConfig& config = {});

    std::size_t coefficient_count() const noexcept { return count_; }
    const RowMatrix& filterbank() const noexcept { return filters_; }

    // Coefficients from a power spectrum |X_k|^2, k = 0..N/2.
    void compute(std::span<const double> power, std::span<double> out) const;

  private:
    std::size_t count_;
    double log_floor_;
    RowMatrix filters_;  // mel_filters x bins
    RowMatrix dct_;      // count x mel_filters
};

std::vector<double> mfcc(std::span<const double> frame, double sample_rate, const AudioConfig& config = {});

// Mean of the 8 frame descriptors and the MFCCs over the frames of the
// [event_time, event_time + window) interval. Samples past the track end read
// as silence.
std::array<double, kAudioVectorWidth> extract_event_audio_features(const AudioTrack& track, double event_time,
                                                                   const AudioConfig& config = {});

// One audio row per event timestamp of the match.
RowMatrix extract_match_audio_features(const AudioTrack& track, const Match& match, const AudioConfig& config = {});

// Fills out[i] with sample `start + i`; samples outside the signal are 0.
// Lets procedurally generated audio be analysed without materialising it.
using SampleReader = std::function<void(long long start, std::span<double> out)>;

SampleReader track_reader(const AudioTrack& track);  // borrows `track`

RowMatrix extract_match_audio_features(const SampleReader& read, double sample_rate, const Match& match,
                                       const AudioConfig& config = {});

}  // namespace soccersum::features
