#include "soccersum/features/audio.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "soccersum/kernels/kernels.hpp"

namespace soccersum::features {
namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

double entropy_bits(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        const double p = w / total;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

std::size_t AudioConfig::frame_length(double sample_rate) const {
    return static_cast<std::size_t>(std::llround(frame_seconds * sample_rate));
}

std::size_t AudioConfig::hop_length(double sample_rate) const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(frame_length(sample_rate)) * (1.0 - frame_overlap)));
}

std::vector<std::span<const double>> frame_signal(std::span<const double> samples, std::size_t frame_len,
                                                  std::size_t hop) {
    if (frame_len == 0 || hop == 0 || hop > frame_len) throw std::invalid_argument("frame_signal: need 0 < hop <= frame_len");
    std::vector<std::span<const double>> frames;
    for (std::size_t start = 0; start + frame_len <= samples.size(); start += hop) {
        frames.push_back(samples.subspan(start, frame_len));
    }
    return frames;
}

SpectrumAnalyzer::SpectrumAnalyzer(std::size_t frame_len) : n_(frame_len) {
    if (n_ == 0) throw std::invalid_argument("SpectrumAnalyzer: empty frame");
    in_ = fftw_alloc_real(n_);
    out_ = fftw_alloc_complex(bins());
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_, static_cast<fftw_complex*>(out_), FFTW_ESTIMATE);
}

SpectrumAnalyzer::~SpectrumAnalyzer() {
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    fftw_free(in_);
    fftw_free(out_);
}

void SpectrumAnalyzer::power(std::span<const double> frame, std::span<double> out) {
    if (frame.size() != n_ || out.size() != bins()) throw std::invalid_argument("SpectrumAnalyzer: size mismatch");
    std::copy(frame.begin(), frame.end(), in_);
    fftw_execute(static_cast<fftw_plan>(plan_));
    kernels::power_spectrum(reinterpret_cast<const double*>(out_), bins(), out.data());
}

FrameFeatures compute_frame_features(std::span<const double> frame, std::span<const double> magnitude,
                                     std::span<const double> prev_magnitude, double sample_rate,
                                     const AudioConfig& config) {
    if (frame.empty()) throw std::invalid_argument("compute_frame_features: empty frame");
    FrameFeatures f;
    const std::size_t n = frame.size();

    std::size_t crossings = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if ((frame[i] >= 0.0) != (frame[i - 1] >= 0.0)) ++crossings;
    }
    f.zcr = n > 1 ? static_cast<double>(crossings) / static_cast<double>(n - 1) : 0.0;

    const double sum_sq = kernels::dot(frame.data(), frame.data(), n);
    f.energy = sum_sq / static_cast<double>(n);

    const std::size_t blocks = config.entropy_blocks;
    if (const std::size_t sub = n / blocks; sub > 0) {
        std::vector<double> sub_energy(blocks);
        for (std::size_t b = 0; b < blocks; ++b) sub_energy[b] = kernels::dot(frame.data() + b * sub, frame.data() + b * sub, sub);
        f.energy_entropy = entropy_bits(sub_energy);
    }

    const std::size_t bins = magnitude.size();
    const double bin_hz = sample_rate / static_cast<double>(n);
    double mag_sum = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        mag_sum += magnitude[k];
        weighted += static_cast<double>(k) * bin_hz * magnitude[k];
    }
    if (mag_sum > 0.0) {
        f.centroid = weighted / mag_sum;
        double var = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
            const double d = static_cast<double>(k) * bin_hz - f.centroid;
            var += d * d * magnitude[k];
        }
        f.spread = std::sqrt(var / mag_sum);

        double cumulative = 0.0;
        const double target = config.rolloff_fraction * mag_sum;
        for (std::size_t k = 0; k < bins; ++k) {
            cumulative += magnitude[k];
            if (cumulative >= target) {
                f.rolloff = static_cast<double>(k) * bin_hz;
                break;
            }
        }
    }

    if (const std::size_t band = bins / blocks; band > 0) {
        std::vector<double> band_energy(blocks, 0.0);
        for (std::size_t b = 0; b < blocks; ++b)
            band_energy[b] = kernels::dot(magnitude.data() + b * band, magnitude.data() + b * band, band);
        f.spectral_entropy = entropy_bits(band_energy);
    }

    if (!prev_magnitude.empty()) {
        if (prev_magnitude.size() != bins) throw std::invalid_argument("compute_frame_features: spectrum size mismatch");
        double prev_sum = 0.0;
        for (double v : prev_magnitude) prev_sum += v;
        const double a = mag_sum > 0.0 ? 1.0 / mag_sum : 0.0;
        const double b = prev_sum > 0.0 ? 1.0 / prev_sum : 0.0;
        double flux = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
            const double d = magnitude[k] * a - prev_magnitude[k] * b;
            flux += d * d;
        }
        f.flux = flux;
    }
    return f;
}

FrameFeatures compute_frame_features(std::span<const double> frame, std::span<const double> prev_frame,
                                     double sample_rate, const AudioConfig& config) {
    SpectrumAnalyzer analyzer(frame.size());
    std::vector<double> mag(analyzer.bins()), prev;
    analyzer.power(frame, mag);
    for (double& v : mag) v = std::sqrt(v);
    if (!prev_frame.empty()) {
        prev.resize(analyzer.bins());
        analyzer.power(prev_frame, prev);
        for (double& v : prev) v = std::sqrt(v);
    }
    return compute_frame_features(frame, mag, prev, sample_rate, config);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MfccExtractor::MfccExtractor(std::size_t frame_len, double sample_rate, const AudioConfig& config)
    : count_(config.mfcc_count), log_floor_(config.log_floor) {
    const std::size_t m = config.mel_filters;
    if (m == 0 || count_ == 0 || count_ > m) throw std::invalid_argument("MfccExtractor: need 0 < mfcc_count <= mel_filters");
    const std::size_t bins = frame_len / 2 + 1;
    const double nyquist = sample_rate / 2.0;
    const double mel_max = hz_to_mel(nyquist);
    std::vector<double> edges(m + 2);
    for (std::size_t i = 0; i < m + 2; ++i) edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(m + 1));

    filters_ = RowMatrix(m, bins);
    for (std::size_t j = 0; j < m; ++j) {
        const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
        for (std::size_t k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / static_cast<double>(frame_len);
            double w = 0.0;
            if (f >= lo && f <= mid) w = (f - lo) / (mid - lo);
            else if (f > mid && f <= hi) w = (hi - f) / (hi - mid);
            filters_(j, k) = w;
        }
    }

    dct_ = RowMatrix(count_, m);
    for (std::size_t c = 0; c < count_; ++c) {
        const double scale = std::sqrt((c == 0 ? 1.0 : 2.0) / static_cast<double>(m));
        for (std::size_t j = 0; j < m; ++j) {
            dct_(c, j) = scale * std::cos(std::numbers::pi * static_cast<double>(c) * (static_cast<double>(j) + 0.5) /
                                          static_cast<double>(m));
        }
    }
}

void MfccExtractor::compute(std::span<const double> power, std::span<double> out) const {
    if (power.size() != filters_.cols() || out.size() != count_) throw std::invalid_argument("MfccExtractor: size mismatch");
    const std::size_t m = filters_.rows();
    std::vector<double> log_energy(m, 0.0);
    kernels::gemv_acc(filters_.data().data(), m, filters_.cols(), power.data(), log_energy.data());
    for (double& e : log_energy) e = std::log(std::max(e, log_floor_));
    std::fill(out.begin(), out.end(), 0.0);
    kernels::gemv_acc(dct_.data().data(), count_, m, log_energy.data(), out.data());
}

std::vector<double> mfcc(std::span<const double> frame, double sample_rate, const AudioConfig& config) {
    SpectrumAnalyzer analyzer(frame.size());
    std::vector<double> power(analyzer.bins());
    analyzer.power(frame, power);
    MfccExtractor extractor(frame.size(), sample_rate, config);
    std::vector<double> out(extractor.coefficient_count());
    extractor.compute(power, out);
    return out;
}

namespace {

class WindowFeaturizer {
  public:
    WindowFeaturizer(double sample_rate, const AudioConfig& config)
        : config_(config),
          rate_(sample_rate),
          frame_len_(config.frame_length(sample_rate)),
          hop_(config.hop_length(sample_rate)),
          window_len_(static_cast<std::size_t>(std::llround(config.window_seconds * sample_rate))),
          analyzer_(frame_len_),
          mfcc_(frame_len_, sample_rate, config),
          window_(window_len_),
          power_(analyzer_.bins()),
          mag_(analyzer_.bins()),
          prev_mag_(analyzer_.bins()),
          coeffs_(mfcc_.coefficient_count()) {
        if (mfcc_.coefficient_count() != kMfccCount) throw std::invalid_argument("audio vector expects 13 MFCCs");
    }

    std::array<double, kAudioVectorWidth> run(const SampleReader& read, double event_time) {
        read(std::llround(event_time * rate_), window_);
        std::array<double, kAudioVectorWidth> acc{};
        const auto frames = frame_signal(window_, frame_len_, hop_);
        bool have_prev = false;
        for (const auto& frame : frames) {
            analyzer_.power(frame, power_);
            for (std::size_t k = 0; k < power_.size(); ++k) mag_[k] = std::sqrt(power_[k]);
            const FrameFeatures f = compute_frame_features(
                frame, mag_, have_prev ? std::span<const double>(prev_mag_) : std::span<const double>{}, rate_, config_);
            mfcc_.compute(power_, coeffs_);
            acc[audio::zcr] += f.zcr;
            acc[audio::energy] += f.energy;
            acc[audio::energy_entropy] += f.energy_entropy;
            acc[audio::centroid] += f.centroid;
            acc[audio::spread] += f.spread;
            acc[audio::spectral_entropy] += f.spectral_entropy;
            acc[audio::flux] += f.flux;
            acc[audio::rolloff] += f.rolloff;
            for (std::size_t c = 0; c < kMfccCount; ++c) acc[audio::mfcc + c] += coeffs_[c];
            std::swap(mag_, prev_mag_);
            have_prev = true;
        }
        if (!frames.empty()) {
            for (double& v : acc) v /= static_cast<double>(frames.size());
        }
        return acc;
    }

  private:
    AudioConfig config_;
    double rate_;
    std::size_t frame_len_, hop_, window_len_;
    SpectrumAnalyzer analyzer_;
    MfccExtractor mfcc_;
    std::vector<double> window_, power_, mag_, prev_mag_, coeffs_;
};

}  // namespace

std::array<double, kAudioVectorWidth> extract_event_audio_features(const AudioTrack& track, double event_time,
                                                                   const AudioConfig& config) {
    if (!(event_time >= 0.0)) throw std::invalid_argument("event_time must be >= 0");
    WindowFeaturizer featurizer(track.sample_rate, config);
    return featurizer.run(track_reader(track), event_time);
}

RowMatrix extract_match_audio_features(const AudioTrack& track, const Match& match, const AudioConfig& config) {
    return extract_match_audio_features(track_reader(track), track.sample_rate, match, config);
}

SampleReader track_reader(const AudioTrack& track) {
    return [&track](long long start, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const long long s = start + static_cast<long long>(i);
            out[i] = (s >= 0 && static_cast<std::size_t>(s) < track.samples.size())
                         ? static_cast<double>(track.samples[static_cast<std::size_t>(s)])
                         : 0.0;
        }
    };
}

RowMatrix extract_match_audio_features(const SampleReader& read, double sample_rate, const Match& match,
                                       const AudioConfig& config) {
    WindowFeaturizer featurizer(sample_rate, config);
    RowMatrix out(match.events.size(), kAudioVectorWidth);
    for (std::size_t i = 0; i < match.events.size(); ++i) {
        const auto v = featurizer.run(read, match.events[i].t);
        std::copy(v.begin(), v.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace soccersum::features
