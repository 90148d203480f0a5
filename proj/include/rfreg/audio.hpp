#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rfreg/tensor.hpp"

namespace rfreg {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FeatureConfig {
    int sample_rate = 22050;
    int window = 2048;
    int hop = 512;
    int n_mels = 256;
    float snippet_seconds = 10.0f;
    int channels = 2;
};

struct WavData {
    int sample_rate = 0;
    std::vector<std::vector<float>> channels;  // samples in [-1, 1]
};

WavData parse_wav(const std::vector<std::uint8_t>& bytes);
WavData load_wav(const std::string& path);

std::vector<float> resample_linear(const std::vector<float>& x, int from_rate, int to_rate);

// In-place radix-2 complex FFT; n must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

// Hann-windowed one-sided power spectrogram, [frames][window/2 + 1].
std::vector<std::vector<double>> stft_power(const std::vector<float>& signal, int window, int hop);

int stft_num_frames(std::size_t samples, int window, int hop);

// Fixed equal-loudness-style power weighting (A-weighting curve, normalized
// to 1 at 1 kHz), applied to the linear spectrum before mel pooling.
double perceptual_weight(double freq_hz);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular mel filterbank, [n_mels][n_bins].
std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_bins, int window, int sample_rate);

// Per-channel STFT -> perceptual weighting -> mel pooling -> log. Output
// shape [channels, T, n_mels]; mono input is duplicated.
TensorPtr wav_to_logmel(const WavData& wav, const FeatureConfig& config);

struct Dataset {
    std::vector<TensorPtr> x;  // each [channels, T, F]
    std::vector<int> y;
    int num_classes = 0;
};

// Per-bin statistics over a training split; bins are (channel, mel) pairs,
// pooled over time and samples.
struct DatasetStats {
    std::vector<float> mean;  // [channels * n_mels]
    std::vector<float> stddev;
    int channels = 0, n_mels = 0;
};

DatasetStats compute_stats(const Dataset& train);
void normalize_inplace(Tensor& x, const DatasetStats& stats);
void normalize_dataset(Dataset& d, const DatasetStats& stats);

// Synthetic spectrogram task: each class is a narrow frequency band with a
// class-specific amplitude-modulation rate, over broadband noise. difficulty
// in [0, 1] controls noise level and band jitter.
struct SynthConfig {
    int num_classes = 4;
    int n_train_per_class = 24;
    int n_test_per_class = 8;
    int time_frames = 48;
    int n_mels = 48;
    int channels = 2;
    float difficulty = 0.3f;
};

struct SynthDataset {
    Dataset train;
    Dataset test;
};

SynthDataset synth_dataset(const SynthConfig& config, std::uint64_t seed);

// Manifest rows: path,label,split  (split in {train, test}).
struct ManifestEntry {
    std::string path;
    int label;
    std::string split;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace rfreg
