#include "rfreg/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace rfreg {

namespace {

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t read_u16(const std::vector<std::uint8_t>& b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

}  // namespace

WavData parse_wav(const std::vector<std::uint8_t>& bytes) {
    auto fail = [](std::size_t off, const std::string& what) {
        throw ParseError("malformed WAV at byte " + std::to_string(off) + ": " + what);
    };
    if (bytes.size() < 12) fail(0, "file shorter than RIFF header");
    if (std::memcmp(bytes.data(), "RIFF", 4) != 0) fail(0, "missing RIFF tag");
    if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) fail(8, "missing WAVE tag");

    int sample_rate = 0, num_channels = 0, bits = 0, format = 0;
    std::size_t data_off = 0, data_len = 0;
    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        char id[5] = {0};
        std::memcpy(id, bytes.data() + off, 4);
        std::size_t len = read_u32(bytes, off + 4);
        std::size_t body = off + 8;
        if (body + len > bytes.size()) fail(off, "chunk '" + std::string(id) + "' overruns file");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) fail(off, "fmt chunk too short");
            format = read_u16(bytes, body);
            num_channels = read_u16(bytes, body + 2);
            sample_rate = static_cast<int>(read_u32(bytes, body + 4));
            bits = read_u16(bytes, body + 14);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = len;
        }
        off = body + len + (len % 2);  // chunks are word-aligned
    }
    if (sample_rate == 0) fail(12, "no fmt chunk");
    if (format != 1) fail(12, "unsupported format code " + std::to_string(format) + " (PCM only)");
    if (bits != 16) fail(12, "unsupported bit depth " + std::to_string(bits) + " (16-bit only)");
    if (num_channels < 1) fail(12, "zero channels");
    if (data_off == 0 || data_len == 0) throw ParseError("WAV contains no audio data");

    std::size_t frames = data_len / (2 * static_cast<std::size_t>(num_channels));
    if (frames == 0) throw ParseError("WAV contains no audio data");
    WavData wav;
    wav.sample_rate = sample_rate;
    wav.channels.assign(num_channels, std::vector<float>(frames));
    for (std::size_t i = 0; i < frames; ++i)
        for (int ch = 0; ch < num_channels; ++ch) {
            std::size_t p = data_off + 2 * (i * num_channels + ch);
            std::int16_t v = static_cast<std::int16_t>(bytes[p] | (bytes[p + 1] << 8));
            wav.channels[ch][i] = static_cast<float>(v) / 32768.0f;
        }
    return wav;
}

WavData load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open WAV file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_wav(bytes);
}

std::vector<float> resample_linear(const std::vector<float>& x, int from_rate, int to_rate) {
    if (from_rate == to_rate || x.empty()) return x;
    double ratio = static_cast<double>(from_rate) / to_rate;
    std::size_t out_len = static_cast<std::size_t>(std::floor((x.size() - 1) / ratio)) + 1;
    std::vector<float> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        double pos = i * ratio;
        std::size_t i0 = static_cast<std::size_t>(pos);
        double frac = pos - i0;
        float a = x[i0];
        float b = (i0 + 1 < x.size()) ? x[i0 + 1] : x[i0];
        out[i] = static_cast<float>(a * (1.0 - frac) + b * frac);
    }
    return out;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw ValidationError("fft size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

int stft_num_frames(std::size_t samples, int window, int hop) {
    if (samples < static_cast<std::size_t>(window)) return 0;
    return static_cast<int>((samples - window) / hop) + 1;
}

std::vector<std::vector<double>> stft_power(const std::vector<float>& signal, int window, int hop) {
    int frames = stft_num_frames(signal.size(), window, hop);
    int n_bins = window / 2 + 1;
    std::vector<double> hann(window);
    for (int i = 0; i < window; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (window - 1));
    std::vector<std::vector<double>> out(frames, std::vector<double>(n_bins));
    std::vector<std::complex<double>> buf(window);
    for (int fr = 0; fr < frames; ++fr) {
        for (int i = 0; i < window; ++i)
            buf[i] = {static_cast<double>(signal[static_cast<std::size_t>(fr) * hop + i]) * hann[i], 0.0};
        fft(buf);
        for (int b = 0; b < n_bins; ++b) out[fr][b] = std::norm(buf[b]);
    }
    return out;
}

double perceptual_weight(double f) {
    if (f <= 0.0) return 0.0;
    double f2 = f * f;
    double num = 12194.0 * 12194.0 * f2 * f2;
    double den = (f2 + 20.6 * 20.6) * std::sqrt((f2 + 107.7 * 107.7) * (f2 + 737.9 * 737.9)) *
                 (f2 + 12194.0 * 12194.0);
    double ra = num / den;
    double ra_1k;
    {
        double g = 1000.0 * 1000.0;
        ra_1k = 12194.0 * 12194.0 * g * g /
                ((g + 20.6 * 20.6) * std::sqrt((g + 107.7 * 107.7) * (g + 737.9 * 737.9)) *
                 (g + 12194.0 * 12194.0));
    }
    double amp = ra / ra_1k;
    return amp * amp;  // power weighting
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_bins, int window, int sample_rate) {
    double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> centers(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i) centers[i] = mel_to_hz(mel_max * i / (n_mels + 1));
    std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
    for (int m = 0; m < n_mels; ++m) {
        double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
        for (int b = 0; b < n_bins; ++b) {
            double f = static_cast<double>(b) * sample_rate / window;
            if (f <= lo || f >= hi) continue;
            fb[m][b] = (f <= mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return fb;
}

TensorPtr wav_to_logmel(const WavData& wav, const FeatureConfig& config) {
    if (wav.channels.empty() || wav.channels[0].empty()) throw ParseError("empty audio");
    std::vector<std::vector<float>> chans;
    for (int ch = 0; ch < config.channels; ++ch) {
        const auto& src = wav.channels[std::min<std::size_t>(ch, wav.channels.size() - 1)];
        chans.push_back(resample_linear(src, wav.sample_rate, config.sample_rate));
    }
    int frames = stft_num_frames(chans[0].size(), config.window, config.hop);
    if (frames < 1)
        throw ParseError("audio shorter than one analysis window (" + std::to_string(chans[0].size()) +
                         " samples < " + std::to_string(config.window) + ")");
    int n_bins = config.window / 2 + 1;
    auto fb = mel_filterbank(config.n_mels, n_bins, config.window, config.sample_rate);
    std::vector<double> weights(n_bins);
    for (int b = 0; b < n_bins; ++b)
        weights[b] = perceptual_weight(static_cast<double>(b) * config.sample_rate / config.window);

    auto out = make_tensor({config.channels, frames, config.n_mels});
    for (int ch = 0; ch < config.channels; ++ch) {
        auto spec = stft_power(chans[ch], config.window, config.hop);
        for (int fr = 0; fr < frames; ++fr)
            for (int m = 0; m < config.n_mels; ++m) {
                double acc = 0.0;
                for (int b = 0; b < n_bins; ++b)
                    if (fb[m][b] != 0.0) acc += fb[m][b] * weights[b] * spec[fr][b];
                out->at((static_cast<std::size_t>(ch) * frames + fr) * config.n_mels + m) =
                    static_cast<float>(std::log10(std::max(acc, 1e-10)));
            }
    }
    return out;
}

DatasetStats compute_stats(const Dataset& train) {
    if (train.x.empty()) throw ValidationError("compute_stats: empty training set");
    int c = train.x[0]->dim(0), t = train.x[0]->dim(1), f = train.x[0]->dim(2);
    DatasetStats stats;
    stats.channels = c;
    stats.n_mels = f;
    stats.mean.assign(static_cast<std::size_t>(c) * f, 0.0f);
    stats.stddev.assign(static_cast<std::size_t>(c) * f, 0.0f);
    std::vector<double> sum(stats.mean.size(), 0.0), sq(stats.mean.size(), 0.0);
    double count = static_cast<double>(train.x.size()) * t;
    for (const auto& x : train.x)
        for (int ic = 0; ic < c; ++ic)
            for (int it = 0; it < t; ++it)
                for (int jf = 0; jf < f; ++jf) {
                    double v = x->at((static_cast<std::size_t>(ic) * t + it) * f + jf);
                    sum[static_cast<std::size_t>(ic) * f + jf] += v;
                    sq[static_cast<std::size_t>(ic) * f + jf] += v * v;
                }
    for (std::size_t i = 0; i < stats.mean.size(); ++i) {
        double mu = sum[i] / count;
        double var = std::max(sq[i] / count - mu * mu, 0.0);
        stats.mean[i] = static_cast<float>(mu);
        stats.stddev[i] = static_cast<float>(std::max(std::sqrt(var), 1e-5));
    }
    return stats;
}

void normalize_inplace(Tensor& x, const DatasetStats& stats) {
    int c = x.dim(0), t = x.dim(1), f = x.dim(2);
    if (c != stats.channels || f != stats.n_mels)
        throw DimensionError("normalize: tensor " + x.shape_str() + " does not match stats " +
                             std::to_string(stats.channels) + "x" + std::to_string(stats.n_mels));
    for (int ic = 0; ic < c; ++ic)
        for (int it = 0; it < t; ++it)
            for (int jf = 0; jf < f; ++jf) {
                std::size_t bi = static_cast<std::size_t>(ic) * f + jf;
                std::size_t xi = (static_cast<std::size_t>(ic) * t + it) * f + jf;
                x.at(xi) = (x.at(xi) - stats.mean[bi]) / stats.stddev[bi];
            }
}

void normalize_dataset(Dataset& d, const DatasetStats& stats) {
    for (auto& x : d.x) normalize_inplace(*x, stats);
}

namespace {

// A sample is a pair of narrow bands over broadband noise. Two class cues
// survive any band position: the spacing between the two bands (local in
// frequency) and the amplitude-modulation rate of the band envelope
// (temporal). The band-pair's absolute position interpolates from a fixed
// per-class center (difficulty 0, trivially separable by position alone) to
// uniformly random (difficulty 1, position carries no class information, so a
// model that keys on it memorizes training positions and transfers nothing).
// Noise grows with difficulty as well.
TensorPtr synth_sample(const SynthConfig& cfg, int label, std::mt19937_64& rng) {
    std::normal_distribution<float> noise(0.0f, 1.0f);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    int t = cfg.time_frames, f = cfg.n_mels, c = cfg.channels;

    float spacing = 3.0f + 2.0f * label;
    float margin = 2.0f;
    float lo = margin, hi = std::max(lo + 1.0f, f - margin - (3.0f + 2.0f * (cfg.num_classes - 1)));
    float class_center = lo + (hi - lo) * (2.0f * label + 1.0f) / (2.0f * cfg.num_classes);
    float random_center = lo + (hi - lo) * uni(rng);
    // position decorrelates from the class twice as fast as the noise grows,
    // so the upper half of the difficulty range varies noise alone
    float mix = std::min(1.0f, 2.0f * cfg.difficulty);
    float u = (1.0f - mix) * class_center + mix * random_center;

    float halfwidth = 1.0f;
    float mod_rate = 1.0f + label;
    float mod_depth = 0.6f;
    float phase = 2.0f * static_cast<float>(M_PI) * uni(rng);
    float sigma = 0.2f + 0.8f * cfg.difficulty;

    auto x = make_tensor({c, t, f});
    for (int ch = 0; ch < c; ++ch)
        for (int it = 0; it < t; ++it) {
            float amp = 2.0f * (1.0f + mod_depth * std::sin(2.0f * static_cast<float>(M_PI) * mod_rate * it /
                                                                t +
                                                            phase));
            for (int jf = 0; jf < f; ++jf) {
                float d1 = (jf - u) / halfwidth;
                float d2 = (jf - u - spacing) / halfwidth;
                float band = amp * (std::exp(-d1 * d1) + std::exp(-d2 * d2));
                x->at((static_cast<std::size_t>(ch) * t + it) * f + jf) = band + sigma * noise(rng);
            }
        }
    return x;
}

}  // namespace

SynthDataset synth_dataset(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.num_classes < 2 || cfg.n_train_per_class < 1 || cfg.time_frames < 1 || cfg.n_mels < 1)
        throw ValidationError("invalid synthetic dataset config");
    std::mt19937_64 rng(seed);
    SynthDataset out;
    out.train.num_classes = out.test.num_classes = cfg.num_classes;
    for (int i = 0; i < cfg.n_train_per_class; ++i)
        for (int cls = 0; cls < cfg.num_classes; ++cls) {
            out.train.x.push_back(synth_sample(cfg, cls, rng));
            out.train.y.push_back(cls);
        }
    for (int i = 0; i < cfg.n_test_per_class; ++i)
        for (int cls = 0; cls < cfg.num_classes; ++cls) {
            out.test.x.push_back(synth_sample(cfg, cls, rng));
            out.test.y.push_back(cls);
        }
    return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("path,", 0) == 0) continue;  // header row
        std::istringstream ls(line);
        ManifestEntry e;
        std::string label;
        if (!std::getline(ls, e.path, ',') || !std::getline(ls, label, ',') || !std::getline(ls, e.split))
            throw ParseError("manifest line " + std::to_string(lineno) + ": expected path,label,split");
        e.label = std::stoi(label);
        if (e.split != "train" && e.split != "test")
            throw ParseError("manifest line " + std::to_string(lineno) + ": split must be train|test");
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace rfreg
