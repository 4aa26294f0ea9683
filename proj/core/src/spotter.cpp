// Copyright 2026 The audiomt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "audiomt/spotter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "audiomt/errors.hpp"
#include "audiomt/spectral.hpp"
#include "audiomt/wav.hpp"

namespace audiomt::spotter {
namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular filters over power-spectrum bins 0..fft_size/2.
std::vector<std::vector<double>> mel_filterbank(const MfccOptions& o,
                                                std::size_t fft_size,
                                                int rate) {
  const double high = std::min(o.high_hz, rate / 2.0);
  const double mel_low = hz_to_mel(o.low_hz);
  const double mel_high = hz_to_mel(high);
  const std::size_t bins = fft_size / 2 + 1;
  std::vector<double> edges(o.mel_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_low + (mel_high - mel_low) * i /
                                       static_cast<double>(o.mel_filters + 1));
  }
  std::vector<std::vector<double>> bank(o.mel_filters,
                                        std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < o.mel_filters; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / fft_size;
      if (f > left && f < centre) {
        bank[m][k] = (f - left) / (centre - left);
      } else if (f >= centre && f < right) {
        bank[m][k] = (right - f) / (right - centre);
      }
    }
  }
  return bank;
}

std::string stem_of(const std::filesystem::path& p) { return p.stem().string(); }

std::vector<std::filesystem::path> tagged_wavs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav" &&
        stem_of(entry.path()).find("__") != std::string::npos) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

double frame_distance(const FeatureFrame& a, const FeatureFrame& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

MfccSequence extract_mfcc(const AudioBuffer& audio, const MfccOptions& o) {
  const int rate = audio.sample_rate();
  const auto frame_len =
      static_cast<std::size_t>(std::llround(o.frame_s * rate));
  const auto hop = static_cast<std::size_t>(std::llround(o.hop_s * rate));
  if (frame_len == 0 || hop == 0) throw ParameterError("MFCC frame/hop too small");
  if (audio.frames() < frame_len) {
    throw DomainError("clip shorter than one MFCC frame");
  }

  auto signal = audio.mixdown();
  for (std::size_t i = signal.size(); i-- > 1;) {
    signal[i] -= o.pre_emphasis * signal[i - 1];
  }

  const std::size_t fft_size = next_power_of_two(frame_len);
  const auto bank = mel_filterbank(o, fft_size, rate);
  std::vector<double> window(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i /
                                       static_cast<double>(frame_len - 1));
  }
  // DCT-II, orthonormal.
  std::vector<std::vector<double>> dct(o.coefficients,
                                       std::vector<double>(o.mel_filters));
  const double m = static_cast<double>(o.mel_filters);
  for (std::size_t k = 0; k < o.coefficients; ++k) {
    const double norm = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (std::size_t n = 0; n < o.mel_filters; ++n) {
      dct[k][n] = norm * std::cos(std::numbers::pi * k * (n + 0.5) / m);
    }
  }

  const std::size_t count = (signal.size() - frame_len) / hop + 1;
  MfccSequence out;
  out.frame_hop_s = static_cast<double>(hop) / rate;
  out.frames.reserve(count);
  std::vector<std::complex<double>> spectrum(fft_size);
  std::vector<double> log_energy(o.mel_filters);
  for (std::size_t f = 0; f < count; ++f) {
    std::fill(spectrum.begin(), spectrum.end(), std::complex<double>{});
    for (std::size_t i = 0; i < frame_len; ++i) {
      spectrum[i] = signal[f * hop + i] * window[i];
    }
    fft(spectrum);
    for (std::size_t b = 0; b < o.mel_filters; ++b) {
      double e = 0.0;
      for (std::size_t k = 0; k < bank[b].size(); ++k) {
        if (bank[b][k] != 0.0) e += bank[b][k] * std::norm(spectrum[k]);
      }
      log_energy[b] = std::log(std::max(e, 1e-10));
    }
    FeatureFrame coeffs(o.coefficients, 0.0);
    for (std::size_t k = 0; k < o.coefficients; ++k) {
      for (std::size_t n = 0; n < o.mel_filters; ++n) {
        coeffs[k] += dct[k][n] * log_energy[n];
      }
    }
    out.frames.push_back(std::move(coeffs));
  }
  return out;
}

FeatureSequence without_energy(const MfccSequence& mfcc) {
  FeatureSequence out;
  out.reserve(mfcc.frames.size());
  for (const auto& f : mfcc.frames) out.emplace_back(f.begin() + 1, f.end());
  return out;
}

double dtw_distance(std::span<const FeatureFrame> a,
                    std::span<const FeatureFrame> b) {
  if (a.empty() || b.empty()) throw DomainError("dtw on an empty sequence");
  const std::size_t n = a.size(), m = b.size();
  struct Cell {
    double cost;
    std::size_t length;
  };
  // Lexicographic (cost asc, length desc).
  const auto better = [](const Cell& x, const Cell& y) {
    return x.cost < y.cost || (x.cost == y.cost && x.length > y.length);
  };
  std::vector<Cell> prev(m), curr(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = frame_distance(a[i], b[j]);
      if (i == 0 && j == 0) {
        curr[j] = {d, 1};
        continue;
      }
      Cell best{std::numeric_limits<double>::infinity(), 0};
      if (i > 0 && better(prev[j], best)) best = prev[j];
      if (j > 0 && better(curr[j - 1], best)) best = curr[j - 1];
      if (i > 0 && j > 0 && better(prev[j - 1], best)) best = prev[j - 1];
      curr[j] = {best.cost + d, best.length + 1};
    }
    std::swap(prev, curr);
  }
  const Cell& end = prev[m - 1];
  return end.cost / static_cast<double>(end.length);
}

KeywordTemplate make_template(Category tag, std::string word,
                              const AudioBuffer& audio) {
  return {tag, std::move(word), without_energy(extract_mfcc(audio))};
}

std::vector<KeywordTemplate> load_templates(const std::filesystem::path& dir) {
  std::vector<KeywordTemplate> out;
  for (const auto& path : tagged_wavs(dir)) {
    const std::string stem = stem_of(path);
    const auto sep = stem.find("__");
    const Category tag = parse_category(stem.substr(0, sep));
    if (!is_toxic(tag)) {
      throw ParameterError("template " + path.string() + " must carry a toxic tag");
    }
    out.push_back(make_template(tag, stem.substr(sep + 2), read_wav(path)));
  }
  if (out.empty()) throw IoError("no templates in " + dir.string());
  return out;
}

SpotResult best_match(const AudioBuffer& audio,
                      std::span<const KeywordTemplate> templates,
                      const SpotterWindow& window) {
  if (templates.empty()) throw ParameterError("spotter needs templates");
  const MfccOptions options;
  const auto features = without_energy(extract_mfcc(audio, options));
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window.hop_s / options.hop_s)));
  std::size_t fixed_len = 0;
  if (window.window_s > 0.0) {
    fixed_len = static_cast<std::size_t>(std::llround(
                    (window.window_s - options.frame_s) / options.hop_s)) + 1;
  }

  SpotResult best{std::numeric_limits<double>::infinity(), 0, 0};
  bool any_fit = false;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    const std::size_t len = fixed_len ? fixed_len : templates[t].features.size();
    // A template longer than the clip cannot occur in it.
    if (len > features.size()) continue;
    any_fit = true;
    const std::size_t last = features.size() - len;
    for (std::size_t start = 0;; start += hop) {
      start = std::min(start, last);
      const std::span<const FeatureFrame> view(features.data() + start, len);
      const double d = dtw_distance(view, templates[t].features);
      if (d < best.distance) best = {d, t, start};
      if (start == last) break;
    }
  }
  if (!any_fit) throw DomainError("spotter window longer than the clip");
  return best;
}

Verdict spot_keywords(const AudioBuffer& audio,
                      std::span<const KeywordTemplate> templates,
                      const SpotterWindow& window, double threshold) {
  if (!(threshold > 0.0)) throw ParameterError("spotter threshold must be > 0");
  const SpotResult match = best_match(audio, templates, window);
  Verdict v;
  if (match.distance < threshold) {
    v.category = templates[match.template_index].tag;
    v.confidence = std::clamp(1.0 - match.distance / threshold, 0.0, 1.0);
  } else {
    v.category = Category::kNonToxic;
    v.confidence = 0.0;
  }
  v.raw = "distance=" + std::to_string(match.distance) + " template=" +
          templates[match.template_index].word;
  return v;
}

KeywordSpotterBackend::KeywordSpotterBackend(
    std::string name, std::vector<KeywordTemplate> templates,
    SpotterWindow window, double threshold)
    : name_(std::move(name)),
      templates_(std::move(templates)),
      window_(window),
      threshold_(threshold) {
  if (templates_.empty()) throw ParameterError("spotter needs templates");
  if (!(threshold_ > 0.0)) {
    throw ParameterError("spotter threshold must be > 0 (run calibrate)");
  }
}

Verdict KeywordSpotterBackend::moderate(const AudioBuffer& audio,
                                        const linguistic::Transcript*) const {
  try {
    return spot_keywords(audio, templates_, window_, threshold_);
  } catch (const DomainError& e) {
    // Too short to hold any keyword: nothing to flag.
    return Verdict{Category::kNonToxic, 0.0, e.what()};
  }
}

std::vector<LabeledClip> load_labeled_clips(const std::filesystem::path& dir) {
  std::vector<LabeledClip> clips;
  for (const auto& path : tagged_wavs(dir)) {
    const std::string stem = stem_of(path);
    clips.push_back({stem, parse_category(stem.substr(0, stem.find("__"))),
                     read_wav(path)});
  }
  return clips;
}

Calibration calibrate_threshold(std::span<const KeywordTemplate> templates,
                                std::span<const LabeledClip> clips,
                                const SpotterWindow& window) {
  if (clips.empty()) throw DomainError("calibration needs labeled clips");
  Calibration out;
  std::vector<Category> tags;
  for (const auto& clip : clips) {
    const auto match = best_match(clip.audio, templates, window);
    out.distances.push_back(match.distance);
    tags.push_back(templates[match.template_index].tag);
  }

  // Candidate thresholds: one per interval between consecutive distinct
  // distances (predictions are constant inside each), plus both ends.
  std::vector<double> sorted = out.distances;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  struct Candidate {
    double threshold, width;
  };
  std::vector<Candidate> candidates;
  if (sorted.front() > 0.0) candidates.push_back({sorted.front() / 2, sorted.front()});
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back({(sorted[i] + sorted[i + 1]) / 2, sorted[i + 1] - sorted[i]});
  }
  candidates.push_back({sorted.back() * 1.5 + 1e-9, sorted.back() * 0.5});

  double best_acc = -1.0, best_width = -1.0;
  for (const auto& c : candidates) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < clips.size(); ++i) {
      const Category predicted =
          out.distances[i] < c.threshold ? tags[i] : Category::kNonToxic;
      if (predicted == clips[i].label) ++correct;
    }
    const double acc = static_cast<double>(correct) / clips.size();
    if (acc > best_acc || (acc == best_acc && c.width > best_width)) {
      best_acc = acc;
      best_width = c.width;
      out.threshold = c.threshold;
    }
  }
  out.accuracy = best_acc;
  return out;
}

}  // namespace audiomt::spotter
