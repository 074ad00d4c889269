// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tapbeam.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <string>
#include <thread>

#include "common.hpp"
#include "enhance.hpp"
#include "metrics.hpp"
#include "pgm.hpp"
#include "simroom.hpp"
#include "stft.hpp"
#include "wav.hpp"

namespace {

thread_local std::string t_last_error;

tb_status fail(tb_status code, const std::string &msg) {
  t_last_error = msg;
  return code;
}

// Maps internal exceptions onto status codes and records the message.
template <typename Fn>
tb_status guarded(Fn &&fn) {
  try {
    fn();
    t_last_error.clear();
    return TB_OK;
  } catch (const tapbeam::Error &e) {
    return fail(static_cast<tb_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc &) {
    return fail(TB_ERROR_NUMERIC, "out of memory");
  } catch (const std::exception &e) {
    return fail(TB_ERROR_DATA, e.what());
  }
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  if (const char *env = std::getenv("TAPBEAM_JOBS")) {
    char *end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string text_or_empty(const char *s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

const char *tb_version(void) { return "1.0.0"; }

const char *tb_last_error(void) { return t_last_error.c_str(); }

tb_status tb_simulate(const char *config_json, const char *out_dir,
                      uint64_t seed, int jobs) {
  return guarded([&]() {
    tapbeam::require(out_dir != nullptr, tapbeam::ErrorKind::Config,
                     "out_dir is required");
    std::string text = text_or_empty(config_json);
    if (text.empty()) text = "{}";
    tapbeam::CorpusConfig cfg = tapbeam::corpus_config_from_json(text);
    tapbeam::generate_corpus(cfg, seed, out_dir, resolve_jobs(jobs));
  });
}

tb_status tb_enhance(const char *corpus_dir, const char *options_json,
                     const char *out_dir, int jobs) {
  return guarded([&]() {
    tapbeam::require(corpus_dir != nullptr && out_dir != nullptr,
                     tapbeam::ErrorKind::Config,
                     "corpus_dir and out_dir are required");
    tapbeam::EnhanceOptions options =
        tapbeam::enhance_options_from_json(text_or_empty(options_json));
    tapbeam::enhance_corpus(corpus_dir, out_dir, options, resolve_jobs(jobs));
  });
}

tb_status tb_evaluate(const char *corpus_dir, const char *const *enhanced_dirs,
                      int n_dirs, const char *csv_path, const char *json_path) {
  return guarded([&]() {
    tapbeam::require(corpus_dir != nullptr, tapbeam::ErrorKind::Config,
                     "corpus_dir is required");
    tapbeam::require(enhanced_dirs != nullptr && n_dirs > 0,
                     tapbeam::ErrorKind::Config,
                     "at least one enhanced directory is required");
    std::vector<std::string> dirs;
    for (int i = 0; i < n_dirs; ++i) {
      tapbeam::require(enhanced_dirs[i] != nullptr, tapbeam::ErrorKind::Config,
                       "null enhanced directory");
      dirs.emplace_back(enhanced_dirs[i]);
    }
    tapbeam::CorpusIndex corpus = tapbeam::load_corpus_index(corpus_dir);
    tapbeam::MetricReport report =
        tapbeam::evaluate_corpus(corpus, dirs, resolve_jobs(0));
    if (csv_path) tapbeam::write_report_csv(report, csv_path);
    if (json_path) {
      std::string text = tapbeam::report_aggregate_json(report);
      FILE *f = std::fopen(json_path, "wb");
      tapbeam::require(f != nullptr, tapbeam::ErrorKind::Data,
                       std::string("cannot write ") + json_path);
      size_t written = std::fwrite(text.data(), 1, text.size(), f);
      std::fputc('\n', f);
      int rc = std::fclose(f);
      tapbeam::require(written == text.size() && rc == 0,
                       tapbeam::ErrorKind::Data,
                       std::string("failed writing ") + json_path);
    }
  });
}

tb_status tb_spectrogram(const char *wav_path, const char *image_path,
                         const char *options_json) {
  return guarded([&]() {
    tapbeam::require(wav_path != nullptr && image_path != nullptr,
                     tapbeam::ErrorKind::Config,
                     "wav_path and image_path are required");
    nlohmann::json j;
    std::string text = text_or_empty(options_json);
    try {
      j = text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
    } catch (const std::exception &e) {
      throw tapbeam::Error(tapbeam::ErrorKind::Config,
                           std::string("bad options JSON: ") + e.what());
    }
    tapbeam::StftConfig cfg;
    cfg.window_len = j.value("window_len", cfg.window_len);
    cfg.hop = j.value("hop", cfg.hop);
    cfg.fft_len = cfg.window_len;
    int channel = j.value("channel", 0);

    tapbeam::MultiChannelAudio audio = tapbeam::read_wav(wav_path);
    cfg.sample_rate = audio.sample_rate;
    tapbeam::require(channel >= 0 && channel < audio.channels(),
                     tapbeam::ErrorKind::Config, "channel out of range");
    tapbeam::Spectrogram spec = tapbeam::stft_analyze(audio, cfg);
    const Eigen::MatrixXcd &plane = spec.channels[channel];

    // Log magnitude with a fixed 80 dB window below the peak; silence maps
    // to uniform black.
    const int bins = spec.num_bins();
    const int frames = spec.num_frames();
    Eigen::MatrixXd db(bins, frames);
    for (int t = 0; t < frames; ++t)
      for (int f = 0; f < bins; ++f)
        db(f, t) = 10.0 * std::log10(std::norm(plane(f, t)) + 1e-30);
    double peak = db.maxCoeff();
    Eigen::MatrixXd gray = Eigen::MatrixXd::Zero(bins, frames);
    if (peak > -250.0) {
      for (int t = 0; t < frames; ++t)
        for (int f = 0; f < bins; ++f) {
          double v = (db(f, t) - (peak - 80.0)) / 80.0;
          // Row 0 is the top of the image: highest frequency first.
          gray(bins - 1 - f, t) = std::clamp(v, 0.0, 1.0) * 255.0;
        }
    }
    tapbeam::write_pgm(image_path, gray);
  });
}

struct tb_enhancer {
  tapbeam::EnhanceOptions options;
};

tb_enhancer *tb_enhancer_create(const char *options_json, tb_status *status) {
  tb_enhancer *handle = nullptr;
  tb_status rc = guarded([&]() {
    handle = new tb_enhancer{
        tapbeam::enhance_options_from_json(text_or_empty(options_json))};
  });
  if (status) *status = rc;
  return rc == TB_OK ? handle : nullptr;
}

void tb_enhancer_destroy(tb_enhancer *handle) { delete handle; }

namespace {

tapbeam::MultiChannelAudio wrap_mixture(const double *mixture, int num_channels,
                                        int64_t num_samples, int sample_rate) {
  tapbeam::require(mixture != nullptr, tapbeam::ErrorKind::Config,
                   "mixture buffer is null");
  tapbeam::require(num_channels > 0 && num_samples > 0,
                   tapbeam::ErrorKind::Config, "empty mixture");
  tapbeam::MultiChannelAudio audio;
  audio.sample_rate = sample_rate;
  audio.samples.resize(num_channels, num_samples);
  for (int m = 0; m < num_channels; ++m)
    for (int64_t i = 0; i < num_samples; ++i)
      audio.samples(m, i) = mixture[m * num_samples + i];
  return audio;
}

void export_mono(const tapbeam::MultiChannelAudio &audio, double **out_samples,
                 int64_t *out_num_samples) {
  tapbeam::require(out_samples != nullptr && out_num_samples != nullptr,
                   tapbeam::ErrorKind::Config, "null output pointers");
  int64_t n = audio.num_samples();
  double *buf = static_cast<double *>(std::malloc(sizeof(double) * n));
  tapbeam::require(buf != nullptr, tapbeam::ErrorKind::Numeric, "out of memory");
  for (int64_t i = 0; i < n; ++i) buf[i] = audio.samples(0, i);
  *out_samples = buf;
  *out_num_samples = n;
}

Eigen::MatrixXcd complex_plane(const double *interleaved, int bins, int frames,
                               const char *what) {
  tapbeam::require(interleaved != nullptr, tapbeam::ErrorKind::Config,
                   std::string(what) + " buffer is null");
  Eigen::MatrixXcd plane(bins, frames);
  for (int64_t i = 0; i < plane.size(); ++i)
    plane.data()[i] =
        std::complex<double>(interleaved[2 * i], interleaved[2 * i + 1]);
  return plane;
}

}  // namespace

tb_status tb_enhancer_process_oracle(tb_enhancer *handle, const double *mixture,
                                     int num_channels, int64_t num_samples,
                                     int sample_rate, const double *dry_ref,
                                     double **out_samples,
                                     int64_t *out_num_samples) {
  return guarded([&]() {
    tapbeam::require(handle != nullptr, tapbeam::ErrorKind::Config,
                     "null enhancer handle");
    tapbeam::require(dry_ref != nullptr, tapbeam::ErrorKind::Config,
                     "dry reference buffer is null");
    tapbeam::MultiChannelAudio mix =
        wrap_mixture(mixture, num_channels, num_samples, sample_rate);
    tapbeam::MultiChannelAudio dry;
    dry.sample_rate = sample_rate;
    dry.samples.resize(1, num_samples);
    for (int64_t i = 0; i < num_samples; ++i) dry.samples(0, i) = dry_ref[i];
    tapbeam::MultiChannelAudio out =
        tapbeam::enhance_oracle(mix, dry, handle->options);
    export_mono(out, out_samples, out_num_samples);
  });
}

tb_status tb_enhancer_process_masks(tb_enhancer *handle, const double *mixture,
                                    int num_channels, int64_t num_samples,
                                    int sample_rate, const double *speech_mask,
                                    const double *noise_mask,
                                    const double *sigma_mask,
                                    double **out_samples,
                                    int64_t *out_num_samples) {
  return guarded([&]() {
    tapbeam::require(handle != nullptr, tapbeam::ErrorKind::Config,
                     "null enhancer handle");
    tapbeam::MultiChannelAudio mix =
        wrap_mixture(mixture, num_channels, num_samples, sample_rate);
    tapbeam::Spectrogram spec = tapbeam::stft_analyze(mix, handle->options.stft);
    const int bins = spec.num_bins();
    const int frames = spec.num_frames();

    tapbeam::MaskSet masks;
    masks.speech.values = complex_plane(speech_mask, bins, frames, "speech mask");
    masks.speech.role = tapbeam::MaskRole::Speech;
    masks.noise.values = complex_plane(noise_mask, bins, frames, "noise mask");
    masks.noise.role = tapbeam::MaskRole::Noise;

    // sigma^2 comes from the sigma mask when given, else from the speech
    // mask, applied to the reference-channel mixture.
    tapbeam::ComplexMask sig;
    sig.role = tapbeam::MaskRole::Sigma;
    sig.values = sigma_mask != nullptr
                     ? complex_plane(sigma_mask, bins, frames, "sigma mask")
                     : masks.speech.values;
    int ref = handle->options.solver.reference_channel;
    tapbeam::require(ref >= 0 && ref < mix.channels(),
                     tapbeam::ErrorKind::Config,
                     "reference channel out of range");
    masks.sigma2 = tapbeam::sigma_from_mask(sig, spec.channels[ref]);

    tapbeam::MultiChannelAudio out =
        tapbeam::enhance_with_masks(mix, masks, handle->options);
    export_mono(out, out_samples, out_num_samples);
  });
}

}  // extern "C"
