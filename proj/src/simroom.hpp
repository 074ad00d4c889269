// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "audio.hpp"
#include "rng.hpp"

namespace tapbeam {

struct ArrayGeometry {
  // One row per microphone, columns x/y/z in meters, centered on the origin.
  Eigen::MatrixXd positions;

  int num_mics() const { return static_cast<int>(positions.rows()); }
};

// Non-uniform linear arrays along the x axis. Supported names:
// linear2, linear4, linear8, linear15.
ArrayGeometry make_array(const std::string& name);

struct RoomSpec {
  Eigen::Vector3d size{6.0, 5.0, 3.0};
  double absorption = 0.4;  // uniform wall absorption coefficient
  int max_order = 20;       // max total reflection count per image
  int rir_length = 4096;    // samples
  double speed_of_sound = 343.0;
  int sample_rate = 16000;

  void validate() const;
};

// Image-source room impulse response for one source/mic pair.
Eigen::VectorXd image_source_rir(const RoomSpec& room,
                                 const Eigen::Vector3d& source,
                                 const Eigen::Vector3d& mic);

// Full convolution (length a + b - 1) via FFT.
Eigen::VectorXd fft_convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Convolves a source signal with per-mic RIRs, truncated to source length.
MultiChannelAudio render_source(const RoomSpec& room,
                                const Eigen::Vector3d& source,
                                const Eigen::MatrixXd& mic_positions,
                                const Eigen::VectorXd& signal);

// Synthetic speech-like excitation: harmonic source with wandering pitch,
// syllabic amplitude modulation and two formant-style resonators.
Eigen::VectorXd speechlike_source(int num_samples, int sample_rate, Rng& rng);

// Multiplies in an on/off utterance envelope with short linear ramps.
// The envelope never drops below gap_floor.
Eigen::VectorXd apply_gap_envelope(const Eigen::VectorXd& signal, int sample_rate,
                                   double gap_floor, Rng& rng);

struct MixtureSpec {
  RoomSpec room;
  ArrayGeometry array;
  Eigen::Vector3d array_center{0, 0, 0};
  std::vector<Eigen::Vector3d> sources;  // first entry is the target
  double sir_db = 0.0;                   // target vs summed interferers at ref mic
  double snr_db = 25.0;                  // target vs sensor noise at ref mic
  int ref_channel = 0;
  int duration_samples = 0;
  double gap_floor = 0.05;
};

struct MixtureBundle {
  MultiChannelAudio mixture;        // M channels
  MultiChannelAudio reverb_clean;   // reverberant target image, M channels
  MultiChannelAudio interference;   // interferers plus sensor noise, M channels
  MultiChannelAudio dry_ref;        // direct-path target at the ref mic, 1 channel
  std::vector<double> source_angles_deg;  // azimuth per source, from array center
  double min_interferer_angle_deg = -1.0; // smallest target/interferer separation
};

MixtureBundle simulate_mixture(const MixtureSpec& spec, Rng& rng);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct CorpusConfig {
  int num_utterances = 30;
  int sample_rate = 16000;
  Range duration_s{4.0, 6.0};
  int min_speakers = 2;
  int max_speakers = 3;
  Range sir_db{-6.0, 6.0};
  Range snr_db{18.0, 30.0};
  Range room_xy{4.0, 8.0};
  Range room_z{2.5, 3.5};
  Range absorption{0.2, 0.6};
  int max_order = 20;
  int rir_length = 4096;
  std::string array = "linear8";
  Range source_distance_m{0.8, 2.0};
  double gap_floor = 0.05;

  void validate() const;
};

CorpusConfig corpus_config_from_json(const std::string& text);
std::string corpus_config_to_json(const CorpusConfig& config);

struct UtteranceInfo {
  std::string id;
  int n_speakers = 0;
  double sir_db = 0.0;
  double snr_db = 0.0;
  double min_interferer_angle_deg = -1.0;
  std::vector<double> source_angles_deg;
  int num_samples = 0;
};

// Generates a corpus under out_dir: per-utterance WAV components plus a
// corpus.json index. Fully deterministic for a fixed (config, seed), with
// per-utterance seeds so the thread count does not matter.
std::vector<UtteranceInfo> generate_corpus(const CorpusConfig& config,
                                           std::uint64_t seed,
                                           const std::string& out_dir, int jobs);

}  // namespace tapbeam
