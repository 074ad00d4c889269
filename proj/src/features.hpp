// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "simroom.hpp"
#include "stft.hpp"

namespace tapbeam {

using MicPair = std::pair<int, int>;

// Adjacent pairs plus the widest pair, duplicates removed.
std::vector<MicPair> default_pairs(int num_mics);

// Log-power spectrum log(|Y|^2 + 1e-12) of a single channel.
Eigen::MatrixXd lps(const Eigen::MatrixXcd &channel);

// Phase of Y_a * conj(Y_b) per pair, naturally wrapped to (-pi, pi].
std::vector<Eigen::MatrixXd> ipd(const Spectrogram &spec,
                                 const std::vector<MicPair> &pairs);

// Far-field plane-wave steering phases (M x F, unit magnitude) for a source
// at the given azimuth in the array plane.
Eigen::MatrixXcd steering_vector(const ArrayGeometry &geometry, double doa_deg,
                                 const StftConfig &cfg,
                                 double speed_of_sound = 343.0);

// Cosine similarity between observed pairwise phase-difference phasors and
// the steering-predicted ones, averaged uniformly over pairs. Bins where a
// pair product vanishes contribute 0 for that pair.
Eigen::MatrixXd directional_feature(const Spectrogram &spec,
                                    const Eigen::MatrixXcd &steering,
                                    const std::vector<MicPair> &pairs);

struct FeatureBlock {
  Eigen::MatrixXd lps;                // F x T
  std::vector<Eigen::MatrixXd> ipd;   // one F x T plane per pair
  Eigen::MatrixXd df;                 // F x T, values in [-1, 1]
  std::vector<MicPair> pairs;
};

// Full frontend block: LPS of channel 0, IPDs over pairs (default pairs when
// empty), and the directional feature for the given DOA.
FeatureBlock compute_features(const Spectrogram &spec,
                              const ArrayGeometry &geometry, double doa_deg,
                              std::vector<MicPair> pairs = {});

// Writes lps.tbt, ipd.tbt (pairs x F x T) and df.tbt under out_dir.
void dump_features(const FeatureBlock &block, const std::string &out_dir);

}  // namespace tapbeam
