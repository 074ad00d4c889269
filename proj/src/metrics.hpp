// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "enhance.hpp"

namespace tapbeam {

// Scale-invariant SNR in dB, higher is better, clipped to +/-60.
double si_snr_metric(const Eigen::VectorXd &estimate,
                     const Eigen::VectorXd &reference);

// Angle bucket labels matching the report breakdown: "0-15", "15-45",
// "45-90", "90-180", or "none" when there is no interferer.
std::string angle_bucket(double min_interferer_angle_deg);

struct UtteranceScore {
  std::string id;
  std::string method;
  std::string taps;
  int n_spk = 0;
  std::string bucket;
  double si_snr_dry = 0.0;     // enhanced vs direct-path target
  double si_snr_reverb = 0.0;  // enhanced vs reverberant target image
  double si_snri = 0.0;        // improvement over the unprocessed mixture
};

struct MetricReport {
  std::vector<UtteranceScore> rows;
};

// Scores every (enhanced dir x utterance) pair against the stored corpus
// references. Each directory must contain manifest.json from enhance_corpus
// (or an equivalent one naming method/taps/ref_channel).
MetricReport evaluate_corpus(const CorpusIndex &corpus,
                             const std::vector<std::string> &enhanced_dirs,
                             int jobs);

// One row per utterance x method; trailing pesq/wer columns stay empty so
// external scorers can join on id+method.
void write_report_csv(const MetricReport &report, const std::string &path);
std::string report_csv_text(const MetricReport &report);

// Per-method aggregates plus angle/speaker-count breakdowns.
std::string report_aggregate_json(const MetricReport &report);

}  // namespace tapbeam
