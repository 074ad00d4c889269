// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "beamform.hpp"
#include "mask.hpp"
#include "simroom.hpp"
#include "stft.hpp"
#include "tapstack.hpp"

namespace tapbeam {

enum class Method {
  Mvdr,
  MtMvdr,
  Wpd,
  Wpdpp,
  MaskOnly,
};

Method parse_method(const std::string &name);
std::string method_name(Method method);

// Per-method default tap layouts.
std::string default_taps(Method method);

struct EnhanceOptions {
  Method method = Method::Wpdpp;
  std::string taps;  // empty = default_taps(method)
  std::string mask_source = "oracle";  // "oracle" or "file"
  std::string mask_dir;                // required when mask_source = "file"
  SolverConfig solver;
  StftConfig stft;

  TapSet tap_set() const;
  void validate() const;
};

EnhanceOptions enhance_options_from_json(const std::string &text);
std::string enhance_options_to_json(const EnhanceOptions &options);

struct MaskSet {
  ComplexMask speech;
  ComplexMask noise;
  SigmaPower sigma2;
};

// Oracle masks from the stored components: the speech mask maps the mixture
// to the direct-path target, the noise mask maps it to everything else, and
// sigma^2 is the dry-clean power.
MaskSet oracle_masks(const Eigen::MatrixXcd &dry_ref,
                     const Eigen::MatrixXcd &mixture_ref);

// One utterance through the selected beamformer. Returns the enhanced mono
// signal; flagged_bins (optional) receives the count of frequencies that
// fell back to passthrough.
MultiChannelAudio enhance_with_masks(const MultiChannelAudio &mixture,
                                     const MaskSet &masks,
                                     const EnhanceOptions &options,
                                     int *flagged_bins = nullptr);

MultiChannelAudio enhance_oracle(const MultiChannelAudio &mixture,
                                 const MultiChannelAudio &dry_ref,
                                 const EnhanceOptions &options,
                                 int *flagged_bins = nullptr);

// Index of a generated corpus directory.
struct CorpusIndex {
  int sample_rate = 16000;
  uint64_t seed = 0;
  std::vector<UtteranceInfo> utterances;
  std::string dir;
};

CorpusIndex load_corpus_index(const std::string &corpus_dir);

// Enhances every utterance, writing <id>.wav plus manifest.json under
// out_dir. Deterministic and independent of the job count.
void enhance_corpus(const std::string &corpus_dir, const std::string &out_dir,
                    const EnhanceOptions &options, int jobs);

}  // namespace tapbeam
