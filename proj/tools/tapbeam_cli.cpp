// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Batch front end for the tapbeam shared library: corpus simulation,
// mask-based beamforming, scoring, and spectrogram rendering.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tapbeam.h"

namespace {

int report(tb_status rc) {
  if (rc == TB_OK) return 0;
  std::fprintf(stderr, "error: %s\n", tb_last_error());
  return static_cast<int>(rc);
}

std::string json_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"tapbeam: mask-based multichannel speech separation and "
               "dereverberation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tb_version()));

  // simulate
  auto *sim = app.add_subcommand("simulate", "Generate a reverberant corpus");
  std::string sim_config, sim_out;
  uint64_t sim_seed = 0;
  int sim_jobs = 0;
  sim->add_option("--config", sim_config, "Corpus config JSON file");
  sim->add_option("--out", sim_out, "Output corpus directory")->required();
  sim->add_option("--seed", sim_seed, "Corpus seed");
  sim->add_option("--jobs", sim_jobs,
                  "Worker threads (0 = TAPBEAM_JOBS or all cores)");

  // enhance
  auto *enh = app.add_subcommand("enhance", "Beamform every corpus utterance");
  std::string enh_corpus, enh_out, enh_method = "wpdpp", enh_taps;
  std::string enh_mask_source = "oracle", enh_mask_dir;
  int enh_ref = 0, enh_jobs = 0;
  double enh_loading = 1e-5;
  enh->add_option("--corpus", enh_corpus, "Corpus directory")->required();
  enh->add_option("--out", enh_out, "Output directory")->required();
  enh->add_option("--method", enh_method,
                  "mvdr, mtmvdr, wpd, wpdpp, or mask-only");
  enh->add_option("--taps", enh_taps,
                  "Tap offsets, e.g. \"-1,0,1\" or \"-3[0:6],0\"");
  enh->add_option("--mask-source", enh_mask_source, "oracle or file");
  enh->add_option("--mask-dir", enh_mask_dir,
                  "Directory of per-utterance mask tensors (mask-source=file)");
  enh->add_option("--ref-channel", enh_ref, "Reference microphone");
  enh->add_option("--diagonal-loading", enh_loading,
                  "Relative diagonal loading for covariance solves");
  enh->add_option("--jobs", enh_jobs,
                  "Worker threads (0 = TAPBEAM_JOBS or all cores)");

  // evaluate
  auto *eval = app.add_subcommand("evaluate", "Score enhanced outputs");
  std::string eval_corpus, eval_csv, eval_json;
  std::vector<std::string> eval_dirs;
  eval->add_option("--corpus", eval_corpus, "Corpus directory")->required();
  eval->add_option("--enhanced", eval_dirs, "Enhanced output directories")
      ->required()
      ->expected(-1);
  eval->add_option("--csv", eval_csv, "Per-utterance CSV report path");
  eval->add_option("--json", eval_json, "Aggregate JSON report path");

  // spectrogram
  auto *spg = app.add_subcommand("spectrogram",
                                 "Render a log-magnitude spectrogram to PGM");
  std::string spg_in, spg_out;
  int spg_window = 512, spg_hop = 256, spg_channel = 0;
  spg->add_option("--in", spg_in, "Input WAV")->required();
  spg->add_option("--out", spg_out, "Output PGM image")->required();
  spg->add_option("--window", spg_window, "Analysis window length");
  spg->add_option("--hop", spg_hop, "Analysis hop");
  spg->add_option("--channel", spg_channel, "Channel to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  if (sim->parsed()) {
    std::string config = "{}";
    if (!sim_config.empty()) {
      std::ifstream in(sim_config);
      if (!in.good()) {
        std::fprintf(stderr, "error: cannot read config %s\n",
                     sim_config.c_str());
        return 2;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      config = ss.str();
    }
    return report(tb_simulate(config.c_str(), sim_out.c_str(), sim_seed,
                              sim_jobs));
  }

  if (enh->parsed()) {
    std::ostringstream opts;
    opts << "{\"method\":\"" << json_escape(enh_method) << "\""
         << ",\"mask_source\":\"" << json_escape(enh_mask_source) << "\""
         << ",\"ref_channel\":" << enh_ref
         << ",\"diagonal_loading\":" << enh_loading;
    if (!enh_taps.empty())
      opts << ",\"taps\":\"" << json_escape(enh_taps) << "\"";
    if (!enh_mask_dir.empty())
      opts << ",\"mask_dir\":\"" << json_escape(enh_mask_dir) << "\"";
    opts << "}";
    return report(tb_enhance(enh_corpus.c_str(), opts.str().c_str(),
                             enh_out.c_str(), enh_jobs));
  }

  if (eval->parsed()) {
    if (eval_csv.empty() && eval_json.empty()) {
      std::fprintf(stderr, "error: pass --csv and/or --json\n");
      return 2;
    }
    std::vector<const char *> dirs;
    for (const auto &d : eval_dirs) dirs.push_back(d.c_str());
    return report(tb_evaluate(eval_corpus.c_str(), dirs.data(),
                              static_cast<int>(dirs.size()),
                              eval_csv.empty() ? nullptr : eval_csv.c_str(),
                              eval_json.empty() ? nullptr : eval_json.c_str()));
  }

  if (spg->parsed()) {
    std::ostringstream opts;
    opts << "{\"window_len\":" << spg_window << ",\"hop\":" << spg_hop
         << ",\"channel\":" << spg_channel << "}";
    return report(tb_spectrogram(spg_in.c_str(), spg_out.c_str(),
                                 opts.str().c_str()));
  }

  return 2;
}
