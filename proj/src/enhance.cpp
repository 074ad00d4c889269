// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "enhance.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <thread>

#include "common.hpp"
#include "tensor_file.hpp"
#include "wav.hpp"

namespace tapbeam {

namespace {

using nlohmann::json;

Eigen::MatrixXcd read_mask_plane(const std::string &path, int bins, int frames) {
  TensorFile t = read_tensor(path);
  require(t.dtype == "complex128", ErrorKind::Data,
          path + ": mask tensors must be complex128");
  require(t.shape.size() == 2 && t.shape[0] == bins && t.shape[1] == frames,
          ErrorKind::Data, path + ": mask shape does not match the mixture STFT");
  Eigen::MatrixXcd plane(bins, frames);
  for (int64_t i = 0; i < plane.size(); ++i)
    plane.data()[i] = std::complex<double>(t.data[2 * i], t.data[2 * i + 1]);
  return plane;
}

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

uint64_t hash_file(const std::string &path, uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Data, "cannot open " + path);
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    if (got > 0) h = fnv1a(buf, static_cast<size_t>(got), h);
  }
  return h;
}

}  // namespace

Method parse_method(const std::string &name) {
  if (name == "mvdr") return Method::Mvdr;
  if (name == "mtmvdr") return Method::MtMvdr;
  if (name == "wpd") return Method::Wpd;
  if (name == "wpdpp") return Method::Wpdpp;
  if (name == "mask-only") return Method::MaskOnly;
  throw Error(ErrorKind::Config, "unknown method: " + name);
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Mvdr: return "mvdr";
    case Method::MtMvdr: return "mtmvdr";
    case Method::Wpd: return "wpd";
    case Method::Wpdpp: return "wpdpp";
    case Method::MaskOnly: return "mask-only";
  }
  throw Error(ErrorKind::Config, "unknown method");
}

std::string default_taps(Method method) {
  switch (method) {
    case Method::Mvdr: return "0";
    case Method::MtMvdr: return "-1,0,1";
    case Method::Wpd: return "-3,0";
    case Method::Wpdpp: return "-1,0,1";
    case Method::MaskOnly: return "0";
  }
  throw Error(ErrorKind::Config, "unknown method");
}

TapSet EnhanceOptions::tap_set() const {
  return parse_taps(taps.empty() ? default_taps(method) : taps);
}

void EnhanceOptions::validate() const {
  solver.validate();
  stft.validate();
  require(mask_source == "oracle" || mask_source == "file", ErrorKind::Config,
          "mask_source must be \"oracle\" or \"file\"");
  require(mask_source != "file" || !mask_dir.empty(), ErrorKind::Config,
          "mask_source \"file\" needs mask_dir");
  tap_set();  // validates the tap syntax
}

EnhanceOptions enhance_options_from_json(const std::string &text) {
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
  } catch (const std::exception &e) {
    throw Error(ErrorKind::Config, std::string("bad options JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "options must be a JSON object");
  static const char *known[] = {"method",      "taps",     "mask_source",
                                "mask_dir",    "ref_channel",
                                "diagonal_loading", "max_loading_retries"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : known) ok = ok || it.key() == k;
    require(ok, ErrorKind::Config, "unknown option: " + it.key());
  }

  EnhanceOptions o;
  o.method = parse_method(j.value("method", std::string("wpdpp")));
  o.taps = j.value("taps", std::string());
  o.mask_source = j.value("mask_source", std::string("oracle"));
  o.mask_dir = j.value("mask_dir", std::string());
  o.solver.reference_channel = j.value("ref_channel", 0);
  o.solver.diagonal_loading = j.value("diagonal_loading", o.solver.diagonal_loading);
  o.solver.max_loading_retries =
      j.value("max_loading_retries", o.solver.max_loading_retries);
  o.validate();
  return o;
}

std::string enhance_options_to_json(const EnhanceOptions &o) {
  json j;
  j["method"] = method_name(o.method);
  j["taps"] = o.taps.empty() ? default_taps(o.method) : o.taps;
  j["mask_source"] = o.mask_source;
  if (!o.mask_dir.empty()) j["mask_dir"] = o.mask_dir;
  j["ref_channel"] = o.solver.reference_channel;
  j["diagonal_loading"] = o.solver.diagonal_loading;
  j["max_loading_retries"] = o.solver.max_loading_retries;
  return j.dump(2);
}

MaskSet oracle_masks(const Eigen::MatrixXcd &dry_ref,
                     const Eigen::MatrixXcd &mixture_ref) {
  MaskSet m;
  m.speech = oracle_cirm(dry_ref, mixture_ref, MaskRole::Speech);
  m.noise = oracle_cirm(mixture_ref - dry_ref, mixture_ref, MaskRole::Noise);
  m.sigma2 = oracle_sigma(dry_ref);
  return m;
}

MultiChannelAudio enhance_with_masks(const MultiChannelAudio &mixture,
                                     const MaskSet &masks,
                                     const EnhanceOptions &options,
                                     int *flagged_bins) {
  options.validate();
  const int ref = options.solver.reference_channel;
  require(ref >= 0 && ref < mixture.channels(), ErrorKind::Config,
          "reference channel out of range");

  Spectrogram spec = stft_analyze(mixture, options.stft);
  if (flagged_bins) *flagged_bins = 0;

  Spectrogram mono;
  if (options.method == Method::MaskOnly) {
    mono.config = spec.config;
    mono.num_samples = spec.num_samples;
    mono.channels.push_back(apply_mask(masks.speech, spec.channels[ref]));
  } else {
    TapSet taps = options.tap_set();
    StackedSpectrogram stacked = stack(spec, taps);
    FreqCovariance num = masked_covariance(stacked, masks.speech);
    BeamformerWeights w;
    switch (options.method) {
      case Method::Mvdr:
      case Method::MtMvdr: {
        FreqCovariance den = masked_covariance(stacked, masks.noise);
        w = solve_mvdr(den, num, taps, mixture.channels(), options.solver);
        break;
      }
      case Method::Wpd: {
        FreqCovariance den = sigma_weighted_covariance(stacked, masks.sigma2);
        w = solve_wpd(den, num, taps, mixture.channels(), options.solver);
        break;
      }
      case Method::Wpdpp: {
        FreqCovariance den = sigma_normalized_covariance(stacked, masks.sigma2);
        w = solve_wpdpp(den, num, taps, mixture.channels(), options.solver);
        break;
      }
      default:
        throw Error(ErrorKind::Config, "unhandled method");
    }
    if (flagged_bins) *flagged_bins = static_cast<int>(w.flagged.size());
    mono = apply_weights(w, stacked);
  }
  return stft_synthesize(mono);
}

MultiChannelAudio enhance_oracle(const MultiChannelAudio &mixture,
                                 const MultiChannelAudio &dry_ref,
                                 const EnhanceOptions &options,
                                 int *flagged_bins) {
  require(dry_ref.channels() == 1, ErrorKind::Data,
          "dry reference must be mono");
  require(dry_ref.num_samples() == mixture.num_samples(), ErrorKind::Data,
          "dry reference length does not match the mixture");
  const int ref = options.solver.reference_channel;
  require(ref >= 0 && ref < mixture.channels(), ErrorKind::Config,
          "reference channel out of range");

  Spectrogram dry_spec = stft_analyze(dry_ref, options.stft);
  MultiChannelAudio ref_only;
  ref_only.sample_rate = mixture.sample_rate;
  ref_only.samples = mixture.samples.row(ref);
  Spectrogram mix_ref = stft_analyze(ref_only, options.stft);

  MaskSet masks = oracle_masks(dry_spec.channels[0], mix_ref.channels[0]);
  return enhance_with_masks(mixture, masks, options, flagged_bins);
}

CorpusIndex load_corpus_index(const std::string &corpus_dir) {
  std::filesystem::path root(corpus_dir);
  std::ifstream in(root / "corpus.json");
  require(in.good(), ErrorKind::Data,
          "cannot open corpus index in " + corpus_dir);
  json j;
  try {
    in >> j;
  } catch (const std::exception &e) {
    throw Error(ErrorKind::Data, std::string("bad corpus index: ") + e.what());
  }

  CorpusIndex idx;
  idx.dir = corpus_dir;
  idx.sample_rate = j.value("sample_rate", 16000);
  idx.seed = j.value("seed", uint64_t{0});
  require(j.contains("utterances") && j["utterances"].is_array(),
          ErrorKind::Data, "corpus index lists no utterances");
  for (const auto &u : j["utterances"]) {
    UtteranceInfo info;
    info.id = u.at("id").get<std::string>();
    info.n_speakers = u.value("n_speakers", 0);
    info.sir_db = u.value("sir_db", 0.0);
    info.snr_db = u.value("snr_db", 0.0);
    info.min_interferer_angle_deg = u.value("min_interferer_angle_deg", -1.0);
    if (u.contains("source_angles_deg"))
      info.source_angles_deg = u["source_angles_deg"].get<std::vector<double>>();
    info.num_samples = u.value("num_samples", 0);
    idx.utterances.push_back(std::move(info));
  }
  return idx;
}

void enhance_corpus(const std::string &corpus_dir, const std::string &out_dir,
                    const EnhanceOptions &options, int jobs) {
  options.validate();
  CorpusIndex idx = load_corpus_index(corpus_dir);
  if (jobs <= 0) jobs = 1;

  std::filesystem::path in_root(corpus_dir);
  std::filesystem::path out_root(out_dir);
  std::filesystem::create_directories(out_root);

  const std::string config_text = enhance_options_to_json(options);
  const int n = static_cast<int>(idx.utterances.size());
  std::vector<std::string> hashes(n);
  std::vector<int> flagged(n, 0);

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const UtteranceInfo &info = idx.utterances[i];
        std::filesystem::path udir = in_root / info.id;
        std::string mix_path = (udir / "mixture.wav").string();
        MultiChannelAudio mixture = read_wav(mix_path);

        uint64_t h = fnv1a(config_text.data(), config_text.size());
        h = hash_file(mix_path, h);

        MultiChannelAudio enhanced;
        if (options.mask_source == "oracle") {
          std::string dry_path = (udir / "dry_ref.wav").string();
          MultiChannelAudio dry = read_wav(dry_path);
          h = hash_file(dry_path, h);
          enhanced = enhance_oracle(mixture, dry, options, &flagged[i]);
        } else {
          Spectrogram spec = stft_analyze(mixture, options.stft);
          std::filesystem::path mdir =
              std::filesystem::path(options.mask_dir) / info.id;
          const int bins = spec.num_bins();
          const int frames = spec.num_frames();
          MaskSet masks;
          masks.speech.values =
              read_mask_plane((mdir / "speech.tbt").string(), bins, frames);
          masks.speech.role = MaskRole::Speech;
          masks.noise.values =
              read_mask_plane((mdir / "noise.tbt").string(), bins, frames);
          masks.noise.role = MaskRole::Noise;
          h = hash_file((mdir / "speech.tbt").string(), h);
          h = hash_file((mdir / "noise.tbt").string(), h);
          ComplexMask sigma_mask = masks.speech;
          sigma_mask.role = MaskRole::Sigma;
          masks.sigma2 = sigma_from_mask(
              sigma_mask, spec.channels[options.solver.reference_channel]);
          enhanced = enhance_with_masks(mixture, masks, options, &flagged[i]);
        }
        hashes[i] = hex64(h);
        write_wav((out_root / (info.id + ".wav")).string(), enhanced,
                  WavFormat::Float32);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int threads = std::min(jobs, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  json manifest = json::parse(config_text);
  uint64_t run_hash = fnv1a(config_text.data(), config_text.size());
  json utts = json::array();
  for (int i = 0; i < n; ++i) {
    json u;
    u["id"] = idx.utterances[i].id;
    u["file"] = idx.utterances[i].id + ".wav";
    u["input_hash"] = hashes[i];
    u["flagged_frequencies"] = flagged[i];
    utts.push_back(u);
    run_hash = fnv1a(hashes[i].data(), hashes[i].size(), run_hash);
  }
  manifest["utterances"] = utts;
  manifest["run_hash"] = hex64(run_hash);

  std::ofstream out(out_root / "manifest.json");
  require(out.good(), ErrorKind::Data, "cannot write run manifest");
  out << manifest.dump(2) << "\n";
  require(out.good(), ErrorKind::Data, "failed writing run manifest");
}

}  // namespace tapbeam
