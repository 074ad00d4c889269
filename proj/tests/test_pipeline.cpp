// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "enhance.hpp"
#include "metrics.hpp"
#include "tensor_file.hpp"
#include "wav.hpp"

using namespace tapbeam;
namespace fs = std::filesystem;

namespace {

std::string slurp_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_root() {
  return fs::current_path() / "test_tmp" / "pipeline";
}

// Three short two-mic utterances, generated once and reused by every case.
const fs::path &tiny_corpus() {
  static fs::path dir = [] {
    fs::path d = work_root() / "corpus";
    fs::remove_all(d);
    CorpusConfig cfg;
    cfg.num_utterances = 3;
    cfg.duration_s = Range{1.0, 1.4};
    cfg.min_speakers = 1;
    cfg.max_speakers = 2;
    cfg.room_xy = Range{4.0, 5.0};
    cfg.max_order = 6;
    cfg.rir_length = 1024;
    cfg.array = "linear2";
    cfg.source_distance_m = Range{0.8, 1.2};
    generate_corpus(cfg, 11, d.string(), 2);
    return d;
  }();
  return dir;
}

EnhanceOptions mvdr_options() {
  EnhanceOptions o;
  o.method = Method::Mvdr;
  return o;
}

}  // namespace

TEST_CASE("oracle enhancement writes outputs and a manifest") {
  fs::path out = work_root() / "mvdr";
  fs::remove_all(out);
  enhance_corpus(tiny_corpus().string(), out.string(), mvdr_options(), 2);

  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  REQUIRE(idx.utterances.size() == 3);
  for (const auto &info : idx.utterances) {
    MultiChannelAudio enhanced = read_wav((out / (info.id + ".wav")).string());
    CHECK(enhanced.channels() == 1);
    CHECK(enhanced.num_samples() == info.num_samples);
  }

  nlohmann::json manifest = nlohmann::json::parse(slurp_file(out / "manifest.json"));
  CHECK(manifest["method"] == "mvdr");
  CHECK(manifest["taps"] == "0");
  CHECK(manifest["mask_source"] == "oracle");
  CHECK(manifest["ref_channel"] == 0);
  REQUIRE(manifest["utterances"].size() == 3);
  for (const auto &u : manifest["utterances"]) {
    CHECK(u["input_hash"].get<std::string>().size() == 16);
    CHECK(u["flagged_frequencies"].get<int>() >= 0);
  }
  CHECK(manifest["run_hash"].get<std::string>().size() == 16);
}

TEST_CASE("enhancement output does not depend on the job count") {
  fs::path out1 = work_root() / "jobs1";
  fs::path out3 = work_root() / "jobs3";
  fs::remove_all(out1);
  fs::remove_all(out3);
  EnhanceOptions o;
  o.method = Method::Wpdpp;
  enhance_corpus(tiny_corpus().string(), out1.string(), o, 1);
  enhance_corpus(tiny_corpus().string(), out3.string(), o, 3);

  CHECK(slurp_file(out1 / "manifest.json") == slurp_file(out3 / "manifest.json"));
  for (const char *id : {"u0000", "u0001", "u0002"}) {
    std::string a = slurp_file(out1 / (std::string(id) + ".wav"));
    CHECK(a == slurp_file(out3 / (std::string(id) + ".wav")));
    CHECK(!a.empty());
  }
}

TEST_CASE("a passthrough run scores exactly zero improvement") {
  fs::path out = work_root() / "passthrough";
  fs::remove_all(out);
  fs::create_directories(out);

  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  for (const auto &info : idx.utterances) {
    MultiChannelAudio mix =
        read_wav((tiny_corpus() / info.id / "mixture.wav").string());
    MultiChannelAudio mono;
    mono.sample_rate = mix.sample_rate;
    mono.samples = mix.samples.row(0);
    write_wav((out / (info.id + ".wav")).string(), mono, WavFormat::Float32);
  }
  {
    std::ofstream m(out / "manifest.json");
    m << "{\"method\": \"passthrough\", \"taps\": \"0\", \"ref_channel\": 0}\n";
  }

  MetricReport report = evaluate_corpus(idx, {out.string()}, 2);
  REQUIRE(report.rows.size() == 3);
  for (const auto &row : report.rows) {
    CHECK(row.method == "passthrough");
    // The estimate is bit-identical to the scored mixture channel.
    CHECK(std::abs(row.si_snri) < 1e-12);
  }
}

TEST_CASE("mask files reproduce the oracle masks bit for bit") {
  fs::path mask_dir = work_root() / "masks";
  fs::path out_file = work_root() / "mvdr_file";
  fs::path out_oracle = work_root() / "mvdr";  // written by the earlier case
  fs::remove_all(mask_dir);
  fs::remove_all(out_file);

  EnhanceOptions opts = mvdr_options();
  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  for (const auto &info : idx.utterances) {
    MultiChannelAudio mix =
        read_wav((tiny_corpus() / info.id / "mixture.wav").string());
    MultiChannelAudio dry =
        read_wav((tiny_corpus() / info.id / "dry_ref.wav").string());
    MultiChannelAudio ref_only;
    ref_only.sample_rate = mix.sample_rate;
    ref_only.samples = mix.samples.row(0);
    Spectrogram mix_spec = stft_analyze(ref_only, opts.stft);
    Spectrogram dry_spec = stft_analyze(dry, opts.stft);
    MaskSet masks = oracle_masks(dry_spec.channels[0], mix_spec.channels[0]);

    fs::create_directories(mask_dir / info.id);
    auto dump = [&](const Eigen::MatrixXcd &m, const char *name) {
      std::vector<std::complex<double>> values(m.data(), m.data() + m.size());
      write_complex_matrix((mask_dir / info.id / name).string(), values,
                           m.rows(), m.cols());
    };
    dump(masks.speech.values, "speech.tbt");
    dump(masks.noise.values, "noise.tbt");
  }

  opts.mask_source = "file";
  opts.mask_dir = mask_dir.string();
  enhance_corpus(tiny_corpus().string(), out_file.string(), opts, 2);

  // MVDR uses only the speech and noise masks, so file mode must reproduce
  // the oracle-mode audio exactly.
  REQUIRE(fs::exists(out_oracle / "u0000.wav"));
  for (const char *id : {"u0000", "u0001", "u0002"})
    CHECK(slurp_file(out_file / (std::string(id) + ".wav")) ==
          slurp_file(out_oracle / (std::string(id) + ".wav")));
}

TEST_CASE("oracle mask-only enhancement clearly beats the mixture") {
  fs::path out = work_root() / "maskonly";
  fs::remove_all(out);
  EnhanceOptions o;
  o.method = Method::MaskOnly;
  enhance_corpus(tiny_corpus().string(), out.string(), o, 2);

  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  MetricReport report = evaluate_corpus(idx, {out.string()}, 1);
  REQUIRE(report.rows.size() == 3);
  for (const auto &row : report.rows) {
    CHECK(row.si_snr_dry > 10.0);
    CHECK(row.si_snri > 3.0);
  }
}

TEST_CASE("aggregates are the means of the per-utterance rows") {
  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  fs::path mvdr = work_root() / "mvdr";
  fs::path pass = work_root() / "passthrough";
  REQUIRE(fs::exists(mvdr / "manifest.json"));
  REQUIRE(fs::exists(pass / "manifest.json"));

  MetricReport report =
      evaluate_corpus(idx, {mvdr.string(), pass.string()}, 2);
  REQUIRE(report.rows.size() == 6);

  nlohmann::json agg = nlohmann::json::parse(report_aggregate_json(report));
  REQUIRE(agg.is_array());
  REQUIRE(agg.size() == 2);
  for (const auto &entry : agg) {
    double sum = 0.0;
    int count = 0;
    for (const auto &row : report.rows)
      if (row.method == entry["method"].get<std::string>()) {
        sum += row.si_snri;
        count += 1;
      }
    REQUIRE(count == entry["count"].get<int>());
    CHECK(std::abs(entry["mean_si_snri"].get<double>() - sum / count) < 1e-9);

    int bucket_total = 0;
    for (const auto &[name, b] : entry["by_angle_bucket"].items()) {
      (void)name;
      bucket_total += b["count"].get<int>();
    }
    CHECK(bucket_total == count);
  }
}

TEST_CASE("csv report uses the pinned header and row format") {
  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  MetricReport report =
      evaluate_corpus(idx, {(work_root() / "mvdr").string()}, 1);
  std::string text = report_csv_text(report);

  std::istringstream lines(text);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "id,method,taps,n_spk,angle_bucket,si_snr_dry,si_snr_reverb,si_snri,"
        "pesq,wer");
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.substr(line.size() - 2) == ",,");
    CHECK(line.find(",\"0\",") != std::string::npos);  // taps quoted
    rows += 1;
  }
  CHECK(rows == 3);
}

TEST_CASE("option parsing accepts known keys and rejects the rest") {
  EnhanceOptions o = enhance_options_from_json(
      "{\"method\": \"wpd\", \"taps\": \"-2,0\", \"ref_channel\": 1}");
  CHECK(o.method == Method::Wpd);
  CHECK(o.taps == "-2,0");
  CHECK(o.solver.reference_channel == 1);

  EnhanceOptions round =
      enhance_options_from_json(enhance_options_to_json(o));
  CHECK(round.method == o.method);
  CHECK(round.taps == o.taps);
  CHECK(round.solver.reference_channel == 1);

  CHECK_THROWS_AS(enhance_options_from_json("{\"mode\": \"wpd\"}"), Error);
  CHECK_THROWS_AS(enhance_options_from_json("{\"method\": \"delay-sum\"}"),
                  Error);
  CHECK_THROWS_AS(enhance_options_from_json("{\"mask_source\": \"file\"}"),
                  Error);
  CHECK_THROWS_AS(enhance_options_from_json("{\"taps\": \"1,2\"}"), Error);
  CHECK_THROWS_AS(parse_method("beam"), Error);
  CHECK(parse_method("mask-only") == Method::MaskOnly);
  CHECK(default_taps(Method::Wpd) == "-3,0");
  CHECK(default_taps(Method::MtMvdr) == "-1,0,1");
}

TEST_CASE("evaluation requires a manifest in every scored directory") {
  CorpusIndex idx = load_corpus_index(tiny_corpus().string());
  fs::path empty = work_root() / "no_manifest";
  fs::create_directories(empty);
  CHECK_THROWS_AS(evaluate_corpus(idx, {empty.string()}, 1), Error);
  CHECK_THROWS_AS(evaluate_corpus(idx, {}, 1), Error);
}
