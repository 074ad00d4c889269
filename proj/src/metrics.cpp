// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "metrics.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "common.hpp"
#include "loss.hpp"
#include "wav.hpp"

namespace tapbeam {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct RunInfo {
  std::string dir;
  std::string method;
  std::string taps;
  int ref_channel = 0;
};

RunInfo load_manifest(const std::string &dir) {
  std::ifstream in(std::filesystem::path(dir) / "manifest.json");
  require(in.good(), ErrorKind::Data, "no manifest.json in " + dir);
  json j;
  try {
    in >> j;
  } catch (const std::exception &e) {
    throw Error(ErrorKind::Data, dir + ": bad manifest: " + e.what());
  }
  RunInfo info;
  info.dir = dir;
  info.method = j.value("method", std::string("unknown"));
  info.taps = j.value("taps", std::string());
  info.ref_channel = j.value("ref_channel", 0);
  return info;
}

}  // namespace

double si_snr_metric(const Eigen::VectorXd &estimate,
                     const Eigen::VectorXd &reference) {
  return si_snr(estimate, reference).value;
}

std::string angle_bucket(double a) {
  if (a < 0) return "none";
  if (a <= 15.0) return "0-15";
  if (a <= 45.0) return "15-45";
  if (a <= 90.0) return "45-90";
  return "90-180";
}

MetricReport evaluate_corpus(const CorpusIndex &corpus,
                             const std::vector<std::string> &enhanced_dirs,
                             int jobs) {
  require(!enhanced_dirs.empty(), ErrorKind::Config,
          "no enhanced directories to score");
  if (jobs <= 0) jobs = 1;

  std::vector<RunInfo> runs;
  for (const auto &dir : enhanced_dirs) runs.push_back(load_manifest(dir));

  const int nu = static_cast<int>(corpus.utterances.size());
  const int total = static_cast<int>(runs.size()) * nu;
  MetricReport report;
  report.rows.resize(total);

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      int k = next.fetch_add(1);
      if (k >= total) return;
      try {
        const RunInfo &run = runs[k / nu];
        const UtteranceInfo &info = corpus.utterances[k % nu];
        std::filesystem::path udir =
            std::filesystem::path(corpus.dir) / info.id;

        MultiChannelAudio enhanced =
            read_wav((std::filesystem::path(run.dir) / (info.id + ".wav")).string());
        require(enhanced.channels() == 1, ErrorKind::Data,
                info.id + ": enhanced output must be mono");
        MultiChannelAudio mixture = read_wav((udir / "mixture.wav").string());
        MultiChannelAudio dry = read_wav((udir / "dry_ref.wav").string());
        MultiChannelAudio reverb = read_wav((udir / "reverb_clean.wav").string());
        require(enhanced.num_samples() == mixture.num_samples(),
                ErrorKind::Data, info.id + ": enhanced length mismatch");
        require(run.ref_channel >= 0 && run.ref_channel < mixture.channels(),
                ErrorKind::Data, info.id + ": reference channel out of range");

        Eigen::VectorXd est = enhanced.samples.row(0);
        Eigen::VectorXd dry_ref = dry.samples.row(0);
        Eigen::VectorXd reverb_ref = reverb.samples.row(run.ref_channel);
        Eigen::VectorXd mix_ref = mixture.samples.row(run.ref_channel);

        UtteranceScore row;
        row.id = info.id;
        row.method = run.method;
        row.taps = run.taps;
        row.n_spk = info.n_speakers;
        row.bucket = angle_bucket(info.min_interferer_angle_deg);
        row.si_snr_dry = si_snr_metric(est, dry_ref);
        row.si_snr_reverb = si_snr_metric(est, reverb_ref);
        row.si_snri = row.si_snr_dry - si_snr_metric(mix_ref, dry_ref);
        report.rows[k] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int threads = std::min(jobs, total);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return report;
}

std::string report_csv_text(const MetricReport &report) {
  std::ostringstream out;
  out << "id,method,taps,n_spk,angle_bucket,si_snr_dry,si_snr_reverb,si_snri,"
         "pesq,wer\n";
  for (const auto &r : report.rows) {
    out << r.id << ',' << r.method << ",\"" << r.taps << "\"," << r.n_spk
        << ',' << r.bucket << ',' << fmt(r.si_snr_dry) << ','
        << fmt(r.si_snr_reverb) << ',' << fmt(r.si_snri) << ",,\n";
  }
  return out.str();
}

void write_report_csv(const MetricReport &report, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Data, "cannot write " + path);
  out << report_csv_text(report);
  require(out.good(), ErrorKind::Data, "failed writing " + path);
}

std::string report_aggregate_json(const MetricReport &report) {
  struct Sum {
    int count = 0;
    double dry = 0, reverb = 0, snri = 0;
  };
  // Keyed by method|taps; sub-breakdowns by bucket and speaker count.
  std::map<std::string, Sum> totals;
  std::map<std::string, std::map<std::string, Sum>> by_bucket;
  std::map<std::string, std::map<std::string, Sum>> by_spk;

  for (const auto &r : report.rows) {
    std::string key = r.method + "|" + r.taps;
    auto add = [&](Sum &s) {
      s.count += 1;
      s.dry += r.si_snr_dry;
      s.reverb += r.si_snr_reverb;
      s.snri += r.si_snri;
    };
    add(totals[key]);
    add(by_bucket[key][r.bucket]);
    add(by_spk[key][std::to_string(r.n_spk) + "spk"]);
  }

  json out = json::array();
  for (const auto &[key, sum] : totals) {
    auto bar = key.find('|');
    json entry;
    entry["method"] = key.substr(0, bar);
    entry["taps"] = key.substr(bar + 1);
    entry["count"] = sum.count;
    entry["mean_si_snr_dry"] = sum.dry / sum.count;
    entry["mean_si_snr_reverb"] = sum.reverb / sum.count;
    entry["mean_si_snri"] = sum.snri / sum.count;
    json buckets = json::object();
    for (const auto &[b, s] : by_bucket[key]) {
      buckets[b] = {{"count", s.count}, {"mean_si_snri", s.snri / s.count}};
    }
    entry["by_angle_bucket"] = buckets;
    json spk = json::object();
    for (const auto &[b, s] : by_spk[key]) {
      spk[b] = {{"count", s.count}, {"mean_si_snri", s.snri / s.count}};
    }
    entry["by_speakers"] = spk;
    out.push_back(entry);
  }
  return out.dump(2);
}

}  // namespace tapbeam
