// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "simroom.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "common.hpp"
#include "stft.hpp"
#include "wav.hpp"

namespace tapbeam {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Half-width of the windowed-sinc fractional-delay kernel, in samples.
constexpr int kSincHalf = 40;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = kPi * x;
  return std::sin(px) / px;
}

// Adds amp * windowed_sinc(k - tau) into h around sample tau.
void windowed_sinc_add(Eigen::VectorXd &h, double tau, double amp) {
  int64_t len = h.size();
  int64_t k0 = std::max<int64_t>(static_cast<int64_t>(std::ceil(tau - kSincHalf)), 0);
  int64_t k1 = std::min<int64_t>(static_cast<int64_t>(std::floor(tau + kSincHalf)), len - 1);
  for (int64_t k = k0; k <= k1; ++k) {
    double x = static_cast<double>(k) - tau;
    double w = 0.5 * (1.0 + std::cos(kPi * x / (kSincHalf + 1)));
    h(k) += amp * w * sinc(x);
  }
}

double wrap_angle_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a < -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

// Rounds every sample to the float32 grid so that stored WAV components obey
// exact arithmetic identities after reload.
void quantize_f32(Eigen::MatrixXd &x) {
  for (int64_t j = 0; j < x.cols(); ++j)
    for (int64_t i = 0; i < x.rows(); ++i)
      x(i, j) = static_cast<double>(static_cast<float>(x(i, j)));
}

int next_pow2(int64_t n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

ArrayGeometry make_array(const std::string &name) {
  // Desk-scale non-uniform linear layouts; inter-mic spacing grows away from
  // the reference end so tap pairs span several aperture scales.
  static const double kEight[8] = {0.0, 0.02, 0.05, 0.09, 0.14, 0.20, 0.25, 0.30};
  std::vector<double> x;
  if (name == "linear2") {
    x = {0.0, 0.30};
  } else if (name == "linear4") {
    x = {0.0, 0.08, 0.18, 0.30};
  } else if (name == "linear8") {
    x.assign(kEight, kEight + 8);
  } else if (name == "linear15") {
    // Symmetric non-uniform layout, 70 cm aperture.
    static const double gaps[14] = {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08,
                                    0.08, 0.07, 0.06, 0.05, 0.04, 0.03, 0.02};
    x.push_back(0.0);
    for (double g : gaps) x.push_back(x.back() + g);
  } else {
    throw Error(ErrorKind::Config, "unknown array geometry: " + name);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  ArrayGeometry geo;
  geo.positions.setZero(static_cast<int>(x.size()), 3);
  for (size_t i = 0; i < x.size(); ++i) geo.positions(static_cast<int>(i), 0) = x[i] - mean;
  return geo;
}

void RoomSpec::validate() const {
  require(size.minCoeff() > 0.5, ErrorKind::Config, "room too small");
  require(absorption > 0.0 && absorption < 1.0, ErrorKind::Config,
          "absorption must lie in (0, 1)");
  require(max_order >= 0, ErrorKind::Config, "negative reflection order");
  require(rir_length > 0, ErrorKind::Config, "non-positive RIR length");
  require(speed_of_sound > 0 && sample_rate > 0, ErrorKind::Config,
          "bad physical constants");
}

Eigen::VectorXd image_source_rir(const RoomSpec &room, const Eigen::Vector3d &source,
                                 const Eigen::Vector3d &mic) {
  room.validate();
  for (int i = 0; i < 3; ++i) {
    require(source(i) > 0 && source(i) < room.size(i), ErrorKind::Config,
            "source outside room");
    require(mic(i) > 0 && mic(i) < room.size(i), ErrorKind::Config,
            "microphone outside room");
  }

  Eigen::VectorXd h = Eigen::VectorXd::Zero(room.rir_length);
  const double beta = std::sqrt(1.0 - room.absorption);
  const double fs = room.sample_rate;
  const double c = room.speed_of_sound;
  // Per axis the reflection count is |n - p| + |n| >= 2|n| - 1, so images
  // with |n| beyond (max_order + 1) / 2 cannot satisfy the total bound.
  const int nb = (room.max_order + 1) / 2;

  for (int nx = -nb; nx <= nb; ++nx) {
    for (int ny = -nb; ny <= nb; ++ny) {
      for (int nz = -nb; nz <= nb; ++nz) {
        for (int px = 0; px <= 1; ++px) {
          for (int py = 0; py <= 1; ++py) {
            for (int pz = 0; pz <= 1; ++pz) {
              int refl = std::abs(nx - px) + std::abs(nx) + std::abs(ny - py) +
                         std::abs(ny) + std::abs(nz - pz) + std::abs(nz);
              if (refl > room.max_order) continue;
              Eigen::Vector3d pos(
                  (1 - 2 * px) * source.x() + 2.0 * nx * room.size.x(),
                  (1 - 2 * py) * source.y() + 2.0 * ny * room.size.y(),
                  (1 - 2 * pz) * source.z() + 2.0 * nz * room.size.z());
              double d = (pos - mic).norm();
              double tau = fs * d / c;
              if (tau >= room.rir_length + kSincHalf + 1) continue;
              double g = std::pow(beta, refl);
              windowed_sinc_add(h, tau, g / (4.0 * kPi * std::max(d, 1e-2)));
            }
          }
        }
      }
    }
  }
  return h;
}

Eigen::VectorXd fft_convolve(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  require(a.size() > 0 && b.size() > 0, ErrorKind::Config, "empty convolution input");
  int64_t out_len = a.size() + b.size() - 1;
  int n = next_pow2(out_len);
  Eigen::VectorXcd fa = rfft(a, n);
  Eigen::VectorXcd fb = rfft(b, n);
  Eigen::VectorXd full = irfft(fa.cwiseProduct(fb), n);
  return full.head(out_len);
}

MultiChannelAudio render_source(const RoomSpec &room, const Eigen::Vector3d &source,
                                const Eigen::MatrixXd &mic_positions,
                                const Eigen::VectorXd &signal) {
  const int m = static_cast<int>(mic_positions.rows());
  require(m > 0, ErrorKind::Config, "no microphones");
  MultiChannelAudio out;
  out.sample_rate = room.sample_rate;
  out.samples.resize(m, signal.size());
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd rir = image_source_rir(room, source, mic_positions.row(i));
    out.samples.row(i) = fft_convolve(signal, rir).head(signal.size());
  }
  return out;
}

Eigen::VectorXd speechlike_source(int num_samples, int sample_rate, Rng &rng) {
  require(num_samples > 0 && sample_rate > 0, ErrorKind::Config,
          "bad source length");
  const int n = num_samples;
  const double fs = sample_rate;

  // Harmonic excitation with a slowly wandering pitch.
  double wander_hz = rng.uniform(0.1, 0.5);
  double wander_ph = rng.uniform(0.0, 2.0 * kPi);
  Eigen::VectorXd phase(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double f0 = 120.0 * (1.0 + 0.3 * std::sin(2.0 * kPi * wander_hz * i / fs + wander_ph));
    acc += f0;
    phase(i) = 2.0 * kPi * acc / fs;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int h = 1; h <= 11; ++h) {
    double amp = rng.uniform(0.5, 1.0) / h;
    double ph = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < n; ++i) x(i) += amp * std::sin(h * phase(i) + ph);
  }

  // Aspiration noise, lowpassed with a short moving average.
  Eigen::VectorXd noise(n);
  for (int i = 0; i < n; ++i) noise(i) = rng.normal();
  Eigen::VectorXd smooth(n);
  for (int i = 0; i < n; ++i) {
    int lo = std::max(i - 3, 0);
    int hi = std::min(i + 4, n - 1);
    smooth(i) = noise.segment(lo, hi - lo + 1).mean();
  }
  x += 0.4 * smooth;

  // Syllabic amplitude modulation.
  double env_hz = rng.uniform(2.0, 6.0);
  double env_ph = rng.uniform(0.0, 2.0 * kPi);
  for (int i = 0; i < n; ++i) {
    double env = 0.4 + 0.6 * 0.5 * (1.0 + std::sin(2.0 * kPi * env_hz * i / fs + env_ph));
    x(i) *= env;
  }

  // Two formant-style resonators, each followed by peak normalization.
  double centers[2] = {rng.uniform(400.0, 900.0), rng.uniform(1200.0, 2500.0)};
  double widths[2] = {200.0, 400.0};
  for (int s = 0; s < 2; ++s) {
    double r = std::exp(-kPi * widths[s] / fs);
    double th = 2.0 * kPi * centers[s] / fs;
    double a1 = 2.0 * r * std::cos(th);
    double a2 = -r * r;
    double y1 = 0.0, y2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double y = x(i) + a1 * y1 + a2 * y2;
      y2 = y1;
      y1 = y;
      x(i) = y;
    }
    x /= x.cwiseAbs().maxCoeff() + 1e-9;
  }
  x /= x.cwiseAbs().maxCoeff() + 1e-9;
  return x;
}

Eigen::VectorXd apply_gap_envelope(const Eigen::VectorXd &signal, int sample_rate,
                                   double gap_floor, Rng &rng) {
  require(gap_floor >= 0.0 && gap_floor < 1.0, ErrorKind::Config,
          "gap floor must lie in [0, 1)");
  const int64_t n = signal.size();
  const int ramp = sample_rate / 100;  // 10 ms linear edges
  Eigen::VectorXd env = Eigen::VectorXd::Zero(n);
  int64_t pos = 0;
  while (pos < n) {
    int64_t on_len = static_cast<int64_t>(sample_rate * rng.uniform(0.12, 0.35));
    int64_t off_len = static_cast<int64_t>(sample_rate * rng.uniform(0.05, 0.25));
    int64_t end = std::min(pos + on_len, n);
    for (int64_t i = pos; i < end; ++i) {
      double v = 1.0;
      if (i - pos < ramp) v = std::min(v, static_cast<double>(i - pos + 1) / ramp);
      if (end - 1 - i < ramp) v = std::min(v, static_cast<double>(end - i) / ramp);
      env(i) = v;
    }
    pos += on_len + off_len;
  }
  env = env.cwiseMax(gap_floor);
  return signal.cwiseProduct(env);
}

MixtureBundle simulate_mixture(const MixtureSpec &spec, Rng &rng) {
  spec.room.validate();
  const int m = spec.array.num_mics();
  require(m > 0, ErrorKind::Config, "empty array");
  require(!spec.sources.empty(), ErrorKind::Config, "no sources");
  require(spec.ref_channel >= 0 && spec.ref_channel < m, ErrorKind::Config,
          "reference channel out of range");
  require(spec.duration_samples > 0, ErrorKind::Config, "non-positive duration");

  const int n = spec.duration_samples;
  Eigen::MatrixXd mics = spec.array.positions;
  for (int i = 0; i < m; ++i) mics.row(i) += spec.array_center.transpose();

  // Source signals, target first.
  std::vector<Eigen::VectorXd> signals;
  for (size_t s = 0; s < spec.sources.size(); ++s) {
    Eigen::VectorXd sig = speechlike_source(n, spec.room.sample_rate, rng);
    signals.push_back(apply_gap_envelope(sig, spec.room.sample_rate, spec.gap_floor, rng));
  }

  MixtureBundle out;
  out.reverb_clean = render_source(spec.room, spec.sources[0], mics, signals[0]);

  // Direct-path target image at the reference microphone.
  RoomSpec direct = spec.room;
  direct.max_order = 0;
  out.dry_ref = render_source(direct, spec.sources[0],
                              mics.row(spec.ref_channel), signals[0]);

  const double target_pow =
      out.reverb_clean.samples.row(spec.ref_channel).squaredNorm() / n;

  // Summed interferers, scaled to the requested ratio at the reference mic.
  Eigen::MatrixXd interf = Eigen::MatrixXd::Zero(m, n);
  for (size_t s = 1; s < spec.sources.size(); ++s)
    interf += render_source(spec.room, spec.sources[s], mics, signals[s]).samples;
  if (spec.sources.size() > 1) {
    double pow_i = interf.row(spec.ref_channel).squaredNorm() / n;
    require(pow_i > 0, ErrorKind::Numeric, "silent interference");
    interf *= std::sqrt(target_pow / (pow_i * std::pow(10.0, spec.sir_db / 10.0)));
  }

  // White sensor noise at the requested ratio against the target image.
  Eigen::MatrixXd noise(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) noise(i, j) = rng.normal();
  double pow_n = noise.row(spec.ref_channel).squaredNorm() / n;
  noise *= std::sqrt(target_pow / (pow_n * std::pow(10.0, spec.snr_db / 10.0)));

  // Quantize the stored components to the float32 grid, then form the
  // mixture with one float32 rounding per sample so that
  // mixture == reverb_clean + interference holds exactly after reload.
  out.interference.sample_rate = spec.room.sample_rate;
  out.interference.samples = interf + noise;
  quantize_f32(out.reverb_clean.samples);
  quantize_f32(out.interference.samples);
  quantize_f32(out.dry_ref.samples);
  out.mixture.sample_rate = spec.room.sample_rate;
  out.mixture.samples.resize(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      out.mixture.samples(i, j) = static_cast<double>(static_cast<float>(
          out.reverb_clean.samples(i, j) + out.interference.samples(i, j)));

  // Azimuths as seen from the array center, and the tightest
  // target/interferer separation.
  for (const auto &src : spec.sources) {
    double az = std::atan2(src.y() - spec.array_center.y(),
                           src.x() - spec.array_center.x());
    out.source_angles_deg.push_back(az * 180.0 / kPi);
  }
  out.min_interferer_angle_deg = -1.0;
  for (size_t s = 1; s < spec.sources.size(); ++s) {
    double d = std::abs(wrap_angle_deg(out.source_angles_deg[0] -
                                       out.source_angles_deg[s]));
    if (out.min_interferer_angle_deg < 0 || d < out.min_interferer_angle_deg)
      out.min_interferer_angle_deg = d;
  }
  return out;
}

void CorpusConfig::validate() const {
  require(num_utterances > 0, ErrorKind::Config, "need at least one utterance");
  require(sample_rate > 0, ErrorKind::Config, "bad sample rate");
  require(duration_s.lo > 0 && duration_s.hi >= duration_s.lo, ErrorKind::Config,
          "bad duration range");
  require(min_speakers >= 1 && max_speakers >= min_speakers, ErrorKind::Config,
          "bad speaker count range");
  require(room_xy.lo > 1.0 && room_xy.hi >= room_xy.lo, ErrorKind::Config,
          "bad room size range");
  require(room_z.lo > 1.0 && room_z.hi >= room_z.lo, ErrorKind::Config,
          "bad room height range");
  require(absorption.lo > 0 && absorption.hi < 1 && absorption.hi >= absorption.lo,
          ErrorKind::Config, "bad absorption range");
  require(source_distance_m.lo > 0 && source_distance_m.hi >= source_distance_m.lo,
          ErrorKind::Config, "bad source distance range");
  require(gap_floor >= 0 && gap_floor < 1, ErrorKind::Config, "bad gap floor");
  require(max_order >= 0 && rir_length > 0, ErrorKind::Config, "bad room acoustics");
  make_array(array);
}

namespace {

using nlohmann::json;

Range range_from(const json &j, const char *key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const json &v = j.at(key);
  require(v.is_array() && v.size() == 2, ErrorKind::Config,
          std::string(key) + " must be a [lo, hi] pair");
  return Range{v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

CorpusConfig corpus_config_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception &e) {
    throw Error(ErrorKind::Config, std::string("bad corpus config JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "corpus config must be an object");
  static const char *known[] = {
      "num_utterances", "sample_rate", "duration_s", "n_speakers",
      "sir_db",         "snr_db",      "room_xy",    "room_z",
      "absorption",     "max_order",   "rir_length", "array",
      "source_distance_m", "gap_floor"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : known) ok = ok || it.key() == k;
    require(ok, ErrorKind::Config, "unknown corpus config key: " + it.key());
  }

  CorpusConfig c;
  c.num_utterances = j.value("num_utterances", c.num_utterances);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.duration_s = range_from(j, "duration_s", c.duration_s);
  if (j.contains("n_speakers")) {
    const json &v = j.at("n_speakers");
    require(v.is_array() && v.size() == 2, ErrorKind::Config,
            "n_speakers must be a [min, max] pair");
    c.min_speakers = v[0].get<int>();
    c.max_speakers = v[1].get<int>();
  }
  c.sir_db = range_from(j, "sir_db", c.sir_db);
  c.snr_db = range_from(j, "snr_db", c.snr_db);
  c.room_xy = range_from(j, "room_xy", c.room_xy);
  c.room_z = range_from(j, "room_z", c.room_z);
  c.absorption = range_from(j, "absorption", c.absorption);
  c.max_order = j.value("max_order", c.max_order);
  c.rir_length = j.value("rir_length", c.rir_length);
  c.array = j.value("array", c.array);
  c.source_distance_m = range_from(j, "source_distance_m", c.source_distance_m);
  c.gap_floor = j.value("gap_floor", c.gap_floor);
  c.validate();
  return c;
}

std::string corpus_config_to_json(const CorpusConfig &c) {
  json j;
  j["num_utterances"] = c.num_utterances;
  j["sample_rate"] = c.sample_rate;
  j["duration_s"] = {c.duration_s.lo, c.duration_s.hi};
  j["n_speakers"] = {c.min_speakers, c.max_speakers};
  j["sir_db"] = {c.sir_db.lo, c.sir_db.hi};
  j["snr_db"] = {c.snr_db.lo, c.snr_db.hi};
  j["room_xy"] = {c.room_xy.lo, c.room_xy.hi};
  j["room_z"] = {c.room_z.lo, c.room_z.hi};
  j["absorption"] = {c.absorption.lo, c.absorption.hi};
  j["max_order"] = c.max_order;
  j["rir_length"] = c.rir_length;
  j["array"] = c.array;
  j["source_distance_m"] = {c.source_distance_m.lo, c.source_distance_m.hi};
  j["gap_floor"] = c.gap_floor;
  return j.dump(2);
}

namespace {

UtteranceInfo build_utterance(const CorpusConfig &cfg, uint64_t corpus_seed, int u,
                              const std::filesystem::path &out_dir) {
  Rng rng(fnv1a_u64(static_cast<uint64_t>(u), fnv1a_u64(corpus_seed)));

  MixtureSpec spec;
  spec.room.sample_rate = cfg.sample_rate;
  spec.room.size = Eigen::Vector3d(rng.uniform(cfg.room_xy.lo, cfg.room_xy.hi),
                                   rng.uniform(cfg.room_xy.lo, cfg.room_xy.hi),
                                   rng.uniform(cfg.room_z.lo, cfg.room_z.hi));
  spec.room.absorption = rng.uniform(cfg.absorption.lo, cfg.absorption.hi);
  spec.room.max_order = cfg.max_order;
  spec.room.rir_length = cfg.rir_length;
  double duration = rng.uniform(cfg.duration_s.lo, cfg.duration_s.hi);
  spec.duration_samples = static_cast<int>(duration * cfg.sample_rate);
  int n_spk = static_cast<int>(rng.uniform_int(cfg.min_speakers, cfg.max_speakers));
  spec.sir_db = rng.uniform(cfg.sir_db.lo, cfg.sir_db.hi);
  spec.snr_db = rng.uniform(cfg.snr_db.lo, cfg.snr_db.hi);
  spec.array = make_array(cfg.array);
  spec.gap_floor = cfg.gap_floor;

  spec.array_center =
      Eigen::Vector3d(spec.room.size.x() / 2 + rng.uniform(-0.3, 0.3),
                      spec.room.size.y() / 2 + rng.uniform(-0.3, 0.3), 1.5);

  const double margin = 0.3;
  for (int s = 0; s < n_spk; ++s) {
    Eigen::Vector3d pos;
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      double dist = rng.uniform(cfg.source_distance_m.lo, cfg.source_distance_m.hi);
      double az = rng.uniform(0.0, 2.0 * kPi);
      double z = rng.uniform(1.2, 1.8);
      pos = spec.array_center + Eigen::Vector3d(dist * std::cos(az),
                                                dist * std::sin(az), 0.0);
      pos.z() = z;
      placed = pos.x() > margin && pos.x() < spec.room.size.x() - margin &&
               pos.y() > margin && pos.y() < spec.room.size.y() - margin &&
               pos.z() > margin && pos.z() < spec.room.size.z() - margin;
    }
    require(placed, ErrorKind::Config,
            "could not place a source inside the room; widen the room or "
            "shrink source distances");
    spec.sources.push_back(pos);
  }

  MixtureBundle bundle = simulate_mixture(spec, rng);

  char id[16];
  std::snprintf(id, sizeof(id), "u%04d", u);
  std::filesystem::path dir = out_dir / id;
  std::filesystem::create_directories(dir);
  write_wav((dir / "mixture.wav").string(), bundle.mixture, WavFormat::Float32);
  write_wav((dir / "reverb_clean.wav").string(), bundle.reverb_clean,
            WavFormat::Float32);
  write_wav((dir / "interference.wav").string(), bundle.interference,
            WavFormat::Float32);
  write_wav((dir / "dry_ref.wav").string(), bundle.dry_ref, WavFormat::Float32);

  UtteranceInfo info;
  info.id = id;
  info.n_speakers = n_spk;
  info.sir_db = spec.sir_db;
  info.snr_db = spec.snr_db;
  info.min_interferer_angle_deg = bundle.min_interferer_angle_deg;
  info.source_angles_deg = bundle.source_angles_deg;
  info.num_samples = spec.duration_samples;
  return info;
}

}  // namespace

std::vector<UtteranceInfo> generate_corpus(const CorpusConfig &cfg, uint64_t seed,
                                           const std::string &out_dir, int jobs) {
  cfg.validate();
  if (jobs <= 0) jobs = 1;
  std::filesystem::path root(out_dir);
  std::filesystem::create_directories(root);

  std::vector<UtteranceInfo> infos(cfg.num_utterances);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      int u = next.fetch_add(1);
      if (u >= cfg.num_utterances) return;
      try {
        infos[u] = build_utterance(cfg, seed, u, root);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int threads = std::min(jobs, cfg.num_utterances);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  json index;
  index["sample_rate"] = cfg.sample_rate;
  index["seed"] = seed;
  index["config"] = json::parse(corpus_config_to_json(cfg));
  json utts = json::array();
  for (const auto &info : infos) {
    json u;
    u["id"] = info.id;
    u["n_speakers"] = info.n_speakers;
    u["sir_db"] = info.sir_db;
    u["snr_db"] = info.snr_db;
    u["min_interferer_angle_deg"] = info.min_interferer_angle_deg;
    u["source_angles_deg"] = info.source_angles_deg;
    u["num_samples"] = info.num_samples;
    utts.push_back(u);
  }
  index["utterances"] = utts;
  std::ofstream out(root / "corpus.json");
  require(out.good(), ErrorKind::Data, "cannot write corpus index");
  out << index.dump(2) << "\n";
  require(out.good(), ErrorKind::Data, "failed writing corpus index");
  return infos;
}

}  // namespace tapbeam
