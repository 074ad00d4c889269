// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// C interface to the tapbeam multichannel speech separation and
// dereverberation toolkit. All functions are thread-safe unless noted.
// Errors are reported as status codes; tb_last_error() returns a
// human-readable message for the calling thread's most recent failure.

#ifndef TAPBEAM_H_
#define TAPBEAM_H_

#include <stdint.h>

#if defined(__GNUC__) && !defined(_WIN32)
#define TB_API __attribute__((visibility("default")))
#else
#define TB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tb_status {
  TB_OK = 0,
  TB_ERROR_CONFIG = 2,   /* invalid configuration or arguments */
  TB_ERROR_DATA = 3,     /* missing or malformed input data */
  TB_ERROR_NUMERIC = 4   /* numerical failure beyond recovery */
} tb_status;

/* Library version as "major.minor.patch". Static storage; do not free. */
TB_API const char *tb_version(void);

/* Message for the calling thread's most recent error ("" if none).
 * Valid until the next failing tb_* call on the same thread. */
TB_API const char *tb_last_error(void);

/* Generate a simulated multichannel corpus under out_dir and write a
 * corpus.json index. config_json may be NULL or "{}" for defaults; any
 * subset of fields may be overridden. jobs <= 0 selects the value of the
 * TAPBEAM_JOBS environment variable, or all hardware threads. Output is
 * byte-identical for a fixed (config, seed) regardless of jobs. */
TB_API tb_status tb_simulate(const char *config_json, const char *out_dir,
                      uint64_t seed, int jobs);

/* Enhance every utterance of a simulated corpus. options_json selects
 * method ("mvdr", "mtmvdr", "wpd", "wpdpp", "mask-only"), taps
 * (e.g. "-1,0,1" with optional channel slices "-3[0:6]"), mask_source
 * ("oracle" or "file"), mask_dir, ref_channel, diagonal_loading.
 * Writes one WAV per utterance plus manifest.json under out_dir. */
TB_API tb_status tb_enhance(const char *corpus_dir, const char *options_json,
                     const char *out_dir, int jobs);

/* Score enhanced outputs against corpus references. enhanced_dirs is an
 * array of n_dirs directories produced by tb_enhance. Writes a per-row
 * CSV and an aggregate JSON (either path may be NULL to skip). */
TB_API tb_status tb_evaluate(const char *corpus_dir,
                      const char *const *enhanced_dirs, int n_dirs,
                      const char *csv_path, const char *json_path);

/* Render a log-magnitude spectrogram of a WAV file to a PGM image.
 * options_json may be NULL; supports window_len, hop, channel. */
TB_API tb_status tb_spectrogram(const char *wav_path, const char *image_path,
                         const char *options_json);

/* In-memory enhancement handle. Create once per configuration, then
 * process any number of utterances. Not safe for concurrent use of a
 * single handle; create one handle per thread instead. */
typedef struct tb_enhancer tb_enhancer;

/* options_json as for tb_enhance (mask_source is ignored; the process
 * call determines where masks come from). Returns NULL on error and,
 * if status is non-NULL, stores the cause. */
TB_API tb_enhancer *tb_enhancer_create(const char *options_json, tb_status *status);

TB_API void tb_enhancer_destroy(tb_enhancer *handle);

/* Enhance one utterance with oracle masks derived from a dry reference.
 * mixture: channel-major planar buffer, num_channels x num_samples.
 * dry_ref: num_samples mono reference (direct-path target at the
 * reference channel). On success *out_samples receives a malloc'd buffer
 * of *out_num_samples mono samples; caller frees with free(). */
TB_API tb_status tb_enhancer_process_oracle(tb_enhancer *handle,
                                     const double *mixture,
                                     int num_channels, int64_t num_samples,
                                     int sample_rate,
                                     const double *dry_ref,
                                     double **out_samples,
                                     int64_t *out_num_samples);

/* Enhance one utterance with caller-supplied masks. Masks are F x T
 * column-major complex arrays passed as interleaved (re, im) doubles;
 * F and T must match the STFT of the mixture (window 512, hop 256:
 * F = 257, T = ceil(num_samples / 256)). sigma_mask may be NULL for
 * methods that do not use it (mvdr, mtmvdr, mask-only). */
TB_API tb_status tb_enhancer_process_masks(tb_enhancer *handle,
                                    const double *mixture,
                                    int num_channels, int64_t num_samples,
                                    int sample_rate,
                                    const double *speech_mask,
                                    const double *noise_mask,
                                    const double *sigma_mask,
                                    double **out_samples,
                                    int64_t *out_num_samples);

#ifdef __cplusplus
}
#endif

#endif  /* TAPBEAM_H_ */
