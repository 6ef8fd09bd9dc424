// Copyright 2026 The convsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the conversation simulation toolkit.
 *
 * All functions return a convsim_status. On failure a description is
 * available from convsim_last_error() on the calling thread until the next
 * API call on that thread. Strings returned through `char**` out-parameters
 * are owned by the caller and must be released with convsim_string_free().
 * Structured arguments and results are exchanged as UTF-8 JSON text.
 */
#ifndef CONVSIM_H_
#define CONVSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONVSIM_BUILDING)
#    define CONVSIM_API __declspec(dllexport)
#  else
#    define CONVSIM_API __declspec(dllimport)
#  endif
#else
#  define CONVSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum convsim_status {
  CONVSIM_OK = 0,
  CONVSIM_ERR_PARSE = 1,
  CONVSIM_ERR_SCHEMA = 2,
  CONVSIM_ERR_VALIDATION = 3,
  CONVSIM_ERR_DOMAIN = 4,
  CONVSIM_ERR_UNSUPPORTED = 5,
  CONVSIM_ERR_IO = 6,
  CONVSIM_ERR_INTERNAL = 7,
  CONVSIM_ERR_INVALID_ARGUMENT = 8
} convsim_status;

typedef struct convsim_model convsim_model;
typedef struct convsim_manifest convsim_manifest;
typedef struct convsim_roomset convsim_roomset;
typedef struct convsim_corpus convsim_corpus;

CONVSIM_API const char* convsim_version(void);
CONVSIM_API const char* convsim_last_error(void);
CONVSIM_API const char* convsim_status_name(convsim_status status);
CONVSIM_API void convsim_string_free(char* s);

/* ---- statistics model ---------------------------------------------------- */

/* Fits a model on `count` annotation documents, each in `format` ("rttm" or
 * "json"). options_json (may be NULL):
 *   {"mode": "sasc"|"csasc", "alpha": 0.1, "floor_mu": 0.01, "floor_r": 0.01,
 *    "floor_d": 0.05, "min_obs": 3, "source": "..."} */
CONVSIM_API convsim_status convsim_model_fit(const char* const* documents,
                                             size_t count, const char* format,
                                             const char* options_json,
                                             convsim_model** out);
CONVSIM_API convsim_status convsim_model_from_json(const char* json,
                                                   convsim_model** out);
CONVSIM_API convsim_status convsim_model_to_json(const convsim_model* model,
                                                 char** out);
/* {"mode", "transition": [[..],[..]], "overlap_ratio", "counts": {...},
 *  "bandwidths": {...}} */
CONVSIM_API convsim_status convsim_model_summary(const convsim_model* model,
                                                 char** out);
/* options_json: {"points": 1001, "x_min": x, "x_max": x, "durations": [d...]}
 * result: [{"name": str, "csv": "x,density\n..."}] */
CONVSIM_API convsim_status convsim_model_density_curves(
    const convsim_model* model, const char* options_json, char** out);
/* Probability that mu + residual < 0. transition: "same" | "diff";
 * duration < 0 means "not given". */
CONVSIM_API convsim_status convsim_model_p_overlap(const convsim_model* model,
                                                   const char* transition,
                                                   double speaker_mu,
                                                   double duration,
                                                   double* out);
CONVSIM_API void convsim_model_free(convsim_model* model);

/* Gap observations of the documents as CSV
 * (conversation_id,delta,transition,incoming_speaker,following_duration). */
CONVSIM_API convsim_status convsim_observations_csv(const char* const* documents,
                                                    size_t count,
                                                    const char* format,
                                                    char** out);

/* ---- utterance manifest ---------------------------------------------------- */

/* Relative audio paths are resolved against base_dir (may be NULL). */
CONVSIM_API convsim_status convsim_manifest_load(const char* manifest_json,
                                                 const char* base_dir,
                                                 convsim_manifest** out);
/* CSV "duration,count" histogram of utterance durations. */
CONVSIM_API convsim_status convsim_manifest_duration_histogram(
    const convsim_manifest* manifest, double bin_width, char** out);
CONVSIM_API void convsim_manifest_free(convsim_manifest* manifest);

/* ---- simulation -------------------------------------------------------------- */

/* config_json: {"mode": "sasc"|"csasc"|"naive"|"noconcat", "pairs": 1,
 *   "seed": 0, "d_min": 2, "d_max": 10, "fixed_gap": 0.25,
 *   "clamp_min_start_delta": 0.01}
 * model may be NULL for "naive" and "noconcat". */
CONVSIM_API convsim_status convsim_simulate(const convsim_manifest* manifest,
                                            const convsim_model* model,
                                            const char* config_json,
                                            convsim_corpus** out);
CONVSIM_API size_t convsim_corpus_plan_count(const convsim_corpus* corpus);
CONVSIM_API convsim_status convsim_corpus_plan_id(const convsim_corpus* corpus,
                                                  size_t index, char** out);
CONVSIM_API convsim_status convsim_corpus_plan_json(const convsim_corpus* corpus,
                                                    size_t index, char** out);
CONVSIM_API convsim_status convsim_corpus_summary_json(
    const convsim_corpus* corpus, char** out);
CONVSIM_API void convsim_corpus_free(convsim_corpus* corpus);

/* ---- rendering ------------------------------------------------------------------ */

/* rirs/{room_id}/{position}.wav */
CONVSIM_API convsim_status convsim_roomset_load(const char* directory,
                                                convsim_roomset** out);
CONVSIM_API void convsim_roomset_free(convsim_roomset* rooms);

/* Renders one plan into out_dir/{dialogue_id}/ (audio.wav, ref.rttm,
 * segments.json). rooms may be NULL. options_json:
 *   {"rir_fraction": 0.4, "sample_rate": 16000}
 * The report lists the written files and mixing details. */
CONVSIM_API convsim_status convsim_render_plan(const char* plan_json,
                                               const convsim_manifest* manifest,
                                               const convsim_roomset* rooms,
                                               const char* options_json,
                                               const char* out_dir,
                                               char** report);

/* Cuts a rendered dialogue directory into chunks/chunk_{k}.wav and
 * transcripts.tsv. options_json: {"window": 30} */
CONVSIM_API convsim_status convsim_chunk_dialogue(const char* dialogue_dir,
                                                  const char* options_json,
                                                  char** report);

/* ---- evaluation ------------------------------------------------------------------ */

/* Reference and hypothesis transcripts as TSV ("id<TAB>text" or
 * "dialogue<TAB>chunk<TAB>text") or JSON ([{"id", "text"}]). With hypothesis
 * NULL, `reference` holds combined pairs: [{"id", "reference", "hypothesis"}].
 * pairs_csv may be NULL. */
CONVSIM_API convsim_status convsim_evaluate(const char* reference,
                                            const char* hypothesis,
                                            char** report, char** pairs_csv);
/* options_json: {"metric": "wer"|"cer"|"cpwer"|"cpcer", "resamples": 1000,
 *                "alpha": 0.05, "seed": 0} */
CONVSIM_API convsim_status convsim_bootstrap(const char* reference,
                                             const char* hypothesis_a,
                                             const char* hypothesis_b,
                                             const char* options_json,
                                             char** result);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* CONVSIM_H_ */
