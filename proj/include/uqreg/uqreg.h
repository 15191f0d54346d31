/*
 * Copyright 2026 The uqreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libuqreg.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return a uq_status; on failure the
 * thread-local message from uq_last_error() describes the problem. Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with uq_string_free().
 *
 * Configuration arguments are JSON documents using the same field names as
 * the CLI config files. Missing fields keep their defaults; unknown fields
 * are rejected with UQ_ERR_CONFIG.
 */

#ifndef UQREG_UQREG_H_
#define UQREG_UQREG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(UQREG_BUILDING_LIBRARY)
#define UQ_API __attribute__((visibility("default")))
#else
#define UQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  UQ_OK = 0,
  UQ_ERR_INVALID_INPUT = 1,
  UQ_ERR_CONFIG = 2,
  UQ_ERR_TRAINING = 3,
  UQ_ERR_IO = 4,
  UQ_ERR_INTERNAL = 5
} uq_status;

typedef struct uq_dataset uq_dataset;
typedef struct uq_estimator uq_estimator;
typedef struct uq_predictions uq_predictions;

UQ_API const char* uq_version(void);
/* Message for the most recent failure on this thread ("" if none). */
UQ_API const char* uq_last_error(void);
UQ_API void uq_string_free(char* s);

/* Parses a config document of the given kind ("scenario", "estimator" or
 * "experiment"), validates it and returns it with every default filled in. */
UQ_API uq_status uq_config_normalize(const char* kind, const char* config_json,
                                     char** out);

/* ---- datasets ---------------------------------------------------------- */

/* Generates a synthetic scenario. Domain-shift scenarios return in-domain
 * and out-of-domain records together, told apart by domain_tag. */
UQ_API uq_status uq_dataset_synthesize(const char* scenario_json,
                                       uq_dataset** out);
UQ_API uq_status uq_dataset_load(const char* path, uq_dataset** out);
UQ_API uq_status uq_dataset_save(const uq_dataset* ds, const char* path);
UQ_API size_t uq_dataset_size(const uq_dataset* ds);
UQ_API int uq_dataset_dim(const uq_dataset* ds);
/* Group-preserving split into k parts; out_parts must hold k handles. */
UQ_API uq_status uq_dataset_split(const uq_dataset* ds, const double* fractions,
                                  size_t k, uint64_t seed,
                                  uq_dataset** out_parts);
UQ_API void uq_dataset_free(uq_dataset* ds);

/* ---- estimators -------------------------------------------------------- */

/* error_split is required for DUP and ignored otherwise. init (nullable)
 * continues training from an existing estimator of the same kind. */
UQ_API uq_status uq_estimator_train(const char* config_json,
                                    const uq_dataset* train,
                                    const uq_dataset* error_split,
                                    const uq_estimator* init,
                                    uq_estimator** out);
/* Global variance scale fitted on dev. Clears any per-tag scales. */
UQ_API uq_status uq_estimator_calibrate(uq_estimator* est,
                                        const uq_dataset* dev);
/* One scale per domain_tag of dev; records with unseen tags fall back to the
 * global scale. */
UQ_API uq_status uq_estimator_calibrate_by_tag(uq_estimator* est,
                                               const uq_dataset* dev);
UQ_API uq_status uq_estimator_predict(const uq_estimator* est,
                                      const uq_dataset* ds, int calibrated,
                                      uq_predictions** out);
UQ_API uq_status uq_estimator_save(const uq_estimator* est, const char* dir);
UQ_API uq_status uq_estimator_load(const char* dir, uq_estimator** out);
/* {"config": ..., "calibration": ..., "tag_calibration": ..., "epoch_loss": [...]} */
UQ_API uq_status uq_estimator_info_json(const uq_estimator* est, char** out);
UQ_API void uq_estimator_free(uq_estimator* est);

/* ---- predictions ------------------------------------------------------- */

UQ_API size_t uq_predictions_size(const uq_predictions* p);
UQ_API uq_status uq_predictions_get(const uq_predictions* p, size_t i,
                                    double* mean, double* variance,
                                    double* gold);
/* "id,mean,variance,gold" rows. */
UQ_API uq_status uq_predictions_csv(const uq_predictions* p, char** out);
/* MetricsReport as JSON; undefined correlations are null. */
UQ_API uq_status uq_predictions_metrics_json(const uq_predictions* p,
                                             int ece_bins, char** out);
/* Aligned one-row metrics table. */
UQ_API uq_status uq_predictions_metrics_table(const uq_predictions* p,
                                              const char* label, int ece_bins,
                                              char** out);
UQ_API void uq_predictions_free(uq_predictions* p);

/* ---- experiments ------------------------------------------------------- */

/* name: "compare", "noisy-ref", "ood", "bench" or "ablate-dup". Writes the
 * report files when the config sets output_dir. Either out-pointer may be
 * NULL. */
UQ_API uq_status uq_run_experiment(const char* name, const char* config_json,
                                   char** report_json, char** table);

#ifdef __cplusplus
}
#endif

#endif /* UQREG_UQREG_H_ */
