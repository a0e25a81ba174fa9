/*
 * Copyright 2026 The ecop Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ECOP_ECOP_H
#define ECOP_ECOP_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(ECOP_BUILDING_LIBRARY)
#define ECOP_API __declspec(dllexport)
#else
#define ECOP_API __declspec(dllimport)
#endif
#else
#define ECOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Status codes. Every function that can fail returns one of these; the
 * message of the most recent failure on the calling thread is available
 * from ecop_last_error().
 */
typedef enum ecop_status {
    ECOP_OK = 0,
    ECOP_CONFIG = 1,
    ECOP_NOT_FOUND = 2,
    ECOP_OUT_OF_RANGE = 3,
    ECOP_DEGENERATE = 4,
    ECOP_FORMAT = 5,
    ECOP_PROVENANCE = 6,
    ECOP_RUNTIME = 7,
    ECOP_INVALID_ARGUMENT = 8
} ecop_status;

typedef struct ecop_front ecop_front;
typedef struct ecop_service ecop_service;

/* Five economy inputs; c1 = gdp * gdp_max_reduction, c2 = hospitalization_cost + fatality * vsl. */
typedef struct ecop_cost_params {
    double gdp;
    double gdp_max_reduction;
    double hospitalization_cost;
    double vsl;
    double fatality;
} ecop_cost_params;

typedef struct ecop_cost_choice {
    size_t index;
    double f1;
    double f2;
    double total_cost;
    double c1;
    double c2;
} ecop_cost_choice;

ECOP_API const char* ecop_version(void);

/* Message of the last failure on this thread; empty when none. Owned by the library. */
ECOP_API const char* ecop_last_error(void);

/* Frees strings returned through char** out-parameters. NULL is ignored. */
ECOP_API void ecop_string_free(char* text);

/*
 * Runs one pipeline stage ("simulate", "calibrate", "sensitivity",
 * "optimize", "cost", "pipeline") with a JSON options object. On success
 * *report_json receives a JSON report to be released with ecop_string_free.
 */
ECOP_API ecop_status ecop_run_stage(const char* stage, const char* options_json, char** report_json);

/* Loads a front artifact. */
ECOP_API ecop_status ecop_front_load(const char* path, ecop_front** out);
ECOP_API void ecop_front_free(ecop_front* front);
ECOP_API size_t ecop_front_size(const ecop_front* front);
/* Objectives of point `index`; out-of-range indices give ECOP_OUT_OF_RANGE. */
ECOP_API ecop_status ecop_front_point(const ecop_front* front, size_t index, double* f1, double* f2);
/* Provenance hash of the problem that produced the front; owned by the handle. */
ECOP_API const char* ecop_front_provenance(const ecop_front* front);

/* Cost-optimal point on the front for one set of economy inputs. */
ECOP_API ecop_status ecop_cost_optimal(const ecop_front* front, const ecop_cost_params* params, ecop_cost_choice* out);

/*
 * Full cost analysis (optimum, sweep over cost per infection, segments) as
 * JSON. `grid_json` may be NULL for the default grid or a {min, max, n} object.
 */
ECOP_API ecop_status ecop_cost_analysis_json(const ecop_front* front, const ecop_cost_params* params,
                                             const char* grid_json, char** out_json);

/* HTTP service over a front artifact and a scenario file. */
ECOP_API ecop_status ecop_service_create(const char* front_path, const char* scenario_path, ecop_service** out);
ECOP_API void ecop_service_free(ecop_service* service);

/* Handles one request in process, without a socket. */
ECOP_API ecop_status ecop_service_handle(const ecop_service* service, const char* method, const char* path,
                                         const char* body, int* http_status, char** response_body);

/*
 * Binds the listener. ECOP_BIND ("host:port") overrides both arguments when
 * set; port 0 picks a free port. *bound_port receives the actual port.
 */
ECOP_API ecop_status ecop_service_bind(ecop_service* service, const char* host, int port, int* bound_port);
/* Serves until ecop_service_stop() is called from another thread. */
ECOP_API ecop_status ecop_service_listen(ecop_service* service);
ECOP_API void ecop_service_stop(ecop_service* service);

#ifdef __cplusplus
}
#endif

#endif
