/* Copyright 2026 The Tilewright Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the tilewright compiler and simulator.
 *
 * Every fallible call returns a tw_status. On failure, tw_last_error() gives
 * a message for the calling thread, valid until that thread's next call.
 * Strings returned through char** are heap-allocated; free them with
 * tw_string_free. Handles are freed with the matching *_free call; passing
 * NULL to a free function is a no-op. JSON inputs and outputs are UTF-8.
 */

#ifndef TILEWRIGHT_TILEWRIGHT_H_
#define TILEWRIGHT_TILEWRIGHT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TW_BUILDING_LIBRARY)
#define TW_API __declspec(dllexport)
#else
#define TW_API __declspec(dllimport)
#endif
#else
#define TW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tw_status {
  TW_OK = 0,
  TW_ERROR_INVALID_ARGUMENT = 1, /* bad call arguments or bindings */
  TW_ERROR_SPEC = 2,             /* malformed or ill-typed kernel spec */
  TW_ERROR_OUT_OF_SCOPE = 3,     /* kernel deliberately not provided */
  TW_ERROR_LAUNCH = 4,           /* launch-time shape or meta violation */
  TW_ERROR_IO = 5,               /* file or serialization failure */
  TW_ERROR_INTERNAL = 6
} tw_status;

typedef struct tw_kernel tw_kernel;
typedef struct tw_tensor tw_tensor;

TW_API const char* tw_version(void);
TW_API const char* tw_status_name(tw_status status);
TW_API const char* tw_last_error(void);
TW_API void tw_string_free(char* s);

/* JSON array of catalog kernel names. */
TW_API tw_status tw_catalog_names(char** out_json);

/* Kernels. A kernel handle owns its compiled form. */
TW_API tw_status tw_kernel_from_catalog(const char* name, tw_kernel** out);
TW_API tw_status tw_kernel_from_json(const char* json, tw_kernel** out);
TW_API tw_status tw_kernel_from_file(const char* path, tw_kernel** out);
/* Catalog name if it names a catalog kernel, else a path to a JSON spec. */
TW_API tw_status tw_kernel_open(const char* name_or_path, tw_kernel** out);
TW_API void tw_kernel_free(tw_kernel* kernel);

TW_API tw_status tw_kernel_name(const tw_kernel* kernel, char** out);
TW_API tw_status tw_kernel_to_json(const tw_kernel* kernel, char** out_json);
/* `bindings_json` is an object of integer bindings, or NULL. */
TW_API tw_status tw_kernel_inspect(const tw_kernel* kernel,
                                   const char* bindings_json,
                                   char** out_report_json);
/* Triton source and its JSON manifest. Either output may be NULL. */
TW_API tw_status tw_kernel_emit(const tw_kernel* kernel, char** out_source,
                                char** out_manifest_json);

/* Tensors: dense f32, row-major. rank 0 is a scalar. */
TW_API tw_status tw_tensor_create(int32_t rank, const int64_t* shape,
                                  const float* data, tw_tensor** out);
TW_API void tw_tensor_free(tw_tensor* tensor);
TW_API int32_t tw_tensor_rank(const tw_tensor* tensor);
TW_API const int64_t* tw_tensor_shape(const tw_tensor* tensor);
TW_API int64_t tw_tensor_numel(const tw_tensor* tensor);
TW_API float* tw_tensor_data(tw_tensor* tensor);
/* TWT1 binary, or JSON {"shape", "data"} when the path ends in .json. */
TW_API tw_status tw_tensor_load(const char* path, tw_tensor** out);
TW_API tw_status tw_tensor_save(const tw_tensor* tensor, const char* path);

/* Runs every program of the grid. Tensors are matched to parameters by
 * name; outputs are written in place. `meta_json` is an object of integer
 * meta-parameter values, or NULL. */
TW_API tw_status tw_kernel_launch(const tw_kernel* kernel, size_t count,
                                  const char* const* names,
                                  tw_tensor* const* tensors,
                                  const char* meta_json,
                                  int64_t* out_programs);

/* Dense reference result for a catalog kernel. */
TW_API tw_status tw_oracle_eval(const char* kernel_name, size_t count,
                                const char* const* names,
                                const tw_tensor* const* tensors,
                                tw_tensor** out);

/* Request/report calls behind the command-line tool.
 *
 * verify:   {"bind": {...}, "seed": n, "tolerance": x, "all": bool}
 * simulate: {"bind": {...}, "seed": n, "inputs": {param: path},
 *            "out_dir": path}
 * All request fields are optional; `request_json` may be NULL. */
TW_API tw_status tw_kernel_verify(const tw_kernel* kernel,
                                  const char* request_json,
                                  char** out_report_json);
TW_API tw_status tw_kernel_simulate(const tw_kernel* kernel,
                                    const char* request_json,
                                    char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* TILEWRIGHT_TILEWRIGHT_H_ */
