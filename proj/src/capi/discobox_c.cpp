// Copyright 2026 The DiscoBox Engine Authors
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

#include "discobox/discobox.h"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <string>

#include "core/bench.hpp"
#include "core/bundle.hpp"
#include "core/config.hpp"
#include "core/corrmetric.hpp"
#include "core/error.hpp"
#include "core/membank.hpp"
#include "core/pipeline.hpp"
#include "core/synthgen.hpp"

struct dbx_bundle {
  discobox::TensorBundle bundle;
};

struct dbx_config {
  discobox::RunConfig config;
};

struct dbx_bank {
  discobox::membank::MemoryBank bank;
  std::mutex call_mutex;
};

namespace {

thread_local std::string g_last_error;

dbx_status Record(dbx_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, mapping engine errors onto status codes.
template <typename Fn>
dbx_status Guard(Fn&& fn) {
  try {
    fn();
    return DBX_OK;
  } catch (const discobox::Error& e) {
    return Record(static_cast<dbx_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(DBX_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(DBX_INTERNAL, e.what());
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) discobox::Fail(discobox::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* CopyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

std::vector<std::int64_t> Shape(const int64_t* shape, size_t rank) {
  if (rank > 0) NotNull(shape, "shape");
  return std::vector<std::int64_t>(shape, shape + rank);
}

std::size_t ElementCount(const std::vector<std::int64_t>& shape) {
  std::size_t n = 1;
  for (std::int64_t d : shape) {
    if (d < 0) discobox::Fail(discobox::ErrorCode::kInvalidArgument, "negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

dbx_bundle* NewBundle(discobox::TensorBundle bundle) {
  return new dbx_bundle{std::move(bundle)};
}

}  // namespace

extern "C" {

const char* dbx_version(void) { return "0.1.0"; }

const char* dbx_last_error(void) { return g_last_error.c_str(); }

const char* dbx_status_name(dbx_status status) {
  if (status == DBX_OK) return "Ok";
  if (status == DBX_INTERNAL) return "Internal";
  return discobox::ErrorCodeName(static_cast<discobox::ErrorCode>(status)).data();
}

int dbx_status_is_numeric(dbx_status status) {
  if (status == DBX_OK || status == DBX_INTERNAL) return 0;
  return discobox::IsNumericError(static_cast<discobox::ErrorCode>(status)) ? 1 : 0;
}

void dbx_string_free(char* text) { std::free(text); }

dbx_status dbx_bundle_create(dbx_bundle** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = NewBundle({});
  });
}

dbx_status dbx_bundle_read(const char* path, dbx_bundle** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = NewBundle(discobox::ReadBundle(path));
  });
}

dbx_status dbx_bundle_write(const dbx_bundle* bundle, const char* path) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(path, "path");
    discobox::WriteBundle(bundle->bundle, path);
  });
}

void dbx_bundle_destroy(dbx_bundle* bundle) { delete bundle; }

dbx_status dbx_bundle_count(const dbx_bundle* bundle, size_t* count) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(count, "count");
    *count = bundle->bundle.entries().size();
  });
}

dbx_status dbx_bundle_entry_name(const dbx_bundle* bundle, size_t index, const char** name) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    const auto& entries = bundle->bundle.entries();
    if (index >= entries.size()) {
      discobox::Fail(discobox::ErrorCode::kOutOfRange, "entry index out of range");
    }
    *name = entries[index].name.c_str();
  });
}

dbx_status dbx_bundle_entry_info(const dbx_bundle* bundle, const char* name, dbx_dtype* dtype,
                                 int64_t* shape, size_t* rank) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    NotNull(rank, "rank");
    const discobox::BundleEntry* entry = bundle->bundle.Find(name);
    if (entry == nullptr) {
      discobox::Fail(discobox::ErrorCode::kMissingEntry, std::string("missing entry ") + name);
    }
    if (dtype != nullptr) *dtype = entry->dtype == discobox::DType::kF32 ? DBX_F32 : DBX_U8;
    for (size_t d = 0; d < entry->shape.size() && d < *rank && shape != nullptr; ++d) {
      shape[d] = entry->shape[d];
    }
    *rank = entry->shape.size();
  });
}

dbx_status dbx_bundle_add_f32(dbx_bundle* bundle, const char* name, const int64_t* shape,
                              size_t rank, const float* data) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    std::vector<std::int64_t> dims = Shape(shape, rank);
    const std::size_t n = ElementCount(dims);
    if (n > 0) NotNull(data, "data");
    bundle->bundle.AddF32(name, std::move(dims), {data, n});
  });
}

dbx_status dbx_bundle_add_u8(dbx_bundle* bundle, const char* name, const int64_t* shape,
                             size_t rank, const uint8_t* data) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    std::vector<std::int64_t> dims = Shape(shape, rank);
    const std::size_t n = ElementCount(dims);
    if (n > 0) NotNull(data, "data");
    bundle->bundle.AddU8(name, std::move(dims), {data, n});
  });
}

dbx_status dbx_bundle_read_f32(const dbx_bundle* bundle, const char* name, float* out,
                               size_t count) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    const std::vector<float> values = bundle->bundle.ReadF32(name);
    if (values.size() != count) {
      discobox::Fail(discobox::ErrorCode::kLengthMismatch,
                     std::string(name) + ": holds " + std::to_string(values.size()) + " values");
    }
    if (count > 0) NotNull(out, "out");
    std::copy(values.begin(), values.end(), out);
  });
}

dbx_status dbx_bundle_read_u8(const dbx_bundle* bundle, const char* name, uint8_t* out,
                              size_t count) {
  return Guard([&] {
    NotNull(bundle, "bundle");
    NotNull(name, "name");
    const std::vector<std::uint8_t> values = bundle->bundle.ReadU8(name);
    if (values.size() != count) {
      discobox::Fail(discobox::ErrorCode::kLengthMismatch,
                     std::string(name) + ": holds " + std::to_string(values.size()) + " values");
    }
    if (count > 0) NotNull(out, "out");
    std::copy(values.begin(), values.end(), out);
  });
}

dbx_status dbx_config_create(dbx_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new dbx_config{};
  });
}

void dbx_config_destroy(dbx_config* config) { delete config; }

dbx_status dbx_config_set(dbx_config* config, const char* key, const char* value) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    config->config.Set(key, value);
  });
}

dbx_status dbx_config_load_file(dbx_config* config, const char* path) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(path, "path");
    config->config.LoadFile(path);
  });
}

dbx_status dbx_config_to_text(const dbx_config* config, char** text) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(text, "text");
    *text = CopyString(config->config.ToText());
  });
}

dbx_status dbx_bank_create(dbx_bank** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new dbx_bank{};
  });
}

dbx_status dbx_bank_load(const char* dir, dbx_bank** out) {
  return Guard([&] {
    NotNull(dir, "dir");
    NotNull(out, "out");
    auto* bank = new dbx_bank{};
    try {
      bank->bank = discobox::membank::MemoryBank::Load(dir);
    } catch (...) {
      delete bank;
      throw;
    }
    *out = bank;
  });
}

dbx_status dbx_bank_save(const dbx_bank* bank, const char* dir) {
  return Guard([&] {
    NotNull(bank, "bank");
    NotNull(dir, "dir");
    bank->bank.Save(dir);
  });
}

void dbx_bank_destroy(dbx_bank* bank) { delete bank; }

dbx_status dbx_bank_size(const dbx_bank* bank, int category, int* size) {
  return Guard([&] {
    NotNull(bank, "bank");
    NotNull(size, "size");
    *size = bank->bank.Size(category);
  });
}

dbx_status dbx_refine(const dbx_bundle* input, dbx_bank* bank, const dbx_config* config,
                      dbx_bundle** output) {
  return Guard([&] {
    NotNull(input, "input");
    NotNull(config, "config");
    NotNull(output, "output");
    discobox::TensorBundle result;
    if (bank == nullptr) {
      discobox::membank::MemoryBank scratch;
      result = discobox::RunRefine(input->bundle, scratch, config->config);
    } else {
      std::scoped_lock lock(bank->call_mutex);
      result = discobox::RunRefine(input->bundle, bank->bank, config->config);
    }
    *output = NewBundle(std::move(result));
  });
}

dbx_status dbx_match(const dbx_bundle* a, const dbx_bundle* b, const dbx_config* config,
                     dbx_bundle** output) {
  return Guard([&] {
    NotNull(a, "a");
    NotNull(b, "b");
    NotNull(config, "config");
    NotNull(output, "output");
    *output = NewBundle(discobox::RunMatch(a->bundle, b->bundle, config->config));
  });
}

dbx_status dbx_eval_corr(const char* predictions_json, const char* annotations_json,
                         char** report_json) {
  return Guard([&] {
    NotNull(predictions_json, "predictions_json");
    NotNull(annotations_json, "annotations_json");
    NotNull(report_json, "report_json");
    discobox::metric::EvaluationInput input;
    input.images = discobox::metric::ParseAnnotations(annotations_json);
    input.predictions = discobox::metric::ParsePredictions(predictions_json);
    *report_json = CopyString(discobox::metric::ReportToJson(discobox::metric::Evaluate(input)));
  });
}

dbx_status dbx_bench(const dbx_config* config, int roi_size, int pairs, char** report_json) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(report_json, "report_json");
    *report_json = CopyString(discobox::RunBench(config->config, roi_size, pairs).ToJson());
  });
}

dbx_status dbx_gen_shapes(uint64_t seed, int count, int size, double noise_rate,
                          dbx_bundle** objects, dbx_bundle** truth) {
  return Guard([&] {
    NotNull(objects, "objects");
    if (count < 0) discobox::Fail(discobox::ErrorCode::kInvalidArgument, "negative count");
    std::vector<discobox::RoiObject> list;
    discobox::TensorBundle truths;
    for (int n = 0; n < count; ++n) {
      discobox::synth::ShapeRoi shape = discobox::synth::GenShapeRoi(seed + n, size, noise_rate);
      std::vector<std::uint8_t> bits(shape.truth.size());
      for (int i = 0; i < shape.truth.size(); ++i) bits[i] = static_cast<std::uint8_t>(shape.truth[i]);
      truths.AddU8("truth/" + shape.object.id, {size, size}, bits);
      list.push_back(std::move(shape.object));
    }
    *objects = NewBundle(discobox::ObjectsToBundle(list));
    if (truth != nullptr) *truth = NewBundle(std::move(truths));
  });
}

dbx_status dbx_gen_permuted_pair(uint64_t seed, int size, dbx_bundle** a, dbx_bundle** b) {
  return Guard([&] {
    NotNull(a, "a");
    NotNull(b, "b");
    const discobox::synth::PermutedPair pair = discobox::synth::GenPermutedPair(seed, size);
    dbx_bundle* first = NewBundle(discobox::ObjectsToBundle({pair.a}));
    *b = NewBundle(discobox::ObjectsToBundle({pair.b}));
    *a = first;
  });
}

dbx_status dbx_gen_metric_fixture(uint64_t seed, int n_pairs, double noise_px,
                                  char** annotations_json, char** predictions_json) {
  return Guard([&] {
    NotNull(annotations_json, "annotations_json");
    NotNull(predictions_json, "predictions_json");
    const discobox::synth::MetricFixture fixture =
        discobox::synth::GenMetricFixture(seed, n_pairs, noise_px);
    char* annotations = CopyString(discobox::metric::AnnotationsToJson(fixture.images));
    *predictions_json = CopyString(discobox::metric::PredictionsToJson(fixture.predictions));
    *annotations_json = annotations;
  });
}

}  // extern "C"
