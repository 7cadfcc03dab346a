/* Copyright 2026 The ARGAN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "argan/argan.h"

#include <cstring>
#include <new>
#include <string>

#include <c10/util/Exception.h>

#include "common/error.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/experiment.hpp"

struct argan_config {
  argan::ExperimentConfig config;
  argan_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  argan::LogSink Sink() const {
    if (!log_fn) return {};
    return [fn = log_fn, user = log_user](const std::string& line) { fn(line.c_str(), user); };
  }
};

namespace {

thread_local std::string g_last_error;

argan_status Record(argan_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

argan_status FromCode(argan::ErrorCode code) {
  switch (code) {
    case argan::ErrorCode::kInvalidArgument: return ARGAN_ERR_INVALID_ARGUMENT;
    case argan::ErrorCode::kIo: return ARGAN_ERR_IO;
    case argan::ErrorCode::kParse: return ARGAN_ERR_PARSE;
    case argan::ErrorCode::kNumeric: return ARGAN_ERR_NUMERIC;
    case argan::ErrorCode::kState: return ARGAN_ERR_STATE;
    case argan::ErrorCode::kInternal: return ARGAN_ERR_INTERNAL;
  }
  return ARGAN_ERR_INTERNAL;
}

// Runs body, translating every exception into a status; nothing escapes.
template <typename F>
argan_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ARGAN_OK;
  } catch (const argan::Error& e) {
    return Record(FromCode(e.code()), e.what());
  } catch (const c10::Error& e) {
    return Record(ARGAN_ERR_INTERNAL, e.what_without_backtrace());
  } catch (const std::bad_alloc&) {
    return Record(ARGAN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(ARGAN_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(ARGAN_ERR_INTERNAL, "unknown failure");
  }
}

std::string OrEmpty(const char* s) { return s ? s : ""; }

void NeedHandle(const void* p, const char* what) {
  argan::Require(p != nullptr, std::string(what) + " must not be NULL");
}

void CopyOut(const std::string& text, char* buf, size_t cap, size_t* len) {
  if (len) *len = text.size() + 1;
  if (!buf) return;
  argan::Require(cap > text.size(), "output buffer too small: need " + std::to_string(text.size() + 1) + " bytes");
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

}  // namespace

extern "C" {

const char* argan_version(void) { return "0.1.0"; }

const char* argan_status_name(argan_status status) {
  switch (status) {
    case ARGAN_OK: return "ok";
    case ARGAN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ARGAN_ERR_IO: return "io";
    case ARGAN_ERR_PARSE: return "parse";
    case ARGAN_ERR_NUMERIC: return "numeric";
    case ARGAN_ERR_STATE: return "state";
    case ARGAN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* argan_last_error(void) { return g_last_error.c_str(); }

argan_status argan_config_new(argan_config** out) {
  return Guard([&] {
    NeedHandle(out, "out");
    auto* c = new argan_config;
    c->config.base_dir = std::filesystem::current_path();
    *out = c;
  });
}

argan_status argan_config_load(const char* path, argan_config** out) {
  return Guard([&] {
    NeedHandle(out, "out");
    NeedHandle(path, "path");
    auto loaded = argan::ExperimentConfig::Load(path);
    *out = new argan_config{std::move(loaded)};
  });
}

void argan_config_free(argan_config* config) { delete config; }

argan_status argan_config_set(argan_config* config, const char* key, const char* value) {
  return Guard([&] {
    NeedHandle(config, "config");
    NeedHandle(key, "key");
    config->config.Set(key, OrEmpty(value));
  });
}

argan_status argan_config_get(const argan_config* config, const char* key, char* buf, size_t cap, size_t* len) {
  return Guard([&] {
    NeedHandle(config, "config");
    NeedHandle(key, "key");
    CopyOut(config->config.Get(key), buf, cap, len);
  });
}

argan_status argan_config_text(const argan_config* config, char* buf, size_t cap, size_t* len) {
  return Guard([&] {
    NeedHandle(config, "config");
    CopyOut(config->config.ToText(), buf, cap, len);
  });
}

argan_status argan_config_validate(const argan_config* config) {
  return Guard([&] {
    NeedHandle(config, "config");
    config->config.Validate();
  });
}

argan_status argan_config_set_log(argan_config* config, argan_log_fn fn, void* user) {
  return Guard([&] {
    NeedHandle(config, "config");
    config->log_fn = fn;
    config->log_user = user;
  });
}

argan_status argan_prepare(const argan_config* config) {
  return Guard([&] {
    NeedHandle(config, "config");
    argan::CmdPrepare(config->config, config->Sink());
  });
}

argan_status argan_train_gan(const argan_config* config, int resume) {
  return Guard([&] {
    NeedHandle(config, "config");
    argan::CmdTrainGan(config->config, resume != 0, config->Sink());
  });
}

argan_status argan_translate(const argan_config* config, const char* label, const char* checkpoint,
                             const char* input_manifest, const char* out_dir) {
  return Guard([&] {
    NeedHandle(config, "config");
    argan::TranslateRequest req{OrEmpty(label), OrEmpty(checkpoint), OrEmpty(input_manifest), OrEmpty(out_dir)};
    argan::CmdTranslate(config->config, req, config->Sink());
  });
}

argan_status argan_augment(const argan_config* config, const char* mode) {
  return Guard([&] {
    NeedHandle(config, "config");
    NeedHandle(mode, "mode");
    argan::CmdAugment(config->config, argan::ParseAugmentMode(mode), config->Sink());
  });
}

argan_status argan_train_classifier(const argan_config* config, const char* instance) {
  return Guard([&] {
    NeedHandle(config, "config");
    NeedHandle(instance, "instance");
    argan::CmdTrainClassifier(config->config, instance, config->Sink());
  });
}

argan_status argan_evaluate(const argan_config* config, const char* instance) {
  return Guard([&] {
    NeedHandle(config, "config");
    NeedHandle(instance, "instance");
    argan::CmdEvaluate(config->config, instance, config->Sink());
  });
}

argan_status argan_report(const argan_config* config) {
  return Guard([&] {
    NeedHandle(config, "config");
    argan::CmdReport(config->config, config->Sink());
  });
}

argan_status argan_fid(const double* x, size_t n_x, const double* y, size_t n_y, size_t dim, double* out) {
  return Guard([&] {
    NeedHandle(x, "x");
    NeedHandle(y, "y");
    NeedHandle(out, "out");
    argan::Require(dim > 0 && n_x >= 2 && n_y >= 2, "fid needs dim >= 1 and at least two rows per set");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    argan::FeatureSet fx{Eigen::Map<const RowMajor>(x, static_cast<Eigen::Index>(n_x), static_cast<Eigen::Index>(dim)), "x"};
    argan::FeatureSet fy{Eigen::Map<const RowMajor>(y, static_cast<Eigen::Index>(n_y), static_cast<Eigen::Index>(dim)), "y"};
    *out = argan::Fid(fx, fy);
  });
}

argan_status argan_seg_scores(const int32_t* predicted, const int32_t* truth, size_t n_pixels, int32_t n_labels,
                              double out[4]) {
  return Guard([&] {
    NeedHandle(predicted, "predicted");
    NeedHandle(truth, "truth");
    NeedHandle(out, "out");
    argan::SegPair pair{{predicted, predicted + n_pixels}, {truth, truth + n_pixels}, n_labels};
    const auto s = argan::ComputeSegScores({pair});
    out[0] = s.ppa;
    out[1] = s.pca;
    out[2] = s.pca_recall;
    out[3] = s.class_iou;
  });
}

}  // extern "C"
