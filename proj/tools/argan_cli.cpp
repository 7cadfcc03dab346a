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
// argan: command-line driver for the augmentation pipeline.
//
//   argan prepare          --config exp.cfg [--toy classes] [--data-root DIR]
//   argan train-gan        --config exp.cfg [--resume] [--lam 0] [--epochs N]
//   argan translate        --config exp.cfg --label L [--checkpoint F] [--input M] [--out DIR]
//   argan augment          --config exp.cfg --mode classic|synthetic
//   argan train-classifier --config exp.cfg --instance X|X_plus_XC|X_plus_XS
//   argan evaluate         --config exp.cfg --instance X|X_plus_XC|X_plus_XS|gan
//   argan report           --config exp.cfg [--no-charts]
//
// Any setting can be overridden with --set section.key=value. Exit status:
// 0 success, 2 invalid configuration or arguments, 1 runtime failure.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "argan/argan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

int ExitFor(argan_status s) {
  if (s == ARGAN_OK) return kExitOk;
  return (s == ARGAN_ERR_INVALID_ARGUMENT || s == ARGAN_ERR_PARSE) ? kExitValidation : kExitRuntime;
}

int Report(argan_status s) {
  if (s != ARGAN_OK) std::fprintf(stderr, "argan: error (%s): %s\n", argan_status_name(s), argan_last_error());
  return ExitFor(s);
}

void PrintLine(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

// Command-line paths are relative to the caller's directory, unlike paths
// inside the config file.
std::string Absolute(const std::string& p) {
  return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
}

struct ConfigHandle {
  argan_config* ptr = nullptr;
  ~ConfigHandle() { argan_config_free(ptr); }
};

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  bool quiet = false;
  bool print_config = false;
  // Stage-specific overrides, applied as config keys when given.
  std::vector<std::pair<std::string, std::string>> keyed;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argan: synthetic and classic augmentation pipeline for imbalanced image classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(argan_version()));

  Options opt;
  std::function<argan_status(const argan_config*)> action;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment config file (key = value, [section] headers)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--set", opt.sets, "override a setting: section.key=value (repeatable)");
    sub->add_flag("-q,--quiet", opt.quiet, "suppress progress lines");
    sub->add_flag("--print-config", opt.print_config, "print the effective configuration first");
  };
  // Binds a stage option to a config key; only applied when given.
  std::vector<std::pair<CLI::Option*, std::pair<std::string, std::string*>>> bound;
  std::vector<std::unique_ptr<std::string>> storage;
  auto keyed = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help,
                   bool is_path = false) {
    storage.push_back(std::make_unique<std::string>());
    auto* o = sub->add_option(flag, *storage.back(), help);
    bound.push_back({o, {key, storage.back().get()}});
    if (is_path) o->each([s = storage.back().get()](const std::string&) { *s = Absolute(*s); });
  };

  auto* prepare = app.add_subcommand("prepare", "build the X manifest and class distribution");
  common(prepare);
  keyed(prepare, "--toy", "data.toy", "none | domains | classes");
  keyed(prepare, "--data-root", "paths.data_root", "directory of class folders", true);
  prepare->callback([&] { action = argan_prepare; });

  bool resume = false;
  auto* train_gan = app.add_subcommand("train-gan", "train one healthy->class translator per target class");
  common(train_gan);
  train_gan->add_flag("--resume", resume, "continue from the latest checkpoint");
  keyed(train_gan, "--lam", "gan.lam", "weight of the activation reconstruction loss");
  keyed(train_gan, "--alpha", "gan.alpha", "weight of the cycle-consistency loss");
  keyed(train_gan, "--epochs", "gan.epochs", "training epochs");
  keyed(train_gan, "--labels", "gan.labels", "target classes, ';'-separated");
  train_gan->callback([&] { action = [&](const argan_config* c) { return argan_train_gan(c, resume ? 1 : 0); }; });

  std::string label, checkpoint, input, out_dir;
  auto* translate = app.add_subcommand("translate", "map images through a trained generator");
  common(translate);
  translate->add_option("--label", label, "target class (selects the translator)")->required();
  translate->add_option("--checkpoint", checkpoint, "checkpoint file (default: latest for the class)");
  translate->add_option("--input", input, "manifest of images to translate (default: healthy train images)");
  translate->add_option("--out", out_dir, "output directory");
  translate->callback([&] {
    checkpoint = Absolute(checkpoint), input = Absolute(input), out_dir = Absolute(out_dir);
    action = [&](const argan_config* c) {
      return argan_translate(c, label.c_str(), checkpoint.c_str(), input.c_str(), out_dir.c_str());
    };
  });

  std::string mode;
  auto* augment = app.add_subcommand("augment", "build X_plus_XC (classic) or X_plus_XS (synthetic)");
  common(augment);
  augment->add_option("--mode", mode, "classic | synthetic")->required()->check(CLI::IsMember({"classic", "synthetic"}));
  augment->callback([&] { action = [&](const argan_config* c) { return argan_augment(c, mode.c_str()); }; });

  std::string instance;
  const std::vector<std::string> tags = {"X", "X_plus_XC", "X_plus_XS"};
  auto* train_clf = app.add_subcommand("train-classifier", "train the recognition network on one instance");
  common(train_clf);
  train_clf->add_option("--instance", instance, "X | X_plus_XC | X_plus_XS")->required()->check(CLI::IsMember(tags));
  keyed(train_clf, "--epochs", "classifier.epochs", "training epochs");
  keyed(train_clf, "--seed", "classifier.seed", "initialization and shuffling seed");
  train_clf->callback([&] {
    action = [&](const argan_config* c) { return argan_train_classifier(c, instance.c_str()); };
  });

  auto* evaluate = app.add_subcommand("evaluate", "score a classifier on the test split, or the translators");
  common(evaluate);
  auto eval_tags = tags;
  eval_tags.push_back("gan");
  evaluate->add_option("--instance", instance, "X | X_plus_XC | X_plus_XS | gan")
      ->required()
      ->check(CLI::IsMember(eval_tags));
  evaluate->callback([&] { action = [&](const argan_config* c) { return argan_evaluate(c, instance.c_str()); }; });

  bool no_charts = false;
  auto* report = app.add_subcommand("report", "precision, change-rate, FID/NIMA and reference tables");
  common(report);
  report->add_flag("--no-charts", no_charts, "skip the PNG bar charts");
  report->callback([&] {
    if (no_charts) opt.keyed.push_back({"report.charts", "false"});
    action = argan_report;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  ConfigHandle config;
  if (auto s = argan_config_load(opt.config_path.c_str(), &config.ptr); s != ARGAN_OK) return Report(s);
  for (const auto& [o, kv] : bound) {
    if (o->count() > 0) opt.keyed.push_back({kv.first, *kv.second});
  }
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "argan: error: --set expects key=value, got '%s'\n", s.c_str());
      return kExitValidation;
    }
    opt.keyed.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  for (const auto& [k, v] : opt.keyed) {
    if (auto st = argan_config_set(config.ptr, k.c_str(), v.c_str()); st != ARGAN_OK) return Report(st);
  }
  if (auto s = argan_config_validate(config.ptr); s != ARGAN_OK) return Report(s);
  if (opt.print_config) {
    size_t len = 0;
    argan_config_text(config.ptr, nullptr, 0, &len);
    std::string text(len, '\0');
    argan_config_text(config.ptr, text.data(), text.size(), &len);
    std::fputs(text.c_str(), stdout);
  }
  if (!opt.quiet) argan_config_set_log(config.ptr, PrintLine, nullptr);
  return Report(action(config.ptr));
}
