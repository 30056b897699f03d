// Copyright 2026 The ReasonEval Authors
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

// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reasoneval/reasoneval.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAllRowsFailed = 3;

int exit_code(reval_status s) {
  switch (s) {
    case REVAL_OK: return 0;
    case REVAL_E_CONFIG: return kExitConfig;
    case REVAL_E_ALL_ROWS_FAILED: return kExitAllRowsFailed;
    default: return kExitError;
  }
}

// Thrown to unwind to main with a status already reported.
struct Failed {
  reval_status status;
};

void check(reval_status s, const char* what) {
  if (s == REVAL_OK) return;
  std::fprintf(stderr, "reasoneval: %s failed (%s): %s\n", what, reval_status_name(s), reval_last_error());
  throw Failed{s};
}

struct StringOut {
  char* p = nullptr;
  ~StringOut() { reval_string_free(p); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Config = Handle<reval_config, reval_config_free>;
using Kb = Handle<reval_kb, reval_kb_free>;
using Report = Handle<reval_report, reval_report_free>;
using Record = Handle<reval_record, reval_record_free>;

struct Globals {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
  int workers = 0;
};

// Config file, then --set overrides, then REASONEVAL_WORKERS, then flags.
void load_config(const Globals& g, Config& cfg) {
  check(reval_config_load(g.config_path.empty() ? nullptr : g.config_path.c_str(), &cfg.p), "loading config");
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "reasoneval: --set expects key=json, got '%s'\n", kv.c_str());
      throw Failed{REVAL_E_CONFIG};
    }
    check(reval_config_set(cfg.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "applying --set");
  }
  if (const char* env = std::getenv("REASONEVAL_WORKERS"); env && *env)
    check(reval_config_set(cfg.p, "workers", env), "reading REASONEVAL_WORKERS");
  if (g.workers > 0) check(reval_config_set(cfg.p, "workers", std::to_string(g.workers).c_str()), "applying --workers");
  if (!g.seed.empty()) check(reval_config_set(cfg.p, "seed", g.seed.c_str()), "applying --seed");
}

void print_json(const StringOut& s) { std::cout << s.p << "\n"; }

int finish_run(reval_status s, Report& rep, const std::string& out, const std::string& formats) {
  if (s != REVAL_OK && s != REVAL_E_ALL_ROWS_FAILED) check(s, "run");
  check(reval_report_emit(rep.p, out.c_str(), formats.c_str()), "writing report");
  std::fprintf(stderr, "reasoneval: %zu traces evaluated, %zu failed; report in %s\n",
               reval_report_success_count(rep.p), reval_report_failure_count(rep.p), out.c_str());
  if (s == REVAL_E_ALL_ROWS_FAILED) std::fprintf(stderr, "reasoneval: every row failed\n");
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate ECG reasoning traces for perception and deduction."};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", reval_version());
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "Override a config key: key=json (repeatable)");
  app.add_option("--workers", g.workers, "Worker threads (overrides REASONEVAL_WORKERS)")->check(CLI::PositiveNumber);

  std::string manifest, kb_dir, out, formats = "json,csv,svg", text, corpus, label_map, input, record,
                                    delineation, spec, truth, first, second, flip;
  std::size_t k = 5;
  double ratio = 0.0;

  auto* eval = app.add_subcommand("eval", "Score model traces: perception, deduction and final answers");
  eval->add_option("--manifest", manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--kb", kb_dir, "Knowledge base directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", out, "Output directory")->required();
  eval->add_option("--formats", formats, "json,csv,svg");
  eval->add_option("--seed", g.seed, "Seed recorded in the report");

  auto* sup = app.add_subcommand("assess-supporting", "Verify expert notes against their records");
  sup->add_option("--manifest", manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  sup->add_option("--out", out, "Output directory")->required();
  sup->add_option("--formats", formats, "json,csv,svg");

  auto* adv = app.add_subcommand("assess-adversarial", "Verify antonym-flipped expert notes");
  adv->add_option("--manifest", manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  adv->add_option("--out", out, "Output directory")->required();
  adv->add_option("--formats", formats, "json,csv,svg");
  adv->add_option("--seed", g.seed, "Seed for flip selection")->required();
  adv->add_option("--flip", flip, "Flip every finding or one per trace")->check(CLI::IsMember({"all", "one"}));

  auto* kb = app.add_subcommand("kb", "Knowledge base tools");
  kb->require_subcommand(1);
  auto* kb_build = kb->add_subcommand("build", "Clean a markdown corpus and index it");
  kb_build->add_option("--corpus", corpus, "Corpus root")->required()->check(CLI::ExistingDirectory);
  kb_build->add_option("--label-map", label_map, "Label map JSON")->required()->check(CLI::ExistingFile);
  kb_build->add_option("--out", out, "Output directory")->required();
  auto* kb_query = kb->add_subcommand("query", "Rank entries by cosine similarity to a text");
  kb_query->add_option("--kb", kb_dir, "Knowledge base directory")->required()->check(CLI::ExistingDirectory);
  kb_query->add_option("--text", text, "Query text")->required();
  kb_query->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber);

  auto* split = app.add_subcommand("split", "Seeded, patient-grouped split of a manifest");
  split->add_option("--manifest", manifest, "Manifest JSONL")->required()->check(CLI::ExistingFile);
  split->add_option("--ratio", ratio, "Share of rows in the first part")->required()->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", g.seed, "Shuffle seed")->required();
  split->add_option("--first", first, "First part, e.g. val.jsonl")->required();
  split->add_option("--second", second, "Second part, e.g. test.jsonl")->required();

  auto* report = app.add_subcommand("report", "Check a report and re-emit it");
  report->add_option("--input", input, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out, "Output directory")->required();
  report->add_option("--formats", formats, "json,csv,svg");

  auto* features = app.add_subcommand("features", "Print the feature table of a record");
  features->add_option("--record", record, "Record file (.csv or .bin)")->required()->check(CLI::ExistingFile);
  features->add_option("--delineation", delineation, "External delineation JSON")->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Write a synthetic record from a spec");
  synth->add_option("--spec", spec, "Spec JSON file")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Record file (.csv or .bin)")->required();
  synth->add_option("--truth", truth, "Where to write the exact delineation");

  auto* extract = app.add_subcommand("extract", "Print the findings extracted from a text");
  extract->add_option("--text", text, "Trace text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    Config cfg;
    load_config(g, cfg);
    if (!flip.empty()) check(reval_config_set(cfg.p, "flip_mode", ("\"" + flip + "\"").c_str()), "applying --flip");

    if (eval->parsed()) {
      Kb base;
      check(reval_kb_load(kb_dir.c_str(), &base.p), "loading knowledge base");
      Report rep;
      const reval_status s = reval_eval_run(manifest.c_str(), base.p, cfg.p, &rep.p);
      return finish_run(s, rep, out, formats);
    }
    if (sup->parsed() || adv->parsed()) {
      Report rep;
      const reval_status s = reval_assess(manifest.c_str(), adv->parsed() ? 1 : 0, cfg.p, &rep.p);
      return finish_run(s, rep, out, formats);
    }
    if (kb_build->parsed()) {
      Kb base;
      StringOut log;
      check(reval_kb_build(corpus.c_str(), label_map.c_str(), cfg.p, &base.p, &log.p), "building knowledge base");
      check(reval_kb_save(base.p, out.c_str()), "saving knowledge base");
      print_json(log);
      std::fprintf(stderr, "reasoneval: %zu entries written to %s\n", reval_kb_size(base.p), out.c_str());
      return 0;
    }
    if (kb_query->parsed()) {
      Kb base;
      check(reval_kb_load(kb_dir.c_str(), &base.p), "loading knowledge base");
      StringOut res;
      check(reval_kb_query(base.p, cfg.p, text.c_str(), k, &res.p), "query");
      print_json(res);
      return 0;
    }
    if (split->parsed()) {
      std::size_t a = 0, b = 0;
      check(reval_split(manifest.c_str(), ratio, std::stoull(g.seed), first.c_str(), second.c_str(), &a, &b),
            "split");
      std::fprintf(stderr, "reasoneval: %zu rows to %s, %zu rows to %s\n", a, first.c_str(), b, second.c_str());
      return 0;
    }
    if (report->parsed()) {
      Report rep;
      check(reval_report_load(input.c_str(), &rep.p), "loading report");
      check(reval_report_emit(rep.p, out.c_str(), formats.c_str()), "writing report");
      std::fprintf(stderr, "reasoneval: report is self-consistent; written to %s\n", out.c_str());
      return 0;
    }
    if (features->parsed()) {
      Record rec;
      check(reval_record_load(record.c_str(), &rec.p), "loading record");
      StringOut res;
      check(reval_record_features(rec.p, cfg.p, delineation.empty() ? nullptr : delineation.c_str(), &res.p),
            "features");
      print_json(res);
      return 0;
    }
    if (synth->parsed()) {
      std::ifstream in(spec);
      const std::string spec_text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      Record rec;
      StringOut tr;
      check(reval_synthesize(spec_text.c_str(), &rec.p, truth.empty() ? nullptr : &tr.p), "synthesis");
      check(reval_record_save(rec.p, out.c_str()), "saving record");
      if (!truth.empty()) {
        std::ofstream t(truth);
        t << tr.p << "\n";
        if (!t) {
          std::fprintf(stderr, "reasoneval: cannot write %s\n", truth.c_str());
          return kExitError;
        }
      }
      return 0;
    }
    if (extract->parsed()) {
      StringOut res;
      check(reval_extract(text.c_str(), cfg.p, &res.p), "extraction");
      print_json(res);
      return 0;
    }
  } catch (const Failed& f) {
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "reasoneval: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
