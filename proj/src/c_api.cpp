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

#include "reasoneval/reasoneval.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "reasoneval/harness.hpp"
#include "reasoneval/synth.hpp"

struct reval_config {
  reasoneval::HarnessConfig cfg;
};
struct reval_record {
  reasoneval::EcgRecord rec;
};
struct reval_kb {
  reasoneval::KnowledgeBase kb;
};
struct reval_report {
  nlohmann::json j;
};

namespace {

using namespace reasoneval;

thread_local std::string g_last_error;

reval_status fail(reval_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs f, translating exceptions into status codes.
template <typename F>
reval_status guard(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const ProviderError& e) {
    switch (e.kind()) {
      case ProviderErrorKind::kRetriesExhausted: return fail(REVAL_E_PROVIDER_RETRIES, e.what());
      case ProviderErrorKind::kTimeout: return fail(REVAL_E_PROVIDER_TIMEOUT, e.what());
      case ProviderErrorKind::kSchema: return fail(REVAL_E_PROVIDER_SCHEMA, e.what());
      case ProviderErrorKind::kHttp: return fail(REVAL_E_PROVIDER_HTTP, e.what());
    }
    return fail(REVAL_E_INTERNAL, e.what());
  } catch (const ConfigError& e) {
    return fail(REVAL_E_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(REVAL_E_IO, e.what());
  } catch (const FormatError& e) {
    return fail(REVAL_E_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(REVAL_E_PARSE, e.what());
  } catch (const InvalidArgument& e) {
    return fail(REVAL_E_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(REVAL_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(REVAL_E_INTERNAL, e.what());
  } catch (...) {
    return fail(REVAL_E_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* name) {
  if (!p) throw InvalidArgument(std::string(name) + " must not be NULL");
}

HarnessConfig config_or_default(const reval_config* c) { return c ? c->cfg : HarnessConfig{}; }

}  // namespace

extern "C" {

const char* reval_version(void) { return "0.1.0"; }

const char* reval_status_name(reval_status s) {
  switch (s) {
    case REVAL_OK: return "ok";
    case REVAL_E_INVALID_ARGUMENT: return "invalid_argument";
    case REVAL_E_IO: return "io";
    case REVAL_E_PARSE: return "parse";
    case REVAL_E_CONFIG: return "config";
    case REVAL_E_PROVIDER_RETRIES: return "provider_retries_exhausted";
    case REVAL_E_PROVIDER_TIMEOUT: return "provider_timeout";
    case REVAL_E_PROVIDER_SCHEMA: return "provider_schema";
    case REVAL_E_PROVIDER_HTTP: return "provider_http";
    case REVAL_E_ALL_ROWS_FAILED: return "all_rows_failed";
    case REVAL_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* reval_last_error(void) { return g_last_error.c_str(); }

void reval_string_free(char* s) { std::free(s); }

reval_status reval_config_load(const char* path, reval_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new reval_config{path ? load_config(path) : HarnessConfig{}};
    return REVAL_OK;
  });
}

reval_status reval_config_from_json(const char* json, reval_config** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    const auto j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    *out = new reval_config{config_from_json(j)};
    return REVAL_OK;
  });
}

reval_status reval_config_set(reval_config* config, const char* key, const char* json_value) {
  return guard([&] {
    need(config, "config");
    need(key, "key");
    need(json_value, "json_value");
    const auto v = nlohmann::json::parse(json_value, nullptr, false);
    if (v.is_discarded()) throw ConfigError(std::string("value for '") + key + "' is not valid JSON");
    nlohmann::json j = config_to_json(config->cfg);
    if (!j.contains(key)) throw ConfigError(std::string("unknown config key '") + key + "'");
    j[key] = v;
    config->cfg = config_from_json(j);
    return REVAL_OK;
  });
}

reval_status reval_config_to_json(const reval_config* config, char** out) {
  return guard([&] {
    need(config, "config");
    need(out, "out");
    *out = dup(config_to_json(config->cfg).dump(2));
    return REVAL_OK;
  });
}

void reval_config_free(reval_config* config) { delete config; }

reval_status reval_record_load(const char* path, reval_record** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new reval_record{load_record(path)};
    return REVAL_OK;
  });
}

reval_status reval_record_save(const reval_record* record, const char* path) {
  return guard([&] {
    need(record, "record");
    need(path, "path");
    save_record(record->rec, path, format_from_path(path));
    return REVAL_OK;
  });
}

reval_status reval_record_info(const reval_record* record, char** out_json) {
  return guard([&] {
    need(record, "record");
    need(out_json, "out_json");
    nlohmann::json leads = nlohmann::json::array();
    for (auto l : record->rec.lead_names()) leads.push_back(std::string(lead_name(l)));
    const nlohmann::json j = {{"record_id", record->rec.record_id()},
                              {"sampling_rate_hz", record->rec.sampling_rate_hz()},
                              {"n_samples", record->rec.n_samples()},
                              {"leads", leads}};
    *out_json = dup(j.dump());
    return REVAL_OK;
  });
}

reval_status reval_record_lead(const reval_record* record, const char* lead, float* buffer, size_t capacity,
                               size_t* n_written) {
  return guard([&] {
    need(record, "record");
    need(lead, "lead");
    need(n_written, "n_written");
    const auto l = parse_lead(lead);
    if (!l) throw InvalidArgument(std::string("unknown lead '") + lead + "'");
    const auto samples = record->rec.lead(*l);
    const size_t n = std::min(capacity, samples.size());
    if (n) need(buffer, "buffer");
    std::copy_n(samples.begin(), n, buffer);
    *n_written = n;
    return REVAL_OK;
  });
}

reval_status reval_record_features(const reval_record* record, const reval_config* config,
                                   const char* delineation_path, char** out_json) {
  return guard([&] {
    need(record, "record");
    need(out_json, "out_json");
    const HarnessConfig c = config_or_default(config);
    if (delineation_path) {
      const Delineation d = import_delineation(delineation_path, record->rec);
      *out_json = dup(features_to_json(compute_features(record->rec, d, c.delineator.qtc)).dump(2));
      return REVAL_OK;
    }
    const EcgRecord rec = resample_record(record->rec, c.resample_hz);
    const Delineation d = delineate(rec, c.delineator);
    *out_json = dup(features_to_json(compute_features(rec, d, c.delineator.qtc)).dump(2));
    return REVAL_OK;
  });
}

reval_status reval_synthesize(const char* spec_json, reval_record** out, char** truth_json) {
  return guard([&] {
    need(spec_json, "spec_json");
    need(out, "out");
    const auto j = nlohmann::json::parse(spec_json, nullptr, false);
    if (j.is_discarded()) throw ConfigError("synth spec is not valid JSON");
    SynthResult res = synthesize_ecg(synth_spec_from_json(j));
    std::string truth = delineation_to_json(res.truth).dump();
    auto* rec = new reval_record{std::move(res.record)};
    if (truth_json) {
      try {
        *truth_json = dup(truth);
      } catch (...) {
        delete rec;
        throw;
      }
    }
    *out = rec;
    return REVAL_OK;
  });
}

void reval_record_free(reval_record* record) { delete record; }

reval_status reval_extract(const char* text, const reval_config* config, char** out_json) {
  return guard([&] {
    need(text, "text");
    need(out_json, "out_json");
    const HarnessConfig c = config_or_default(config);
    const Resources res = load_resources(c);
    const ExtractionResult ex = extract_findings(text, *res.lexicon, c.limits);
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : ex.findings) {
      nlohmann::json fj = finding_to_json(f);
      fj["canonical"] = canonicalize(f);
      findings.push_back(std::move(fj));
    }
    *out_json = dup(nlohmann::json{{"findings", findings}, {"residual", ex.residual}}.dump(2));
    return REVAL_OK;
  });
}

reval_status reval_kb_build(const char* corpus_dir, const char* label_map_path, const reval_config* config,
                            reval_kb** out, char** log_json) {
  return guard([&] {
    need(corpus_dir, "corpus_dir");
    need(label_map_path, "label_map_path");
    need(out, "out");
    const HarnessConfig c = config_or_default(config);
    const Resources res = load_resources(c);
    nlohmann::json label_map;
    try {
      label_map = detail::read_json_file(label_map_path);
    } catch (const FormatError& e) {
      throw ConfigError(std::string("label map: ") + e.what());
    }
    KbBuild built = build_kb(corpus_dir, label_map, c, res);
    std::string log = built.log.dump(2);
    auto* kb = new reval_kb{std::move(built.kb)};
    if (log_json) {
      try {
        *log_json = dup(log);
      } catch (...) {
        delete kb;
        throw;
      }
    }
    *out = kb;
    return REVAL_OK;
  });
}

reval_status reval_kb_load(const char* dir, reval_kb** out) {
  return guard([&] {
    need(dir, "dir");
    need(out, "out");
    *out = new reval_kb{load_kb(dir)};
    return REVAL_OK;
  });
}

reval_status reval_kb_save(const reval_kb* kb, const char* dir) {
  return guard([&] {
    need(kb, "kb");
    need(dir, "dir");
    save_kb(kb->kb, dir);
    return REVAL_OK;
  });
}

size_t reval_kb_size(const reval_kb* kb) { return kb ? kb->kb.size() : 0; }

reval_status reval_kb_query(const reval_kb* kb, const reval_config* config, const char* text, size_t k,
                            char** out_json) {
  return guard([&] {
    need(kb, "kb");
    need(text, "text");
    need(out_json, "out_json");
    const Resources res = load_resources(config_or_default(config));
    *out_json = dup(query_kb(kb->kb, *res.embedder, text, k).dump(2));
    return REVAL_OK;
  });
}

void reval_kb_free(reval_kb* kb) { delete kb; }

reval_status reval_eval_run(const char* manifest_path, const reval_kb* kb, const reval_config* config,
                            reval_report** out) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(kb, "kb");
    need(out, "out");
    const HarnessConfig c = config_or_default(config);
    const Resources res = load_resources(c);
    const Manifest m = load_manifest(manifest_path);
    *out = new reval_report{run_model_eval(m, kb->kb, c, res)};
    if (report_success_count((*out)->j) == 0 && !m.rows.empty())
      return fail(REVAL_E_ALL_ROWS_FAILED, "every manifest row failed");
    return REVAL_OK;
  });
}

reval_status reval_assess(const char* manifest_path, int adversarial, const reval_config* config,
                          reval_report** out) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(out, "out");
    const HarnessConfig c = config_or_default(config);
    const Resources res = load_resources(c);
    const Manifest m = load_manifest(manifest_path);
    *out = new reval_report{run_assessment(m, adversarial != 0, c, res)};
    if (report_success_count((*out)->j) == 0 && !m.rows.empty())
      return fail(REVAL_E_ALL_ROWS_FAILED, "every manifest row failed");
    return REVAL_OK;
  });
}

reval_status reval_report_load(const char* path, reval_report** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    nlohmann::json j = detail::read_json_file(path);
    check_report_consistency(j);
    *out = new reval_report{std::move(j)};
    return REVAL_OK;
  });
}

reval_status reval_report_to_json(const reval_report* report, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    *out = dup(report->j.dump(2));
    return REVAL_OK;
  });
}

size_t reval_report_success_count(const reval_report* report) {
  if (!report || !report->j.contains("traces")) return 0;
  return report->j["traces"].size();
}

size_t reval_report_failure_count(const reval_report* report) {
  if (!report || !report->j.contains("failures")) return 0;
  return report->j["failures"].size();
}

reval_status reval_report_emit(const reval_report* report, const char* out_dir, const char* formats) {
  return guard([&] {
    need(report, "report");
    need(out_dir, "out_dir");
    emit_report(report->j, out_dir, parse_report_formats(formats ? formats : "json"));
    return REVAL_OK;
  });
}

void reval_report_free(reval_report* report) { delete report; }

reval_status reval_split(const char* manifest_path, double ratio, uint64_t seed, const char* first_path,
                         const char* second_path, size_t* n_first, size_t* n_second) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(first_path, "first_path");
    need(second_path, "second_path");
    const Manifest m = load_manifest(manifest_path);
    const auto [a, b] = split_dataset(m.rows, ratio, seed);
    save_manifest(rebase_rows(a, m.base_dir, std::filesystem::path(first_path).parent_path()), first_path);
    save_manifest(rebase_rows(b, m.base_dir, std::filesystem::path(second_path).parent_path()), second_path);
    if (n_first) *n_first = a.size();
    if (n_second) *n_second = b.size();
    return REVAL_OK;
  });
}

reval_status reval_pearson(const double* x, const double* y, size_t n, double* r, int* defined) {
  return guard([&] {
    need(x, "x");
    need(y, "y");
    need(r, "r");
    need(defined, "defined");
    const auto v = pearson_r(std::vector<double>(x, x + n), std::vector<double>(y, y + n));
    *defined = v.has_value() ? 1 : 0;
    *r = v.value_or(0.0);
    return REVAL_OK;
  });
}

}  // extern "C"
