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

#include "reasoneval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "io_util.hpp"
#include "parallel.hpp"
#include "reasoneval/error.hpp"
#include "reasoneval/vocab.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Typed access to one config object; rejects keys nobody asked about.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  ~Section() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& raw(const std::string& key) { return j_.at(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else {
        if (!v.is_string()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_endpoint(Section& s, Endpoint& e) {
  s.read("url", e.url);
  s.read("api_key_env", e.api_key_env);
  s.read("rate_per_s", e.rate_per_s);
  s.read("burst", e.burst);
  s.read("concurrent", e.concurrent);
  if (e.rate_per_s < 0.0 || !std::isfinite(e.rate_per_s)) throw ConfigError("rate_per_s must be >= 0");
  if (e.burst < 1.0) throw ConfigError("burst must be >= 1");
}

json endpoint_to_json(const Endpoint& e) {
  return {{"url", e.url},
          {"api_key_env", e.api_key_env},
          {"rate_per_s", e.rate_per_s},
          {"burst", e.burst},
          {"concurrent", e.concurrent}};
}

std::string qtc_name(QtcFormula q) { return q == QtcFormula::kBazett ? "bazett" : "fridericia"; }

}  // namespace

HarnessConfig config_from_json(const json& j) {
  HarnessConfig c;
  Section top(j, "config");
  if (top.has("limits")) {
    try {
      c.limits = limits_from_json(top.raw("limits"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.limits: ") + e.what());
    }
  }
  if (top.has("delineator")) {
    Section d(top.raw("delineator"), "config.delineator");
    d.read("bandpass_low_hz", c.delineator.bandpass_low_hz);
    d.read("bandpass_high_hz", c.delineator.bandpass_high_hz);
    d.read("integration_window_ms", c.delineator.integration_window_ms);
    d.read("refractory_ms", c.delineator.refractory_ms);
    d.read("threshold_decay", c.delineator.threshold_decay);
    d.read("search_back", c.delineator.search_back);
    std::string qtc = qtc_name(c.delineator.qtc);
    d.read("qtc", qtc);
    if (qtc == "bazett") {
      c.delineator.qtc = QtcFormula::kBazett;
    } else if (qtc == "fridericia") {
      c.delineator.qtc = QtcFormula::kFridericia;
    } else {
      throw ConfigError("config.delineator.qtc: expected bazett or fridericia");
    }
    d.finish();
  }
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  if (c.workers < 1) throw ConfigError("config.workers must be >= 1");
  if (top.has("ks")) {
    const json& ks = top.raw("ks");
    if (!ks.is_array() || ks.empty()) throw ConfigError("config.ks: expected a non-empty array");
    std::set<std::size_t> uniq;
    for (const auto& k : ks) {
      if (!k.is_number_unsigned() || k.get<std::size_t>() == 0) throw ConfigError("config.ks: values must be >= 1");
      uniq.insert(k.get<std::size_t>());
    }
    c.ks.assign(uniq.begin(), uniq.end());
  }
  if (top.has("flip_mode")) {
    std::string m;
    top.read("flip_mode", m);
    const auto fm = parse_flip_mode(m);
    if (!fm) throw ConfigError("config.flip_mode: expected all or one");
    c.flip_mode = *fm;
  }
  top.read("resample_hz", c.resample_hz);
  if (!(c.resample_hz > 0.0) || !std::isfinite(c.resample_hz)) throw ConfigError("config.resample_hz must be > 0");
  if (top.has("embedder")) {
    Section e(top.raw("embedder"), "config.embedder");
    e.read("type", c.embedder.type);
    e.read("dim", c.embedder.dim);
    e.read("tf_weighting", c.embedder.tf_weighting);
    e.read("model", c.embedder.model);
    read_endpoint(e, c.embedder.endpoint);
    e.finish();
    if (c.embedder.type != "builtin" && c.embedder.type != "http")
      throw ConfigError("config.embedder.type: expected builtin or http");
    if (c.embedder.dim <= 0) throw ConfigError("config.embedder.dim must be > 0");
  }
  if (top.has("cleaners")) {
    const json& arr = top.raw("cleaners");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config.cleaners: expected a non-empty array");
    c.cleaners.clear();
    std::set<std::string> tags;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section s(arr[i], "config.cleaners[" + std::to_string(i) + "]");
      CleanerConfig cc;
      s.read("type", cc.type);
      cc.tag = cc.type == "builtin" ? "builtin" : "";
      s.read("tag", cc.tag);
      read_endpoint(s, cc.endpoint);
      s.finish();
      if (cc.type != "builtin" && cc.type != "http") throw ConfigError("cleaner type must be builtin or http");
      if (cc.type == "builtin" && cc.tag != "builtin") throw ConfigError("the builtin cleaner's tag is fixed");
      if (cc.tag.empty()) throw ConfigError("http cleaners need a tag");
      if (!tags.insert(cc.tag).second) throw ConfigError("duplicate cleaner tag '" + cc.tag + "'");
      c.cleaners.push_back(cc);
    }
  }
  if (top.has("strategies")) {
    const json& arr = top.raw("strategies");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config.strategies: expected a non-empty array");
    c.strategies.clear();
    for (const auto& v : arr) {
      const auto st = v.is_string() ? parse_strategy(v.get<std::string>()) : std::nullopt;
      if (!st) throw ConfigError("config.strategies: expected exact_quote or structured_synthesis");
      if (std::find(c.strategies.begin(), c.strategies.end(), *st) == c.strategies.end()) c.strategies.push_back(*st);
    }
  }
  if (top.has("retry")) {
    Section r(top.raw("retry"), "config.retry");
    r.read("timeout_ms", c.retry.timeout_ms);
    r.read("retries", c.retry.retries);
    r.read("backoff_initial_ms", c.retry.backoff_initial_ms);
    r.read("backoff_factor", c.retry.backoff_factor);
    r.read("backoff_max_ms", c.retry.backoff_max_ms);
    r.finish();
    if (c.retry.timeout_ms <= 0 || c.retry.retries < 0 || c.retry.backoff_initial_ms < 0 ||
        c.retry.backoff_factor < 1.0 || c.retry.backoff_max_ms < 0)
      throw ConfigError("config.retry: values out of range");
  }
  top.read("lexicon", c.lexicon_path);
  top.read("antonyms", c.antonyms_path);
  top.read("synonyms", c.synonyms_path);
  top.finish();
  try {
    c.delineator.validate(c.resample_hz);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config.delineator: ") + e.what());
  }
  return c;
}

json config_to_json(const HarnessConfig& c) {
  json cleaners = json::array();
  for (const auto& cc : c.cleaners) {
    json x = {{"type", cc.type}, {"tag", cc.tag}};
    if (cc.type == "http") x.update(endpoint_to_json(cc.endpoint));
    cleaners.push_back(x);
  }
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(to_string(s));
  json emb = {{"type", c.embedder.type}, {"dim", c.embedder.dim}, {"tf_weighting", c.embedder.tf_weighting}};
  if (c.embedder.type == "http") {
    emb["model"] = c.embedder.model;
    emb.update(endpoint_to_json(c.embedder.endpoint));
  }
  const auto& d = c.delineator;
  return {{"limits", limits_to_json(c.limits)},
          {"delineator",
           {{"bandpass_low_hz", d.bandpass_low_hz},
            {"bandpass_high_hz", d.bandpass_high_hz},
            {"integration_window_ms", d.integration_window_ms},
            {"refractory_ms", d.refractory_ms},
            {"threshold_decay", d.threshold_decay},
            {"search_back", d.search_back},
            {"qtc", qtc_name(d.qtc)}}},
          {"seed", c.seed},
          {"workers", c.workers},
          {"ks", c.ks},
          {"flip_mode", c.flip_mode == FlipMode::kAll ? "all" : "one"},
          {"resample_hz", c.resample_hz},
          {"embedder", emb},
          {"cleaners", cleaners},
          {"strategies", strategies},
          {"retry",
           {{"timeout_ms", c.retry.timeout_ms},
            {"retries", c.retry.retries},
            {"backoff_initial_ms", c.retry.backoff_initial_ms},
            {"backoff_factor", c.retry.backoff_factor},
            {"backoff_max_ms", c.retry.backoff_max_ms}}},
          {"lexicon", c.lexicon_path},
          {"antonyms", c.antonyms_path},
          {"synonyms", c.synonyms_path}};
}

HarnessConfig load_config(const fs::path& path) {
  json j;
  try {
    j = detail::read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

namespace {

template <typename T>
std::shared_ptr<const T> borrow(const T& x) {
  return std::shared_ptr<const T>(&x, [](const T*) {});
}

// Serializes calls into an embedder that declared itself serial-only.
class SerialEmbedder : public Embedder {
 public:
  explicit SerialEmbedder(std::shared_ptr<const Embedder> inner) : inner_(std::move(inner)) {}
  int dim() const override { return inner_->dim(); }
  std::string fingerprint() const override { return inner_->fingerprint(); }
  Embedding embed(std::string_view text) const override {
    std::lock_guard lock(mu_);
    return inner_->embed(text);
  }

 private:
  std::shared_ptr<const Embedder> inner_;
  mutable std::mutex mu_;
};

}  // namespace

Resources load_resources(const HarnessConfig& c) {
  Resources r;
  try {
    r.lexicon = c.lexicon_path.empty() ? borrow(Lexicon::builtin())
                                       : std::make_shared<const Lexicon>(Lexicon::load(c.lexicon_path));
    r.antonyms = c.antonyms_path.empty() ? borrow(AntonymMap::builtin())
                                         : std::make_shared<const AntonymMap>(AntonymMap::load(c.antonyms_path));
    r.synonyms = c.synonyms_path.empty() ? borrow(SynonymTable::builtin())
                                         : std::make_shared<const SynonymTable>(SynonymTable::load(c.synonyms_path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (c.embedder.type == "http") {
    std::shared_ptr<const Embedder> e =
        std::make_shared<HttpEmbedder>(c.embedder.model, c.embedder.dim, c.embedder.endpoint, c.retry);
    r.embedder = e->concurrent() ? e : std::make_shared<SerialEmbedder>(e);
  } else {
    r.embedder = std::make_shared<HashedEmbedder>(c.embedder.dim, c.embedder.tf_weighting);
  }
  for (const auto& cc : c.cleaners) {
    if (cc.type == "http") {
      r.cleaners.push_back(std::make_shared<HttpCleaner>(cc.tag, cc.endpoint, c.retry));
    } else {
      r.cleaners.push_back(std::make_shared<BuiltinCleaner>());
    }
  }
  return r;
}

namespace {

std::string req_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw FormatError("manifest line " + std::to_string(line) + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::optional<std::string> opt_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string())
    throw FormatError("manifest line " + std::to_string(line) + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

ManifestRow row_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw FormatError("manifest line " + std::to_string(line) + ": expected an object");
  static const std::set<std::string> known{"trace_id",         "record_path", "gt_labels",  "gt_label",
                                           "predicted_label",  "reasoning_trace", "model_tag", "delineation_path",
                                           "patient_id",       "task"};
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw FormatError("manifest line " + std::to_string(line) + ": unknown field '" + k + "'");
  }
  ManifestRow r;
  r.trace_id = req_string(j, "trace_id", line);
  if (r.trace_id.empty()) throw FormatError("manifest line " + std::to_string(line) + ": empty trace_id");
  r.record_path = req_string(j, "record_path", line);
  r.reasoning_trace = req_string(j, "reasoning_trace", line);
  r.model_tag = opt_string(j, "model_tag", line).value_or("");
  r.task = opt_string(j, "task", line).value_or("");
  r.predicted_label = opt_string(j, "predicted_label", line);
  r.delineation_path = opt_string(j, "delineation_path", line);
  r.patient_id = opt_string(j, "patient_id", line);
  if (j.contains("gt_labels")) {
    const json& g = j.at("gt_labels");
    if (!g.is_array()) throw FormatError("manifest line " + std::to_string(line) + ": gt_labels must be an array");
    for (const auto& x : g) {
      if (!x.is_string()) throw FormatError("manifest line " + std::to_string(line) + ": gt_labels must be strings");
      r.gt_labels.push_back(x.get<std::string>());
    }
  } else if (auto g = opt_string(j, "gt_label", line)) {
    r.gt_labels.push_back(*g);
  }
  if (r.gt_labels.empty()) throw FormatError("manifest line " + std::to_string(line) + ": no ground-truth label");
  return r;
}

}  // namespace

ManifestRow manifest_row_from_json(const json& j) { return row_from_json(j, 0); }

json manifest_row_to_json(const ManifestRow& r) {
  json j = {{"trace_id", r.trace_id},
            {"record_path", r.record_path},
            {"gt_labels", r.gt_labels},
            {"reasoning_trace", r.reasoning_trace},
            {"model_tag", r.model_tag}};
  if (!r.task.empty()) j["task"] = r.task;
  if (r.predicted_label) j["predicted_label"] = *r.predicted_label;
  if (r.delineation_path) j["delineation_path"] = *r.delineation_path;
  if (r.patient_id) j["patient_id"] = *r.patient_id;
  return j;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (detail::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError("manifest line " + std::to_string(n) + ": invalid JSON");
    ManifestRow r = row_from_json(j, n);
    if (!ids.insert(r.trace_id).second)
      throw FormatError("manifest line " + std::to_string(n) + ": duplicate trace_id '" + r.trace_id + "'");
    m.rows.push_back(std::move(r));
  }
  return m;
}

void save_manifest(const std::vector<ManifestRow>& rows, const fs::path& path) {
  std::string out;
  for (const auto& r : rows) out += manifest_row_to_json(r).dump() + "\n";
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  detail::write_text_file(path, out);
}

std::vector<ManifestRow> rebase_rows(std::vector<ManifestRow> rows, const fs::path& from_dir, const fs::path& to_dir) {
  const fs::path from = fs::absolute(from_dir.empty() ? "." : from_dir).lexically_normal();
  const fs::path to = fs::absolute(to_dir.empty() ? "." : to_dir).lexically_normal();
  auto fix = [&](std::string& p) {
    const fs::path q(p);
    if (q.is_absolute()) return;
    p = (from / q).lexically_normal().lexically_relative(to).generic_string();
  };
  for (auto& r : rows) {
    fix(r.record_path);
    if (r.delineation_path) fix(*r.delineation_path);
  }
  return rows;
}

std::pair<std::vector<ManifestRow>, std::vector<ManifestRow>> split_dataset(const std::vector<ManifestRow>& rows,
                                                                            double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must be in (0, 1)");
  // Groups in first-appearance order, so the shuffle input is fixed.
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> by_patient;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].patient_id) {
      auto [it, fresh] = by_patient.emplace(*rows[i].patient_id, groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  // Fisher-Yates with raw engine output: std::shuffle and the standard
  // distributions are implementation-defined.
  std::mt19937_64 rng(seed);
  for (std::size_t i = groups.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(groups[i - 1], groups[j]);
  }
  const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(rows.size())));
  std::vector<bool> first(rows.size(), false);
  std::size_t taken = 0;
  for (const auto& g : groups) {
    if (taken + g.size() > target) continue;
    for (auto i : g) first[i] = true;
    taken += g.size();
    if (taken == target) break;
  }
  std::pair<std::vector<ManifestRow>, std::vector<ManifestRow>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) (first[i] ? out.first : out.second).push_back(rows[i]);
  return out;
}

std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson_r: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson_r: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool final_answer_correct(const std::optional<std::string>& predicted, const std::vector<std::string>& gt_labels) {
  if (!predicted) return false;
  std::set<std::string> p, g;
  for (const auto& part : detail::split_any(*predicted, ";")) {
    auto n = normalize_label(part);
    if (!n.empty()) p.insert(std::move(n));
  }
  for (const auto& l : gt_labels) {
    auto n = normalize_label(l);
    if (!n.empty()) g.insert(std::move(n));
  }
  return !p.empty() && p == g;
}

PreparedRow prepare_row(const ManifestRow& row, const fs::path& base_dir, const HarnessConfig& c) {
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  };
  EcgRecord rec = load_record(resolve(row.record_path));
  if (row.delineation_path) {
    const Delineation d = import_delineation(resolve(*row.delineation_path), rec);
    FeatureTable ft = compute_features(rec, d, c.delineator.qtc);
    return {std::move(rec), std::move(ft)};
  }
  if (rec.sampling_rate_hz() != c.resample_hz) rec = resample_record(rec, c.resample_hz);
  const Delineation d = delineate(rec, c.delineator);
  FeatureTable ft = compute_features(rec, d, c.delineator.qtc);
  return {std::move(rec), std::move(ft)};
}

namespace {

constexpr const char* kEvalSchema = "reasoneval.eval_report/1";
constexpr const char* kAssessmentSchema = "reasoneval.assessment_report/1";

struct Outcome {
  std::string model_tag;
  std::string task;
  TraceEvaluation perception;
  DeductionResult deduction;
  bool final_correct = false;
};

struct FailureRef {
  std::string model_tag;
  std::string task;
};

json perception_block(const PerceptionMetrics& m) {
  return {{"acc_at_thresh_50", metric_to_json(m.acc_at_50)},
          {"acc_at_thresh_100", metric_to_json(m.acc_at_100)},
          {"global_accuracy_micro", metric_to_json(m.global_pooled)},
          {"global_accuracy_macro", metric_to_json(m.global_macro)}};
}

json aggregate(const std::vector<const Outcome*>& items, std::size_t n_failed, const std::vector<std::size_t>& ks) {
  std::vector<TraceEvaluation> evals;
  std::vector<DeductionResult> deds;
  MetricValue fa;
  for (const auto* o : items) {
    evals.push_back(o->perception);
    deds.push_back(o->deduction);
    ++fa.denominator;
    if (o->final_correct) ++fa.numerator;
  }
  if (fa.denominator) fa.value = static_cast<double>(fa.numerator) / static_cast<double>(fa.denominator);
  const DeductionMetrics dm = deduction_metrics(deds, ks);
  json prec = json::object();
  for (const auto& [k, v] : dm.mean_precision_at) prec[std::to_string(k)] = v ? json(*v) : json(nullptr);
  return {{"n_traces", items.size()},
          {"n_failed", n_failed},
          {"perception", perception_block(perception_metrics(evals))},
          {"deduction", {{"precision_at", prec}, {"n_defined", dm.n_defined}, {"n_undefined", dm.n_undefined}}},
          {"final_accuracy", metric_to_json(fa)}};
}

json aggregates_block(const std::vector<Outcome>& outcomes, const std::vector<FailureRef>& failures,
                      const std::vector<std::size_t>& ks) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<const Outcome*>> by_mt;
  std::map<std::string, std::vector<const Outcome*>> by_m;
  std::map<Key, std::size_t> fail_mt;
  std::map<std::string, std::size_t> fail_m;
  std::vector<const Outcome*> all;
  for (const auto& o : outcomes) {
    by_mt[{o.model_tag, o.task}].push_back(&o);
    by_m[o.model_tag].push_back(&o);
    all.push_back(&o);
  }
  for (const auto& f : failures) {
    by_mt[{f.model_tag, f.task}];
    by_m[f.model_tag];
    ++fail_mt[{f.model_tag, f.task}];
    ++fail_m[f.model_tag];
  }
  json groups = json::array();
  for (const auto& [key, items] : by_mt) {
    json g = aggregate(items, fail_mt[key], ks);
    g["model_tag"] = key.first;
    g["task"] = key.second;
    groups.push_back(std::move(g));
  }
  json models = json::array();
  for (const auto& [m, items] : by_m) {
    json g = aggregate(items, fail_m[m], ks);
    g["model_tag"] = m;
    models.push_back(std::move(g));
  }
  return {{"overall", aggregate(all, failures.size(), ks)}, {"by_model", models}, {"by_model_task", groups}};
}

std::optional<double> metric_value(const json& metric) {
  if (!metric.contains("value") || metric.at("value").is_null()) return std::nullopt;
  return metric.at("value").get<double>();
}

json outcome_to_json(const ManifestRow& row, const Outcome& o, const ExtractionResult& ex) {
  return {{"trace_id", row.trace_id},
          {"model_tag", row.model_tag},
          {"task", row.task},
          {"gt_labels", row.gt_labels},
          {"predicted_label", row.predicted_label ? json(*row.predicted_label) : json(nullptr)},
          {"final_correct", o.final_correct},
          {"n_findings", ex.findings.size()},
          {"residual_sentences", ex.residual.size()},
          {"perception", trace_evaluation_to_json(o.perception)},
          {"deduction", deduction_to_json(o.deduction)}};
}

Status status_from_string(const std::string& s) {
  if (s == "Verified") return Status::kVerified;
  if (s == "Refuted") return Status::kRefuted;
  if (s == "Unverifiable") return Status::kUnverifiable;
  throw FormatError("report: unknown status '" + s + "'");
}

// Rebuilds what the aggregates depend on from one stored trace entry. Counts
// come from the per-finding statuses, precision from the retrieved labels.
Outcome outcome_from_json(const json& t, const std::vector<std::size_t>& ks) {
  Outcome o;
  o.model_tag = t.at("model_tag").get<std::string>();
  o.task = t.at("task").get<std::string>();
  const auto gt = t.at("gt_labels").get<std::vector<std::string>>();
  std::optional<std::string> pred;
  if (!t.at("predicted_label").is_null()) pred = t.at("predicted_label").get<std::string>();
  o.final_correct = final_answer_correct(pred, gt);

  const json& p = t.at("perception");
  o.perception.trace_id = p.at("trace_id").get<std::string>();
  for (const auto& r : p.at("results")) {
    VerificationResult v;
    v.status = status_from_string(r.at("status").get<std::string>());
    if (v.status != Status::kUnverifiable) ++o.perception.n_verifiable;
    if (v.status == Status::kVerified) ++o.perception.n_verified;
    o.perception.results.push_back(std::move(v));
  }
  if (o.perception.n_verifiable > 0)
    o.perception.verified_fraction = static_cast<double>(o.perception.n_verified) / o.perception.n_verifiable;

  const json& d = t.at("deduction");
  o.deduction.trace_id = d.at("trace_id").get<std::string>();
  o.deduction.gt_labels = d.at("gt_labels").get<std::vector<std::string>>();
  o.deduction.undefined = d.value("undefined", false);
  for (const auto& r : d.at("retrieved")) {
    o.deduction.retrieved.push_back(
        {r.at("entry_id").get<std::int64_t>(), r.at("label").get<std::string>(), r.at("cosine").get<double>()});
  }
  if (!o.deduction.undefined) {
    for (auto k : ks) {
      if (k > o.deduction.retrieved.size()) throw FormatError("report: retrieved list shorter than k");
      o.deduction.precision_at[k] = precision_at_k(o.deduction.retrieved, o.deduction.gt_labels, k);
    }
  }
  return o;
}

}  // namespace

json recompute_correlation(const json& aggregates, const std::vector<std::size_t>& ks) {
  const bool has5 = std::find(ks.begin(), ks.end(), std::size_t{5}) != ks.end();
  struct Axis {
    const char* name;
    std::function<std::optional<double>(const json&)> get;
  };
  const std::vector<Axis> axes{
      {"global_accuracy_micro",
       [](const json& g) { return metric_value(g.at("perception").at("global_accuracy_micro")); }},
      {"acc_at_thresh_100", [](const json& g) { return metric_value(g.at("perception").at("acc_at_thresh_100")); }},
      {"p_at_5",
       [has5](const json& g) -> std::optional<double> {
         if (!has5) return std::nullopt;
         const json& v = g.at("deduction").at("precision_at").at("5");
         return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
       }},
  };
  json pairs = json::array();
  for (const auto& ax : axes) {
    std::vector<double> xs, ys;
    for (const auto& g : aggregates.at("by_model_task")) {
      const auto x = ax.get(g);
      const auto y = metric_value(g.at("final_accuracy"));
      if (x && y) {
        xs.push_back(*x);
        ys.push_back(*y);
      }
    }
    json p = {{"x", ax.name}, {"y", "final_accuracy"}, {"n_points", xs.size()}, {"r", nullptr}};
    if (xs.size() < 2) {
      p["reason"] = has5 || std::string(ax.name) != "p_at_5" ? "fewer than two model_tag x task points"
                                                               : "k=5 not configured";
    } else if (auto r = pearson_r(xs, ys)) {
      p["r"] = *r;
    } else {
      p["reason"] = "zero variance";
    }
    pairs.push_back(std::move(p));
  }
  return {{"unit", "model_tag x task"}, {"pairs", pairs}};
}

json run_model_eval(const Manifest& manifest, const KnowledgeBase& kb, const HarnessConfig& c, const Resources& res) {
  if (kb.embedder_fingerprint() != res.embedder->fingerprint())
    throw ConfigError("knowledge base was built with embedder '" + kb.embedder_fingerprint() +
                      "' but the config selects '" + res.embedder->fingerprint() + "'");
  const auto& rows = manifest.rows;
  struct Slot {
    std::optional<Outcome> outcome;
    json entry;
    std::string error;
  };
  std::vector<Slot> slots(rows.size());
  DeductionOptions dopt;
  dopt.ks = c.ks;
  dopt.synonyms = res.synonyms.get();

  detail::parallel_for(rows.size(), c.workers, [&](std::size_t i) {
    const ManifestRow& row = rows[i];
    try {
      const PreparedRow prep = prepare_row(row, manifest.base_dir, c);
      const ExtractionResult ex = extract_findings(row.reasoning_trace, *res.lexicon, c.limits);
      Outcome o;
      o.model_tag = row.model_tag;
      o.task = row.task;
      o.perception = verify_trace(row.trace_id, ex.findings, prep.features, prep.record, c.limits);
      o.deduction = evaluate_deduction(row.trace_id, row.reasoning_trace, row.predicted_label.value_or(""),
                                       row.gt_labels, kb, *res.embedder, dopt);
      o.final_correct = final_answer_correct(row.predicted_label, row.gt_labels);
      slots[i].entry = outcome_to_json(row, o, ex);
      slots[i].outcome = std::move(o);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  std::vector<Outcome> outcomes;
  std::vector<FailureRef> frefs;
  json traces = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (slots[i].outcome) {
      outcomes.push_back(std::move(*slots[i].outcome));
      traces.push_back(std::move(slots[i].entry));
    } else {
      frefs.push_back({rows[i].model_tag, rows[i].task});
      failures.push_back({{"row", i},
                          {"trace_id", rows[i].trace_id},
                          {"model_tag", rows[i].model_tag},
                          {"task", rows[i].task},
                          {"error", slots[i].error}});
    }
  }
  json cfg = config_to_json(c);
  cfg.erase("workers");  // reports must not depend on the worker count
  json aggregates = aggregates_block(outcomes, frefs, c.ks);
  json correlation = recompute_correlation(aggregates, c.ks);
  return {{"schema", kEvalSchema},
          {"config", cfg},
          {"kb", {{"n_entries", kb.size()}, {"dim", kb.dim()}, {"embedder_fingerprint", kb.embedder_fingerprint()}}},
          {"traces", traces},
          {"failures", failures},
          {"failure_count", failures.size()},
          {"aggregates", aggregates},
          {"correlation", correlation}};
}

json run_assessment(const Manifest& manifest, bool adversarial, const HarnessConfig& c, const Resources& res) {
  const auto& rows = manifest.rows;
  std::vector<std::optional<PreparedRow>> prepared(rows.size());
  std::vector<std::string> errors(rows.size());
  detail::parallel_for(rows.size(), c.workers, [&](std::size_t i) {
    try {
      prepared[i] = prepare_row(rows[i], manifest.base_dir, c);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<AssessmentItem> items;
  std::vector<std::pair<std::string, std::string>> load_failures;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (prepared[i]) {
      items.push_back({rows[i].trace_id, &prepared[i]->record, &prepared[i]->features, rows[i].reasoning_trace});
    } else {
      load_failures.emplace_back(rows[i].trace_id, errors[i]);
    }
  }
  AssessmentOptions opt;
  opt.limits = c.limits;
  opt.lexicon = res.lexicon.get();
  opt.workers = c.workers;
  AssessmentReport rep = adversarial ? run_adversarial_assessment(items, *res.antonyms, c.seed, c.flip_mode, opt)
                                     : run_supporting_assessment(items, opt);
  rep.failures.insert(rep.failures.begin(), load_failures.begin(), load_failures.end());
  json j = assessment_to_json(rep, c.limits);
  json cfg = config_to_json(c);
  cfg.erase("workers");
  j["schema"] = kAssessmentSchema;
  j["config"] = cfg;
  j["failure_count"] = rep.failures.size();
  return j;
}

json recompute_aggregates(const json& report) {
  try {
    const auto ks = report.at("config").at("ks").get<std::vector<std::size_t>>();
    std::vector<Outcome> outcomes;
    for (const auto& t : report.at("traces")) outcomes.push_back(outcome_from_json(t, ks));
    std::vector<FailureRef> frefs;
    for (const auto& f : report.at("failures"))
      frefs.push_back({f.at("model_tag").get<std::string>(), f.at("task").get<std::string>()});
    return aggregates_block(outcomes, frefs, ks);
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void check_report_consistency(const json& report) {
  const std::string schema = report.value("schema", "");
  try {
    if (schema == kEvalSchema) {
      const json agg = recompute_aggregates(report);
      if (agg.dump() != report.at("aggregates").dump())
        throw FormatError("report: aggregates differ from their recomputation");
      const auto ks = report.at("config").at("ks").get<std::vector<std::size_t>>();
      if (recompute_correlation(agg, ks).dump() != report.at("correlation").dump())
        throw FormatError("report: correlation block differs from its recomputation");
      if (report.at("failure_count").get<std::size_t>() != report.at("failures").size())
        throw FormatError("report: failure_count does not match the failures list");
    } else if (schema == kAssessmentSchema) {
      std::vector<TraceEvaluation> evals;
      for (const auto& t : report.at("traces")) {
        TraceEvaluation e;
        for (const auto& r : t.at("results")) {
          const Status s = status_from_string(r.at("status").get<std::string>());
          if (s != Status::kUnverifiable) ++e.n_verifiable;
          if (s == Status::kVerified) ++e.n_verified;
        }
        if (e.n_verifiable > 0) e.verified_fraction = static_cast<double>(e.n_verified) / e.n_verifiable;
        evals.push_back(std::move(e));
      }
      if (perception_block(perception_metrics(evals)).dump() != report.at("metrics").dump())
        throw FormatError("report: metrics differ from their recomputation");
    } else {
      throw FormatError("report: unknown schema '" + schema + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::size_t report_success_count(const json& report) { return report.at("traces").size(); }

unsigned parse_report_formats(std::string_view list) {
  unsigned f = 0;
  for (const auto& part : detail::split_any(list, ", ")) {
    if (part == "json") {
      f |= kReportJson;
    } else if (part == "csv") {
      f |= kReportCsv;
    } else if (part == "svg") {
      f |= kReportSvg;
    } else {
      throw ConfigError("unknown report format '" + part + "'");
    }
  }
  if (!f) throw ConfigError("no report format selected");
  return f;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(const json& v) {
  if (v.is_null()) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct BarGroup {
  std::string name;
  std::optional<double> a;
  std::optional<double> b;
};

std::string bar_chart(const std::string& title, const std::string& series_a, const std::string& series_b,
                      const std::vector<BarGroup>& groups) {
  const int left = 60, top = 50, plot_h = 240, group_w = 120, bar_w = 40;
  const int width = left + 20 + group_w * static_cast<int>(std::max<std::size_t>(groups.size(), 1));
  const int height = top + plot_h + 70;
  std::ostringstream o;
  char buf[64];
  auto y_of = [&](double v) { return top + plot_h - v * plot_h; };
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "  <text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  o << "  <rect x=\"" << left << "\" y=\"28\" width=\"10\" height=\"10\" fill=\"#4c72b0\"/>\n";
  o << "  <text x=\"" << left + 14 << "\" y=\"37\">" << xml_escape(series_a) << "</text>\n";
  o << "  <rect x=\"" << left + 160 << "\" y=\"28\" width=\"10\" height=\"10\" fill=\"#dd8452\"/>\n";
  o << "  <text x=\"" << left + 174 << "\" y=\"37\">" << xml_escape(series_b) << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    std::snprintf(buf, sizeof buf, "%.2f", v);
    o << "  <line x1=\"" << left << "\" x2=\"" << width - 10 << "\" y1=\"" << y_of(v) << "\" y2=\"" << y_of(v)
      << "\" stroke=\"#dddddd\"/>\n";
    o << "  <text x=\"" << left - 8 << "\" y=\"" << y_of(v) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int x0 = left + 10 + static_cast<int>(g) * group_w;
    o << "  <g class=\"bar-group\" data-model=\"" << xml_escape(groups[g].name) << "\">\n";
    auto bar = [&](const std::optional<double>& v, int x, const char* fill, const std::string& series) {
      if (!v) {
        o << "    <text x=\"" << x + bar_w / 2 << "\" y=\"" << top + plot_h - 4
          << "\" text-anchor=\"middle\" fill=\"#888888\">n/a</text>\n";
        return;
      }
      const double h = std::clamp(*v, 0.0, 1.0) * plot_h;
      std::snprintf(buf, sizeof buf, "%.3f", *v);
      o << "    <rect class=\"bar\" x=\"" << x << "\" y=\"" << top + plot_h - h << "\" width=\"" << bar_w
        << "\" height=\"" << h << "\" fill=\"" << fill << "\"><title>" << xml_escape(series) << " = " << buf
        << "</title></rect>\n";
    };
    bar(groups[g].a, x0, "#4c72b0", series_a);
    bar(groups[g].b, x0 + bar_w + 4, "#dd8452", series_b);
    o << "    <text x=\"" << x0 + bar_w << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
      << xml_escape(groups[g].name) << "</text>\n";
    o << "  </g>\n";
  }
  o << "  <line x1=\"" << left << "\" x2=\"" << width - 10 << "\" y1=\"" << top + plot_h << "\" y2=\""
    << top + plot_h << "\" stroke=\"#333333\"/>\n";
  o << "</svg>\n";
  return o.str();
}

bool is_eval(const json& report) { return report.value("schema", "") == kEvalSchema; }

}  // namespace

std::string report_csv(const json& report) {
  std::ostringstream o;
  if (is_eval(report)) {
    const auto ks = report.at("config").at("ks").get<std::vector<std::size_t>>();
    o << "model_tag,task,n_traces,n_failed,global_accuracy_micro,global_accuracy_macro,acc_at_thresh_50,"
         "acc_at_thresh_100";
    for (auto k : ks) o << ",p_at_" << k;
    o << ",final_accuracy\n";
    for (const auto& g : report.at("aggregates").at("by_model_task")) {
      const json& p = g.at("perception");
      o << csv_field(g.at("model_tag").get<std::string>()) << ',' << csv_field(g.at("task").get<std::string>()) << ','
        << g.at("n_traces").get<std::size_t>() << ',' << g.at("n_failed").get<std::size_t>() << ','
        << num(p.at("global_accuracy_micro").at("value")) << ',' << num(p.at("global_accuracy_macro").at("value"))
        << ',' << num(p.at("acc_at_thresh_50").at("value")) << ',' << num(p.at("acc_at_thresh_100").at("value"));
      for (auto k : ks) o << ',' << num(g.at("deduction").at("precision_at").at(std::to_string(k)));
      o << ',' << num(g.at("final_accuracy").at("value")) << '\n';
    }
  } else {
    const json& p = report.at("metrics");
    o << "mode,n_traces,n_failed,global_accuracy_micro,global_accuracy_macro,acc_at_thresh_50,acc_at_thresh_100\n";
    o << csv_field(report.at("mode").get<std::string>()) << ',' << report.at("traces").size() << ','
      << report.at("failures").size() << ',' << num(p.at("global_accuracy_micro").at("value")) << ','
      << num(p.at("global_accuracy_macro").at("value")) << ',' << num(p.at("acc_at_thresh_50").at("value")) << ','
      << num(p.at("acc_at_thresh_100").at("value")) << '\n';
  }
  return o.str();
}

std::string report_svg(const json& report) {
  std::vector<BarGroup> groups;
  auto opt = [](const json& v) { return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
  if (is_eval(report)) {
    for (const auto& g : report.at("aggregates").at("by_model")) {
      const json& prec = g.at("deduction").at("precision_at");
      groups.push_back({g.at("model_tag").get<std::string>(),
                        opt(g.at("perception").at("acc_at_thresh_100").at("value")),
                        prec.contains("5") ? opt(prec.at("5")) : std::nullopt});
    }
    return bar_chart("Perception and deduction per model", "Acc@Thresh100", "P@5", groups);
  }
  const json& p = report.at("metrics");
  groups.push_back({report.at("mode").get<std::string>(), opt(p.at("acc_at_thresh_100").at("value")),
                    opt(p.at("global_accuracy_micro").at("value"))});
  return bar_chart("Assessment", "Acc@Thresh100", "Global accuracy (micro)", groups);
}

std::vector<fs::path> emit_report(const json& report, const fs::path& dir, unsigned formats) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  std::vector<fs::path> written;
  if (formats & kReportJson) {
    detail::write_text_file(dir / "report.json", report.dump(2) + "\n");
    written.push_back(dir / "report.json");
  }
  if (formats & kReportCsv) {
    detail::write_text_file(dir / "report.csv", report_csv(report));
    written.push_back(dir / "report.csv");
  }
  if (formats & kReportSvg) {
    detail::write_text_file(dir / "report.svg", report_svg(report));
    written.push_back(dir / "report.svg");
  }
  return written;
}

KbBuild build_kb(const fs::path& corpus_dir, const json& label_map, const HarnessConfig& c, const Resources& res) {
  IngestResult ing = ingest_corpus(corpus_dir, label_map);
  std::vector<const Cleaner*> cleaners;
  for (const auto& cl : res.cleaners) cleaners.push_back(cl.get());
  CleaningRun run = clean_corpus(ing.articles, cleaners, c.strategies);
  if (run.entries.empty()) throw FormatError("corpus produced no criteria entries");
  json failures = json::array();
  for (const auto& f : run.failures)
    failures.push_back(
        {{"article", f.article}, {"cleaner_tag", f.cleaner_tag}, {"strategy", f.strategy}, {"error", f.message}});
  std::map<std::string, std::size_t> per_label;
  for (const auto& e : run.entries) ++per_label[e.label];
  json log = {{"n_articles", ing.articles.size()},
              {"n_entries", run.entries.size()},
              {"entries_per_label", per_label},
              {"warnings", ing.warnings},
              {"cleaning_failures", failures},
              {"embedder_fingerprint", res.embedder->fingerprint()}};
  return {build_index(std::move(run.entries), *res.embedder), std::move(log)};
}

json query_kb(const KnowledgeBase& kb, const Embedder& embedder, std::string_view text, std::size_t k) {
  if (kb.embedder_fingerprint() != embedder.fingerprint())
    throw ConfigError("knowledge base embedder '" + kb.embedder_fingerprint() + "' differs from '" +
                      embedder.fingerprint() + "'");
  const Embedding q = embedder.embed(text);
  if (!q.valid) throw InvalidArgument("query has no embeddable text");
  json out = json::array();
  for (const auto& r : retrieve_top_k(kb, q, k)) {
    const auto& entries = kb.entries();
    const auto& e = *std::find_if(entries.begin(), entries.end(),
                                  [&](const CriteriaEntry& x) { return x.entry_id == r.entry_id; });
    out.push_back({{"entry_id", r.entry_id},
                   {"label", r.label},
                   {"cosine", r.cosine},
                   {"concept_label", e.concept_label},
                   {"source", to_string(e.source)},
                   {"article", e.article}});
  }
  return out;
}

}  // namespace reasoneval
