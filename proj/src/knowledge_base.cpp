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

#include "reasoneval/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "reasoneval/extract.hpp"
#include "text_util.hpp"

namespace reasoneval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxArticlesPerSource = 5;

const std::vector<std::pair<Source, std::string>>& source_names() {
  static const std::vector<std::pair<Source, std::string>> v = {{Source::kLitfl, "litfl"},
                                                                {Source::kWikipedia, "wikipedia"},
                                                                {Source::kEcgpedia, "ecgpedia"},
                                                                {Source::kWikiem, "wikiem"},
                                                                {Source::kOther, "other"}};
  return v;
}

}  // namespace

std::string to_string(Source s) {
  for (const auto& [src, name] : source_names()) {
    if (src == s) return name;
  }
  return "other";
}

std::string to_string(CleaningStrategy s) {
  return s == CleaningStrategy::kExactQuote ? "exact_quote" : "structured_synthesis";
}

std::optional<Source> parse_source(std::string_view s) {
  const std::string low = detail::to_lower(s);
  for (const auto& [src, name] : source_names()) {
    if (name == low) return src;
  }
  return std::nullopt;
}

std::optional<CleaningStrategy> parse_strategy(std::string_view s) {
  if (s == "exact_quote") return CleaningStrategy::kExactQuote;
  if (s == "structured_synthesis") return CleaningStrategy::kStructuredSynthesis;
  return std::nullopt;
}

IngestResult ingest_corpus(const fs::path& dir, const json& label_map, const LabelVocabulary& vocab) {
  if (!label_map.is_object()) throw ConfigError("label map must be a JSON object of label -> file list");
  IngestResult out;
  for (const auto& [label_in, files] : label_map.items()) {
    const auto label = vocab.canonical(label_in);
    if (!label) throw ConfigError("label map: unknown label '" + label_in + "'");
    if (!files.is_array()) throw ConfigError("label map: files for '" + label_in + "' must be an array");

    std::map<Source, std::vector<fs::path>> by_source;
    for (const auto& f : files) {
      fs::path rel;
      std::optional<Source> src;
      if (f.is_string()) {
        rel = f.get<std::string>();
      } else if (f.is_object() && f.contains("path")) {
        rel = f.at("path").get<std::string>();
        if (f.contains("source")) {
          src = parse_source(f.at("source").get<std::string>());
          if (!src) throw ConfigError("label map: unknown source '" + f.at("source").get<std::string>() + "'");
        }
      } else {
        throw ConfigError("label map: entries must be paths or {path, source} objects");
      }
      if (!src) {
        const auto first = rel.begin() != rel.end() ? rel.begin()->string() : std::string();
        src = rel.has_parent_path() ? parse_source(first).value_or(Source::kOther) : Source::kOther;
      }
      by_source[*src].push_back(rel);
    }

    for (auto& [src, paths] : by_source) {
      std::sort(paths.begin(), paths.end(),
                [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename() || (a.filename() == b.filename() && a < b); });
      if (paths.size() > kMaxArticlesPerSource) {
        out.warnings.push_back(*label + "/" + to_string(src) + ": " + std::to_string(paths.size()) +
                               " articles listed, keeping the first " + std::to_string(kMaxArticlesPerSource));
        paths.resize(kMaxArticlesPerSource);
      }
      for (const auto& rel : paths) {
        std::string text = detail::read_text_file(dir / rel);
        if (detail::trim(text).empty()) {
          out.warnings.push_back(rel.string() + ": empty article skipped");
          continue;
        }
        out.articles.push_back({*label, src, rel, std::move(text)});
      }
    }
  }
  return out;
}

namespace {

struct MdLine {
  std::string_view text;
  int heading = 0;  // level, 0 for body lines
};

std::vector<MdLine> split_markdown(std::string_view text) {
  std::vector<MdLine> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    MdLine m{line, 0};
    std::size_t h = 0;
    while (h < line.size() && line[h] == '#') ++h;
    if (h >= 1 && h <= 6 && h < line.size() && line[h] == ' ') m.heading = static_cast<int>(h);
    out.push_back(m);
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  return out;
}

std::string heading_text(const MdLine& l) {
  return std::string(detail::trim(l.text.substr(static_cast<std::size_t>(l.heading))));
}

// Returns the bullet body (without marker) or nullopt for non-bullet lines.
std::optional<std::string_view> bullet_body(std::string_view line) {
  std::string_view t = detail::trim(line);
  if (t.size() >= 2 && (t[0] == '-' || t[0] == '*' || t[0] == '+') && t[1] == ' ') return detail::trim(t.substr(2));
  std::size_t d = 0;
  while (d < t.size() && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
  if (d > 0 && d + 1 < t.size() && (t[d] == '.' || t[d] == ')') && t[d + 1] == ' ') return detail::trim(t.substr(d + 2));
  return std::nullopt;
}

std::string strip_markdown(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '*' || c == '_' || c == '`') continue;
    out += c;
  }
  return detail::collapse_spaces(out);
}

std::string synthesize(std::string_view bullet) {
  const std::string plain = strip_markdown(bullet);
  const auto ex = extract_findings(plain);
  if (ex.findings.empty()) return plain;
  std::string joined;
  for (const auto& f : ex.findings) {
    if (!joined.empty()) joined += "; ";
    joined += canonicalize(f);
  }
  return joined;
}

}  // namespace

std::vector<DiagnosticCluster> BuiltinCleaner::clean(const RawArticle& article, CleaningStrategy strategy) const {
  static const std::regex kCriteriaHeading("criteri|diagnos|ecg features", std::regex::icase);
  const auto lines = split_markdown(article.text);

  std::string title;
  for (const auto& l : lines) {
    if (l.heading == 1) {
      title = strip_markdown(heading_text(l));
      break;
    }
  }
  if (title.empty()) title = article.path.stem().string();

  std::vector<DiagnosticCluster> out;
  int open_level = 0;  // level of the matching heading we are under, 0 if none
  std::string section;
  for (const auto& l : lines) {
    if (l.heading) {
      if (open_level && l.heading > open_level) continue;  // subsection of an open criteria section
      open_level = 0;
      const std::string h = heading_text(l);
      if (std::regex_search(h, kCriteriaHeading)) {
        open_level = l.heading;
        section = strip_markdown(h);
        out.push_back({title + " (" + article.label + "): " + section, {}});
      }
      continue;
    }
    if (!open_level) continue;
    const auto body = bullet_body(l.text);
    if (!body || body->empty()) continue;
    out.back().criteria.push_back(strategy == CleaningStrategy::kExactQuote ? std::string(*body) : synthesize(*body));
  }
  std::erase_if(out, [](const DiagnosticCluster& c) { return c.criteria.empty(); });
  return out;
}

std::string combined_text(const std::string& concept_label, const std::vector<std::string>& criteria) {
  std::string s = concept_label;
  for (const auto& c : criteria) s += "\n" + c;
  return s;
}

std::vector<CriteriaEntry> clean_article(const RawArticle& article, CleaningStrategy strategy, const Cleaner& cleaner) {
  std::vector<CriteriaEntry> out;
  for (auto& cluster : cleaner.clean(article, strategy)) {
    std::vector<std::string> criteria;
    for (auto& c : cluster.criteria) {
      if (detail::trim(c).empty()) continue;
      if (strategy == CleaningStrategy::kExactQuote && article.text.find(c) == std::string::npos) continue;
      criteria.push_back(std::move(c));
    }
    if (criteria.empty()) continue;
    CriteriaEntry e;
    e.label = article.label;
    e.source = article.source;
    e.strategy = strategy;
    e.cleaner_tag = cleaner.tag();
    e.article = article.path.generic_string();
    e.concept_label = cluster.concept_label.empty() ? article.label : cluster.concept_label;
    e.criteria = std::move(criteria);
    e.combined_text = combined_text(e.concept_label, e.criteria);
    out.push_back(std::move(e));
  }
  return out;
}

CleaningRun clean_corpus(const std::vector<RawArticle>& articles, const std::vector<const Cleaner*>& cleaners,
                         const std::vector<CleaningStrategy>& strategies) {
  CleaningRun run;
  for (const auto& a : articles) {
    for (CleaningStrategy s : strategies) {
      for (const Cleaner* c : cleaners) {
        try {
          for (auto& e : clean_article(a, s, *c)) {
            e.entry_id = static_cast<std::int64_t>(run.entries.size());
            run.entries.push_back(std::move(e));
          }
        } catch (const ProviderError& err) {
          run.failures.push_back({a.path.generic_string(), c->tag(), to_string(s), err.what()});
        }
      }
    }
  }
  return run;
}

KnowledgeBase::KnowledgeBase(std::vector<CriteriaEntry> entries, std::vector<float> vectors, int dim,
                             std::string fingerprint)
    : entries_(std::move(entries)), vectors_(std::move(vectors)), dim_(dim), fingerprint_(std::move(fingerprint)) {
  if (dim_ <= 0) throw InvalidArgument("knowledge base: dim must be positive");
  if (vectors_.size() != entries_.size() * static_cast<std::size_t>(dim_))
    throw InvalidArgument("knowledge base: " + std::to_string(vectors_.size()) + " vector values for " +
                          std::to_string(entries_.size()) + " entries of dim " + std::to_string(dim_));
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!ids.insert(entries_[i].entry_id).second)
      throw InvalidArgument("knowledge base: duplicate entry_id " + std::to_string(entries_[i].entry_id));
    double norm = 0.0;
    for (float v : row(i)) norm += static_cast<double>(v) * v;
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-5)
      throw InvalidArgument("knowledge base: row " + std::to_string(i) + " is not unit norm");
  }
}

std::span<const float> KnowledgeBase::row(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dim_);
  return {vectors_.data() + i * d, d};
}

KnowledgeBase build_index(std::vector<CriteriaEntry> entries, const Embedder& embedder) {
  if (entries.empty()) throw InvalidArgument("build_index: no entries");
  const int dim = embedder.dim();
  std::vector<float> vectors;
  vectors.reserve(entries.size() * static_cast<std::size_t>(dim));
  for (const auto& e : entries) {
    const Embedding v = embedder.embed(e.combined_text);
    if (static_cast<int>(v.values.size()) != dim)
      throw InvalidArgument("build_index: embedder returned dim " + std::to_string(v.values.size()) +
                            ", expected " + std::to_string(dim));
    if (!v.valid) throw InvalidArgument("build_index: entry " + std::to_string(e.entry_id) + " has no embeddable text");
    vectors.insert(vectors.end(), v.values.begin(), v.values.end());
  }
  return KnowledgeBase(std::move(entries), std::move(vectors), dim, embedder.fingerprint());
}

json entry_to_json(const CriteriaEntry& e) {
  return {{"entry_id", e.entry_id},         {"label", e.label},
          {"source", to_string(e.source)}, {"strategy", to_string(e.strategy)},
          {"cleaner_tag", e.cleaner_tag},   {"article", e.article},
          {"concept_label", e.concept_label}, {"criteria", e.criteria},
          {"combined_text", e.combined_text}};
}

CriteriaEntry entry_from_json(const json& j) {
  CriteriaEntry e;
  try {
    e.entry_id = j.at("entry_id").get<std::int64_t>();
    e.label = j.at("label").get<std::string>();
    const auto src = parse_source(j.at("source").get<std::string>());
    const auto strat = parse_strategy(j.at("strategy").get<std::string>());
    if (!src || !strat) throw FormatError("criteria entry: unknown source or strategy");
    e.source = *src;
    e.strategy = *strat;
    e.cleaner_tag = j.at("cleaner_tag").get<std::string>();
    e.article = j.value("article", "");
    e.concept_label = j.at("concept_label").get<std::string>();
    e.criteria = j.at("criteria").get<std::vector<std::string>>();
    e.combined_text = j.at("combined_text").get<std::string>();
  } catch (const json::exception& ex) {
    throw FormatError(std::string("criteria entry: ") + ex.what());
  }
  if (e.criteria.empty()) throw FormatError("criteria entry " + std::to_string(e.entry_id) + ": no criteria");
  if (e.combined_text != combined_text(e.concept_label, e.criteria))
    throw FormatError("criteria entry " + std::to_string(e.entry_id) + ": combined_text does not match criteria");
  return e;
}

void save_kb(const KnowledgeBase& kb, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::string lines;
  for (const auto& e : kb.entries()) lines += entry_to_json(e).dump() + "\n";
  detail::write_text_file(dir / "entries.jsonl", lines);
  detail::write_json_file(dir / "vectors.json", {{"n", kb.size()},
                                                 {"dim", kb.dim()},
                                                 {"dtype", "f32le"},
                                                 {"layout", "row-major"},
                                                 {"embedder_fingerprint", kb.embedder_fingerprint()}});
  detail::write_text_file(dir / "vectors.bin", detail::encode_f32le(kb.vectors()));
}

KnowledgeBase load_kb(const fs::path& dir) {
  std::vector<CriteriaEntry> entries;
  const std::string text = detail::read_text_file(dir / "entries.jsonl");
  std::size_t line_no = 0;
  for (const auto& line : detail::split_any(text, "\n")) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      entries.push_back(entry_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw FormatError((dir / "entries.jsonl").string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  const json meta = detail::read_json_file(dir / "vectors.json");
  std::size_t n = 0;
  int dim = 0;
  std::string fingerprint;
  try {
    n = meta.at("n").get<std::size_t>();
    dim = meta.at("dim").get<int>();
    fingerprint = meta.value("embedder_fingerprint", "");
    if (meta.value("dtype", "f32le") != "f32le") throw FormatError("unsupported dtype");
  } catch (const json::exception& e) {
    throw FormatError((dir / "vectors.json").string() + ": " + e.what());
  }
  if (n != entries.size())
    throw FormatError(dir.string() + ": " + std::to_string(entries.size()) + " entries but " + std::to_string(n) +
                      " vectors");
  if (dim <= 0) throw FormatError((dir / "vectors.json").string() + ": dim must be positive");
  auto vectors = detail::read_f32le_file(dir / "vectors.bin", n * static_cast<std::size_t>(dim));
  try {
    return KnowledgeBase(std::move(entries), std::move(vectors), dim, std::move(fingerprint));
  } catch (const InvalidArgument& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
}

}  // namespace reasoneval
