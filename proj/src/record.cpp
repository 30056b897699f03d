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

#include "reasoneval/record.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "io_util.hpp"
#include "reasoneval/error.hpp"

namespace reasoneval {

using nlohmann::json;

EcgRecord::EcgRecord(std::string record_id, double sampling_rate_hz, LeadSamples leads)
    : record_id_(std::move(record_id)), fs_(sampling_rate_hz), leads_(std::move(leads)) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_))
    throw InvalidArgument("sampling rate must be positive and finite");
  if (leads_.empty()) throw InvalidArgument("record has no leads");
  n_samples_ = leads_.begin()->second.size();
  if (n_samples_ == 0) throw InvalidArgument("record has zero samples");
  for (const auto& [lead, samples] : leads_) {
    if (samples.size() != n_samples_)
      throw InvalidArgument("lead " + std::string(lead_name(lead)) + " has " +
                            std::to_string(samples.size()) + " samples, expected " +
                            std::to_string(n_samples_));
    for (float v : samples) {
      if (!std::isfinite(v))
        throw InvalidArgument("non-finite sample in lead " + std::string(lead_name(lead)));
    }
  }
}

std::span<const float> EcgRecord::lead(Lead l) const {
  auto it = leads_.find(l);
  if (it == leads_.end()) throw InvalidArgument("record has no lead " + std::string(lead_name(l)));
  return it->second;
}

std::vector<Lead> EcgRecord::lead_names() const {
  std::vector<Lead> out;
  out.reserve(leads_.size());
  for (const auto& kv : leads_) out.push_back(kv.first);
  return out;
}

RecordFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".csv") return RecordFormat::kCsv;
  if (ext == ".bin") return RecordFormat::kRawBin;
  throw FormatError("cannot infer record format from extension '" + ext + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_extension(".meta.json");
  return p;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

double unit_scale(const json& meta) {
  if (!meta.contains("units")) return 1.0;
  const auto units = meta.at("units").get<std::string>();
  if (units == "mV" || units == "mv") return 1.0;
  if (units == "uV" || units == "uv") return 1e-3;
  if (units == "V" || units == "v") return 1e3;
  throw FormatError("unsupported units '" + units + "' (expected mV, uV or V)");
}

struct Sidecar {
  std::string record_id;
  double fs = 0.0;
  double scale = 1.0;
  json raw;
};

Sidecar read_sidecar(const std::filesystem::path& data_path) {
  auto meta_path = sidecar_path(data_path);
  json meta = detail::read_json_file(meta_path);
  Sidecar s;
  try {
    s.record_id = meta.at("record_id").get<std::string>();
    s.fs = meta.at("sampling_rate_hz").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(meta_path.string() + ": malformed header: " + e.what());
  }
  s.scale = unit_scale(meta);
  s.raw = std::move(meta);
  return s;
}

EcgRecord load_csv(const std::filesystem::path& path) {
  Sidecar meta = read_sidecar(path);
  const std::string text = detail::read_text_file(path);
  std::string_view rest(text);

  auto next_line = [&rest](std::string_view& line) {
    if (rest.empty()) return false;
    auto nl = rest.find('\n');
    line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    return true;
  };

  std::string_view line;
  if (!next_line(line) || trim(line).empty()) throw FormatError(path.string() + ": missing header row");
  std::vector<Lead> columns;
  for (auto cell : split_commas(line)) {
    if (cell.empty()) throw FormatError(path.string() + ": malformed header: empty column name");
    Lead l = require_lead(cell);
    for (Lead seen : columns) {
      if (seen == l) throw FormatError(path.string() + ": duplicate lead " + std::string(cell));
    }
    columns.push_back(l);
  }

  std::vector<std::vector<float>> data(columns.size());
  size_t row = 1;
  while (next_line(line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != columns.size())
      throw FormatError(path.string() + ": ragged row " + std::to_string(row) + " (" +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(columns.size()) + ")");
    for (size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      auto cell = cells[c];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw FormatError(path.string() + ": bad number '" + std::string(cell) + "' at row " +
                          std::to_string(row));
      if (!std::isfinite(v))
        throw FormatError(path.string() + ": non-finite value at row " + std::to_string(row));
      data[c].push_back(static_cast<float>(v * meta.scale));
    }
  }
  LeadSamples leads;
  for (size_t c = 0; c < columns.size(); ++c) leads.emplace(columns[c], std::move(data[c]));
  try {
    return EcgRecord(meta.record_id, meta.fs, std::move(leads));
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

EcgRecord load_rawbin(const std::filesystem::path& path) {
  Sidecar meta = read_sidecar(path);
  std::vector<Lead> leads_order;
  size_t n = 0;
  try {
    if (meta.raw.value("dtype", std::string("f32le")) != "f32le")
      throw FormatError("unsupported dtype (expected f32le)");
    if (meta.raw.value("layout", std::string("lead-major")) != "lead-major")
      throw FormatError("unsupported layout (expected lead-major)");
    for (const auto& name : meta.raw.at("leads")) leads_order.push_back(require_lead(name.get<std::string>()));
    n = meta.raw.at("n_samples").get<size_t>();
  } catch (const json::exception& e) {
    throw FormatError(sidecar_path(path).string() + ": malformed header: " + e.what());
  }

  std::vector<float> payload;
  try {
    payload = detail::read_f32le_file(path, leads_order.size() * n);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (leads x n_samples)");
  }
  LeadSamples leads;
  for (size_t li = 0; li < leads_order.size(); ++li) {
    std::vector<float> samples(payload.begin() + static_cast<std::ptrdiff_t>(li * n),
                               payload.begin() + static_cast<std::ptrdiff_t>((li + 1) * n));
    if (meta.scale != 1.0) {
      for (float& v : samples) v = static_cast<float>(v * meta.scale);
    }
    if (!leads.emplace(leads_order[li], std::move(samples)).second)
      throw FormatError(path.string() + ": duplicate lead " + std::string(lead_name(leads_order[li])));
  }
  try {
    return EcgRecord(meta.record_id, meta.fs, std::move(leads));
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

EcgRecord load_record(const std::filesystem::path& path, RecordFormat format) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  return format == RecordFormat::kCsv ? load_csv(path) : load_rawbin(path);
}

void save_record(const EcgRecord& rec, const std::filesystem::path& path, RecordFormat format) {
  json meta = {{"record_id", rec.record_id()}, {"sampling_rate_hz", rec.sampling_rate_hz()}};
  if (format == RecordFormat::kCsv) {
    std::string out;
    out.reserve(rec.n_samples() * rec.leads().size() * 10);
    bool first = true;
    for (Lead l : rec.lead_names()) {
      if (!first) out += ',';
      out += lead_name(l);
      first = false;
    }
    out += '\n';
    char buf[32];
    for (size_t i = 0; i < rec.n_samples(); ++i) {
      first = true;
      for (const auto& [lead, samples] : rec.leads()) {
        if (!first) out += ',';
        int len = std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(samples[i]));
        out.append(buf, static_cast<size_t>(len));
        first = false;
      }
      out += '\n';
    }
    detail::write_text_file(path, out);
  } else {
    json names = json::array();
    for (Lead l : rec.lead_names()) names.push_back(std::string(lead_name(l)));
    meta["leads"] = names;
    meta["n_samples"] = rec.n_samples();
    meta["dtype"] = "f32le";
    meta["layout"] = "lead-major";
    std::string payload;
    for (const auto& [lead, samples] : rec.leads()) payload += detail::encode_f32le(samples);
    detail::write_text_file(path, payload);
  }
  detail::write_json_file(sidecar_path(path), meta);
}

EcgRecord resample_record(const EcgRecord& rec, double target_hz) {
  if (!(target_hz > 0.0) || !std::isfinite(target_hz))
    throw InvalidArgument("target sampling rate must be positive");
  const double fs = rec.sampling_rate_hz();
  if (target_hz == fs) return rec;
  const size_t n = rec.n_samples();
  const auto m = static_cast<size_t>(std::llround(static_cast<double>(n) * target_hz / fs));
  const size_t out_n = std::max<size_t>(m, 1);
  LeadSamples out;
  for (const auto& [lead, samples] : rec.leads()) {
    std::vector<float> dst(out_n);
    for (size_t j = 0; j < out_n; ++j) {
      const double pos = static_cast<double>(j) * fs / target_hz;
      auto i0 = static_cast<size_t>(std::floor(pos));
      if (n < 2) {
        dst[j] = samples[0];
        continue;
      }
      // Past the last sample: extrapolate from the final segment.
      if (i0 + 1 >= n) i0 = n - 2;
      const double frac = pos - static_cast<double>(i0);
      dst[j] = static_cast<float>(samples[i0] + frac * (samples[i0 + 1] - samples[i0]));
    }
    out.emplace(lead, std::move(dst));
  }
  return EcgRecord(rec.record_id(), target_hz, std::move(out));
}

}  // namespace reasoneval
