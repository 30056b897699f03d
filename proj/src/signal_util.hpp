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

// Small numeric helpers shared by delineation and feature extraction.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace reasoneval::detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Centered moving average with window `w` (made odd); edges average over the
// part of the window that lies inside the signal.
inline std::vector<double> centered_moving_average(const std::vector<double>& x, int w) {
  const int half = std::max(0, w / 2);
  const auto n = static_cast<int>(x.size());
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    out[static_cast<size_t>(i)] =
        (prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)]) / (hi - lo + 1);
  }
  return out;
}

struct Biquad {
  double b0, b1, b2, a1, a2;

  std::vector<double> run(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double v = b0 * x[i] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = x[i];
      y2 = y1;
      y1 = v;
      y[i] = v;
    }
    return y;
  }
};

// Second-order Butterworth sections (bilinear transform, RBJ cookbook form).
inline Biquad butter_lowpass(double fc, double fs) {
  const double w = 2.0 * std::numbers::pi * fc / fs;
  const double alpha = std::sin(w) / std::numbers::sqrt2;
  const double c = std::cos(w), a0 = 1.0 + alpha;
  return {(1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

inline Biquad butter_highpass(double fc, double fs) {
  const double w = 2.0 * std::numbers::pi * fc / fs;
  const double alpha = std::sin(w) / std::numbers::sqrt2;
  const double c = std::cos(w), a0 = 1.0 + alpha;
  return {(1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

// Forward-backward filtering with odd reflection padding at both ends.
inline std::vector<double> filtfilt(const Biquad& f, const std::vector<double>& x, size_t pad) {
  const size_t n = x.size();
  if (n < 2) return x;
  pad = std::min(pad, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
  std::vector<double> y = f.run(ext);
  std::reverse(y.begin(), y.end());
  y = f.run(y);
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

inline std::vector<double> bandpass(const std::vector<double>& x, double fs, double lo_hz, double hi_hz) {
  const auto pad = static_cast<size_t>(fs);
  return filtfilt(butter_lowpass(hi_hz, fs), filtfilt(butter_highpass(lo_hz, fs), x, pad), pad);
}

}  // namespace reasoneval::detail
