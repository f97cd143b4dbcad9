#pragma once

#include <torch/torch.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corrgan/common.hpp"
#include "corrgan/dataset.hpp"
#include "corrgan/rng.hpp"

namespace corrgan {

struct CorruptionSpec {
  std::string kind;
  int severity = 1;
  std::uint64_t seed = 0;
};

// Diamond-square heightmap on a torus, used as the fog texture. Amplitude is
// divided by `decay` at every halving of the step size. Output is shifted and
// scaled so min == 0 and max == 1 exactly.
inline torch::Tensor plasma_fractal(int map_size, double decay,
                                    std::uint64_t seed) {
  const bool pow2 = map_size > 0 && (map_size & (map_size - 1)) == 0;
  if (!pow2 || map_size < 32 || map_size > 256) {
    throw InvalidSpec("plasma_fractal map_size must be one of {32,64,128,256}");
  }
  if (!(decay > 0.0)) throw InvalidSpec("plasma_fractal decay must be > 0");

  const int s = map_size;
  std::vector<double> g(static_cast<size_t>(s) * s, 0.0);
  auto at = [&](int y, int x) -> double& {
    return g[static_cast<size_t>(((y % s) + s) % s) * s + (((x % s) + s) % s)];
  };

  Splitmix64 rng(stream_key(seed, "plasma"));
  double amp = 1.0;
  for (int step = s; step >= 2; step /= 2) {
    const int half = step / 2;
    // Square pass: centers of each cell from its four corners.
    for (int y = 0; y < s; y += step) {
      for (int x = 0; x < s; x += step) {
        double avg = (at(y, x) + at(y, x + step) + at(y + step, x) +
                      at(y + step, x + step)) / 4.0;
        at(y + half, x + half) = avg + amp * rng.next_symmetric();
      }
    }
    // Diamond pass: edge midpoints from their four diamond neighbours.
    for (int y = 0; y < s; y += step) {
      for (int x = 0; x < s; x += step) {
        double top = (at(y, x) + at(y, x + step) + at(y - half, x + half) +
                      at(y + half, x + half)) / 4.0;
        at(y, x + half) = top + amp * rng.next_symmetric();
        double left = (at(y, x) + at(y + step, x) + at(y + half, x - half) +
                       at(y + half, x + half)) / 4.0;
        at(y + half, x) = left + amp * rng.next_symmetric();
      }
    }
    amp /= decay;
  }

  const auto [mn_it, mx_it] = std::minmax_element(g.begin(), g.end());
  const double mn = *mn_it, mx = *mx_it;
  if (!(mx > mn)) throw NumericalError("degenerate plasma heightmap");
  for (auto& v : g) v = (v - mn) / (mx - mn);

  return torch::tensor(g, torch::kFloat64).reshape({s, s});
}

namespace detail {

inline void rgb_to_hsv(float r, float g, float b, float& h, float& sat,
                       float& v) {
  const float maxc = std::max({r, g, b});
  const float minc = std::min({r, g, b});
  v = maxc;
  const float delta = maxc - minc;
  sat = maxc > 0.0f ? delta / maxc : 0.0f;
  if (delta <= 0.0f) {
    h = 0.0f;
    return;
  }
  float hh;
  if (maxc == r) {
    hh = (g - b) / delta;
    if (hh < 0.0f) hh += 6.0f;
  } else if (maxc == g) {
    hh = (b - r) / delta + 2.0f;
  } else {
    hh = (r - g) / delta + 4.0f;
  }
  h = hh / 6.0f;
}

inline void hsv_to_rgb(float h, float sat, float v, float& r, float& g,
                       float& b) {
  if (sat <= 0.0f) {
    r = g = b = v;
    return;
  }
  float hh = h * 6.0f;
  if (hh >= 6.0f) hh -= 6.0f;
  const int i = static_cast<int>(hh);
  const float f = hh - static_cast<float>(i);
  const float p = v * (1.0f - sat);
  const float q = v * (1.0f - sat * f);
  const float t = v * (1.0f - sat * (1.0f - f));
  switch (i) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

// params = {c}: add c to the HSV value channel.
inline void brightness_kernel(float* hwc, const std::vector<double>& params,
                              std::uint64_t) {
  const float c = static_cast<float>(params.at(0));
  for (int p = 0; p < kImageSize * kImageSize; ++p) {
    float* px = hwc + 3 * p;
    float h, s, v;
    rgb_to_hsv(px[0], px[1], px[2], h, s, v);
    v = std::clamp(v + c, 0.0f, 1.0f);
    hsv_to_rgb(h, s, v, px[0], px[1], px[2]);
  }
}

// params = {t, decay}: blend a plasma heightmap in, renormalized by the
// pre-fog image maximum m: clip((x + t*F) * m / (m + t)).
inline void fog_kernel(float* hwc, const std::vector<double>& params,
                       std::uint64_t stream_seed) {
  const float t = static_cast<float>(params.at(0));
  const double decay = params.at(1);
  auto field = plasma_fractal(kImageSize, decay, stream_seed)
                   .to(torch::kFloat32)
                   .contiguous();
  const float* f = field.data_ptr<float>();

  float m = 0.0f;
  for (int i = 0; i < kImageSize * kImageSize * 3; ++i) m = std::max(m, hwc[i]);

  const float scale = m / (m + t);
  for (int p = 0; p < kImageSize * kImageSize; ++p) {
    for (int c = 0; c < 3; ++c) {
      float& x = hwc[3 * p + c];
      x = std::clamp((x + t * f[p]) * scale, 0.0f, 1.0f);
    }
  }
}

}  // namespace detail

// Registry of corruption kinds, keyed by name; index is registration order and
// defines the noise-classifier label order as well as argmax tie-breaking.
class CorruptionRegistry {
 public:
  using SeverityParams = std::array<std::vector<double>, 5>;
  using Kernel = std::function<void(float* hwc, const std::vector<double>&,
                                    std::uint64_t stream_seed)>;

  struct Entry {
    std::string name;
    int index;
    SeverityParams severity_params;
    Kernel kernel;
  };

  static CorruptionRegistry& instance() {
    static CorruptionRegistry reg = make_builtin();
    return reg;
  }

  int register_kind(const std::string& name, SeverityParams params,
                    Kernel kernel) {
    if (has(name)) throw InvalidSpec("corruption kind already registered: " + name);
    const int idx = static_cast<int>(entries_.size());
    entries_.push_back({name, idx, std::move(params), std::move(kernel)});
    return idx;
  }

  bool has(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.name == name; });
  }

  const Entry& entry(const std::string& name) const {
    for (const auto& e : entries_) {
      if (e.name == name) return e;
    }
    throw UnsupportedCorruption("unknown corruption kind: " + name);
  }

  int index_of(const std::string& name) const { return entry(name).index; }

  std::vector<std::string> kinds() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  // Config/test hook: replace the per-severity parameter table of a kind.
  void set_severity_params(const std::string& name, SeverityParams params) {
    for (auto& e : entries_) {
      if (e.name == name) {
        e.severity_params = std::move(params);
        return;
      }
    }
    throw UnsupportedCorruption("unknown corruption kind: " + name);
  }

 private:
  static CorruptionRegistry make_builtin() {
    CorruptionRegistry reg;
    reg.register_kind(
        "fog",
        {{{1.5, 2.0}, {2.0, 2.0}, {2.5, 1.7}, {2.5, 1.5}, {3.0, 1.4}}},
        detail::fog_kernel);
    reg.register_kind("brightness",
                      {{{0.1}, {0.2}, {0.3}, {0.4}, {0.5}}},
                      detail::brightness_kernel);
    return reg;
  }

  std::vector<Entry> entries_;
};

inline void validate_spec(const CorruptionSpec& spec) {
  if (spec.severity < 1 || spec.severity > 5) {
    throw InvalidSpec("severity must be in [1,5], got " +
                      std::to_string(spec.severity));
  }
  if (!CorruptionRegistry::instance().has(spec.kind)) {
    throw UnsupportedCorruption("unknown corruption kind: " + spec.kind);
  }
}

// Applies `spec` to every image. Image i draws from the substream
// (spec.seed, base_index + i), so chunked invocations over a larger set
// reproduce the single-call result when base_index is threaded through.
inline ImageBatch apply_corruption(const ImageBatch& batch,
                                   const CorruptionSpec& spec,
                                   std::int64_t base_index = 0) {
  validate_spec(spec);
  const auto& e = CorruptionRegistry::instance().entry(spec.kind);
  const auto& params = e.severity_params[spec.severity - 1];

  torch::Tensor out = batch.nhwc().clone().contiguous();
  float* data = out.data_ptr<float>();
  const std::int64_t stride = kImageSize * kImageSize * kImageChannels;
  for (std::int64_t i = 0; i < batch.size(); ++i) {
    e.kernel(data + i * stride, params,
             stream_key(spec.seed, "corrupt", base_index + i));
  }
  out.clamp_(0.0, 1.0);
  return ImageBatch(out);
}

// Materializes one corrupted dataset per (kind, severity) under out_root as
// <kind>_s<severity>/. Each output records the derived spec seed that
// regenerates it from the clean set.
inline std::vector<fs::path> corrupt_dataset(
    const fs::path& clean_dir, const std::vector<std::string>& kinds,
    const std::vector<int>& severities, std::uint64_t seed,
    const fs::path& out_root) {
  if (kinds.empty() || severities.empty()) {
    throw InvalidSpec("corrupt_dataset: kinds and severities must be nonempty");
  }
  for (const auto& k : kinds) {
    if (!CorruptionRegistry::instance().has(k)) {
      throw UnsupportedCorruption("unknown corruption kind: " + k);
    }
  }
  Dataset clean = load_dataset(clean_dir);

  std::vector<fs::path> written;
  for (const auto& kind : kinds) {
    for (int sev : severities) {
      CorruptionSpec spec{kind, sev,
                          stream_key(seed, "corruption/" + kind,
                                     static_cast<std::uint64_t>(sev))};
      Dataset out{apply_corruption(clean.images, spec), clean.class_labels,
                  kind, sev, spec.seed};
      const fs::path dir = out_root / (kind + "_s" + std::to_string(sev));
      save_dataset(out, dir);
      written.push_back(dir);
    }
  }
  return written;
}

}  // namespace corrgan
