#pragma once

#include <torch/torch.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "corrgan/common.hpp"
#include "corrgan/corruption.hpp"
#include "corrgan/dataset.hpp"
#include "corrgan/rng.hpp"

namespace corrgan {

// ---------------------------------------------------------------------------
// Synthetic 10-class 32x32x3 dataset: procedural shapes and textures over
// gradient backgrounds with per-image color/geometry/noise variation. Stands
// in for CIFAR-10 when the real data is not on disk; same tensor and label
// layout, and hard enough that an untrained classifier sits at chance.
//
// Classes: 0 disk, 1 ring, 2 square, 3 triangle, 4 horizontal stripes,
// 5 vertical stripes, 6 diagonal stripes, 7 checkerboard, 8 soft radial blob,
// 9 scattered dots.
// ---------------------------------------------------------------------------

namespace detail {

struct Rgb {
  float r, g, b;
};

inline Rgb random_color(Splitmix64& rng, float v_lo, float v_hi) {
  const float h = static_cast<float>(rng.next_double());
  const float s = 0.5f + 0.5f * static_cast<float>(rng.next_double());
  const float v =
      v_lo + (v_hi - v_lo) * static_cast<float>(rng.next_double());
  Rgb c{};
  hsv_to_rgb(h, s, v, c.r, c.g, c.b);
  return c;
}

inline void draw_synthetic_image(float* hwc, int cls, Splitmix64& rng) {
  constexpr int S = kImageSize;
  // Dim gradient background so that added brightness/fog meaningfully moves
  // pixels toward saturation.
  const Rgb bg_a = random_color(rng, 0.05f, 0.45f);
  const Rgb bg_b = random_color(rng, 0.05f, 0.45f);
  const bool vertical = rng.next_double() < 0.5;
  for (int y = 0; y < S; ++y) {
    for (int x = 0; x < S; ++x) {
      const float t = (vertical ? y : x) / static_cast<float>(S - 1);
      float* px = hwc + 3 * (y * S + x);
      px[0] = bg_a.r + t * (bg_b.r - bg_a.r);
      px[1] = bg_a.g + t * (bg_b.g - bg_a.g);
      px[2] = bg_a.b + t * (bg_b.b - bg_a.b);
    }
  }

  const Rgb fg = random_color(rng, 0.6f, 0.95f);
  const float cx = 10.0f + 12.0f * static_cast<float>(rng.next_double());
  const float cy = 10.0f + 12.0f * static_cast<float>(rng.next_double());
  const float radius = 6.0f + 6.0f * static_cast<float>(rng.next_double());
  const float thickness = 2.0f + 2.0f * static_cast<float>(rng.next_double());
  const int period = 3 + static_cast<int>(rng.next_below(6));
  const int phase = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(period)));
  const int cell = 3 + static_cast<int>(rng.next_below(5));

  auto paint = [&](int x, int y, float alpha = 1.0f) {
    if (x < 0 || x >= S || y < 0 || y >= S) return;
    float* px = hwc + 3 * (y * S + x);
    px[0] += alpha * (fg.r - px[0]);
    px[1] += alpha * (fg.g - px[1]);
    px[2] += alpha * (fg.b - px[2]);
  };

  // Dot positions are drawn up front so the RNG draw count per class stays
  // simple to reason about.
  std::vector<std::pair<int, int>> dots;
  if (cls == 9) {
    const int n_dots = 5 + static_cast<int>(rng.next_below(5));
    for (int i = 0; i < n_dots; ++i) {
      dots.emplace_back(3 + static_cast<int>(rng.next_below(S - 6)),
                        3 + static_cast<int>(rng.next_below(S - 6)));
    }
  }

  for (int y = 0; y < S; ++y) {
    for (int x = 0; x < S; ++x) {
      const float dx = x - cx;
      const float dy = y - cy;
      const float dist = std::sqrt(dx * dx + dy * dy);
      switch (cls) {
        case 0:
          if (dist <= radius) paint(x, y);
          break;
        case 1:
          if (std::abs(dist - radius) <= thickness) paint(x, y);
          break;
        case 2:
          if (std::abs(dx) <= radius * 0.8f && std::abs(dy) <= radius * 0.8f)
            paint(x, y);
          break;
        case 3:
          // Upward triangle: inside when below the two slanted edges.
          if (dy >= -radius && dy <= radius &&
              std::abs(dx) <= (dy + radius) * 0.6f)
            paint(x, y);
          break;
        case 4:
          if (((y + phase) / period) % 2 == 0) paint(x, y);
          break;
        case 5:
          if (((x + phase) / period) % 2 == 0) paint(x, y);
          break;
        case 6:
          if (((x + y + phase) / period) % 2 == 0) paint(x, y);
          break;
        case 7:
          if (((x / cell) + (y / cell)) % 2 == 0) paint(x, y);
          break;
        case 8:
          if (dist < 2.0f * radius)
            paint(x, y, std::max(0.0f, 1.0f - dist / (2.0f * radius)));
          break;
        default:
          break;
      }
    }
  }
  for (auto [dx0, dy0] : dots) {
    for (int y = dy0 - 2; y <= dy0 + 2; ++y) {
      for (int x = dx0 - 2; x <= dx0 + 2; ++x) {
        const float ddx = static_cast<float>(x - dx0);
        const float ddy = static_cast<float>(y - dy0);
        if (ddx * ddx + ddy * ddy <= 4.0f) paint(x, y);
      }
    }
  }

  // Pixel noise keeps the task from degenerating into template matching.
  for (int i = 0; i < S * S * 3; ++i) {
    hwc[i] = std::clamp(
        hwc[i] + 0.02f * static_cast<float>(rng.next_gaussian()), 0.0f, 1.0f);
  }
}

}  // namespace detail

inline Dataset make_synthetic_dataset(std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidSpec("synthetic dataset needs n >= 1");
  auto images = torch::zeros({n, kImageSize, kImageSize, kImageChannels},
                             torch::kFloat32);
  float* data = images.data_ptr<float>();
  std::vector<std::int64_t> labels(n);
  const std::int64_t stride = kImageSize * kImageSize * kImageChannels;
  for (std::int64_t i = 0; i < n; ++i) {
    Splitmix64 rng(stream_key(seed, "synthetic", i));
    const int cls = static_cast<int>(rng.next_below(kNumClasses));
    labels[i] = cls;
    detail::draw_synthetic_image(data + i * stride, cls, rng);
  }
  return {ImageBatch(images), std::move(labels), "none", 0, seed};
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary-batch importer. Each record is 1 label byte followed by
// 3072 bytes planar RGB (row-major per plane); output is interleaved HWC.
// ---------------------------------------------------------------------------

inline Dataset import_cifar_batches(const std::vector<fs::path>& bins,
                                    std::int64_t max_images = -1) {
  constexpr std::int64_t kRecord = 1 + 3 * kImageSize * kImageSize;
  std::vector<std::uint8_t> pixels;
  std::vector<std::int64_t> labels;

  for (const auto& bin : bins) {
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw IoError("cannot open CIFAR batch " + bin.string());
    std::vector<char> record(kRecord);
    while (in.read(record.data(), kRecord)) {
      const int label = static_cast<std::uint8_t>(record[0]);
      if (label >= kNumClasses) {
        throw IoError("bad CIFAR label in " + bin.string());
      }
      labels.push_back(label);
      const auto* planar = reinterpret_cast<const std::uint8_t*>(record.data() + 1);
      for (int y = 0; y < kImageSize; ++y) {
        for (int x = 0; x < kImageSize; ++x) {
          const int p = y * kImageSize + x;
          pixels.push_back(planar[p]);
          pixels.push_back(planar[kImageSize * kImageSize + p]);
          pixels.push_back(planar[2 * kImageSize * kImageSize + p]);
        }
      }
      if (max_images > 0 &&
          static_cast<std::int64_t>(labels.size()) >= max_images) {
        break;
      }
    }
    if (in.gcount() != 0 && in.gcount() != kRecord) {
      throw IoError("truncated CIFAR batch " + bin.string());
    }
    if (max_images > 0 &&
        static_cast<std::int64_t>(labels.size()) >= max_images) {
      break;
    }
  }
  if (labels.empty()) throw IoError("no CIFAR records read");

  const std::int64_t n = static_cast<std::int64_t>(labels.size());
  auto u8 = torch::from_blob(pixels.data(),
                             {n, kImageSize, kImageSize, kImageChannels},
                             torch::kUInt8)
                .clone();
  return {ImageBatch(dequantize_from_u8(u8)), std::move(labels), "none", 0, 0};
}

}  // namespace corrgan
