#pragma once

#include <torch/torch.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrgan/common.hpp"

namespace corrgan {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Batch of images, NHWC float32 in [0, 1]. Models consume the NCHW view.
class ImageBatch {
 public:
  explicit ImageBatch(torch::Tensor nhwc) : data_(std::move(nhwc)) {
    if (data_.dim() != 4 || data_.size(1) != kImageSize ||
        data_.size(2) != kImageSize || data_.size(3) != kImageChannels) {
      throw ShapeError("ImageBatch expects NxHxWxC = Nx32x32x3, got " +
                       std::to_string(data_.dim()) + "d tensor");
    }
    if (data_.size(0) < 1) throw ShapeError("ImageBatch requires N >= 1");
    if (data_.scalar_type() != torch::kFloat32) {
      throw ShapeError("ImageBatch requires float32 data");
    }
    double lo = data_.min().item<double>();
    double hi = data_.max().item<double>();
    if (!(lo >= 0.0 && hi <= 1.0)) {
      throw InvalidSpec("ImageBatch values outside [0,1]: min=" +
                        std::to_string(lo) + " max=" + std::to_string(hi));
    }
    data_ = data_.contiguous();
  }

  static ImageBatch from_nchw(const torch::Tensor& nchw) {
    return ImageBatch(nchw.permute({0, 2, 3, 1}).contiguous());
  }

  std::int64_t size() const { return data_.size(0); }
  const torch::Tensor& nhwc() const { return data_; }
  torch::Tensor nchw() const {
    return data_.permute({0, 3, 1, 2}).contiguous();
  }

  ImageBatch slice(std::int64_t begin, std::int64_t end) const {
    return ImageBatch(data_.slice(0, begin, end).contiguous());
  }

  ImageBatch index(const std::vector<std::int64_t>& idx) const {
    auto t = torch::tensor(idx, torch::kInt64);
    return ImageBatch(data_.index_select(0, t).contiguous());
  }

 private:
  torch::Tensor data_;
};

// Disk quantization is uint8 with round-half-to-even (the rounding torch::round
// implements) so that regeneration is bit-exact across runs.
inline torch::Tensor quantize_to_u8(const torch::Tensor& float01) {
  auto scaled = float01.clamp(0.0, 1.0).to(torch::kFloat64) * 255.0;
  return scaled.round().clamp(0, 255).to(torch::kUInt8);
}

inline torch::Tensor dequantize_from_u8(const torch::Tensor& u8) {
  return u8.to(torch::kFloat32) / 255.0f;
}

// Labeled dataset plus the corruption metadata it was produced with. Clean
// datasets use kind "none" and severity 0.
struct Dataset {
  ImageBatch images;
  std::vector<std::int64_t> class_labels;
  std::string corruption_kind = "none";
  int severity = 0;
  std::uint64_t seed = 0;

  std::int64_t size() const { return images.size(); }

  void validate() const {
    if (images.size() != static_cast<std::int64_t>(class_labels.size())) {
      throw InvalidSpec("dataset image count != label count");
    }
    for (auto l : class_labels) {
      if (l < 0 || l >= kNumClasses) {
        throw InvalidSpec("class label out of range: " + std::to_string(l));
      }
    }
  }
};

// Directory format: images.bin (raw uint8, Nx32x32x3 row-major) + meta.json.
inline void save_dataset(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset dir " + dir.string());

  auto u8 = quantize_to_u8(ds.images.nhwc()).contiguous();
  {
    std::ofstream out(dir / "images.bin", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "images.bin").string());
    out.write(reinterpret_cast<const char*>(u8.data_ptr<std::uint8_t>()),
              u8.numel());
    if (!out) throw IoError("short write to " + (dir / "images.bin").string());
  }

  json meta = {
      {"count", ds.size()},
      {"height", kImageSize},
      {"width", kImageSize},
      {"channels", kImageChannels},
      {"class_labels", ds.class_labels},
      {"corruption_kind", ds.corruption_kind},
      {"severity", ds.severity},
      {"seed", ds.seed},
      {"format_version", kDatasetFormatVersion},
  };
  std::ofstream out(dir / "meta.json");
  if (!out) throw IoError("cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << "\n";
}

inline Dataset load_dataset(const fs::path& dir) {
  const auto meta_path = dir / "meta.json";
  const auto bin_path = dir / "images.bin";
  if (!fs::exists(meta_path)) throw IoError("missing " + meta_path.string());
  if (!fs::exists(bin_path)) throw IoError("missing " + bin_path.string());

  json meta;
  {
    std::ifstream in(meta_path);
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw IoError("bad meta.json in " + dir.string() + ": " + e.what());
    }
  }
  if (meta.value("format_version", -1) != kDatasetFormatVersion) {
    throw IoError("unsupported dataset format_version in " + dir.string());
  }
  const std::int64_t n = meta.at("count").get<std::int64_t>();
  if (meta.at("height") != kImageSize || meta.at("width") != kImageSize ||
      meta.at("channels") != kImageChannels) {
    throw IoError("unexpected image shape in " + dir.string());
  }

  const std::int64_t bytes = n * kImageSize * kImageSize * kImageChannels;
  std::vector<std::uint8_t> raw(bytes);
  std::ifstream in(bin_path, std::ios::binary);
  in.read(reinterpret_cast<char*>(raw.data()), bytes);
  if (in.gcount() != bytes) {
    throw IoError("images.bin truncated in " + dir.string());
  }

  auto u8 = torch::from_blob(raw.data(), {n, kImageSize, kImageSize, kImageChannels},
                             torch::kUInt8)
                .clone();
  Dataset ds{ImageBatch(dequantize_from_u8(u8)),
             meta.at("class_labels").get<std::vector<std::int64_t>>(),
             meta.at("corruption_kind").get<std::string>(),
             meta.at("severity").get<int>(),
             meta.at("seed").get<std::uint64_t>()};
  ds.validate();
  return ds;
}

}  // namespace corrgan
