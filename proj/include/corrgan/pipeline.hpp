#pragma once

#include <torch/torch.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrgan/common.hpp"
#include "corrgan/corruption.hpp"
#include "corrgan/dataset.hpp"
#include "corrgan/jsonio.hpp"
#include "corrgan/models.hpp"
#include "corrgan/training.hpp"

namespace corrgan {

// On-disk description of a full runtime: which checkpoints to load and which
// corruption kinds have a denoiser.
struct GeneratorManifest {
  std::map<std::string, fs::path> generators;  // kind -> checkpoint dir
  fs::path nc_checkpoint;
  fs::path classifier_checkpoint;
  int format_version = kManifestFormatVersion;

  static GeneratorManifest read(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("missing manifest " + path.string());
    nlohmann::json j;
    {
      std::ifstream in(path);
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ManifestError("bad manifest " + path.string() + ": " + e.what());
      }
    }
    expect_keys(j, {"generators", "nc_checkpoint", "classifier_checkpoint",
                    "format_version"},
                {}, "GeneratorManifest");
    GeneratorManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw ManifestError("unsupported manifest format_version");
    }
    m.nc_checkpoint = j.at("nc_checkpoint").get<std::string>();
    m.classifier_checkpoint = j.at("classifier_checkpoint").get<std::string>();
    for (const auto& [kind, p] : j.at("generators").items()) {
      m.generators[kind] = fs::path(p.get<std::string>());
    }
    if (m.generators.empty()) {
      throw ManifestError("manifest lists no generators");
    }
    return m;
  }

  void write(const fs::path& path) const {
    nlohmann::json gens = nlohmann::json::object();
    for (const auto& [kind, p] : generators) gens[kind] = p.string();
    nlohmann::json j = {{"generators", gens},
                        {"nc_checkpoint", nc_checkpoint.string()},
                        {"classifier_checkpoint", classifier_checkpoint.string()},
                        {"format_version", format_version}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << j.dump(2) << "\n";
  }
};

// Per-image outcome of the denoise-and-classify runtime.
struct PipelineResult {
  std::string predicted_kind;
  double kind_confidence = 0.0;
  ImageBatch denoised;
  std::int64_t predicted_class = -1;
  std::vector<float> class_logits;
};

struct PipelineOutput {
  std::vector<PipelineResult> per_image;
  ImageBatch denoised_batch;
};

// All models loaded in eval mode; immutable after construction. Kind order is
// corruption-registry order and must agree with the NC checkpoint's label
// order.
class Pipeline {
 public:
  static Pipeline build(const fs::path& manifest_path) {
    return Pipeline(GeneratorManifest::read(manifest_path));
  }

  explicit Pipeline(const GeneratorManifest& manifest) {
    auto& reg = CorruptionRegistry::instance();
    for (const auto& [kind, dir] : manifest.generators) {
      if (!reg.has(kind)) {
        throw ManifestError("manifest kind not registered: " + kind);
      }
      if (!fs::exists(dir / "weights.pt")) {
        throw IoError("missing generator checkpoint " + (dir / "weights.pt").string());
      }
      kinds_.push_back(kind);
    }
    std::sort(kinds_.begin(), kinds_.end(), [&](const auto& a, const auto& b) {
      return reg.index_of(a) < reg.index_of(b);
    });

    if (!fs::exists(manifest.classifier_checkpoint / "weights.pt")) {
      throw IoError("missing classifier checkpoint " +
                    (manifest.classifier_checkpoint / "weights.pt").string());
    }
    if (!fs::exists(manifest.nc_checkpoint / "weights.pt")) {
      throw IoError("missing noise-classifier checkpoint " +
                    (manifest.nc_checkpoint / "weights.pt").string());
    }

    classifier_ = load_target_classifier(manifest.classifier_checkpoint);
    classifier_->eval();
    auto nc_manifest = read_checkpoint_manifest(manifest.nc_checkpoint);
    nc_ = load_noise_classifier(manifest.nc_checkpoint);
    nc_->eval();

    if (nc_->num_kinds() != static_cast<int>(kinds_.size())) {
      throw ManifestError("noise classifier covers " +
                          std::to_string(nc_->num_kinds()) +
                          " kinds but manifest lists " +
                          std::to_string(kinds_.size()));
    }
    if (!nc_manifest.kinds.empty() && nc_manifest.kinds != kinds_) {
      throw ManifestError("noise classifier label order does not match manifest kinds");
    }

    for (const auto& kind : kinds_) {
      auto gen = load_generator(manifest.generators.at(kind));
      gen->eval();
      generators_.push_back(std::move(gen));
    }
  }

  const std::vector<std::string>& kinds() const { return kinds_; }
  TargetClassifier& classifier() { return classifier_; }
  NoiseClassifier& noise_classifier() { return nc_; }
  Generator& generator_for(const std::string& kind) {
    auto it = std::find(kinds_.begin(), kinds_.end(), kind);
    if (it == kinds_.end()) throw ManifestError("no generator for kind " + kind);
    return generators_[std::distance(kinds_.begin(), it)];
  }

 private:
  friend PipelineOutput denoise_and_classify(Pipeline&, const ImageBatch&);

  std::vector<std::string> kinds_;
  std::vector<Generator> generators_;
  TargetClassifier classifier_{nullptr};
  NoiseClassifier nc_{nullptr};
};

// Route each image to the generator of its argmax predicted kind (ties break
// to the lowest kind index), denoise, and reclassify.
inline PipelineOutput denoise_and_classify(Pipeline& p, const ImageBatch& batch) {
  torch::NoGradGuard ng;
  const std::int64_t n = batch.size();
  auto nchw = batch.nchw();

  auto dist = torch::softmax(p.nc_->forward(nchw), 1);
  auto dist_acc = dist.accessor<float, 2>();
  const int k_count = static_cast<int>(p.kinds_.size());

  std::vector<int> routed_kind(n);
  std::vector<double> confidence(n);
  std::vector<std::vector<std::int64_t>> per_kind(k_count);
  for (std::int64_t i = 0; i < n; ++i) {
    int best = 0;
    for (int k = 1; k < k_count; ++k) {
      if (dist_acc[i][k] > dist_acc[i][best]) best = k;
    }
    routed_kind[i] = best;
    confidence[i] = dist_acc[i][best];
    per_kind[best].push_back(i);
  }

  auto denoised = torch::empty_like(nchw);
  for (int k = 0; k < k_count; ++k) {
    if (per_kind[k].empty()) continue;
    auto sel = torch::tensor(per_kind[k], torch::kInt64);
    auto x = nchw.index_select(0, sel);
    auto d = denoise_nchw(x, p.generators_[k]->forward(x));
    denoised.index_copy_(0, sel, d);
  }

  auto logits = p.classifier_->forward(denoised);
  auto pred = logits.argmax(1);
  auto logits_acc = logits.accessor<float, 2>();
  auto pred_acc = pred.accessor<std::int64_t, 1>();

  PipelineOutput out{{}, ImageBatch::from_nchw(denoised)};
  out.per_image.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<float> row(logits_acc[i].data(), logits_acc[i].data() + kNumClasses);
    out.per_image.push_back({p.kinds_[routed_kind[i]], confidence[i],
                             out.denoised_batch.slice(i, i + 1),
                             pred_acc[i], std::move(row)});
  }
  return out;
}

}  // namespace corrgan
