#pragma once

#include <torch/torch.h>
#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrgan/common.hpp"
#include "corrgan/corruption.hpp"
#include "corrgan/dataset.hpp"
#include "corrgan/jsonio.hpp"
#include "corrgan/losses.hpp"
#include "corrgan/models.hpp"
#include "corrgan/rng.hpp"

namespace corrgan {

struct LearningRates {
  double generator = 2e-4;
  double discriminator = 2e-4;
  double classifier = 1e-3;
};

struct TrainConfig {
  int epochs = 1;
  int batch_size = 64;
  LearningRates learning_rates;
  std::uint64_t seed = 0;
  LossWeights loss_weights;
  std::string device = "cpu";

  void validate() const {
    if (epochs < 0) throw InvalidSpec("epochs must be >= 0");
    if (batch_size < 1) throw InvalidSpec("batch_size must be >= 1");
    if (learning_rates.generator <= 0 || learning_rates.discriminator <= 0 ||
        learning_rates.classifier <= 0) {
      throw InvalidSpec("learning rates must be > 0");
    }
    loss_weights.validate();
  }

  nlohmann::json to_json() const {
    return {
        {"epochs", epochs},
        {"batch_size", batch_size},
        {"learning_rates",
         {{"generator", learning_rates.generator},
          {"discriminator", learning_rates.discriminator},
          {"classifier", learning_rates.classifier}}},
        {"seed", seed},
        {"loss_weights",
         {{"lambda_pix", loss_weights.lambda_pix},
          {"lambda_hid", loss_weights.lambda_hid}}},
        {"device", device},
    };
  }

  static TrainConfig from_json(const nlohmann::json& j) {
    expect_keys(j, {}, {"epochs", "batch_size", "learning_rates", "seed",
                        "loss_weights", "device"},
                "TrainConfig");
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("learning_rates")) {
      const auto& lr = j.at("learning_rates");
      expect_keys(lr, {}, {"generator", "discriminator", "classifier"},
                  "TrainConfig.learning_rates");
      c.learning_rates.generator = lr.value("generator", c.learning_rates.generator);
      c.learning_rates.discriminator =
          lr.value("discriminator", c.learning_rates.discriminator);
      c.learning_rates.classifier =
          lr.value("classifier", c.learning_rates.classifier);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("loss_weights")) {
      const auto& lw = j.at("loss_weights");
      expect_keys(lw, {}, {"lambda_pix", "lambda_hid"}, "TrainConfig.loss_weights");
      c.loss_weights.lambda_pix = lw.value("lambda_pix", c.loss_weights.lambda_pix);
      c.loss_weights.lambda_hid = lw.value("lambda_hid", c.loss_weights.lambda_hid);
    }
    c.device = j.value("device", c.device);
    c.validate();
    return c;
  }
};

// Stable fingerprint of a config; nlohmann orders keys, so dump() is canonical.
inline std::string config_hash(const TrainConfig& cfg) {
  std::uint64_t h = fnv1a64(cfg.to_json().dump());
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Checkpoints: <dir>/weights.pt (native archive: parameters, buffers, step
// counter, RNG snapshot) + <dir>/manifest.json sidecar with a CRC of the blob.
// ---------------------------------------------------------------------------

struct CheckpointManifest {
  std::string model_role;
  std::string architecture_id;
  std::vector<std::int64_t> input_shape{kImageChannels, kImageSize, kImageSize};
  int num_classes_or_kinds = 0;
  std::string training_config_hash;
  int format_version = kCheckpointFormatVersion;
  std::vector<std::string> kinds;  // noise classifier only: label order
  std::uint32_t weights_crc32 = 0;
  std::int64_t step = 0;
};

namespace detail {

inline std::uint32_t file_crc32(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf),
                static_cast<uInt>(in.gcount()));
  }
  return crc;
}

}  // namespace detail

inline void save_checkpoint(torch::nn::Module& module, CheckpointManifest man,
                            const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint dir " + dir.string());

  const fs::path weights = dir / "weights.pt";
  torch::serialize::OutputArchive ar;
  module.save(ar);
  ar.write("corrgan_step", torch::tensor(man.step));
  ar.write("corrgan_rng_state", torch::get_rng_state());
  ar.save_to(weights.string());

  man.weights_crc32 = detail::file_crc32(weights);
  nlohmann::json j = {
      {"model_role", man.model_role},
      {"architecture_id", man.architecture_id},
      {"input_shape", man.input_shape},
      {"num_classes_or_kinds", man.num_classes_or_kinds},
      {"training_config_hash", man.training_config_hash},
      {"format_version", man.format_version},
      {"weights_crc32", man.weights_crc32},
      {"step", man.step},
  };
  if (!man.kinds.empty()) j["kinds"] = man.kinds;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << "\n";
}

inline CheckpointManifest read_checkpoint_manifest(const fs::path& dir) {
  const fs::path mp = dir / "manifest.json";
  if (!fs::exists(mp)) throw IoError("missing checkpoint manifest " + mp.string());
  nlohmann::json j;
  {
    std::ifstream in(mp);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError("bad manifest " + mp.string() + ": " + e.what());
    }
  }
  try {
    CheckpointManifest m;
    m.model_role = j.at("model_role").get<std::string>();
    m.architecture_id = j.at("architecture_id").get<std::string>();
    m.input_shape = j.at("input_shape").get<std::vector<std::int64_t>>();
    m.num_classes_or_kinds = j.at("num_classes_or_kinds").get<int>();
    m.training_config_hash = j.at("training_config_hash").get<std::string>();
    m.format_version = j.at("format_version").get<int>();
    m.weights_crc32 = j.at("weights_crc32").get<std::uint32_t>();
    m.step = j.value("step", 0);
    m.kinds = j.value("kinds", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError("bad manifest " + mp.string() + ": " + e.what());
  }
}

// Verifies role and checksum, then fills `module` from the archive.
inline CheckpointManifest load_checkpoint_into(torch::nn::Module& module,
                                               ModelRole expected_role,
                                               const fs::path& dir) {
  auto man = read_checkpoint_manifest(dir);
  if (man.format_version != kCheckpointFormatVersion) {
    throw ManifestError("unsupported checkpoint format_version in " + dir.string());
  }
  if (role_from_string(man.model_role) != expected_role) {
    throw ManifestError("checkpoint role mismatch in " + dir.string() +
                        ": have " + man.model_role + ", want " +
                        to_string(expected_role));
  }
  const fs::path weights = dir / "weights.pt";
  if (!fs::exists(weights)) throw IoError("missing " + weights.string());
  if (detail::file_crc32(weights) != man.weights_crc32) {
    throw ChecksumError("weights blob corrupt in " + dir.string());
  }
  torch::serialize::InputArchive ar;
  ar.load_from(weights.string());
  module.load(ar);
  return man;
}

inline TargetClassifier load_target_classifier(const fs::path& dir) {
  auto man = read_checkpoint_manifest(dir);
  TargetClassifier model(man.num_classes_or_kinds > 0 ? man.num_classes_or_kinds
                                                      : kNumClasses);
  load_checkpoint_into(*model, ModelRole::TargetClassifier, dir);
  return model;
}

inline Generator load_generator(const fs::path& dir) {
  Generator model;
  load_checkpoint_into(*model, ModelRole::Generator, dir);
  return model;
}

inline Discriminator load_discriminator(const fs::path& dir) {
  Discriminator model;
  load_checkpoint_into(*model, ModelRole::Discriminator, dir);
  return model;
}

inline NoiseClassifier load_noise_classifier(const fs::path& dir) {
  auto man = read_checkpoint_manifest(dir);
  const std::string arch = man.architecture_id == "resnet18_noise_classifier_v1"
                               ? "resnet18"
                               : "conv4";
  NoiseClassifier model(man.num_classes_or_kinds, arch);
  load_checkpoint_into(*model, ModelRole::NoiseClassifier, dir);
  return model;
}

// ---------------------------------------------------------------------------
// Training loops
// ---------------------------------------------------------------------------

struct TrainLogEntry {
  std::int64_t step = 0;
  double adv = 0.0;
  double pix = 0.0;
  double hid = 0.0;
  double total = 0.0;
  double d_loss = 0.0;
};

namespace detail {

class StepLogger {
 public:
  explicit StepLogger(const fs::path& path) {
    if (!path.empty()) {
      out_.open(path);
      if (!out_) throw IoError("cannot write training log " + path.string());
    }
  }

  void log(const TrainLogEntry& e) {
    history_.push_back(e);
    if (out_) {
      nlohmann::json j = {{"step", e.step},   {"adv", e.adv},
                          {"pix", e.pix},     {"hid", e.hid},
                          {"total", e.total}, {"d_loss", e.d_loss}};
      out_ << j.dump() << "\n";
    }
  }

  const std::vector<TrainLogEntry>& history() const { return history_; }

 private:
  std::ofstream out_;
  std::vector<TrainLogEntry> history_;
};

inline std::vector<std::int64_t> shuffled_indices(std::int64_t n,
                                                  std::uint64_t key) {
  std::vector<std::int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Splitmix64 rng(key);
  for (std::int64_t i = n - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng.next_below(static_cast<std::uint64_t>(i + 1))]);
  }
  return idx;
}

// Conv weights in NHWC order speed up CPU convolutions noticeably.
inline void to_channels_last(torch::nn::Module& m) {
  torch::NoGradGuard ng;
  for (auto& p : m.parameters()) {
    if (p.dim() == 4) p.set_data(p.data().contiguous(torch::MemoryFormat::ChannelsLast));
  }
}

inline void to_contiguous(torch::nn::Module& m) {
  torch::NoGradGuard ng;
  for (auto& p : m.parameters()) {
    if (p.dim() == 4) p.set_data(p.data().contiguous());
  }
}

inline void progress(const std::string& phase, int epoch, double value) {
  nlohmann::json j = {{"event", "epoch"}, {"phase", phase}, {"epoch", epoch},
                      {"mean_total", value}};
  std::cerr << j.dump() << "\n";
}

}  // namespace detail

inline void freeze(torch::nn::Module& m) {
  for (auto& p : m.parameters()) p.set_requires_grad(false);
  m.eval();
}

// Optional early-exit for the smoke-scale budgets: stop once the probe set
// reaches `target_accuracy`, checked every `check_every` optimizer steps.
struct EarlyStop {
  const Dataset* probe = nullptr;
  double target_accuracy = 1.0;
  int check_every = 50;
};

namespace detail {

template <typename ModuleHolder>
double accuracy_on(ModuleHolder& model, const torch::Tensor& images_nchw,
                   const torch::Tensor& labels, int batch_size = 256) {
  torch::NoGradGuard ng;
  const bool was_training = model->is_training();
  model->eval();
  std::int64_t correct = 0;
  const std::int64_t n = images_nchw.size(0);
  for (std::int64_t b = 0; b < n; b += batch_size) {
    auto end = std::min<std::int64_t>(b + batch_size, n);
    auto logits = model->forward(images_nchw.slice(0, b, end));
    correct +=
        (logits.argmax(1) == labels.slice(0, b, end)).sum().item<std::int64_t>();
  }
  if (was_training) model->train();
  return static_cast<double>(correct) / static_cast<double>(n);
}

// One pass over the data; `should_stop`, when set, is polled every
// `poll_every` steps and ends the epoch early.
template <typename ModuleHolder>
double classification_epoch(ModuleHolder& model, torch::optim::Adam& opt,
                            const torch::Tensor& images_nchw,
                            const torch::Tensor& labels, int batch_size,
                            std::uint64_t shuffle_key, StepLogger& logger,
                            std::int64_t& step,
                            const std::function<bool()>& should_stop = {},
                            int poll_every = 50) {
  auto idx = shuffled_indices(images_nchw.size(0), shuffle_key);
  double loss_sum = 0.0;
  std::int64_t batches = 0;
  for (std::size_t b = 0; b < idx.size(); b += batch_size) {
    auto end = std::min(idx.size(), b + static_cast<std::size_t>(batch_size));
    auto sel = torch::tensor(
        std::vector<std::int64_t>(idx.begin() + b, idx.begin() + end),
        torch::kInt64);
    auto x = images_nchw.index_select(0, sel)
                 .contiguous(torch::MemoryFormat::ChannelsLast);
    auto y = labels.index_select(0, sel);
    opt.zero_grad();
    auto loss = torch::cross_entropy_loss(model->forward(x), y);
    loss.backward();
    opt.step();
    const double lv = loss.template item<double>();
    if (!std::isfinite(lv)) {
      throw NumericalError("non-finite classifier loss at step " +
                           std::to_string(step));
    }
    logger.log({step, 0.0, 0.0, 0.0, lv, 0.0});
    ++step;
    loss_sum += lv;
    ++batches;
    if (should_stop && step % poll_every == 0 && should_stop()) break;
  }
  return batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
}

}  // namespace detail

struct ClassifierTrainResult {
  TargetClassifier model{nullptr};
  std::vector<TrainLogEntry> history;
  fs::path checkpoint_dir;
};

inline ClassifierTrainResult train_target_classifier(const Dataset& clean_train,
                                                     const TrainConfig& cfg,
                                                     const fs::path& out_dir,
                                                     const EarlyStop* early = nullptr) {
  cfg.validate();
  if (clean_train.size() == 0) throw InvalidSpec("empty training dataset");
  clean_train.validate();

  torch::manual_seed(stream_key(cfg.seed, "init/classifier"));
  TargetClassifier model;
  model->train();
  detail::to_channels_last(*model);

  torch::optim::Adam opt(model->parameters(),
                         torch::optim::AdamOptions(cfg.learning_rates.classifier));
  auto images = clean_train.images.nchw();
  auto labels = torch::tensor(clean_train.class_labels, torch::kInt64);

  detail::StepLogger logger(out_dir.empty() ? fs::path{}
                                            : out_dir / "train_log.jsonl");
  std::function<bool()> should_stop;
  torch::Tensor probe_images, probe_labels;
  if (early && early->probe) {
    probe_images = early->probe->images.nchw();
    probe_labels = torch::tensor(early->probe->class_labels, torch::kInt64);
    should_stop = [&]() {
      return detail::accuracy_on(model, probe_images, probe_labels) >=
             early->target_accuracy;
    };
  }

  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double mean = detail::classification_epoch(
        model, opt, images, labels, cfg.batch_size,
        stream_key(cfg.seed, "shuffle/classifier", epoch), logger, step,
        should_stop, early ? early->check_every : 50);
    detail::progress("classifier", epoch, mean);
    if (should_stop && should_stop()) break;
  }

  detail::to_contiguous(*model);
  model->eval();
  if (!out_dir.empty()) {
    save_checkpoint(*model,
                    {to_string(ModelRole::TargetClassifier),
                     TargetClassifierImpl::architecture_id(),
                     {kImageChannels, kImageSize, kImageSize},
                     kNumClasses,
                     config_hash(cfg),
                     kCheckpointFormatVersion,
                     {},
                     0,
                     step},
                    out_dir);
  }
  return {model, logger.history(), out_dir};
}

// Label order for the noise classifier: corruption-registry order of the kinds
// present in the training data.
inline std::vector<std::string> nc_kind_order(const std::vector<Dataset>& sets) {
  std::vector<std::string> kinds;
  for (const auto& ds : sets) {
    if (std::find(kinds.begin(), kinds.end(), ds.corruption_kind) == kinds.end()) {
      kinds.push_back(ds.corruption_kind);
    }
  }
  if (kinds.size() < 2) {
    throw InvalidSpec("noise classifier training needs >= 2 corruption kinds");
  }
  auto& reg = CorruptionRegistry::instance();
  std::sort(kinds.begin(), kinds.end(), [&](const auto& a, const auto& b) {
    return reg.index_of(a) < reg.index_of(b);
  });
  return kinds;
}

struct NoiseClassifierTrainResult {
  NoiseClassifier model{nullptr};
  std::vector<std::string> kinds;
  std::vector<TrainLogEntry> history;
  fs::path checkpoint_dir;
};

inline NoiseClassifierTrainResult train_noise_classifier(
    const std::vector<Dataset>& corrupted_sets, const TrainConfig& cfg,
    const fs::path& out_dir, const std::string& arch = "conv4") {
  cfg.validate();
  if (corrupted_sets.empty()) throw InvalidSpec("no corrupted datasets given");
  auto kinds = nc_kind_order(corrupted_sets);

  std::vector<torch::Tensor> image_parts;
  std::vector<std::int64_t> kind_labels;
  for (const auto& ds : corrupted_sets) {
    ds.validate();
    image_parts.push_back(ds.images.nchw());
    const auto kind_idx = std::distance(
        kinds.begin(), std::find(kinds.begin(), kinds.end(), ds.corruption_kind));
    kind_labels.insert(kind_labels.end(), ds.size(), kind_idx);
  }
  auto images = torch::cat(image_parts, 0);
  auto labels = torch::tensor(kind_labels, torch::kInt64);

  torch::manual_seed(stream_key(cfg.seed, "init/noise_classifier"));
  NoiseClassifier model(static_cast<int>(kinds.size()), arch);
  model->train();
  detail::to_channels_last(*model);
  torch::optim::Adam opt(model->parameters(),
                         torch::optim::AdamOptions(cfg.learning_rates.classifier));

  detail::StepLogger logger(out_dir.empty() ? fs::path{}
                                            : out_dir / "train_log.jsonl");
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double mean = detail::classification_epoch(
        model, opt, images, labels, cfg.batch_size,
        stream_key(cfg.seed, "shuffle/noise_classifier", epoch), logger, step);
    detail::progress("noise_classifier", epoch, mean);
  }

  detail::to_contiguous(*model);
  model->eval();
  if (!out_dir.empty()) {
    save_checkpoint(*model,
                    {to_string(ModelRole::NoiseClassifier),
                     model->architecture_id(),
                     {kImageChannels, kImageSize, kImageSize},
                     static_cast<int>(kinds.size()),
                     config_hash(cfg),
                     kCheckpointFormatVersion,
                     kinds,
                     0,
                     step},
                    out_dir);
  }
  return {model, kinds, logger.history(), out_dir};
}

struct GanTrainResult {
  Generator generator{nullptr};
  Discriminator discriminator{nullptr};
  std::vector<TrainLogEntry> history;
  fs::path generator_dir;
  fs::path discriminator_dir;
};

// Alternating 1:1 updates: one discriminator step on (benign, denoised), then
// one generator step on the composite objective. The target classifier stays
// frozen; corrupted and clean sets must be index-aligned views of the same
// underlying images.
inline GanTrainResult train_denoiser_gan(const std::string& kind,
                                         const Dataset& corrupted,
                                         const Dataset& clean,
                                         TargetClassifier& frozen_classifier,
                                         const TrainConfig& cfg,
                                         const fs::path& out_dir) {
  cfg.validate();
  corrupted.validate();
  clean.validate();
  if (corrupted.size() != clean.size() ||
      corrupted.class_labels != clean.class_labels) {
    throw InvalidSpec("GAN training needs index-aligned corrupted/clean datasets");
  }
  if (corrupted.corruption_kind != kind) {
    throw InvalidSpec("corrupted dataset kind " + corrupted.corruption_kind +
                      " does not match requested kind " + kind);
  }
  freeze(*frozen_classifier);

  torch::manual_seed(stream_key(cfg.seed, "init/gan/" + kind));
  Generator gen;
  Discriminator disc;
  gen->train();
  disc->train();
  detail::to_channels_last(*gen);
  detail::to_channels_last(*disc);

  torch::optim::Adam g_opt(gen->parameters(),
                           torch::optim::AdamOptions(cfg.learning_rates.generator)
                               .betas({0.5, 0.999}));
  torch::optim::Adam d_opt(
      disc->parameters(),
      torch::optim::AdamOptions(cfg.learning_rates.discriminator)
          .betas({0.5, 0.999}));

  auto x_corrupt_all = corrupted.images.nchw();
  auto x_orig_all = clean.images.nchw();

  detail::StepLogger logger(out_dir.empty() ? fs::path{}
                                            : out_dir / "train_log.jsonl");
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto idx = detail::shuffled_indices(
        corrupted.size(), stream_key(cfg.seed, "shuffle/gan/" + kind, epoch));
    double total_sum = 0.0;
    std::int64_t batches = 0;
    for (std::size_t b = 0; b < idx.size(); b += cfg.batch_size) {
      auto end = std::min(idx.size(), b + cfg.batch_size);
      auto sel = torch::tensor(
          std::vector<std::int64_t>(idx.begin() + b, idx.begin() + end),
          torch::kInt64);
      auto x_corrupt = x_corrupt_all.index_select(0, sel)
                           .contiguous(torch::MemoryFormat::ChannelsLast);
      auto x_orig = x_orig_all.index_select(0, sel)
                        .contiguous(torch::MemoryFormat::ChannelsLast);

      // Discriminator step: benign vs denoised (generator detached).
      torch::Tensor denoised_detached;
      {
        torch::NoGradGuard ng;
        denoised_detached = denoise_nchw(x_corrupt, gen->forward(x_corrupt));
      }
      d_opt.zero_grad();
      auto d_loss = discriminator_loss(disc->forward(x_orig),
                                       disc->forward(denoised_detached));
      d_loss.backward();
      d_opt.step();

      // Generator step on the composite objective.
      g_opt.zero_grad();
      auto terms =
          total_generator_loss(x_corrupt, gen->forward(x_corrupt), x_orig,
                               *frozen_classifier, *disc, cfg.loss_weights);
      terms.total.backward();
      g_opt.step();

      auto entry = terms.breakdown();
      const double dl = d_loss.item<double>();
      if (!std::isfinite(entry.total) || !std::isfinite(dl)) {
        throw NumericalError("non-finite GAN loss at step " +
                             std::to_string(step));
      }
      logger.log({step, entry.adv, entry.pix, entry.hid, entry.total, dl});
      ++step;
      total_sum += entry.total;
      ++batches;
    }
    detail::progress("gan/" + kind, epoch,
                     batches ? total_sum / static_cast<double>(batches) : 0.0);
  }

  detail::to_contiguous(*gen);
  detail::to_contiguous(*disc);
  gen->eval();
  disc->eval();

  GanTrainResult result{gen, disc, logger.history(), {}, {}};
  if (!out_dir.empty()) {
    result.generator_dir = out_dir / "generator";
    result.discriminator_dir = out_dir / "discriminator";
    save_checkpoint(*gen,
                    {to_string(ModelRole::Generator),
                     GeneratorImpl::architecture_id(),
                     {kImageChannels, kImageSize, kImageSize},
                     0,
                     config_hash(cfg),
                     kCheckpointFormatVersion,
                     {kind},
                     0,
                     step},
                    result.generator_dir);
    save_checkpoint(*disc,
                    {to_string(ModelRole::Discriminator),
                     DiscriminatorImpl::architecture_id(),
                     {kImageChannels, kImageSize, kImageSize},
                     0,
                     config_hash(cfg),
                     kCheckpointFormatVersion,
                     {kind},
                     0,
                     step},
                    result.discriminator_dir);
  }
  return result;
}

}  // namespace corrgan
