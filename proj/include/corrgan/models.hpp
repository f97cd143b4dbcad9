#pragma once

#include <torch/torch.h>

#include <string>
#include <utility>
#include <vector>

#include "corrgan/common.hpp"
#include "corrgan/dataset.hpp"

namespace corrgan {

enum class ModelRole { TargetClassifier, Generator, Discriminator, NoiseClassifier };

inline std::string to_string(ModelRole r) {
  switch (r) {
    case ModelRole::TargetClassifier: return "target_classifier";
    case ModelRole::Generator: return "generator";
    case ModelRole::Discriminator: return "discriminator";
    case ModelRole::NoiseClassifier: return "noise_classifier";
  }
  throw Error("bad ModelRole");
}

inline ModelRole role_from_string(const std::string& s) {
  if (s == "target_classifier") return ModelRole::TargetClassifier;
  if (s == "generator") return ModelRole::Generator;
  if (s == "discriminator") return ModelRole::Discriminator;
  if (s == "noise_classifier") return ModelRole::NoiseClassifier;
  throw ManifestError("unknown model_role: " + s);
}

// Activation maps tapped after each residual group of the target classifier.
struct HiddenStates {
  torch::Tensor g1, g2, g3, g4;

  std::array<const torch::Tensor*, 4> groups() const {
    return {&g1, &g2, &g3, &g4};
  }
};

// ---------------------------------------------------------------------------
// Target classifier: 18-layer residual net adapted to 32x32 inputs (3x3 stem,
// no initial pooling), four groups of two basic blocks at widths 64/128/256/512.
// ---------------------------------------------------------------------------

struct BasicBlockImpl : torch::nn::Module {
  BasicBlockImpl(int in_ch, int out_ch, int stride) {
    conv1 = register_module(
        "conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, out_ch, 3)
                                       .stride(stride).padding(1).bias(false)));
    bn1 = register_module("bn1", torch::nn::BatchNorm2d(out_ch));
    conv2 = register_module(
        "conv2", torch::nn::Conv2d(torch::nn::Conv2dOptions(out_ch, out_ch, 3)
                                       .stride(1).padding(1).bias(false)));
    bn2 = register_module("bn2", torch::nn::BatchNorm2d(out_ch));
    if (stride != 1 || in_ch != out_ch) {
      down_conv = register_module(
          "down_conv",
          torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, out_ch, 1)
                                .stride(stride).bias(false)));
      down_bn = register_module("down_bn", torch::nn::BatchNorm2d(out_ch));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = torch::relu(bn1->forward(conv1->forward(x)));
    y = bn2->forward(conv2->forward(y));
    auto skip = down_conv ? down_bn->forward(down_conv->forward(x)) : x;
    return torch::relu(y + skip);
  }

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, down_conv{nullptr};
  torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr}, down_bn{nullptr};
};
TORCH_MODULE(BasicBlock);

struct TargetClassifierImpl : torch::nn::Module {
  TargetClassifierImpl(int num_classes = kNumClasses) {
    stem_conv = register_module(
        "stem_conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(3, 64, 3)
                                           .stride(1).padding(1).bias(false)));
    stem_bn = register_module("stem_bn", torch::nn::BatchNorm2d(64));
    g1a = register_module("g1a", BasicBlock(64, 64, 1));
    g1b = register_module("g1b", BasicBlock(64, 64, 1));
    g2a = register_module("g2a", BasicBlock(64, 128, 2));
    g2b = register_module("g2b", BasicBlock(128, 128, 1));
    g3a = register_module("g3a", BasicBlock(128, 256, 2));
    g3b = register_module("g3b", BasicBlock(256, 256, 1));
    g4a = register_module("g4a", BasicBlock(256, 512, 2));
    g4b = register_module("g4b", BasicBlock(512, 512, 1));
    fc = register_module("fc", torch::nn::Linear(512, num_classes));
  }

  torch::Tensor forward(const torch::Tensor& nchw) {
    auto x = torch::relu(stem_bn->forward(stem_conv->forward(nchw)));
    x = g1b->forward(g1a->forward(x));
    x = g2b->forward(g2a->forward(x));
    x = g3b->forward(g3a->forward(x));
    x = g4b->forward(g4a->forward(x));
    x = torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
    return fc->forward(x);
  }

  std::pair<torch::Tensor, HiddenStates> forward_tapped(
      const torch::Tensor& nchw) {
    auto x = torch::relu(stem_bn->forward(stem_conv->forward(nchw)));
    HiddenStates h;
    x = g1b->forward(g1a->forward(x));
    h.g1 = x;
    x = g2b->forward(g2a->forward(x));
    h.g2 = x;
    x = g3b->forward(g3a->forward(x));
    h.g3 = x;
    x = g4b->forward(g4a->forward(x));
    h.g4 = x;
    x = torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
    return {fc->forward(x), h};
  }

  HiddenStates hidden(const torch::Tensor& nchw) {
    return forward_tapped(nchw).second;
  }

  static std::string architecture_id() { return "resnet18_cifar_v1"; }

  torch::nn::Conv2d stem_conv{nullptr};
  torch::nn::BatchNorm2d stem_bn{nullptr};
  BasicBlock g1a{nullptr}, g1b{nullptr}, g2a{nullptr}, g2b{nullptr},
      g3a{nullptr}, g3b{nullptr}, g4a{nullptr}, g4b{nullptr};
  torch::nn::Linear fc{nullptr};
};
TORCH_MODULE(TargetClassifier);

// ---------------------------------------------------------------------------
// Perturbation generator: 3-stage encoder to 8x8, 4 residual blocks, 3-stage
// decoder with additive skips, tanh output. The output head starts zeroed so a
// freshly constructed generator is the identity denoiser.
// ---------------------------------------------------------------------------

struct GenResBlockImpl : torch::nn::Module {
  explicit GenResBlockImpl(int ch) {
    conv1 = register_module(
        "conv1", torch::nn::Conv2d(
                     torch::nn::Conv2dOptions(ch, ch, 3).padding(1)));
    in1 = register_module(
        "in1", torch::nn::InstanceNorm2d(
                   torch::nn::InstanceNorm2dOptions(ch).affine(true)));
    conv2 = register_module(
        "conv2", torch::nn::Conv2d(
                     torch::nn::Conv2dOptions(ch, ch, 3).padding(1)));
    in2 = register_module(
        "in2", torch::nn::InstanceNorm2d(
                   torch::nn::InstanceNorm2dOptions(ch).affine(true)));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto y = torch::relu(in1->forward(conv1->forward(x)));
    y = in2->forward(conv2->forward(y));
    return torch::relu(y + x);
  }

  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr};
  torch::nn::InstanceNorm2d in1{nullptr}, in2{nullptr};
};
TORCH_MODULE(GenResBlock);

struct GeneratorImpl : torch::nn::Module {
  GeneratorImpl() {
    enc1 = register_module(
        "enc1", torch::nn::Conv2d(torch::nn::Conv2dOptions(3, 32, 3).padding(1)));
    enc1_norm = register_module(
        "enc1_norm", torch::nn::InstanceNorm2d(
                         torch::nn::InstanceNorm2dOptions(32).affine(true)));
    enc2 = register_module(
        "enc2", torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(32, 64, 3).stride(2).padding(1)));
    enc2_norm = register_module(
        "enc2_norm", torch::nn::InstanceNorm2d(
                         torch::nn::InstanceNorm2dOptions(64).affine(true)));
    enc3 = register_module(
        "enc3", torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(64, 128, 3).stride(2).padding(1)));
    enc3_norm = register_module(
        "enc3_norm", torch::nn::InstanceNorm2d(
                         torch::nn::InstanceNorm2dOptions(128).affine(true)));
    for (int i = 0; i < 4; ++i) {
      res.push_back(register_module("res" + std::to_string(i), GenResBlock(128)));
    }
    dec3 = register_module(
        "dec3", torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(128, 64, 3).padding(1)));
    dec3_norm = register_module(
        "dec3_norm", torch::nn::InstanceNorm2d(
                         torch::nn::InstanceNorm2dOptions(64).affine(true)));
    dec2 = register_module(
        "dec2", torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(64, 32, 3).padding(1)));
    dec2_norm = register_module(
        "dec2_norm", torch::nn::InstanceNorm2d(
                         torch::nn::InstanceNorm2dOptions(32).affine(true)));
    out_conv = register_module(
        "out_conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(32, 3, 3).padding(1)));
    torch::NoGradGuard ng;
    out_conv->weight.zero_();
    out_conv->bias.zero_();
  }

  torch::Tensor forward(const torch::Tensor& nchw) {
    namespace F = torch::nn::functional;
    auto e1 = torch::relu(enc1_norm->forward(enc1->forward(nchw)));
    auto e2 = torch::relu(enc2_norm->forward(enc2->forward(e1)));
    auto e3 = torch::relu(enc3_norm->forward(enc3->forward(e2)));
    auto x = e3;
    for (auto& block : res) x = block->forward(x);
    auto up_opts = F::InterpolateFuncOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest);
    x = torch::relu(dec3_norm->forward(dec3->forward(F::interpolate(x, up_opts))));
    x = x + e2;
    x = torch::relu(dec2_norm->forward(dec2->forward(F::interpolate(x, up_opts))));
    x = x + e1;
    return torch::tanh(out_conv->forward(x));
  }

  static std::string architecture_id() { return "encdec_residual_generator_v1"; }

  torch::nn::Conv2d enc1{nullptr}, enc2{nullptr}, enc3{nullptr}, dec3{nullptr},
      dec2{nullptr}, out_conv{nullptr};
  torch::nn::InstanceNorm2d enc1_norm{nullptr}, enc2_norm{nullptr},
      enc3_norm{nullptr}, dec3_norm{nullptr}, dec2_norm{nullptr};
  std::vector<GenResBlock> res;
};
TORCH_MODULE(Generator);

// ---------------------------------------------------------------------------
// Discriminator: four stride-2 convs, global pooling, sigmoid head. Outputs
// are clamped into [kProbEps, 1-kProbEps] for loss stability.
// ---------------------------------------------------------------------------

struct DiscriminatorImpl : torch::nn::Module {
  DiscriminatorImpl() {
    const int chs[5] = {3, 64, 128, 256, 512};
    for (int i = 0; i < 4; ++i) {
      convs.push_back(register_module(
          "conv" + std::to_string(i),
          torch::nn::Conv2d(torch::nn::Conv2dOptions(chs[i], chs[i + 1], 3)
                                .stride(2).padding(1))));
    }
    fc = register_module("fc", torch::nn::Linear(512, 1));
  }

  // Probabilities in [kProbEps, 1-kProbEps], shape {N}.
  torch::Tensor forward(const torch::Tensor& nchw) {
    auto x = nchw;
    for (auto& c : convs) x = torch::leaky_relu(c->forward(x), 0.2);
    x = torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
    auto p = torch::sigmoid(fc->forward(x)).squeeze(1);
    return p.clamp(kProbEps, 1.0 - kProbEps);
  }

  static std::string architecture_id() { return "conv4_discriminator_v1"; }

  std::vector<torch::nn::Conv2d> convs;
  torch::nn::Linear fc{nullptr};
};
TORCH_MODULE(Discriminator);

// ---------------------------------------------------------------------------
// Noise classifier over registered corruption kinds. Desk-scale default is a
// 4-block convnet; "resnet18" selects the full-depth backbone.
// ---------------------------------------------------------------------------

struct NoiseClassifierImpl : torch::nn::Module {
  explicit NoiseClassifierImpl(int num_kinds, std::string arch = "conv4")
      : num_kinds_(num_kinds), arch_(std::move(arch)) {
    if (num_kinds < 2) {
      throw InvalidSpec("noise classifier needs >= 2 kinds, got " +
                        std::to_string(num_kinds));
    }
    if (arch_ == "conv4") {
      const int chs[5] = {3, 32, 64, 128, 256};
      for (int i = 0; i < 4; ++i) {
        convs.push_back(register_module(
            "conv" + std::to_string(i),
            torch::nn::Conv2d(torch::nn::Conv2dOptions(chs[i], chs[i + 1], 3)
                                  .stride(i == 0 ? 1 : 2).padding(1).bias(false))));
        bns.push_back(register_module("bn" + std::to_string(i),
                                      torch::nn::BatchNorm2d(chs[i + 1])));
      }
      fc = register_module("fc", torch::nn::Linear(256, num_kinds));
    } else if (arch_ == "resnet18") {
      backbone = register_module("backbone", TargetClassifier(num_kinds));
    } else {
      throw InvalidSpec("unknown noise classifier arch: " + arch_);
    }
  }

  // Logits {N, K}; classify_noise() turns them into a distribution.
  torch::Tensor forward(const torch::Tensor& nchw) {
    if (backbone) return backbone->forward(nchw);
    auto x = nchw;
    for (size_t i = 0; i < convs.size(); ++i) {
      x = torch::relu(bns[i]->forward(convs[i]->forward(x)));
    }
    x = torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
    return fc->forward(x);
  }

  int num_kinds() const { return num_kinds_; }
  std::string architecture_id() const {
    return arch_ == "conv4" ? "conv4_noise_classifier_v1"
                            : "resnet18_noise_classifier_v1";
  }

  int num_kinds_;
  std::string arch_;
  std::vector<torch::nn::Conv2d> convs;
  std::vector<torch::nn::BatchNorm2d> bns;
  torch::nn::Linear fc{nullptr};
  TargetClassifier backbone{nullptr};
};
TORCH_MODULE(NoiseClassifier);

// ---------------------------------------------------------------------------
// Inference-path operations. Callers hand over models already in eval mode;
// these never touch gradients.
// ---------------------------------------------------------------------------

inline torch::Tensor classify(TargetClassifier& model, const ImageBatch& batch) {
  torch::NoGradGuard ng;
  return model->forward(batch.nchw());
}

inline HiddenStates extract_hidden(TargetClassifier& model,
                                   const ImageBatch& batch) {
  torch::NoGradGuard ng;
  return model->hidden(batch.nchw());
}

// Perturbation in [-1, 1], NHWC like the batch it corrects.
inline torch::Tensor generate_perturbation(Generator& gen,
                                           const ImageBatch& batch) {
  torch::NoGradGuard ng;
  return gen->forward(batch.nchw()).permute({0, 2, 3, 1}).contiguous();
}

inline torch::Tensor discriminate(Discriminator& disc, const ImageBatch& batch) {
  torch::NoGradGuard ng;
  return disc->forward(batch.nchw());
}

inline torch::Tensor classify_noise(NoiseClassifier& nc, const ImageBatch& batch) {
  torch::NoGradGuard ng;
  return torch::softmax(nc->forward(batch.nchw()), 1);
}

// Denoised image: clip(x + G(x), 0, 1). clamp's gradient already passes
// through unchanged inside the range and is zero outside.
inline torch::Tensor denoise_nchw(const torch::Tensor& x_nchw,
                                  const torch::Tensor& perturbation_nchw) {
  return torch::clamp(x_nchw + perturbation_nchw, 0.0, 1.0);
}

}  // namespace corrgan
