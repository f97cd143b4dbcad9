#pragma once

#include <torch/torch.h>

#include <concepts>
#include <string>

#include "corrgan/common.hpp"
#include "corrgan/models.hpp"

namespace corrgan {

struct LossWeights {
  double lambda_pix = 1.0;
  double lambda_hid = 1.0;

  void validate() const {
    if (lambda_pix < 0.0 || lambda_hid < 0.0) {
      throw InvalidSpec("loss weights must be >= 0");
    }
  }
};

struct LossBreakdown {
  double adv = 0.0;
  double pix = 0.0;
  double hid = 0.0;
  double total = 0.0;
};

namespace detail {

inline void check_same_shape(const torch::Tensor& a, const torch::Tensor& b,
                             const char* what) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

inline void check_finite(const torch::Tensor& t, const char* what) {
  if (!torch::isfinite(t).all().item<bool>()) {
    throw NumericalError(std::string(what) + ": non-finite value");
  }
}

// Per-sample-mean Euclidean norm of the difference. Batch-size invariant.
inline torch::Tensor per_sample_l2(const torch::Tensor& a,
                                   const torch::Tensor& b) {
  return (a - b).flatten(1).norm(2, 1).mean();
}

}  // namespace detail

inline torch::Tensor pixel_loss(const torch::Tensor& denoised,
                                const torch::Tensor& original) {
  detail::check_same_shape(denoised, original, "pixel_loss");
  return detail::per_sample_l2(denoised, original);
}

// Sum over the four tap groups of the per-sample-mean Euclidean distances.
inline torch::Tensor hidden_loss(const HiddenStates& denoised,
                                 const HiddenStates& original) {
  auto d = denoised.groups();
  auto o = original.groups();
  torch::Tensor sum;
  for (size_t i = 0; i < d.size(); ++i) {
    detail::check_same_shape(*d[i], *o[i], "hidden_loss");
    auto term = detail::per_sample_l2(*d[i], *o[i]);
    sum = sum.defined() ? sum + term : term;
  }
  return sum;
}

// -E log D(x) - E log(1 - D(G(x))), negated for minimization. Inputs are
// probabilities already clamped away from 0/1.
inline torch::Tensor discriminator_loss(const torch::Tensor& d_real,
                                        const torch::Tensor& d_fake) {
  detail::check_finite(d_real, "discriminator_loss(d_real)");
  detail::check_finite(d_fake, "discriminator_loss(d_fake)");
  return -torch::log(d_real).mean() - torch::log(1.0 - d_fake).mean();
}

// Non-saturating generator objective: -E log D(G(x)).
inline torch::Tensor generator_adversarial_loss(const torch::Tensor& d_fake) {
  detail::check_finite(d_fake, "generator_adversarial_loss");
  return -torch::log(d_fake).mean();
}

template <typename M>
concept HiddenTapModel = requires(M& m, const torch::Tensor& x) {
  { m.hidden(x) } -> std::same_as<HiddenStates>;
};

template <typename D>
concept ProbabilityCritic = requires(D& d, const torch::Tensor& x) {
  { d.forward(x) } -> std::same_as<torch::Tensor>;
};

// The composite objective as live tensors, so training can backward() through
// `total` while logs consume the scalar breakdown.
struct GeneratorLossTerms {
  torch::Tensor adv, pix, hid, total;

  LossBreakdown breakdown() const {
    return {adv.item<double>(), pix.item<double>(), hid.item<double>(),
            total.item<double>()};
  }
};

// total = adv(D(clip(x+G(x)))) + lambda_pix * ||clip(x+G(x)) - x_orig||
//       + lambda_hid * sum_g ||Hid_g(clip(x+G(x))) - Hid_g(x_orig)||.
// The hidden term is skipped (and reported as 0) when its weight is zero,
// which is what makes the lambda_hid=0 ablation cheap: no classifier pass.
template <HiddenTapModel M, ProbabilityCritic D>
GeneratorLossTerms total_generator_loss(const torch::Tensor& x_corrupt,
                                        const torch::Tensor& perturbation,
                                        const torch::Tensor& x_orig,
                                        M& classifier, D& discriminator,
                                        const LossWeights& weights) {
  weights.validate();
  detail::check_same_shape(x_corrupt, perturbation, "total_generator_loss");
  detail::check_same_shape(x_corrupt, x_orig, "total_generator_loss");

  auto denoised = denoise_nchw(x_corrupt, perturbation);
  auto zero = torch::zeros({}, x_corrupt.options());

  GeneratorLossTerms terms;
  terms.adv = generator_adversarial_loss(discriminator.forward(denoised));
  terms.pix = pixel_loss(denoised, x_orig);
  if (weights.lambda_hid > 0.0) {
    HiddenStates hid_orig;
    {
      torch::NoGradGuard ng;
      hid_orig = classifier.hidden(x_orig);
    }
    terms.hid = hidden_loss(classifier.hidden(denoised), hid_orig);
  } else {
    terms.hid = zero;
  }
  terms.total = terms.adv + weights.lambda_pix * terms.pix +
                weights.lambda_hid * terms.hid;
  detail::check_finite(terms.total, "total_generator_loss");
  return terms;
}

}  // namespace corrgan
