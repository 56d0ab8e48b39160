#include "revkg/crf_kernels.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "revkg/error.h"

namespace revkg::kernels {
namespace {

constexpr size_t kTags = CrfModel::kTags;

void CheckBatch(std::span<const LabeledSentence> batch) {
  for (const auto &s : batch) {
    if (s.tags.size() != s.features.size()) {
      throw LengthMismatch("gold length " + std::to_string(s.tags.size()) +
                           " != sentence length " +
                           std::to_string(s.features.size()));
    }
  }
}

void SubtractL2(const CrfModel &model, double l2, std::vector<double> &grad) {
  if (l2 == 0) return;
  auto w = model.weights();
  for (size_t i = 0; i < grad.size(); ++i) grad[i] -= l2 * w[i];
}

}  // namespace

void SentenceGradientTerms(const CrfModel &model, const LabeledSentence &sentence,
                           std::vector<std::pair<size_t, double>> &terms) {
  const auto &features = sentence.features;
  const size_t n = features.size();
  if (n == 0) return;
  Marginals m = ForwardBackward(model, features);
  for (size_t t = 0; t < n; ++t) {
    const size_t gold = static_cast<size_t>(sentence.tags[t]);
    for (uint32_t a : features.positions[t]) {
      for (size_t y = 0; y < kTags; ++y) {
        terms.emplace_back(CrfModel::EmissionIndex(a, y),
                           (y == gold ? 1.0 : 0.0) - m.node[t * kTags + y]);
      }
    }
    if (t == 0) continue;
    const size_t gold_prev = static_cast<size_t>(sentence.tags[t - 1]);
    for (size_t p = 0; p < kTags; ++p) {
      for (size_t c = 0; c < kTags; ++c) {
        terms.emplace_back(CrfModel::TransitionIndex(p, c),
                           (p == gold_prev && c == gold ? 1.0 : 0.0) -
                               m.edge[((t - 1) * kTags + p) * kTags + c]);
      }
    }
  }
}

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

std::vector<double> Gradient(const CrfModel &model,
                             std::span<const LabeledSentence> batch, double l2) {
  CheckBatch(batch);
  std::vector<double> grad(model.num_weights(), 0.0);
  for (const auto &sentence : batch) {
    const auto &features = sentence.features;
    const size_t n = features.size();
    if (n == 0) continue;
    Marginals m = ForwardBackward(model, features);
    for (size_t t = 0; t < n; ++t) {
      const size_t gold = static_cast<size_t>(sentence.tags[t]);
      for (uint32_t a : features.positions[t]) {
        for (size_t y = 0; y < kTags; ++y) {
          grad[CrfModel::EmissionIndex(a, y)] +=
              (y == gold ? 1.0 : 0.0) - m.node[t * kTags + y];
        }
      }
      if (t == 0) continue;
      const size_t gold_prev = static_cast<size_t>(sentence.tags[t - 1]);
      for (size_t p = 0; p < kTags; ++p) {
        for (size_t c = 0; c < kTags; ++c) {
          grad[CrfModel::TransitionIndex(p, c)] +=
              (p == gold_prev && c == gold ? 1.0 : 0.0) -
              m.edge[((t - 1) * kTags + p) * kTags + c];
        }
      }
    }
  }
  SubtractL2(model, l2, grad);
  return grad;
}

std::vector<std::vector<BioTag>> DecodeBatch(
    const CrfModel &model, std::span<const SentenceFeatures> sentences) {
  std::vector<std::vector<BioTag>> out;
  out.reserve(sentences.size());
  for (const auto &s : sentences) out.push_back(ViterbiDecode(model, s));
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> Gradient(const CrfModel &model,
                             std::span<const LabeledSentence> batch, double l2) {
  CheckBatch(batch);
  const long n = static_cast<long>(batch.size());
  std::vector<std::vector<std::pair<size_t, double>>> terms(batch.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    SentenceGradientTerms(model, batch[i], terms[i]);
  }
  // Fixed reduction order keeps the result identical to serial::Gradient.
  std::vector<double> grad(model.num_weights(), 0.0);
  for (const auto &sentence_terms : terms) {
    for (const auto &[index, value] : sentence_terms) grad[index] += value;
  }
  SubtractL2(model, l2, grad);
  return grad;
}

std::vector<std::vector<BioTag>> DecodeBatch(
    const CrfModel &model, std::span<const SentenceFeatures> sentences) {
  const long n = static_cast<long>(sentences.size());
  std::vector<std::vector<BioTag>> out(sentences.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) out[i] = ViterbiDecode(model, sentences[i]);
  return out;
}

}  // namespace omp

}  // namespace revkg::kernels
