#ifndef REVKG_CRF_KERNELS_H_
#define REVKG_CRF_KERNELS_H_

#include <span>
#include <utility>
#include <vector>

#include "revkg/crf.h"

// Batch kernels for CRF training and decoding. Sentences are independent, so
// both kernels parallelize across the batch. The serial versions are the
// reference implementation; the OpenMP versions must match them bit for bit
// (gradient terms are computed in parallel but summed in batch order).
namespace revkg::kernels {

// (weight index, empirical - expected) terms for one sentence, in the order
// the serial gradient adds them: per position, emissions then the incoming
// transition block.
void SentenceGradientTerms(const CrfModel &model, const LabeledSentence &sentence,
                           std::vector<std::pair<size_t, double>> &terms);

namespace serial {

// Empirical minus expected feature counts summed over the batch, minus l2*w.
std::vector<double> Gradient(const CrfModel &model,
                             std::span<const LabeledSentence> batch, double l2);

std::vector<std::vector<BioTag>> DecodeBatch(
    const CrfModel &model, std::span<const SentenceFeatures> sentences);

}  // namespace serial

namespace omp {

std::vector<double> Gradient(const CrfModel &model,
                             std::span<const LabeledSentence> batch, double l2);

std::vector<std::vector<BioTag>> DecodeBatch(
    const CrfModel &model, std::span<const SentenceFeatures> sentences);

}  // namespace omp

// Number of threads the OpenMP kernels will use (1 without OpenMP).
int MaxThreads();

}  // namespace revkg::kernels

namespace revkg {

// Production entry points; dispatch to the OpenMP kernels.
inline std::vector<double> Gradient(const CrfModel &model,
                                    std::span<const LabeledSentence> batch,
                                    double l2) {
  return kernels::omp::Gradient(model, batch, l2);
}

inline std::vector<std::vector<BioTag>> DecodeBatch(
    const CrfModel &model, std::span<const SentenceFeatures> sentences) {
  return kernels::omp::DecodeBatch(model, sentences);
}

}  // namespace revkg

#endif  // REVKG_CRF_KERNELS_H_
