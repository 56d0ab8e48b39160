#ifndef REVKG_NER_H_
#define REVKG_NER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "revkg/annotation.h"
#include "revkg/corpus.h"
#include "revkg/crf.h"
#include "revkg/pos_tagger.h"

namespace revkg {

struct CrfTrainConfig {
  int epochs = 200;
  double learning_rate = 0.5;
  double decay = 0.01;  // rate_k = learning_rate / (1 + decay * k)
  size_t batch_size = 4;
  double l2 = 1e-3;
  uint64_t seed = 1;
  // Stops once |delta mean log-likelihood| falls below this; 0 disables.
  double tolerance = 1e-7;
};

struct CrfEpochLog {
  int epoch = 0;
  double mean_loglik = 0;
  double token_accuracy = 0;
};

struct CrfTrainResult {
  CrfModel model;
  std::vector<CrfEpochLog> log;
};

// Mini-batch gradient ascent on the L2-regularized log-likelihood with seeded
// shuffling. Sentences need POS and chunk tags. Throws EmptyTrainingSet and
// InvalidGoldTags.
CrfTrainResult TrainCrf(const std::vector<AnnotatedReview> &gold,
                        const CrfTrainConfig &config);

// "epoch,mean_loglik,token_accuracy" with a header row.
std::string FormatTrainingLog(const std::vector<CrfEpochLog> &log);

// Fills missing POS tags with `pos` (MissingPos if null and needed) and
// recomputes chunks where missing.
void PrepareTokens(std::vector<Token> &tokens, const PosModel *pos);
void PrepareReviews(std::vector<AnnotatedReview> &reviews, const PosModel *pos);

// Gold mode: passes the annotation through with gold provenance. Throws
// MissingAnnotation when `gold` is null or belongs to another review.
AnnotatedReview ExtractEntities(const Review &review, const AnnotatedReview *gold);

// Model mode: segment, POS tag, chunk, featurize, Viterbi, lenient repair.
AnnotatedReview ExtractEntities(const Review &review, const PosModel &pos,
                                const CrfModel &crf);

// Model mode over a corpus; reviews are processed in parallel, output keeps
// corpus order.
std::vector<AnnotatedReview> ExtractCorpus(const Corpus &corpus,
                                           const PosModel &pos,
                                           const CrfModel &crf);

double TokenAccuracy(const CrfModel &model,
                     const std::vector<LabeledSentence> &sentences);

}  // namespace revkg

#endif  // REVKG_NER_H_
