#include "revkg/ner.h"

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "revkg/crf_kernels.h"
#include "revkg/error.h"
#include "revkg/rng.h"
#include "revkg/text_util.h"

namespace revkg {

CrfTrainResult TrainCrf(const std::vector<AnnotatedReview> &gold,
                        const CrfTrainConfig &config) {
  if (config.epochs <= 0 || config.batch_size == 0 || config.l2 < 0 ||
      config.learning_rate <= 0 || config.decay < 0) {
    throw Error("invalid CRF training configuration");
  }
  std::vector<const AnnotatedSentence *> sentences;
  for (const auto &r : gold) {
    for (const auto &s : r.sentences) {
      if (s.tokens.size() != s.tags.size()) {
        throw InvalidGoldTags("review " + r.review.id + ": tag count mismatch");
      }
      auto check = ValidateBio(s.tags);
      if (!check.valid()) {
        throw InvalidGoldTags("review " + r.review.id + ": " +
                              check.violations[0].message);
      }
      if (!s.tokens.empty()) sentences.push_back(&s);
    }
  }
  if (sentences.empty()) throw EmptyTrainingSet("no annotated sentences to train on");

  std::vector<SentenceAttributes> attributes;
  attributes.reserve(sentences.size());
  std::set<std::string> vocabulary;
  for (const auto *s : sentences) {
    attributes.push_back(ExtractFeatures(s->tokens));
    for (const auto &position : attributes.back()) {
      vocabulary.insert(position.begin(), position.end());
    }
  }

  CrfTrainResult result;
  result.model = CrfModel(std::vector<std::string>(vocabulary.begin(), vocabulary.end()),
                          config.l2, config.seed);
  CrfModel &model = result.model;

  std::vector<LabeledSentence> data;
  data.reserve(sentences.size());
  for (size_t i = 0; i < sentences.size(); ++i) {
    data.push_back({model.Featurize(attributes[i]), sentences[i]->tags});
  }

  const size_t n = data.size();
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<LabeledSentence> batch;
  double previous = -std::numeric_limits<double>::infinity();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    SeededShuffle(order, rng);
    const double rate = config.learning_rate / (1.0 + config.decay * epoch);
    for (size_t b = 0; b < n; b += config.batch_size) {
      size_t e = std::min(n, b + config.batch_size);
      batch.clear();
      for (size_t k = b; k < e; ++k) batch.push_back(data[order[k]]);
      const double share = static_cast<double>(batch.size()) / n;
      auto grad = Gradient(model, batch, config.l2 * share);
      auto w = model.mutable_weights();
      const double step = rate / static_cast<double>(batch.size());
      for (size_t i = 0; i < w.size(); ++i) w[i] += step * grad[i];
    }

    double total = 0;
    for (const auto &s : data) total += SequenceLogLik(model, s.features, s.tags);
    const double mean = total / n;
    result.log.push_back({epoch + 1, mean, TokenAccuracy(model, data)});
    if (config.tolerance > 0 && std::abs(mean - previous) < config.tolerance) break;
    previous = mean;
  }
  for (double w : model.weights()) {
    if (!std::isfinite(w)) throw InvariantViolation("CRF training diverged");
  }
  return result;
}

std::string FormatTrainingLog(const std::vector<CrfEpochLog> &log) {
  std::string out = "epoch,mean_loglik,token_accuracy\n";
  for (const auto &e : log) {
    out += std::to_string(e.epoch) + "," + FormatDouble(e.mean_loglik) + "," +
           FormatDouble(e.token_accuracy) + "\n";
  }
  return out;
}

double TokenAccuracy(const CrfModel &model,
                     const std::vector<LabeledSentence> &sentences) {
  std::vector<SentenceFeatures> features;
  features.reserve(sentences.size());
  for (const auto &s : sentences) features.push_back(s.features);
  auto decoded = DecodeBatch(model, features);
  size_t correct = 0, total = 0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    for (size_t t = 0; t < decoded[i].size(); ++t) {
      correct += decoded[i][t] == sentences[i].tags[t];
      ++total;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / total;
}

void PrepareTokens(std::vector<Token> &tokens, const PosModel *pos) {
  bool need_pos = false, need_chunk = false;
  for (const auto &t : tokens) {
    need_pos |= !t.pos.has_value();
    need_chunk |= !t.chunk.has_value();
  }
  if (need_pos) {
    if (pos == nullptr) throw MissingPos("tokens lack POS tags and no POS model given");
    tokens = pos->Tag(std::move(tokens));
    need_chunk = true;
  }
  if (need_chunk) tokens = ChunkTokens(std::move(tokens));
}

void PrepareReviews(std::vector<AnnotatedReview> &reviews, const PosModel *pos) {
  for (auto &r : reviews) {
    for (auto &s : r.sentences) PrepareTokens(s.tokens, pos);
  }
}

AnnotatedReview ExtractEntities(const Review &review, const AnnotatedReview *gold) {
  if (gold == nullptr) {
    throw MissingAnnotation("no gold annotation for review " + review.id);
  }
  if (gold->review.id != review.id) {
    throw MissingAnnotation("gold annotation belongs to review " + gold->review.id +
                            ", not " + review.id);
  }
  AnnotatedReview out = *gold;
  out.provenance = Provenance::kGold;
  return out;
}

AnnotatedReview ExtractEntities(const Review &review, const PosModel &pos,
                                const CrfModel &crf) {
  AnnotatedReview out;
  out.review = review;
  out.provenance = Provenance::kPredicted;
  for (auto &tokens : SegmentReview(review.text)) {
    tokens = ChunkTokens(pos.Tag(std::move(tokens)));
    auto features = crf.Featurize(ExtractFeatures(tokens));
    auto tags = RepairBio(ViterbiDecode(crf, features));
    out.sentences.push_back({std::move(tokens), std::move(tags)});
  }
  return out;
}

std::vector<AnnotatedReview> ExtractCorpus(const Corpus &corpus,
                                           const PosModel &pos,
                                           const CrfModel &crf) {
  const long n = static_cast<long>(corpus.size());
  std::vector<AnnotatedReview> out(corpus.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    out[i] = ExtractEntities(corpus.reviews[i], pos, crf);
  }
  return out;
}

}  // namespace revkg
