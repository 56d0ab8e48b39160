#ifndef REVKG_POS_TAGGER_H_
#define REVKG_POS_TAGGER_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "revkg/textproc.h"

namespace revkg {

struct PosSentence {
  std::vector<std::string> words;
  std::vector<PosTag> tags;
};

// "token<TAB>tag" lines, blank line between sentences.
std::vector<PosSentence> ParsePosTrainingData(std::string_view contents);
std::vector<PosSentence> ReadPosTrainingData(const std::string &path);

struct PosTrainConfig {
  int iterations = 10;
  uint64_t seed = 1;
};

// Averaged perceptron with greedy left-to-right decoding. Immutable once
// trained; Tag() is safe to call concurrently.
class PosModel {
 public:
  using Weights = std::array<double, kNumPosTags>;

  PosModel() = default;

  // Context features for position i given the previous predicted tag.
  static std::vector<std::string> Features(const std::vector<std::string> &words,
                                           size_t i, int prev_tag);

  std::vector<PosTag> Predict(const std::vector<std::string> &words) const;
  std::vector<Token> Tag(std::vector<Token> tokens) const;

  std::string Serialize() const;
  static PosModel Deserialize(std::string_view text);
  void Save(const std::string &path) const;
  static PosModel Load(const std::string &path);

  const std::map<std::string, Weights> &weights() const { return weights_; }
  int iterations() const { return iterations_; }
  bool empty() const { return weights_.empty(); }

  bool operator==(const PosModel &) const = default;

 private:
  friend class PosTrainer;

  PosTag Best(const std::vector<std::string> &features) const;

  std::map<std::string, Weights> weights_;
  int iterations_ = 0;
};

struct PosTrainResult {
  PosModel model;
  std::vector<double> online_accuracy;  // per iteration, before averaging
  double training_accuracy = 0;         // averaged model on the training set
};

// Throws EmptyTrainingSet when there is nothing to learn from and
// ParseError when a sentence is empty or words/tags lengths differ.
PosTrainResult TrainPosTagger(const std::vector<PosSentence> &corpus,
                              const PosTrainConfig &config);

double PosAccuracy(const PosModel &model, const std::vector<PosSentence> &corpus);

}  // namespace revkg

#endif  // REVKG_POS_TAGGER_H_
