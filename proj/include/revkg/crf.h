#ifndef REVKG_CRF_H_
#define REVKG_CRF_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revkg/annotation.h"
#include "revkg/textproc.h"

namespace revkg {

// Template instantiations per position, e.g. "w=pic", "pos=NOUN".
using SentenceAttributes = std::vector<std::vector<std::string>>;

// Requires POS and chunk tags on every token (MissingPos / MissingChunk).
SentenceAttributes ExtractFeatures(const std::vector<Token> &tokens);

// Attribute template prefixes whose value is derived from word identity.
bool IsLexicalAttribute(std::string_view attribute);

// Active attribute ids per position, sorted and unique.
struct SentenceFeatures {
  std::vector<std::vector<uint32_t>> positions;

  size_t size() const { return positions.size(); }
  bool operator==(const SentenceFeatures &) const = default;
};

// Linear-chain CRF over the seven BIO tags. Weight layout: the 7x7 tag
// bigram block first (index prev*7 + cur), then one 7-wide row per
// attribute (kNumTransitionWeights + attr*7 + tag).
class CrfModel {
 public:
  static constexpr size_t kTags = kNumBioTags;
  static constexpr size_t kNumTransitionWeights = kTags * kTags;

  CrfModel() = default;
  // Zero-weight model over the given attribute vocabulary (ids in order).
  explicit CrfModel(std::vector<std::string> attributes, double l2 = 0,
                    uint64_t seed = 0);

  static size_t TransitionIndex(size_t prev, size_t cur) {
    return prev * kTags + cur;
  }
  static size_t EmissionIndex(uint32_t attribute, size_t tag) {
    return kNumTransitionWeights + static_cast<size_t>(attribute) * kTags + tag;
  }

  // Unknown attributes are skipped.
  SentenceFeatures Featurize(const SentenceAttributes &attributes) const;

  size_t num_attributes() const { return attributes_.size(); }
  size_t num_weights() const { return weights_.size(); }
  const std::vector<std::string> &attributes() const { return attributes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }
  double l2() const { return l2_; }
  uint64_t seed() const { return seed_; }

  std::string Serialize() const;
  static CrfModel Deserialize(std::string_view text);
  void Save(const std::string &path) const;
  static CrfModel Load(const std::string &path);

  bool operator==(const CrfModel &other) const {
    return attributes_ == other.attributes_ && weights_ == other.weights_ &&
           l2_ == other.l2_ && seed_ == other.seed_;
  }

 private:
  std::vector<std::string> attributes_;
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<double> weights_;
  double l2_ = 0;
  uint64_t seed_ = 0;
};

// Row-major L x 7 table of per-position tag scores.
std::vector<double> EmissionScores(const CrfModel &model,
                                   const SentenceFeatures &features);

// Unnormalized score of a tag sequence (emissions plus transitions).
double SequenceScore(const CrfModel &model, const SentenceFeatures &features,
                     std::span<const BioTag> tags);

// log Z by the forward recursion in log space. Zero for an empty sentence.
double LogPartition(const CrfModel &model, const SentenceFeatures &features);

// score(gold) - log Z. Throws LengthMismatch.
double SequenceLogLik(const CrfModel &model, const SentenceFeatures &features,
                      std::span<const BioTag> gold);

struct Marginals {
  double log_z = 0;
  std::vector<double> node;  // L x 7
  std::vector<double> edge;  // (L-1) x 7 x 7, [t-1][prev][cur]
};

Marginals ForwardBackward(const CrfModel &model, const SentenceFeatures &features);

// Highest-scoring sequence; among equal scores the lexicographically
// smallest in tag-index order wins.
std::vector<BioTag> ViterbiDecode(const CrfModel &model,
                                  const SentenceFeatures &features);

struct LabeledSentence {
  SentenceFeatures features;
  std::vector<BioTag> tags;
};

// sum over batch of loglik - l2/2 * |w|^2
double Objective(const CrfModel &model, std::span<const LabeledSentence> batch,
                 double l2);

}  // namespace revkg

#endif  // REVKG_CRF_H_
