#include "revkg/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

constexpr size_t kTags = CrfModel::kTags;
constexpr std::string_view kMagic = "revkg-crf 1";
constexpr std::string_view kBos = "<s>";
constexpr std::string_view kEos = "</s>";

double LogSumExp(const double *values, size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) m = std::max(m, values[i]);
  if (std::isinf(m)) return m;
  double sum = 0;
  for (size_t i = 0; i < n; ++i) sum += std::exp(values[i] - m);
  return m + std::log(sum);
}

// alpha[t][y]: log-sum of all prefixes ending in y at t (emission included).
std::vector<double> Forward(const CrfModel &model, const std::vector<double> &emit,
                            size_t length) {
  auto w = model.weights();
  std::vector<double> alpha(length * kTags);
  double buf[kTags];
  for (size_t y = 0; y < kTags; ++y) alpha[y] = emit[y];
  for (size_t t = 1; t < length; ++t) {
    for (size_t c = 0; c < kTags; ++c) {
      for (size_t p = 0; p < kTags; ++p) {
        buf[p] = alpha[(t - 1) * kTags + p] + w[CrfModel::TransitionIndex(p, c)];
      }
      alpha[t * kTags + c] = emit[t * kTags + c] + LogSumExp(buf, kTags);
    }
  }
  return alpha;
}

std::string ContextWord(const std::vector<Token> &tokens, long i) {
  if (i < 0) return std::string(kBos);
  if (i >= static_cast<long>(tokens.size())) return std::string(kEos);
  return ToLower(tokens[i].text);
}

std::string ContextPos(const std::vector<Token> &tokens, long i) {
  if (i < 0) return std::string(kBos);
  if (i >= static_cast<long>(tokens.size())) return std::string(kEos);
  return std::string(PosTagName(*tokens[i].pos));
}

}  // namespace

SentenceAttributes ExtractFeatures(const std::vector<Token> &tokens) {
  for (const auto &t : tokens) {
    if (!t.pos) throw MissingPos("token '" + t.text + "' has no POS tag");
    if (!t.chunk) throw MissingChunk("token '" + t.text + "' has no chunk tag");
  }
  static constexpr std::pair<int, std::string_view> kWindow[] = {
      {-2, "[-2]="}, {-1, "[-1]="}, {1, "[+1]="}, {2, "[+2]="}};
  SentenceAttributes out(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string &word = tokens[i].text;
    std::string lower = ToLower(word);
    auto &a = out[i];
    a.emplace_back("bias");
    a.push_back("w=" + word);
    a.push_back("lw=" + lower);
    for (size_t k = 1; k <= 3 && k <= lower.size(); ++k) {
      a.push_back("s" + std::to_string(k) + "=" + lower.substr(lower.size() - k));
      a.push_back("p" + std::to_string(k) + "=" + lower.substr(0, k));
    }
    a.push_back("pos=" + std::string(PosTagName(*tokens[i].pos)));
    a.push_back("chunk=" + std::string(ChunkTagName(*tokens[i].chunk)));
    a.push_back("shape=" + WordShape(word));
    if (std::any_of(word.begin(), word.end(), IsDigit)) a.emplace_back("digit");
    if (!word.empty() && IsUpper(word[0])) a.emplace_back("cap");
    for (const auto &[offset, suffix] : kWindow) {
      long j = static_cast<long>(i) + offset;
      a.push_back("w" + std::string(suffix) + ContextWord(tokens, j));
      a.push_back("pos" + std::string(suffix) + ContextPos(tokens, j));
    }
  }
  return out;
}

bool IsLexicalAttribute(std::string_view attribute) {
  size_t eq = attribute.find('=');
  if (eq == std::string_view::npos) return false;
  std::string_view name = attribute.substr(0, eq);
  std::string_view value = attribute.substr(eq + 1);
  if (value == kBos || value == kEos) return false;
  return name == "w" || name == "lw" || name == "s1" || name == "s2" ||
         name == "s3" || name == "p1" || name == "p2" || name == "p3" ||
         name == "w[-2]" || name == "w[-1]" || name == "w[+1]" ||
         name == "w[+2]";
}

CrfModel::CrfModel(std::vector<std::string> attributes, double l2, uint64_t seed)
    : attributes_(std::move(attributes)), l2_(l2), seed_(seed) {
  index_.reserve(attributes_.size());
  for (size_t i = 0; i < attributes_.size(); ++i) {
    if (!index_.emplace(attributes_[i], static_cast<uint32_t>(i)).second) {
      throw InvariantViolation("duplicate CRF attribute '" + attributes_[i] + "'");
    }
  }
  weights_.assign(kNumTransitionWeights + attributes_.size() * kTags, 0.0);
}

SentenceFeatures CrfModel::Featurize(const SentenceAttributes &attributes) const {
  SentenceFeatures out;
  out.positions.resize(attributes.size());
  for (size_t i = 0; i < attributes.size(); ++i) {
    auto &ids = out.positions[i];
    for (const auto &a : attributes[i]) {
      auto it = index_.find(a);
      if (it != index_.end()) ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

std::string CrfModel::Serialize() const {
  std::string out(kMagic);
  out += "\ntagset";
  for (size_t t = 0; t < kTags; ++t) {
    out += " ";
    out += BioTagName(static_cast<BioTag>(t));
  }
  out += "\nl2 " + FormatDouble(l2_);
  out += "\nseed " + std::to_string(seed_);
  out += "\nattributes " + std::to_string(attributes_.size()) + "\n";
  for (const auto &a : attributes_) {
    out += EscapeField(a);
    out.push_back('\n');
  }
  out += "weights " + std::to_string(weights_.size()) + "\n";
  for (double w : weights_) {
    out += FormatDouble(w);
    out.push_back('\n');
  }
  return out;
}

CrfModel CrfModel::Deserialize(std::string_view text) {
  auto lines = Split(text, '\n');
  size_t at = 0;
  auto next = [&]() -> const std::string & {
    if (at >= lines.size()) throw ParseError(at + 1, "truncated CRF model");
    return lines[at++];
  };
  auto keyed = [&](std::string_view key) {
    const std::string &line = next();
    if (line.rfind(std::string(key) + " ", 0) != 0) {
      throw ParseError(at, "expected '" + std::string(key) + "'");
    }
    return line.substr(key.size() + 1);
  };
  auto count = [&](std::string_view key) {
    std::string v = keyed(key);
    try {
      return static_cast<size_t>(std::stoull(v));
    } catch (const std::logic_error &) {
      throw ParseError(at, "bad count for '" + std::string(key) + "'");
    }
  };
  if (next() != kMagic) {
    throw ParseError(1, "not a CRF model file (expected '" + std::string(kMagic) + "')");
  }
  auto tags = Split(keyed("tagset"), ' ');
  if (tags.size() != kTags) throw ParseError(2, "tagset must have 7 tags");
  for (size_t t = 0; t < kTags; ++t) {
    if (tags[t] != BioTagName(static_cast<BioTag>(t))) {
      throw ParseError(2, "tagset order mismatch");
    }
  }
  double l2 = 0;
  try {
    l2 = ParseDouble(keyed("l2"));
  } catch (const ParseError &e) {
    throw ParseError(3, e.cause());
  }
  uint64_t seed = 0;
  try {
    seed = std::stoull(keyed("seed"));
  } catch (const std::logic_error &) {
    throw ParseError(4, "bad seed");
  }
  size_t n_attr = count("attributes");
  std::vector<std::string> attributes;
  attributes.reserve(n_attr);
  for (size_t i = 0; i < n_attr; ++i) attributes.push_back(UnescapeField(next()));
  CrfModel model(std::move(attributes), l2, seed);
  size_t n_weights = count("weights");
  if (n_weights != model.num_weights()) {
    throw ParseError(at, "weight count does not match attribute count");
  }
  for (size_t i = 0; i < n_weights; ++i) {
    const std::string &line = next();
    try {
      model.weights_[i] = ParseDouble(line);
    } catch (const ParseError &e) {
      throw ParseError(at, e.cause());
    }
    if (!std::isfinite(model.weights_[i])) throw ParseError(at, "non-finite weight");
  }
  return model;
}

void CrfModel::Save(const std::string &path) const { WriteFile(path, Serialize()); }

CrfModel CrfModel::Load(const std::string &path) {
  return Deserialize(ReadFile(path));
}

std::vector<double> EmissionScores(const CrfModel &model,
                                   const SentenceFeatures &features) {
  auto w = model.weights();
  std::vector<double> emit(features.size() * kTags, 0.0);
  for (size_t t = 0; t < features.size(); ++t) {
    for (uint32_t a : features.positions[t]) {
      for (size_t y = 0; y < kTags; ++y) {
        emit[t * kTags + y] += w[CrfModel::EmissionIndex(a, y)];
      }
    }
  }
  return emit;
}

double SequenceScore(const CrfModel &model, const SentenceFeatures &features,
                     std::span<const BioTag> tags) {
  if (tags.size() != features.size()) {
    throw LengthMismatch("tag sequence length " + std::to_string(tags.size()) +
                         " != sentence length " + std::to_string(features.size()));
  }
  auto w = model.weights();
  double score = 0;
  for (size_t t = 0; t < tags.size(); ++t) {
    size_t y = static_cast<size_t>(tags[t]);
    for (uint32_t a : features.positions[t]) score += w[CrfModel::EmissionIndex(a, y)];
    if (t > 0) {
      score += w[CrfModel::TransitionIndex(static_cast<size_t>(tags[t - 1]), y)];
    }
  }
  return score;
}

double LogPartition(const CrfModel &model, const SentenceFeatures &features) {
  const size_t n = features.size();
  if (n == 0) return 0.0;
  auto emit = EmissionScores(model, features);
  auto alpha = Forward(model, emit, n);
  return LogSumExp(&alpha[(n - 1) * kTags], kTags);
}

double SequenceLogLik(const CrfModel &model, const SentenceFeatures &features,
                      std::span<const BioTag> gold) {
  double score = SequenceScore(model, features, gold);
  return score - LogPartition(model, features);
}

Marginals ForwardBackward(const CrfModel &model, const SentenceFeatures &features) {
  const size_t n = features.size();
  Marginals m;
  if (n == 0) return m;
  auto w = model.weights();
  auto emit = EmissionScores(model, features);
  auto alpha = Forward(model, emit, n);
  m.log_z = LogSumExp(&alpha[(n - 1) * kTags], kTags);

  // beta[t][p]: log-sum over suffixes after t given tag p at t.
  std::vector<double> beta(n * kTags, 0.0);
  double buf[kTags];
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t p = 0; p < kTags; ++p) {
      for (size_t c = 0; c < kTags; ++c) {
        buf[c] = w[CrfModel::TransitionIndex(p, c)] + emit[(t + 1) * kTags + c] +
                 beta[(t + 1) * kTags + c];
      }
      beta[t * kTags + p] = LogSumExp(buf, kTags);
    }
  }

  m.node.resize(n * kTags);
  for (size_t i = 0; i < n * kTags; ++i) {
    m.node[i] = std::exp(alpha[i] + beta[i] - m.log_z);
  }
  m.edge.resize((n - 1) * kTags * kTags);
  for (size_t t = 1; t < n; ++t) {
    for (size_t p = 0; p < kTags; ++p) {
      for (size_t c = 0; c < kTags; ++c) {
        m.edge[((t - 1) * kTags + p) * kTags + c] =
            std::exp(alpha[(t - 1) * kTags + p] + w[CrfModel::TransitionIndex(p, c)] +
                     emit[t * kTags + c] + beta[t * kTags + c] - m.log_z);
      }
    }
  }
  return m;
}

std::vector<BioTag> ViterbiDecode(const CrfModel &model,
                                  const SentenceFeatures &features) {
  const size_t n = features.size();
  if (n == 0) return {};
  auto w = model.weights();
  auto emit = EmissionScores(model, features);

  // best[t][y]: best score of positions t..n-1 given tag y at t. Decoding
  // then walks forward picking the lowest tag index that attains the
  // optimum, which yields the lexicographically smallest argmax.
  std::vector<double> best(n * kTags);
  for (size_t y = 0; y < kTags; ++y) best[(n - 1) * kTags + y] = emit[(n - 1) * kTags + y];
  auto step = [&](size_t t, size_t p, size_t c) {
    return w[CrfModel::TransitionIndex(p, c)] + best[t * kTags + c];
  };
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t p = 0; p < kTags; ++p) {
      double m = step(t + 1, p, 0);
      for (size_t c = 1; c < kTags; ++c) m = std::max(m, step(t + 1, p, c));
      best[t * kTags + p] = emit[t * kTags + p] + m;
    }
  }

  std::vector<BioTag> tags(n);
  size_t y = 0;
  for (size_t c = 1; c < kTags; ++c) {
    if (best[c] > best[y]) y = c;
  }
  tags[0] = static_cast<BioTag>(y);
  for (size_t t = 1; t < n; ++t) {
    size_t prev = y;
    y = 0;
    for (size_t c = 1; c < kTags; ++c) {
      if (step(t, prev, c) > step(t, prev, y)) y = c;
    }
    tags[t] = static_cast<BioTag>(y);
  }
  return tags;
}

double Objective(const CrfModel &model, std::span<const LabeledSentence> batch,
                 double l2) {
  double total = 0;
  for (const auto &s : batch) total += SequenceLogLik(model, s.features, s.tags);
  double norm = 0;
  for (double w : model.weights()) norm += w * w;
  return total - 0.5 * l2 * norm;
}

}  // namespace revkg
