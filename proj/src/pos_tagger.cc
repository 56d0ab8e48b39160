#include "revkg/pos_tagger.h"

#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "revkg/error.h"
#include "revkg/rng.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

constexpr std::string_view kMagic = "revkg-pos 1";

std::string Context(const std::vector<std::string> &words, long i) {
  if (i < 0) return "<s>";
  if (i >= static_cast<long>(words.size())) return "</s>";
  return ToLower(words[i]);
}

}  // namespace

// Averaging bookkeeping lives only for the duration of training.
class PosTrainer {
 public:
  struct Param {
    PosModel::Weights w{};
    PosModel::Weights total{};
    std::array<int64_t, kNumPosTags> stamp{};
  };

  PosTag Guess(const std::vector<std::string> &features) const {
    PosModel::Weights scores{};
    for (const auto &f : features) {
      auto it = params_.find(f);
      if (it == params_.end()) continue;
      for (size_t t = 0; t < kNumPosTags; ++t) scores[t] += it->second.w[t];
    }
    size_t best = 0;
    for (size_t t = 1; t < kNumPosTags; ++t) {
      if (scores[t] > scores[best]) best = t;
    }
    return static_cast<PosTag>(best);
  }

  void Update(const std::vector<std::string> &features, PosTag gold,
              PosTag guess) {
    for (const auto &f : features) {
      Param &p = params_[f];
      Bump(p, static_cast<size_t>(gold), 1.0);
      Bump(p, static_cast<size_t>(guess), -1.0);
    }
  }

  void Tick() { ++instances_; }

  PosModel Finish(int iterations) {
    PosModel model;
    model.iterations_ = iterations;
    const double n = static_cast<double>(std::max<int64_t>(instances_, 1));
    for (auto &[feature, p] : params_) {
      PosModel::Weights avg{};
      bool nonzero = false;
      for (size_t t = 0; t < kNumPosTags; ++t) {
        p.total[t] += static_cast<double>(instances_ - p.stamp[t]) * p.w[t];
        avg[t] = p.total[t] / n;
        nonzero |= avg[t] != 0.0;
      }
      if (nonzero) model.weights_.emplace(feature, avg);
    }
    return model;
  }

 private:
  void Bump(Param &p, size_t tag, double delta) {
    p.total[tag] += static_cast<double>(instances_ - p.stamp[tag]) * p.w[tag];
    p.stamp[tag] = instances_;
    p.w[tag] += delta;
  }

  std::unordered_map<std::string, Param> params_;
  int64_t instances_ = 0;
};

std::vector<PosSentence> ParsePosTrainingData(std::string_view contents) {
  std::vector<PosSentence> corpus;
  PosSentence current;
  size_t line_no = 0;
  auto flush = [&] {
    if (!current.words.empty()) corpus.push_back(std::move(current));
    current = {};
  };
  for (const auto &raw : Split(contents, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    auto fields = Split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError(line_no, "expected 'token<TAB>tag'");
    }
    auto tag = ParsePosTag(fields[1]);
    if (!tag) throw InvalidTag(line_no, "unknown POS tag '" + fields[1] + "'");
    current.words.push_back(fields[0]);
    current.tags.push_back(*tag);
  }
  flush();
  return corpus;
}

std::vector<PosSentence> ReadPosTrainingData(const std::string &path) {
  return ParsePosTrainingData(ReadFile(path));
}

std::vector<std::string> PosModel::Features(
    const std::vector<std::string> &words, size_t i, int prev_tag) {
  const std::string &word = words[i];
  std::string lower = ToLower(word);
  std::vector<std::string> f;
  f.reserve(12);
  f.emplace_back("bias");
  f.push_back("w=" + word);
  f.push_back("lw=" + lower);
  for (size_t k = 1; k <= 3 && k <= lower.size(); ++k) {
    f.push_back("s" + std::to_string(k) + "=" + lower.substr(lower.size() - k));
  }
  f.push_back("pw=" + Context(words, static_cast<long>(i) - 1));
  f.push_back("nw=" + Context(words, static_cast<long>(i) + 1));
  f.push_back(std::string("pt=") +
              (prev_tag < 0 ? std::string("<s>")
                            : std::string(PosTagName(static_cast<PosTag>(prev_tag)))));
  f.push_back("shape=" + WordShape(word));
  bool any_digit = false, all_digit = !word.empty();
  for (char c : word) {
    any_digit |= IsDigit(c);
    all_digit &= IsDigit(c);
  }
  if (any_digit) f.emplace_back("hasdigit");
  if (all_digit) f.emplace_back("alldigit");
  return f;
}

PosTag PosModel::Best(const std::vector<std::string> &features) const {
  Weights scores{};
  for (const auto &f : features) {
    auto it = weights_.find(f);
    if (it == weights_.end()) continue;
    for (size_t t = 0; t < kNumPosTags; ++t) scores[t] += it->second[t];
  }
  size_t best = 0;
  for (size_t t = 1; t < kNumPosTags; ++t) {
    if (scores[t] > scores[best]) best = t;
  }
  return static_cast<PosTag>(best);
}

std::vector<PosTag> PosModel::Predict(const std::vector<std::string> &words) const {
  std::vector<PosTag> tags;
  tags.reserve(words.size());
  int prev = -1;
  for (size_t i = 0; i < words.size(); ++i) {
    PosTag t = Best(Features(words, i, prev));
    tags.push_back(t);
    prev = static_cast<int>(t);
  }
  return tags;
}

std::vector<Token> PosModel::Tag(std::vector<Token> tokens) const {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto &t : tokens) words.push_back(t.text);
  auto tags = Predict(words);
  for (size_t i = 0; i < tokens.size(); ++i) tokens[i].pos = tags[i];
  return tokens;
}

std::string PosModel::Serialize() const {
  std::string out(kMagic);
  out += "\niterations " + std::to_string(iterations_) + "\ntags";
  for (size_t t = 0; t < kNumPosTags; ++t) {
    out += " ";
    out += PosTagName(static_cast<PosTag>(t));
  }
  out += "\nfeatures " + std::to_string(weights_.size()) + "\n";
  for (const auto &[feature, w] : weights_) {
    out += EscapeField(feature);
    out.push_back('\t');
    for (size_t t = 0; t < kNumPosTags; ++t) {
      if (t > 0) out.push_back(' ');
      out += FormatDouble(w[t]);
    }
    out.push_back('\n');
  }
  return out;
}

PosModel PosModel::Deserialize(std::string_view text) {
  auto lines = Split(text, '\n');
  if (lines.size() < 4 || lines[0] != kMagic) {
    throw ParseError(1, "not a POS model file (expected '" + std::string(kMagic) + "')");
  }
  PosModel model;
  auto expect = [&](size_t idx, std::string_view key) {
    if (lines[idx].rfind(std::string(key) + " ", 0) != 0) {
      throw ParseError(idx + 1, "expected '" + std::string(key) + "'");
    }
    return lines[idx].substr(key.size() + 1);
  };
  try {
    model.iterations_ = std::stoi(expect(1, "iterations"));
  } catch (const std::logic_error &) {
    throw ParseError(2, "bad iteration count");
  }
  auto tags = Split(expect(2, "tags"), ' ');
  if (tags.size() != kNumPosTags) throw ParseError(3, "tagset mismatch");
  for (size_t t = 0; t < kNumPosTags; ++t) {
    if (tags[t] != PosTagName(static_cast<PosTag>(t))) {
      throw ParseError(3, "tagset mismatch");
    }
  }
  size_t count = 0;
  try {
    count = std::stoul(expect(3, "features"));
  } catch (const std::logic_error &) {
    throw ParseError(4, "bad feature count");
  }
  for (size_t i = 0; i < count; ++i) {
    size_t idx = 4 + i;
    if (idx >= lines.size()) throw ParseError(idx + 1, "truncated model");
    const std::string &line = lines[idx];
    size_t tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError(idx + 1, "missing weights");
    auto values = Split(std::string_view(line).substr(tab + 1), ' ');
    if (values.size() != kNumPosTags) {
      throw ParseError(idx + 1, "expected " + std::to_string(kNumPosTags) + " weights");
    }
    Weights w{};
    for (size_t t = 0; t < kNumPosTags; ++t) {
      try {
        w[t] = ParseDouble(values[t]);
      } catch (const ParseError &e) {
        throw ParseError(idx + 1, e.cause());
      }
    }
    model.weights_.emplace(UnescapeField(std::string_view(line).substr(0, tab)), w);
  }
  return model;
}

void PosModel::Save(const std::string &path) const { WriteFile(path, Serialize()); }

PosModel PosModel::Load(const std::string &path) {
  return Deserialize(ReadFile(path));
}

PosTrainResult TrainPosTagger(const std::vector<PosSentence> &corpus,
                              const PosTrainConfig &config) {
  if (corpus.empty()) throw EmptyTrainingSet("POS training corpus is empty");
  for (size_t s = 0; s < corpus.size(); ++s) {
    if (corpus[s].words.empty()) {
      throw ParseError(0, "sentence " + std::to_string(s) + " is empty");
    }
    if (corpus[s].words.size() != corpus[s].tags.size()) {
      throw ParseError(0, "sentence " + std::to_string(s) + " has mismatched tags");
    }
  }
  PosTrainer trainer;
  PosTrainResult result;
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});
  for (int it = 0; it < config.iterations; ++it) {
    SeededShuffle(order, rng);
    size_t correct = 0, total = 0;
    for (size_t s : order) {
      const auto &sent = corpus[s];
      int prev = -1;
      for (size_t i = 0; i < sent.words.size(); ++i) {
        auto features = PosModel::Features(sent.words, i, prev);
        PosTag guess = trainer.Guess(features);
        if (guess != sent.tags[i]) {
          trainer.Update(features, sent.tags[i], guess);
        } else {
          ++correct;
        }
        trainer.Tick();
        ++total;
        prev = static_cast<int>(guess);
      }
    }
    result.online_accuracy.push_back(static_cast<double>(correct) / total);
  }
  result.model = trainer.Finish(config.iterations);
  result.training_accuracy = PosAccuracy(result.model, corpus);
  return result;
}

double PosAccuracy(const PosModel &model, const std::vector<PosSentence> &corpus) {
  size_t correct = 0, total = 0;
  for (const auto &sent : corpus) {
    auto tags = model.Predict(sent.words);
    for (size_t i = 0; i < tags.size(); ++i) {
      correct += tags[i] == sent.tags[i];
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

}  // namespace revkg
