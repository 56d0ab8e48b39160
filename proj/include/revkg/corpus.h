#ifndef REVKG_CORPUS_H_
#define REVKG_CORPUS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace revkg {

// Closed, configurable vocabulary of ethical-concern categories. Membership
// is case-insensitive; lookups return the vocabulary's display spelling.
class ConcernVocabulary {
 public:
  ConcernVocabulary() = default;
  explicit ConcernVocabulary(std::vector<std::string> names);

  // The twelve Uber categories.
  static const ConcernVocabulary &Default();

  // One category per line; blank lines and '#' comments ignored.
  static ConcernVocabulary Load(const std::string &path);

  std::optional<std::string> Canonicalize(std::string_view name) const;
  bool Contains(std::string_view name) const {
    return Canonicalize(name).has_value();
  }

  const std::vector<std::string> &names() const { return names_; }
  size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, size_t> index_;  // normalized name -> position
};

struct Review {
  std::string id;
  std::string app;
  std::string text;
  std::set<std::string> concern_labels;

  bool operator==(const Review &) const = default;
};

struct Corpus {
  std::vector<Review> reviews;
  std::optional<std::string> app_filter;

  size_t size() const { return reviews.size(); }
  bool operator==(const Corpus &) const = default;
};

enum class CorpusFormat { kJsonl, kCsv };

// Picks the format from the file extension (.csv -> kCsv, else kJsonl).
CorpusFormat FormatFromPath(std::string_view path);

// Throws ParseError(line, cause) on malformed records and DuplicateId on id
// collisions. Missing ids become "<app>-<record index>" (1-based).
Corpus LoadReviews(const std::string &path, CorpusFormat format,
                   const ConcernVocabulary &vocab = ConcernVocabulary::Default());
Corpus ParseReviews(std::string_view contents, CorpusFormat format,
                    const ConcernVocabulary &vocab = ConcernVocabulary::Default());

std::string SerializeReviews(const Corpus &corpus, CorpusFormat format);
void SaveReviews(const Corpus &corpus, const std::string &path,
                 CorpusFormat format);

// Case-insensitive app match; the result records the filter.
Corpus FilterByApp(const Corpus &corpus, std::string_view app);

struct ConcernShare {
  std::string name;
  size_t count = 0;
  double share = 0;         // count / total_labels
  double review_share = 0;  // count / total_reviews
};

// Counts each (review, label) pair once. `share` is over label occurrences,
// `review_share` over all reviews in the corpus (labeled or not), which is
// how per-app concern tables are usually reported.
struct DistributionReport {
  std::vector<ConcernShare> entries;  // descending share, then name
  size_t total_labels = 0;
  size_t labeled_reviews = 0;
  size_t total_reviews = 0;

  const ConcernShare *Find(std::string_view name) const;
};

// Throws EmptyCorpus when no review carries a label.
DistributionReport ConcernDistribution(const Corpus &corpus);

std::string FormatDistribution(const DistributionReport &report);

}  // namespace revkg

#endif  // REVKG_CORPUS_H_
