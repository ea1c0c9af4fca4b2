#pragma once

#include <istream>
#include <set>
#include <string>
#include <vector>

namespace atmocat {

// Controlled science-keyword vocabulary: lowercase phrases of 1..6 tokens.
struct Vocabulary {
  std::set<std::string> terms;
  std::string source_label;
};

struct RelevanceVerdict {
  std::set<std::string> matched_terms;
  int score = 0;  // count of distinct matched terms
  bool relevant = false;
};

// One phrase per line, '#' comments and blanks skipped, trimmed/lowercased/
// deduplicated. Throws EmptyVocabulary when nothing loads.
Vocabulary load_vocabulary(std::istream& lines, const std::string& source_label = "");
Vocabulary load_vocabulary_file(const std::string& path);

// Whole-token case-insensitive phrase matching over the given text fields;
// multi-word phrases must appear as contiguous token sequences. A token is
// a maximal alphanumeric run.
RelevanceVerdict score_relevance(const std::vector<std::string>& texts,
                                 const Vocabulary& vocab, int threshold);

}  // namespace atmocat
