#include "atmocat/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "atmocat/errors.hpp"
#include "atmocat/xml.hpp"

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      toks.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

}  // namespace

Vocabulary load_vocabulary(std::istream& lines, const std::string& source_label) {
  Vocabulary v;
  v.source_label = source_label;
  std::string line;
  while (std::getline(lines, line)) {
    std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    v.terms.insert(lower(t));
  }
  if (v.terms.empty()) throw EmptyVocabulary("no terms loaded from " + source_label);
  return v;
}

Vocabulary load_vocabulary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyVocabulary("cannot open vocabulary file: " + path);
  return load_vocabulary(in, path);
}

RelevanceVerdict score_relevance(const std::vector<std::string>& texts,
                                 const Vocabulary& vocab, int threshold) {
  std::vector<std::string> toks;
  for (const auto& t : texts) {
    auto tt = tokenize(t);
    toks.insert(toks.end(), tt.begin(), tt.end());
    toks.push_back("");  // field boundary: phrases never span fields
  }

  RelevanceVerdict verdict;
  for (const auto& term : vocab.terms) {
    auto phrase = tokenize(term);
    if (phrase.empty()) continue;
    for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
      if (std::equal(phrase.begin(), phrase.end(), toks.begin() + i)) {
        verdict.matched_terms.insert(term);
        break;
      }
    }
  }
  verdict.score = static_cast<int>(verdict.matched_terms.size());
  verdict.relevant = verdict.score >= threshold;
  return verdict;
}

}  // namespace atmocat
