#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>

namespace creditseg {

// English stop word list (the usual ~175-entry list used for bag-of-words
// preprocessing). Entries are stored in their dictionary form; contractions
// like "isn't" only match real tokens after they have been run through the
// same tokenizer as the documents, which is what default_stopword_set() does.
inline const std::array<std::string_view, 174>& stopword_list() {
  static const std::array<std::string_view, 174> kList = {
      "i",          "me",         "my",        "myself",    "we",
      "our",        "ours",       "ourselves", "you",       "your",
      "yours",      "yourself",   "yourselves", "he",       "him",
      "his",        "himself",    "she",       "her",       "hers",
      "herself",    "it",         "its",       "itself",    "they",
      "them",       "their",      "theirs",    "themselves", "what",
      "which",      "who",        "whom",      "this",      "that",
      "these",      "those",      "am",        "is",        "are",
      "was",        "were",       "be",        "been",      "being",
      "have",       "has",        "had",       "having",    "do",
      "does",       "did",        "doing",     "would",     "should",
      "could",      "ought",      "i'm",       "you're",    "he's",
      "she's",      "it's",       "we're",     "they're",   "i've",
      "you've",     "we've",      "they've",   "i'd",       "you'd",
      "he'd",       "she'd",      "we'd",      "they'd",    "i'll",
      "you'll",     "he'll",      "she'll",    "we'll",     "they'll",
      "isn't",      "aren't",     "wasn't",    "weren't",   "hasn't",
      "haven't",    "hadn't",     "doesn't",   "don't",     "didn't",
      "won't",      "wouldn't",   "shan't",    "shouldn't", "can't",
      "cannot",     "couldn't",   "mustn't",   "let's",     "that's",
      "who's",      "what's",     "here's",    "there's",   "when's",
      "where's",    "why's",      "how's",     "a",         "an",
      "the",        "and",        "but",       "if",        "or",
      "because",    "as",         "until",     "while",     "of",
      "at",         "by",         "for",       "with",      "about",
      "against",    "between",    "into",      "through",   "during",
      "before",     "after",      "above",     "below",     "to",
      "from",       "up",         "down",      "in",        "out",
      "on",         "off",        "over",      "under",     "again",
      "further",    "then",       "once",      "here",      "there",
      "when",       "where",      "why",       "how",       "all",
      "any",        "both",       "each",      "few",       "more",
      "most",       "other",      "some",      "such",      "no",
      "nor",        "not",        "only",      "own",       "same",
      "so",         "than",       "too",       "very",
  };
  return kList;
}

// Stop words as they appear in tokenized text. The tokenizer splits on
// non-alphanumeric characters, so "isn't" contributes both "isn" and "t".
inline std::unordered_set<std::string> default_stopword_set() {
  std::unordered_set<std::string> out;
  for (std::string_view entry : stopword_list()) {
    std::string frag;
    for (char c : entry) {
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        frag.push_back(c);
      } else if (!frag.empty()) {
        out.insert(frag);
        frag.clear();
      }
    }
    if (!frag.empty()) out.insert(frag);
  }
  return out;
}

}  // namespace creditseg
