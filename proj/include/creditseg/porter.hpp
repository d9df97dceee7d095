#pragma once

#include <array>
#include <string>
#include <string_view>

// Porter suffix-stripping algorithm (1980), steps 1a through 5b, as
// published. Within a step the longest matching suffix is selected and its
// condition checked once; a failed condition ends the step without trying
// shorter suffixes.

namespace creditseg {
namespace porter_detail {

inline bool is_cons(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_cons(w, i - 1);
    default:
      return true;
  }
}

// Number of VC sequences: [C](VC)^m[V].
inline int measure(std::string_view stem) {
  const std::size_t n = stem.size();
  std::size_t i = 0;
  while (i < n && is_cons(stem, i)) ++i;
  int m = 0;
  while (i < n) {
    while (i < n && !is_cons(stem, i)) ++i;
    if (i >= n) break;
    ++m;
    while (i < n && is_cons(stem, i)) ++i;
  }
  return m;
}

inline bool contains_vowel(std::string_view stem) {
  for (std::size_t i = 0; i < stem.size(); ++i) {
    if (!is_cons(stem, i)) return true;
  }
  return false;
}

inline bool ends_double_cons(std::string_view w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1);
}

// *o: ends consonant-vowel-consonant where the final consonant is not w/x/y.
inline bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  if (!is_cons(w, n - 1) || is_cons(w, n - 2) || !is_cons(w, n - 3)) {
    return false;
  }
  const char c = w[n - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

inline bool ends_with(std::string_view w, std::string_view suf) {
  return w.size() >= suf.size() &&
         w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

enum class Cond { kNone, kMeasureGt0, kMeasureGt1, kMeasureGt1EndsST };

inline bool cond_holds(Cond c, std::string_view stem) {
  switch (c) {
    case Cond::kNone:
      return true;
    case Cond::kMeasureGt0:
      return measure(stem) > 0;
    case Cond::kMeasureGt1:
      return measure(stem) > 1;
    case Cond::kMeasureGt1EndsST:
      return measure(stem) > 1 && !stem.empty() &&
             (stem.back() == 's' || stem.back() == 't');
  }
  return false;
}

// Longest matching suffix wins; its condition decides; no fall-through.
template <std::size_t N>
std::string apply_step(std::string w, const std::array<Rule, N>& rules,
                       Cond cond) {
  const Rule* best = nullptr;
  for (const Rule& r : rules) {
    if (ends_with(w, r.suffix) &&
        (best == nullptr || r.suffix.size() > best->suffix.size())) {
      best = &r;
    }
  }
  if (best == nullptr) return w;
  std::string_view stem(w.data(), w.size() - best->suffix.size());
  Cond c = cond;
  if (best->suffix == "ion") c = Cond::kMeasureGt1EndsST;
  if (!cond_holds(c, stem)) return w;
  std::string out(stem);
  out += best->replacement;
  return out;
}

inline std::string step1a(std::string w) {
  static constexpr std::array<Rule, 4> rules{
      Rule{"sses", "ss"}, Rule{"ies", "i"}, Rule{"ss", "ss"}, Rule{"s", ""}};
  return apply_step(std::move(w), rules, Cond::kNone);
}

inline std::string step1b(std::string w) {
  if (ends_with(w, "eed")) {
    std::string_view stem(w.data(), w.size() - 3);
    if (measure(stem) > 0) w.pop_back();
    return w;
  }
  bool removed = false;
  if (ends_with(w, "ed") &&
      contains_vowel(std::string_view(w.data(), w.size() - 2))) {
    w.resize(w.size() - 2);
    removed = true;
  } else if (ends_with(w, "ing") &&
             contains_vowel(std::string_view(w.data(), w.size() - 3))) {
    w.resize(w.size() - 3);
    removed = true;
  }
  if (!removed) return w;
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w += 'e';
  } else if (ends_double_cons(w)) {
    const char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.pop_back();
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w += 'e';
  }
  return w;
}

inline std::string step1c(std::string w) {
  if (ends_with(w, "y") &&
      contains_vowel(std::string_view(w.data(), w.size() - 1))) {
    w.back() = 'i';
  }
  return w;
}

inline std::string step2(std::string w) {
  static constexpr std::array<Rule, 20> rules{
      Rule{"ational", "ate"}, Rule{"tional", "tion"}, Rule{"enci", "ence"},
      Rule{"anci", "ance"},   Rule{"izer", "ize"},    Rule{"abli", "able"},
      Rule{"alli", "al"},     Rule{"entli", "ent"},   Rule{"eli", "e"},
      Rule{"ousli", "ous"},   Rule{"ization", "ize"}, Rule{"ation", "ate"},
      Rule{"ator", "ate"},    Rule{"alism", "al"},    Rule{"iveness", "ive"},
      Rule{"fulness", "ful"}, Rule{"ousness", "ous"}, Rule{"aliti", "al"},
      Rule{"iviti", "ive"},   Rule{"biliti", "ble"}};
  return apply_step(std::move(w), rules, Cond::kMeasureGt0);
}

inline std::string step3(std::string w) {
  static constexpr std::array<Rule, 7> rules{
      Rule{"icate", "ic"}, Rule{"ative", ""}, Rule{"alize", "al"},
      Rule{"iciti", "ic"}, Rule{"ical", "ic"}, Rule{"ful", ""},
      Rule{"ness", ""}};
  return apply_step(std::move(w), rules, Cond::kMeasureGt0);
}

inline std::string step4(std::string w) {
  static constexpr std::array<Rule, 19> rules{
      Rule{"al", ""},    Rule{"ance", ""}, Rule{"ence", ""}, Rule{"er", ""},
      Rule{"ic", ""},    Rule{"able", ""}, Rule{"ible", ""}, Rule{"ant", ""},
      Rule{"ement", ""}, Rule{"ment", ""}, Rule{"ent", ""},  Rule{"ion", ""},
      Rule{"ou", ""},    Rule{"ism", ""},  Rule{"ate", ""},  Rule{"iti", ""},
      Rule{"ous", ""},   Rule{"ive", ""},  Rule{"ize", ""}};
  return apply_step(std::move(w), rules, Cond::kMeasureGt1);
}

inline std::string step5a(std::string w) {
  if (!ends_with(w, "e")) return w;
  std::string_view stem(w.data(), w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
  return w;
}

inline std::string step5b(std::string w) {
  if (ends_with(w, "l") && ends_double_cons(w) &&
      measure(std::string_view(w.data(), w.size() - 1)) > 1) {
    w.pop_back();
  }
  return w;
}

}  // namespace porter_detail

inline std::string porter_stem(std::string word) {
  using namespace porter_detail;
  word = step1a(std::move(word));
  word = step1b(std::move(word));
  word = step1c(std::move(word));
  word = step2(std::move(word));
  word = step3(std::move(word));
  word = step4(std::move(word));
  word = step5a(std::move(word));
  return step5b(std::move(word));
}

}  // namespace creditseg
