#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "creditseg/porter.hpp"
#include "creditseg/rng.hpp"
#include "creditseg/types.hpp"

namespace creditseg {

// Sentences inside a corpus-file line are separated by the ASCII unit
// separator so that tabs stay free for the field structure.
inline constexpr char kSentenceSep = '\x1f';

namespace corpus_detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> split_nonempty(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (std::string_view part : split(s, sep)) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

template <class Range>
inline std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

inline std::string hash_to_hex(std::uint64_t h) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline std::optional<std::uint64_t> parse_hex64(std::string_view s) {
  if (s.empty() || s.size() > 16) return std::nullopt;
  std::uint64_t h = 0;
  for (char c : s) {
    h <<= 4;
    if (c >= '0' && c <= '9') h |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') h |= static_cast<std::uint64_t>(c - 'a' + 10);
    else return std::nullopt;
  }
  return h;
}

}  // namespace corpus_detail

// ---------------------------------------------------------------------------
// Text normalization
// ---------------------------------------------------------------------------

// Lowercases and splits on every non-alphanumeric byte. Tokens made up
// entirely of digits are dropped.
inline std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> out;
  std::string cur;
  bool has_letter = false;
  auto flush = [&] {
    if (!cur.empty() && has_letter) out.push_back(cur);
    cur.clear();
    has_letter = false;
  };
  for (char ch : raw) {
    if (ch >= 'A' && ch <= 'Z') {
      cur.push_back(static_cast<char>(ch - 'A' + 'a'));
      has_letter = true;
    } else if (ch >= 'a' && ch <= 'z') {
      cur.push_back(ch);
      has_letter = true;
    } else if (ch >= '0' && ch <= '9') {
      cur.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// Full sentence normalization: tokenize, remove stop words, reject sentences
// that keep fewer than 4 or more than 10 words, stem the survivors.
// Returns nullopt for rejected sentences.
inline std::optional<std::vector<std::string>> preprocess_sentence(
    std::string_view raw, const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> tokens = tokenize(raw);
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (std::string& t : tokens) {
    if (stopwords.find(t) == stopwords.end()) kept.push_back(std::move(t));
  }
  if (kept.size() < 4 || kept.size() > 10) return std::nullopt;
  for (std::string& t : kept) t = porter_stem(t);
  return kept;
}

// Splits raw document text into sentence strings. If the text already uses
// the unit separator, that wins; otherwise runs of '.', '!' and '?' end a
// sentence. Blank pieces are discarded.
inline std::vector<std::string> split_raw_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto push_trimmed = [&](std::string_view piece) {
    std::size_t b = piece.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return;
    std::size_t e = piece.find_last_not_of(" \t\r\n");
    out.emplace_back(piece.substr(b, e - b + 1));
  };
  if (text.find(kSentenceSep) != std::string_view::npos) {
    for (std::string_view piece : corpus_detail::split(text, kSentenceSep)) {
      push_trimmed(piece);
    }
    return out;
  }
  std::size_t start = 0;
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '.' || c == '!' || c == '?') {
      push_trimmed(text.substr(start, pos - start));
      while (pos + 1 < text.size() &&
             (text[pos + 1] == '.' || text[pos + 1] == '!' || text[pos + 1] == '?')) {
        ++pos;
      }
      start = pos + 1;
    }
  }
  push_trimmed(text.substr(start));
  return out;
}

// ---------------------------------------------------------------------------
// Documents before vocabulary encoding
// ---------------------------------------------------------------------------

// A document after normalization and stemming but before vocabulary lookup.
// This is the form the corpus files store.
struct StemmedDocument {
  std::string id;
  std::vector<std::string> labels;  // canonical: sorted, unique
  std::vector<std::vector<std::string>> sentences;
};

struct RawDocument {
  std::string id;
  std::vector<std::string> labels;
  std::string text;
};

struct PreprocessStats {
  std::int64_t sentences_kept = 0;
  std::int64_t sentences_dropped = 0;  // fell outside the 4..10 word window
  std::int64_t stems_kept = 0;
};

inline StemmedDocument preprocess_document(
    const RawDocument& raw, const std::unordered_set<std::string>& stopwords,
    PreprocessStats* stats = nullptr) {
  StemmedDocument out;
  out.id = raw.id;
  out.labels = raw.labels;
  std::sort(out.labels.begin(), out.labels.end());
  out.labels.erase(std::unique(out.labels.begin(), out.labels.end()),
                   out.labels.end());
  for (const std::string& sent : split_raw_sentences(raw.text)) {
    if (auto stems = preprocess_sentence(sent, stopwords)) {
      if (stats) {
        ++stats->sentences_kept;
        stats->stems_kept += static_cast<std::int64_t>(stems->size());
      }
      out.sentences.push_back(std::move(*stems));
    } else if (stats) {
      ++stats->sentences_dropped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary and label dictionary
// ---------------------------------------------------------------------------

struct Vocabulary {
  std::vector<std::string> id_to_token;
  std::vector<std::int64_t> counts;  // corpus frequency, aligned with ids
  std::unordered_map<std::string, int> token_to_id;

  int size() const { return static_cast<int>(id_to_token.size()); }

  int id_of(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? -1 : it->second;
  }

  // Stable digest of the full token/id/count table, used to detect a model
  // being applied to a corpus encoded with a different vocabulary.
  std::uint64_t content_hash() const {
    std::uint64_t h = corpus_detail::kFnvOffset;
    for (int id = 0; id < size(); ++id) {
      h = corpus_detail::fnv1a64(id_to_token[static_cast<std::size_t>(id)], h);
      h = corpus_detail::fnv1a64("\t", h);
      h = corpus_detail::fnv1a64(std::to_string(id), h);
      h = corpus_detail::fnv1a64("\t", h);
      h = corpus_detail::fnv1a64(
          std::to_string(counts[static_cast<std::size_t>(id)]), h);
      h = corpus_detail::fnv1a64("\n", h);
    }
    return h;
  }
};

// Tokens occurring fewer than 4 times across the corpus are dropped; ids are
// assigned in lexicographic order.
inline Vocabulary build_vocabulary(const std::vector<StemmedDocument>& corpus) {
  std::map<std::string, std::int64_t> freq;
  for (const StemmedDocument& doc : corpus) {
    for (const auto& sent : doc.sentences) {
      for (const std::string& tok : sent) ++freq[tok];
    }
  }
  Vocabulary vocab;
  for (const auto& [tok, count] : freq) {
    if (count < 4) continue;
    vocab.token_to_id.emplace(tok, vocab.size());
    vocab.id_to_token.push_back(tok);
    vocab.counts.push_back(count);
  }
  if (vocab.size() == 0) {
    throw std::runtime_error(
        "empty vocabulary: no token occurs at least 4 times");
  }
  return vocab;
}

struct LabelDict {
  std::vector<std::string> names;  // sorted; index == label id
  std::unordered_map<std::string, int> name_to_id;

  int size() const { return static_cast<int>(names.size()); }

  int id_of(const std::string& name) const {
    auto it = name_to_id.find(name);
    return it == name_to_id.end() ? -1 : it->second;
  }

  static LabelDict from_corpus(const std::vector<StemmedDocument>& corpus) {
    std::set<std::string> all;
    for (const StemmedDocument& doc : corpus) {
      all.insert(doc.labels.begin(), doc.labels.end());
    }
    LabelDict dict;
    for (const std::string& name : all) {
      dict.name_to_id.emplace(name, dict.size());
      dict.names.push_back(name);
    }
    return dict;
  }
};

// ---------------------------------------------------------------------------
// Encoded documents
// ---------------------------------------------------------------------------

struct Sentence {
  std::vector<int> token_ids;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<int> labels;  // sorted, unique; may be empty

  int n_sentences() const { return static_cast<int>(sentences.size()); }
};

// Maps stems to vocabulary ids, silently dropping out-of-vocabulary stems.
// Sentences emptied by that pruning are kept so positions stay aligned.
inline Document encode_document(const StemmedDocument& sd,
                                const Vocabulary& vocab,
                                const LabelDict& labels) {
  if (sd.sentences.empty()) {
    throw std::invalid_argument("cannot encode document '" + sd.id +
                                "' with no sentences");
  }
  Document doc;
  doc.id = sd.id;
  for (const std::string& name : sd.labels) {
    int id = labels.id_of(name);
    if (id < 0) {
      throw std::invalid_argument("document '" + sd.id +
                                  "' has unknown label '" + name + "'");
    }
    doc.labels.push_back(id);
  }
  std::sort(doc.labels.begin(), doc.labels.end());
  doc.labels.erase(std::unique(doc.labels.begin(), doc.labels.end()),
                   doc.labels.end());
  for (const auto& sent : sd.sentences) {
    Sentence enc;
    for (const std::string& tok : sent) {
      int id = vocab.id_of(tok);
      if (id >= 0) enc.token_ids.push_back(id);
    }
    doc.sentences.push_back(std::move(enc));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Bag-of-words features
// ---------------------------------------------------------------------------

using BowVector = std::vector<double>;

// Cumulative token counts so any sentence range collapses to one subtraction.
// Row k holds the counts of sentences 1..k; row 0 is all zeros.
struct PrefixSums {
  int n_sentences = 0;
  int vocab_size = 0;
  std::vector<std::int32_t> cum;  // (n_sentences + 1) * vocab_size

  static PrefixSums build(const Document& doc, int vocab_size) {
    PrefixSums p;
    p.n_sentences = doc.n_sentences();
    p.vocab_size = vocab_size;
    p.cum.assign(static_cast<std::size_t>(p.n_sentences + 1) *
                     static_cast<std::size_t>(vocab_size),
                 0);
    for (int k = 1; k <= p.n_sentences; ++k) {
      const std::size_t prev = static_cast<std::size_t>(k - 1) *
                               static_cast<std::size_t>(vocab_size);
      const std::size_t row = static_cast<std::size_t>(k) *
                              static_cast<std::size_t>(vocab_size);
      std::copy(p.cum.begin() + static_cast<std::ptrdiff_t>(prev),
                p.cum.begin() + static_cast<std::ptrdiff_t>(prev + p.vocab_size),
                p.cum.begin() + static_cast<std::ptrdiff_t>(row));
      for (int tok : doc.sentences[static_cast<std::size_t>(k - 1)].token_ids) {
        if (tok < 0 || tok >= vocab_size) {
          throw std::out_of_range("token id outside vocabulary");
        }
        ++p.cum[row + static_cast<std::size_t>(tok)];
      }
    }
    return p;
  }

  std::int32_t count(int k, int token) const {
    return cum[static_cast<std::size_t>(k) * static_cast<std::size_t>(vocab_size) +
               static_cast<std::size_t>(token)];
  }
};

// L2-normalized token counts of sentences i..j (1-based, inclusive). A range
// with no in-vocabulary tokens yields the zero vector.
inline BowVector bow(const PrefixSums& prefix, int i, int j) {
  if (i < 1 || j < i || j > prefix.n_sentences) {
    throw std::out_of_range("bow: sentence range [" + std::to_string(i) + "," +
                            std::to_string(j) + "] invalid for " +
                            std::to_string(prefix.n_sentences) + " sentences");
  }
  BowVector x(static_cast<std::size_t>(prefix.vocab_size), 0.0);
  double sq = 0.0;
  for (int v = 0; v < prefix.vocab_size; ++v) {
    const double c = static_cast<double>(prefix.count(j, v) - prefix.count(i - 1, v));
    x[static_cast<std::size_t>(v)] = c;
    sq += c * c;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : x) v *= inv;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Synthetic evaluation documents
// ---------------------------------------------------------------------------

// A document stitched together from single-label documents, so the true
// segment boundaries and labels are known exactly.
struct SyntheticStemmedDocument {
  StemmedDocument document;
  std::vector<int> true_boundaries;       // 0 = b0 < ... < bu = n_sentences
  std::vector<std::string> true_labels;   // one per segment, by name
  std::vector<std::string> source_ids;
};

struct SyntheticDocument {
  Document document;
  Segmentation true_segmentation;
  std::vector<std::string> source_ids;
};

// Builds n_docs synthetic documents by concatenating 2 or 3 single-label
// documents with pairwise distinct labels. A combination is only accepted if
// its label set also occurs as the label set of some real multilabel
// document, which keeps the synthetic distribution honest. Each document
// gets up to 1000 draws before the whole call fails.
inline std::vector<SyntheticStemmedDocument> synthesize_test_set(
    const std::vector<StemmedDocument>& singles_corpus,
    const std::vector<StemmedDocument>& multis_corpus, int n_docs,
    std::uint64_t rng_seed) {
  std::vector<const StemmedDocument*> singles;
  for (const StemmedDocument& doc : singles_corpus) {
    if (doc.labels.size() == 1 && !doc.sentences.empty()) singles.push_back(&doc);
  }
  if (singles.empty()) {
    throw std::runtime_error("synthesize_test_set: no single-label documents");
  }
  std::set<std::vector<std::string>> admissible;
  for (const StemmedDocument& doc : multis_corpus) {
    if (doc.labels.size() >= 2) admissible.insert(doc.labels);
  }
  if (admissible.empty()) {
    throw std::runtime_error("synthesize_test_set: no multilabel documents");
  }

  Rng rng(rng_seed);
  std::vector<SyntheticStemmedDocument> out;
  out.reserve(static_cast<std::size_t>(n_docs));
  for (int d = 0; d < n_docs; ++d) {
    bool done = false;
    for (int attempt = 0; attempt < 1000 && !done; ++attempt) {
      const int k = 2 + static_cast<int>(rng.next_below(2));
      std::vector<const StemmedDocument*> picks;
      bool clash = false;
      for (int t = 0; t < k; ++t) {
        const StemmedDocument* cand =
            singles[static_cast<std::size_t>(rng.next_below(singles.size()))];
        for (const StemmedDocument* prev : picks) {
          if (prev == cand || prev->labels[0] == cand->labels[0]) {
            clash = true;
            break;
          }
        }
        if (clash) break;
        picks.push_back(cand);
      }
      if (clash) continue;
      std::vector<std::string> label_set;
      for (const StemmedDocument* p : picks) label_set.push_back(p->labels[0]);
      std::sort(label_set.begin(), label_set.end());
      if (admissible.find(label_set) == admissible.end()) continue;

      SyntheticStemmedDocument syn;
      syn.document.id = "syn" + std::to_string(d);
      syn.document.labels = label_set;
      syn.true_boundaries.push_back(0);
      for (const StemmedDocument* p : picks) {
        for (const auto& sent : p->sentences) syn.document.sentences.push_back(sent);
        syn.true_boundaries.push_back(
            static_cast<int>(syn.document.sentences.size()));
        syn.true_labels.push_back(p->labels[0]);
        syn.source_ids.push_back(p->id);
      }
      out.push_back(std::move(syn));
      done = true;
    }
    if (!done) {
      throw std::runtime_error(
          "synthesize_test_set: gave up after 1000 draws for document " +
          std::to_string(d) + " (" + std::to_string(admissible.size()) +
          " admissible label sets)");
    }
  }
  return out;
}

inline SyntheticDocument encode_synthetic(const SyntheticStemmedDocument& syn,
                                          const Vocabulary& vocab,
                                          const LabelDict& labels) {
  SyntheticDocument out;
  out.document = encode_document(syn.document, vocab, labels);
  out.true_segmentation.boundaries = syn.true_boundaries;
  for (const std::string& name : syn.true_labels) {
    int id = labels.id_of(name);
    if (id < 0) {
      throw std::invalid_argument("synthetic document '" + syn.document.id +
                                  "' has unknown segment label '" + name + "'");
    }
    out.true_segmentation.labels.push_back(id);
  }
  out.true_segmentation.objective = 0.0;
  out.source_ids = syn.source_ids;
  validate_segmentation(out.true_segmentation);
  return out;
}

// Deterministic shuffle split. A fifth of the documents (rounded down) become
// the test set; original corpus order is preserved inside each part.
inline std::pair<std::vector<StemmedDocument>, std::vector<StemmedDocument>>
split_train_test(const std::vector<StemmedDocument>& docs,
                 std::uint64_t rng_seed) {
  const std::size_t n = docs.size();
  if (n < 5) {
    throw std::invalid_argument("split_train_test needs at least 5 documents");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(rng_seed);
  rng.shuffle(perm);
  const std::size_t test_n = n / 5;
  std::vector<std::size_t> test_idx(perm.begin(),
                                    perm.begin() + static_cast<std::ptrdiff_t>(test_n));
  std::sort(test_idx.begin(), test_idx.end());
  std::vector<bool> in_test(n, false);
  for (std::size_t i : test_idx) in_test[i] = true;
  std::pair<std::vector<StemmedDocument>, std::vector<StemmedDocument>> out;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? out.second : out.first).push_back(docs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------
//
// Corpus file: one document per line,
//   id <TAB> label,label,... <TAB> sent <US> sent <US> ...
// where each sentence is a space-joined stem list and <US> is 0x1f. An
// optional first line "# vocab-hash <hex>" records the vocabulary digest the
// stems were meant to be encoded with. Synthetic corpora append
//   <TAB> b0,b1,...,bu|label,... <TAB> source,source,...
// carrying the true segmentation and the ids the document was stitched from.
//
// Vocabulary file: one "token <TAB> id <TAB> count" line per token, ids
// contiguous from 0.

namespace corpus_detail {

inline void check_label_name(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("empty label name");
  for (char c : name) {
    if (c == '\t' || c == ',' || c == kSentenceSep || c == '\n' || c == '|') {
      throw std::invalid_argument("label name '" + name +
                                  "' contains a reserved character");
    }
  }
}

inline std::string format_sentences(
    const std::vector<std::vector<std::string>>& sentences) {
  std::string out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s) out.push_back(kSentenceSep);
    out += join(sentences[s], " ");
  }
  return out;
}

inline std::vector<std::vector<std::string>> parse_sentences(
    std::string_view field, int line_no) {
  std::vector<std::vector<std::string>> out;
  for (std::string_view part : split(field, kSentenceSep)) {
    std::vector<std::string> stems = split_nonempty(part, ' ');
    if (stems.empty()) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": empty sentence");
    }
    out.push_back(std::move(stems));
  }
  return out;
}

}  // namespace corpus_detail

struct CorpusFile {
  std::vector<StemmedDocument> documents;
  std::optional<std::uint64_t> vocab_hash;
};

inline void write_corpus_file(
    const std::string& path, const std::vector<StemmedDocument>& docs,
    std::optional<std::uint64_t> vocab_hash = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (vocab_hash) {
    out << "# vocab-hash " << corpus_detail::hash_to_hex(*vocab_hash) << "\n";
  }
  for (const StemmedDocument& doc : docs) {
    if (doc.id.empty() || doc.id.find('\t') != std::string::npos) {
      throw std::invalid_argument("bad document id '" + doc.id + "'");
    }
    for (const std::string& l : doc.labels) corpus_detail::check_label_name(l);
    out << doc.id << '\t' << corpus_detail::join(doc.labels, ",") << '\t'
        << corpus_detail::format_sentences(doc.sentences) << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline CorpusFile read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  CorpusFile result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::vector<std::string> parts = corpus_detail::split_nonempty(line, ' ');
      if (parts.size() == 3 && parts[0] == "#" && parts[1] == "vocab-hash") {
        result.vocab_hash = corpus_detail::parse_hex64(parts[2]);
        if (!result.vocab_hash) {
          throw std::runtime_error("corpus line " + std::to_string(line_no) +
                                   ": malformed vocab-hash");
        }
      }
      continue;
    }
    std::vector<std::string_view> fields = corpus_detail::split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": expected 3 tab-separated fields, got " +
                               std::to_string(fields.size()));
    }
    StemmedDocument doc;
    doc.id = std::string(fields[0]);
    if (doc.id.empty()) {
      throw std::runtime_error("corpus line " + std::to_string(line_no) +
                               ": empty document id");
    }
    doc.labels = corpus_detail::split_nonempty(fields[1], ',');
    std::sort(doc.labels.begin(), doc.labels.end());
    doc.labels.erase(std::unique(doc.labels.begin(), doc.labels.end()),
                     doc.labels.end());
    doc.sentences = corpus_detail::parse_sentences(fields[2], line_no);
    result.documents.push_back(std::move(doc));
  }
  return result;
}

inline void write_synthetic_file(
    const std::string& path, const std::vector<SyntheticStemmedDocument>& docs,
    std::optional<std::uint64_t> vocab_hash = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (vocab_hash) {
    out << "# vocab-hash " << corpus_detail::hash_to_hex(*vocab_hash) << "\n";
  }
  for (const SyntheticStemmedDocument& syn : docs) {
    for (const std::string& l : syn.true_labels) corpus_detail::check_label_name(l);
    std::vector<std::string> bounds;
    for (int b : syn.true_boundaries) bounds.push_back(std::to_string(b));
    out << syn.document.id << '\t'
        << corpus_detail::join(syn.document.labels, ",") << '\t'
        << corpus_detail::format_sentences(syn.document.sentences) << '\t'
        << corpus_detail::join(bounds, ",") << '|'
        << corpus_detail::join(syn.true_labels, ",") << '\t'
        << corpus_detail::join(syn.source_ids, ",") << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

struct SyntheticFile {
  std::vector<SyntheticStemmedDocument> documents;
  std::optional<std::uint64_t> vocab_hash;
};

inline SyntheticFile read_synthetic_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  SyntheticFile result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::vector<std::string> parts = corpus_detail::split_nonempty(line, ' ');
      if (parts.size() == 3 && parts[0] == "#" && parts[1] == "vocab-hash") {
        result.vocab_hash = corpus_detail::parse_hex64(parts[2]);
        if (!result.vocab_hash) {
          throw std::runtime_error("synthetic line " + std::to_string(line_no) +
                                   ": malformed vocab-hash");
        }
      }
      continue;
    }
    std::vector<std::string_view> fields = corpus_detail::split(line, '\t');
    if (fields.size() != 5) {
      throw std::runtime_error("synthetic line " + std::to_string(line_no) +
                               ": expected 5 tab-separated fields, got " +
                               std::to_string(fields.size()));
    }
    SyntheticStemmedDocument syn;
    syn.document.id = std::string(fields[0]);
    syn.document.labels = corpus_detail::split_nonempty(fields[1], ',');
    std::sort(syn.document.labels.begin(), syn.document.labels.end());
    syn.document.sentences = corpus_detail::parse_sentences(fields[2], line_no);
    std::vector<std::string_view> seg_parts = corpus_detail::split(fields[3], '|');
    if (seg_parts.size() != 2) {
      throw std::runtime_error("synthetic line " + std::to_string(line_no) +
                               ": malformed segmentation field");
    }
    for (const std::string& b : corpus_detail::split_nonempty(seg_parts[0], ',')) {
      try {
        syn.true_boundaries.push_back(std::stoi(b));
      } catch (const std::exception&) {
        throw std::runtime_error("synthetic line " + std::to_string(line_no) +
                                 ": bad boundary '" + b + "'");
      }
    }
    syn.true_labels = corpus_detail::split_nonempty(seg_parts[1], ',');
    if (syn.true_boundaries.size() != syn.true_labels.size() + 1 ||
        syn.true_boundaries.front() != 0 ||
        syn.true_boundaries.back() !=
            static_cast<int>(syn.document.sentences.size())) {
      throw std::runtime_error("synthetic line " + std::to_string(line_no) +
                               ": segmentation does not tile the document");
    }
    syn.source_ids = corpus_detail::split_nonempty(fields[4], ',');
    result.documents.push_back(std::move(syn));
  }
  return result;
}

inline void write_vocabulary_file(const std::string& path,
                                  const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (int id = 0; id < vocab.size(); ++id) {
    out << vocab.id_to_token[static_cast<std::size_t>(id)] << '\t' << id << '\t'
        << vocab.counts[static_cast<std::size_t>(id)] << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline Vocabulary read_vocabulary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Vocabulary vocab;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields = corpus_detail::split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    int id = 0;
    std::int64_t count = 0;
    try {
      id = std::stoi(std::string(fields[1]));
      count = std::stoll(std::string(fields[2]));
    } catch (const std::exception&) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": bad id or count");
    }
    if (id != vocab.size()) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": ids must be contiguous from 0");
    }
    if (count <= 0) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": count must be positive");
    }
    std::string token(fields[0]);
    if (token.empty() || !vocab.token_to_id.emplace(token, id).second) {
      throw std::runtime_error("vocabulary line " + std::to_string(line_no) +
                               ": empty or duplicate token");
    }
    vocab.id_to_token.push_back(std::move(token));
    vocab.counts.push_back(count);
  }
  if (vocab.size() == 0) {
    throw std::runtime_error("vocabulary file '" + path + "' is empty");
  }
  return vocab;
}

}  // namespace creditseg
