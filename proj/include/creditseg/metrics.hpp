#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "creditseg/types.hpp"

namespace creditseg {

// Fraction of sentences whose predicted label matches the observed one.
inline double pppa(const std::vector<int>& observed,
                   const std::vector<int>& predicted) {
  if (observed.empty() || observed.size() != predicted.size()) {
    throw std::invalid_argument("pppa: label vectors must be non-empty and equal");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i] == predicted[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(observed.size());
}

namespace metrics_detail {

inline void check_tiling(const std::vector<LabeledSegment>& segs, int n,
                         const char* what) {
  if (segs.empty()) {
    throw std::invalid_argument(std::string(what) + ": no segments");
  }
  int expect = 1;
  for (const LabeledSegment& s : segs) {
    if (s.start != expect || s.end < s.start) {
      throw std::invalid_argument(std::string(what) +
                                  ": segments must tile the document");
    }
    expect = s.end + 1;
  }
  if (expect != n + 1) {
    throw std::invalid_argument(std::string(what) +
                                ": segments must cover all sentences");
  }
}

inline std::vector<int> expand(const std::vector<LabeledSegment>& segs, int n) {
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  for (const LabeledSegment& s : segs) {
    for (int p = s.start; p <= s.end; ++p) {
      out[static_cast<std::size_t>(p - 1)] = s.label;
    }
  }
  return out;
}

}  // namespace metrics_detail

// Segment-overlap score. Every observed segment is matched against the
// predicted segments sharing its label; an overlapping pair contributes
//   (minov + delta) / maxov * len(observed)
// where minov is the intersection length, maxov the total extent of the
// pair, and delta forgives small misalignments without ever rewarding more
// than the extent allows. The sum is averaged over the sentence count and
// clamped to [0, 1].
inline double sov(const std::vector<LabeledSegment>& observed,
                  const std::vector<LabeledSegment>& predicted,
                  int n_sentences) {
  metrics_detail::check_tiling(observed, n_sentences, "sov observed");
  metrics_detail::check_tiling(predicted, n_sentences, "sov predicted");
  double total = 0.0;
  for (const LabeledSegment& s1 : observed) {
    for (const LabeledSegment& s2 : predicted) {
      if (s1.label != s2.label) continue;
      const int minov = std::min(s1.end, s2.end) - std::max(s1.start, s2.start) + 1;
      if (minov <= 0) continue;
      const int maxov = std::max(s1.end, s2.end) - std::min(s1.start, s2.start) + 1;
      const int delta = std::min(std::min(maxov - minov, minov),
                                 std::min(s1.length() / 2, s2.length() / 2));
      total += (static_cast<double>(minov) + static_cast<double>(delta)) /
               static_cast<double>(maxov) * static_cast<double>(s1.length());
    }
  }
  const double score = total / static_cast<double>(n_sentences);
  return std::min(1.0, std::max(0.0, score));
}

// Set F1 between observed and predicted label sets (sorted, unique). Two
// empty sets count as perfect agreement.
inline double f1(const std::vector<int>& observed,
                 const std::vector<int>& predicted) {
  if (observed.empty() && predicted.empty()) return 1.0;
  std::size_t inter = 0;
  std::size_t a = 0, b = 0;
  while (a < observed.size() && b < predicted.size()) {
    if (observed[a] == predicted[b]) {
      ++inter;
      ++a;
      ++b;
    } else if (observed[a] < predicted[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return 2.0 * static_cast<double>(inter) /
         static_cast<double>(observed.size() + predicted.size());
}

// Rank-based AUC with midrank handling of tied scores; equals the
// Mann-Whitney statistic normalized by positive * negative pair count.
// Throws when one of the groups is empty.
inline double auc(std::span<const std::pair<double, bool>> scored) {
  std::size_t pos = 0;
  for (const auto& [score, label] : scored) {
    if (!std::isfinite(score)) {
      throw std::invalid_argument("auc: scores must be finite");
    }
    if (label) ++pos;
  }
  const std::size_t neg = scored.size() - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("auc undefined: needs both positive and negative examples");
  }
  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].first < scored[b].first;
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scored[order[j + 1]].first == scored[order[i]].first) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (scored[order[k]].second) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

// ---------------------------------------------------------------------------
// Corpus-level evaluation
// ---------------------------------------------------------------------------

struct DocSegmentationEval {
  std::string doc_id;
  std::vector<LabeledSegment> observed;
  std::vector<LabeledSegment> predicted;
  int n_sentences = 0;
};

struct DocLabelEval {
  std::string doc_id;
  std::vector<int> observed;   // sorted label ids
  std::vector<int> predicted;  // sorted label ids
  std::vector<double> soft_scores;  // one score per class
};

struct EvalReport {
  std::optional<double> pppa, sov, f1, auc_micro, auc_macro;
  // (doc id, metric name, value) rows, only filled when requested
  std::vector<std::tuple<std::string, std::string, double>> per_document;

  // Stable text form: "metric<TAB>value" per aggregate metric, then one
  // "doc<TAB>id<TAB>metric<TAB>value" row per per-document entry.
  std::string serialize() const {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    auto row = [&](const char* name, const std::optional<double>& v) {
      if (v) out << name << '\t' << *v << '\n';
    };
    row("SOV", sov);
    row("PPPA", pppa);
    row("F1_mean", f1);
    row("AUC_micro", auc_micro);
    row("AUC_macro", auc_macro);
    for (const auto& [doc, metric, value] : per_document) {
      out << "doc\t" << doc << '\t' << metric << '\t' << value << '\n';
    }
    return out.str();
  }
};

// Mean per-document PPPA and SOV over ground-truth segmentations.
inline void evaluate_segmentations(std::span<const DocSegmentationEval> docs,
                                   bool per_document, EvalReport& report) {
  if (docs.empty()) {
    throw std::invalid_argument("evaluate_segmentations: no documents");
  }
  double pppa_sum = 0.0;
  double sov_sum = 0.0;
  for (const DocSegmentationEval& d : docs) {
    metrics_detail::check_tiling(d.observed, d.n_sentences, "observed");
    metrics_detail::check_tiling(d.predicted, d.n_sentences, "predicted");
    const std::vector<int> obs = metrics_detail::expand(d.observed, d.n_sentences);
    const std::vector<int> pred = metrics_detail::expand(d.predicted, d.n_sentences);
    const double p = pppa(obs, pred);
    const double s = sov(d.observed, d.predicted, d.n_sentences);
    pppa_sum += p;
    sov_sum += s;
    if (per_document) {
      report.per_document.emplace_back(d.doc_id, "PPPA", p);
      report.per_document.emplace_back(d.doc_id, "SOV", s);
    }
  }
  report.pppa = pppa_sum / static_cast<double>(docs.size());
  report.sov = sov_sum / static_cast<double>(docs.size());
}

// Mean per-document F1 of the predicted label sets plus ranking quality of
// the soft scores: micro pools every (document, class) decision, macro
// averages per-class AUCs and skips classes that are all positive or all
// negative (warning on stderr).
inline void evaluate_labels(std::span<const DocLabelEval> docs, int n_classes,
                            bool per_document, EvalReport& report) {
  if (docs.empty()) {
    throw std::invalid_argument("evaluate_labels: no documents");
  }
  if (n_classes <= 0) {
    throw std::invalid_argument("evaluate_labels: class count must be positive");
  }
  double f1_sum = 0.0;
  for (const DocLabelEval& d : docs) {
    if (static_cast<int>(d.soft_scores.size()) != n_classes) {
      throw std::invalid_argument("document '" + d.doc_id +
                                  "' has a soft score vector of the wrong size");
    }
    const double f = f1(d.observed, d.predicted);
    f1_sum += f;
    if (per_document) report.per_document.emplace_back(d.doc_id, "F1", f);
  }
  report.f1 = f1_sum / static_cast<double>(docs.size());

  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(docs.size() * static_cast<std::size_t>(n_classes));
  double macro_sum = 0.0;
  int macro_classes = 0;
  std::vector<std::pair<double, bool>> per_class;
  for (int c = 0; c < n_classes; ++c) {
    per_class.clear();
    for (const DocLabelEval& d : docs) {
      const bool is_pos =
          std::binary_search(d.observed.begin(), d.observed.end(), c);
      per_class.emplace_back(d.soft_scores[static_cast<std::size_t>(c)], is_pos);
      pooled.emplace_back(d.soft_scores[static_cast<std::size_t>(c)], is_pos);
    }
    bool any_pos = false, any_neg = false;
    for (const auto& [score, label] : per_class) {
      (label ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) {
      std::cerr << "warning: class " << c
                << " has no " << (any_pos ? "negative" : "positive")
                << " documents, skipped in macro AUC\n";
      continue;
    }
    macro_sum += auc(per_class);
    ++macro_classes;
  }
  report.auc_micro = auc(pooled);  // throws if every pair has one sign
  if (macro_classes == 0) {
    throw std::runtime_error("macro AUC undefined: every class is degenerate");
  }
  report.auc_macro = macro_sum / static_cast<double>(macro_classes);
}

}  // namespace creditseg
