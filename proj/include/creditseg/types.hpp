#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace creditseg {

// A segmentation of a document with n sentences into u contiguous segments.
// boundaries has u+1 entries 0 = b[0] < b[1] < ... < b[u] = n; segment t
// covers sentences b[t]+1 .. b[t+1] (1-based, inclusive). labels[t] is the
// label id of segment t. Adjacent segments always carry distinct labels.
struct Segmentation {
  std::vector<int> boundaries;
  std::vector<int> labels;
  double objective = 0.0;

  int n_segments() const { return static_cast<int>(labels.size()); }
  int n_sentences() const {
    return boundaries.empty() ? 0 : boundaries.back();
  }
};

// The same information segment by segment, convenient for metrics.
struct LabeledSegment {
  int start = 0;  // 1-based, inclusive
  int end = 0;    // 1-based, inclusive
  int label = 0;

  int length() const { return end - start + 1; }
};

inline void validate_segmentation(const Segmentation& seg) {
  if (seg.boundaries.size() != seg.labels.size() + 1) {
    throw std::invalid_argument("segmentation: boundary/label count mismatch");
  }
  if (seg.boundaries.empty() || seg.boundaries.front() != 0) {
    throw std::invalid_argument("segmentation: boundaries must start at 0");
  }
  for (std::size_t t = 1; t < seg.boundaries.size(); ++t) {
    if (seg.boundaries[t] <= seg.boundaries[t - 1]) {
      throw std::invalid_argument("segmentation: boundaries not increasing");
    }
  }
  for (std::size_t t = 1; t < seg.labels.size(); ++t) {
    if (seg.labels[t] == seg.labels[t - 1]) {
      throw std::invalid_argument("segmentation: adjacent segments share a label");
    }
  }
}

inline std::vector<LabeledSegment> to_segments(const Segmentation& seg) {
  validate_segmentation(seg);
  std::vector<LabeledSegment> out;
  out.reserve(seg.labels.size());
  for (std::size_t t = 0; t < seg.labels.size(); ++t) {
    out.push_back({seg.boundaries[t] + 1, seg.boundaries[t + 1], seg.labels[t]});
  }
  return out;
}

// Expands a segmentation into one label per sentence.
inline std::vector<int> to_sentence_labels(const Segmentation& seg) {
  validate_segmentation(seg);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(seg.n_sentences()));
  for (std::size_t t = 0; t < seg.labels.size(); ++t) {
    for (int s = seg.boundaries[t]; s < seg.boundaries[t + 1]; ++s) {
      out.push_back(seg.labels[t]);
    }
  }
  return out;
}

}  // namespace creditseg
