#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "creditseg/classifier.hpp"
#include "creditseg/corpus.hpp"
#include "creditseg/types.hpp"

namespace creditseg {

struct DpConfig {
  double alpha = 0.3;       // charged once per segment
  int max_segment_len = 0;  // 0 means unlimited
};

// Scores for every contiguous sentence range against every candidate label,
// addressed as (i, j, candidate slot) with 1-based inclusive ranges.
struct ScoreTable {
  int n_sentences = 0;
  std::vector<int> candidates;  // strictly increasing label ids
  std::vector<double> values;

  int n_candidates() const { return static_cast<int>(candidates.size()); }

  std::size_t range_index(int i, int j) const {
    const std::size_t row = static_cast<std::size_t>(i - 1);
    const std::size_t n = static_cast<std::size_t>(n_sentences);
    return row * (n + 1) - row * static_cast<std::size_t>(i) / 2 +
           static_cast<std::size_t>(j - i);
  }

  double at(int i, int j, int slot) const {
    return values[range_index(i, j) * static_cast<std::size_t>(n_candidates()) +
                  static_cast<std::size_t>(slot)];
  }

  double& at(int i, int j, int slot) {
    return values[range_index(i, j) * static_cast<std::size_t>(n_candidates()) +
                  static_cast<std::size_t>(slot)];
  }

  static ScoreTable make(int n_sentences, std::vector<int> candidates) {
    if (n_sentences < 1) {
      throw std::invalid_argument("score table needs at least one sentence");
    }
    if (candidates.empty()) {
      throw std::invalid_argument("score table needs at least one candidate");
    }
    for (std::size_t s = 1; s < candidates.size(); ++s) {
      if (candidates[s] <= candidates[s - 1]) {
        throw std::invalid_argument("candidate labels must be strictly increasing");
      }
    }
    ScoreTable t;
    t.n_sentences = n_sentences;
    t.candidates = std::move(candidates);
    const std::size_t n = static_cast<std::size_t>(n_sentences);
    t.values.assign(n * (n + 1) / 2 * t.candidates.size(), 0.0);
    return t;
  }
};

// Runs the scorer over every sentence range of one document. Candidate ids
// index the model outputs, so the null output may be included.
inline ScoreTable build_score_table(const ScorerModel& model,
                                    const Document& doc,
                                    std::span<const int> candidates,
                                    const PrefixSums& prefix) {
  if (doc.n_sentences() != prefix.n_sentences) {
    throw std::invalid_argument("prefix sums built for a different document");
  }
  std::vector<int> cands(candidates.begin(), candidates.end());
  for (int c : cands) {
    if (c < 0 || c >= model.outputs()) {
      throw std::invalid_argument("candidate label " + std::to_string(c) +
                                  " outside model outputs");
    }
  }
  ScoreTable table = ScoreTable::make(doc.n_sentences(), std::move(cands));
  const int n = table.n_sentences;
  const int m = table.n_candidates();
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      const BowVector x = bow(prefix, i, j);
      const std::vector<double> probs = forward(model, x);
      for (int s = 0; s < m; ++s) {
        table.at(i, j, s) = probs[static_cast<std::size_t>(table.candidates[s])];
      }
    }
  }
  return table;
}

namespace segmenter_detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-state solution of the suffix problem starting at sentence k with a
// fixed first-segment label: total value, segment count, end of the first
// segment, and the slot continuing after it (-1 when the segment reaches n).
struct DpTables {
  int n = 0;
  int m = 0;
  std::vector<double> value;       // (n + 1) * m, index k * m + slot
  std::vector<std::int32_t> count;
  std::vector<std::int32_t> j_end;
  std::vector<std::int32_t> next_slot;

  std::size_t idx(int k, int slot) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(m) +
           static_cast<std::size_t>(slot);
  }
};

struct Choice {
  double value = kNegInf;
  int count = 0;
  int j = 0;
  int next = -1;
};

// Ties between equal-valued solutions are broken deterministically: fewer
// segments first, then the lexicographically smallest label sequence, then
// the smallest boundary sequence. Both candidates start at sentence k with
// the same label, so only the tails need comparing.
inline bool better(const DpTables& t, const std::vector<int>& cand_labels,
                   const Choice& a, const Choice& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.count != b.count) return a.count < b.count;
  int ka = a.j + 1, sa = a.next;
  int kb = b.j + 1, sb = b.next;
  while (sa >= 0 && sb >= 0) {
    const int la = cand_labels[static_cast<std::size_t>(sa)];
    const int lb = cand_labels[static_cast<std::size_t>(sb)];
    if (la != lb) return la < lb;
    const std::size_t ia = t.idx(ka, sa);
    const std::size_t ib = t.idx(kb, sb);
    ka = t.j_end[ia] + 1;
    sa = t.next_slot[ia];
    kb = t.j_end[ib] + 1;
    sb = t.next_slot[ib];
  }
  if ((sa >= 0) != (sb >= 0)) return sb >= 0;  // equal counts make this unreachable
  if (a.j != b.j) return a.j < b.j;
  return false;
}

}  // namespace segmenter_detail

// Highest-scoring segmentation of the whole document: every segment pays
// alpha, adjacent segments must take distinct labels, and segment scores come
// straight from the table. Suffix recursion with best and second-best
// bookkeeping keeps this quadratic in sentences and linear in candidates.
inline Segmentation dp_segment(const ScoreTable& table, const DpConfig& cfg) {
  using namespace segmenter_detail;
  const int n = table.n_sentences;
  const int m = table.n_candidates();
  for (double v : table.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("score table contains a non-finite value");
    }
  }
  const int cap = cfg.max_segment_len > 0 ? cfg.max_segment_len : n;

  DpTables t;
  t.n = n;
  t.m = m;
  const std::size_t cells = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(m);
  t.value.assign(cells, kNegInf);
  t.count.assign(cells, 0);
  t.j_end.assign(cells, 0);
  t.next_slot.assign(cells, -1);

  // Top two slots of each suffix position, ordered by value, then segment
  // count, then label id. Distinct slots mean distinct first labels, so the
  // label-sequence comparison is already decided at the first element.
  std::vector<std::int32_t> best1(static_cast<std::size_t>(n + 2), -1);
  std::vector<std::int32_t> best2(static_cast<std::size_t>(n + 2), -1);
  auto slot_before = [&](int k, int sa, int sb) {
    if (sb < 0) return true;
    const std::size_t ia = t.idx(k, sa);
    const std::size_t ib = t.idx(k, sb);
    if (t.value[ia] != t.value[ib]) return t.value[ia] > t.value[ib];
    if (t.count[ia] != t.count[ib]) return t.count[ia] < t.count[ib];
    return sa < sb;
  };

  for (int k = n; k >= 1; --k) {
    for (int slot = 0; slot < m; ++slot) {
      Choice best;
      bool have = false;
      const int jmax = std::min(n, k + cap - 1);
      for (int j = k; j <= jmax; ++j) {
        Choice cand;
        cand.j = j;
        if (j == n) {
          cand.value = table.at(k, j, slot) - cfg.alpha;
          cand.count = 1;
          cand.next = -1;
        } else {
          int cont = best1[static_cast<std::size_t>(j + 1)];
          if (cont == slot) cont = best2[static_cast<std::size_t>(j + 1)];
          if (cont < 0) continue;
          const std::size_t ic = t.idx(j + 1, cont);
          if (t.value[ic] == kNegInf) continue;
          cand.value = table.at(k, j, slot) - cfg.alpha + t.value[ic];
          cand.count = 1 + t.count[ic];
          cand.next = cont;
        }
        if (!have || better(t, table.candidates, cand, best)) {
          best = cand;
          have = true;
        }
      }
      if (have) {
        const std::size_t i = t.idx(k, slot);
        t.value[i] = best.value;
        t.count[i] = best.count;
        t.j_end[i] = best.j;
        t.next_slot[i] = best.next;
      }
    }
    best1[static_cast<std::size_t>(k)] = -1;
    best2[static_cast<std::size_t>(k)] = -1;
    for (int slot = 0; slot < m; ++slot) {
      if (t.value[t.idx(k, slot)] == kNegInf) continue;
      if (best1[static_cast<std::size_t>(k)] < 0 ||
          slot_before(k, slot, best1[static_cast<std::size_t>(k)])) {
        best2[static_cast<std::size_t>(k)] = best1[static_cast<std::size_t>(k)];
        best1[static_cast<std::size_t>(k)] = slot;
      } else if (best2[static_cast<std::size_t>(k)] < 0 ||
                 slot_before(k, slot, best2[static_cast<std::size_t>(k)])) {
        best2[static_cast<std::size_t>(k)] = slot;
      }
    }
  }

  const int start = best1[1];
  if (start < 0 || t.value[t.idx(1, start)] == kNegInf) {
    throw std::runtime_error(
        "no feasible segmentation (segment length cap too tight for a single "
        "candidate label)");
  }

  Segmentation seg;
  seg.objective = t.value[t.idx(1, start)];
  seg.boundaries.push_back(0);
  int k = 1;
  int slot = start;
  while (true) {
    const std::size_t i = t.idx(k, slot);
    seg.labels.push_back(table.candidates[static_cast<std::size_t>(slot)]);
    seg.boundaries.push_back(t.j_end[i]);
    if (t.next_slot[i] < 0) break;
    k = t.j_end[i] + 1;
    slot = t.next_slot[i];
  }
  validate_segmentation(seg);
  return seg;
}

// Exhaustive reference implementation used to validate dp_segment. Walks
// every boundary mask and label assignment, accumulating each value in the
// same right-to-left order as the recursion so objectives match bit for bit.
// Limited to 12 sentences.
inline Segmentation brute_force_segment(const ScoreTable& table,
                                        const DpConfig& cfg) {
  const int n = table.n_sentences;
  const int m = table.n_candidates();
  if (n > 12) {
    throw std::invalid_argument("brute_force_segment is limited to 12 sentences");
  }
  const int cap = cfg.max_segment_len > 0 ? cfg.max_segment_len : n;

  bool have = false;
  Segmentation best;
  std::vector<int> bounds;  // internal boundaries of the current mask
  std::vector<int> labels(16, 0);

  auto consider = [&](const std::vector<int>& segs_start,
                      const std::vector<int>& segs_end, int u) {
    double value = 0.0;
    for (int tix = u - 1; tix >= 0; --tix) {
      value = table.at(segs_start[static_cast<std::size_t>(tix)],
                       segs_end[static_cast<std::size_t>(tix)],
                       labels[static_cast<std::size_t>(tix)]) -
              cfg.alpha + value;
    }
    Segmentation cand;
    cand.objective = value;
    cand.boundaries.push_back(0);
    for (int tix = 0; tix < u; ++tix) {
      cand.boundaries.push_back(segs_end[static_cast<std::size_t>(tix)]);
      cand.labels.push_back(
          table.candidates[static_cast<std::size_t>(labels[static_cast<std::size_t>(tix)])]);
    }
    if (!have) {
      best = std::move(cand);
      have = true;
      return;
    }
    if (cand.objective != best.objective) {
      if (cand.objective > best.objective) best = std::move(cand);
      return;
    }
    if (cand.n_segments() != best.n_segments()) {
      if (cand.n_segments() < best.n_segments()) best = std::move(cand);
      return;
    }
    if (cand.labels != best.labels) {
      if (cand.labels < best.labels) best = std::move(cand);
      return;
    }
    if (cand.boundaries < best.boundaries) best = std::move(cand);
  };

  std::vector<int> segs_start, segs_end;
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    segs_start.clear();
    segs_end.clear();
    int start = 1;
    bool ok = true;
    for (int b = 1; b <= n; ++b) {
      const bool cut = (b == n) || ((mask >> (b - 1)) & 1u);
      if (!cut) continue;
      if (b - start + 1 > cap) {
        ok = false;
        break;
      }
      segs_start.push_back(start);
      segs_end.push_back(b);
      start = b + 1;
    }
    if (!ok) continue;
    const int u = static_cast<int>(segs_start.size());

    // enumerate label assignments with adjacent labels forced distinct
    std::vector<int> stack(static_cast<std::size_t>(u), 0);
    int depth = 0;
    stack[0] = -1;
    while (depth >= 0) {
      int next = stack[static_cast<std::size_t>(depth)] + 1;
      while (next < m && depth > 0 &&
             next == labels[static_cast<std::size_t>(depth - 1)]) {
        ++next;
      }
      if (next >= m) {
        --depth;
        continue;
      }
      stack[static_cast<std::size_t>(depth)] = next;
      labels[static_cast<std::size_t>(depth)] = next;
      if (depth + 1 == u) {
        consider(segs_start, segs_end, u);
      } else {
        ++depth;
        stack[static_cast<std::size_t>(depth)] = -1;
      }
    }
  }
  if (!have) {
    throw std::runtime_error(
        "no feasible segmentation (segment length cap too tight for a single "
        "candidate label)");
  }
  validate_segmentation(best);
  return best;
}

}  // namespace creditseg
