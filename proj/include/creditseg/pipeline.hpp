#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "creditseg/classifier.hpp"
#include "creditseg/corpus.hpp"
#include "creditseg/segmenter.hpp"
#include "creditseg/types.hpp"

namespace creditseg {

struct PipelineConfig {
  TrainConfig train;
  double alpha = 0.30;         // prediction-time segment penalty
  double alpha_refine = 0.55;  // penalty while segmenting the training set
  int refinement_iterations = 3;
  std::uint64_t rng_seed = 0;
};

struct DocumentPrediction {
  std::string doc_id;
  Segmentation segmentation;
  std::vector<int> label_set;       // sorted, unique, never the null label
  std::vector<double> soft_scores;  // one entry per real class
};

namespace pipeline_detail {

inline void log_losses(std::ostream* log, const char* phase,
                       const std::vector<double>& losses) {
  if (!log || losses.empty()) return;
  for (std::size_t e = 0; e < losses.size(); ++e) {
    if ((e + 1) % 10 == 0 || e + 1 == losses.size() || e == 0) {
      *log << phase << " epoch " << (e + 1) << " loss " << losses[e] << "\n";
    }
  }
}

}  // namespace pipeline_detail

// Trains the scorer on whole documents, one example per (document, label)
// pair. This treats every document label as if it applied to all of the
// text, which is noisy on purpose: it needs nothing beyond document-level
// labels.
inline ScorerModel train_seg_noisy(const std::vector<Document>& docs,
                                   int vocab_size, const LabelDict& labels,
                                   const PipelineConfig& cfg,
                                   std::ostream* log = nullptr) {
  if (docs.empty()) throw std::invalid_argument("train_seg_noisy: no documents");
  if (labels.size() == 0) throw std::invalid_argument("train_seg_noisy: no labels");
  std::vector<TrainingExample> examples;
  for (const Document& doc : docs) {
    if (doc.labels.empty()) {
      throw std::invalid_argument("document '" + doc.id +
                                  "' has no labels, cannot train on it");
    }
    const PrefixSums prefix = PrefixSums::build(doc, vocab_size);
    const BowVector x = bow(prefix, 1, doc.n_sentences());
    for (int label : doc.labels) {
      if (label < 0 || label >= labels.size()) {
        throw std::invalid_argument("document '" + doc.id +
                                    "' carries an out-of-range label id");
      }
      examples.push_back({x, label});
    }
  }
  TrainConfig tc = cfg.train;
  tc.rng_seed = cfg.rng_seed;
  ScorerModel model = init_model(vocab_size, labels.size(), tc);
  model.class_names = labels.names;
  if (log) *log << "training on " << examples.size() << " examples from "
                << docs.size() << " documents\n";
  const std::vector<double> losses = train(model, examples, tc, tc.lr_initial);
  pipeline_detail::log_losses(log, "train", losses);
  return model;
}

// Iterative refinement on top of the noisy model: segment each training
// document against its own labels plus the null label, then fine-tune on the
// segments that claimed a real label. Segments the model assigns to null drop
// out of the next round, which is what cleans the noisy supervision up.
inline ScorerModel train_seg_refine(const std::vector<Document>& docs,
                                    int vocab_size, const LabelDict& labels,
                                    const PipelineConfig& cfg,
                                    std::ostream* log = nullptr) {
  ScorerModel model = train_seg_noisy(docs, vocab_size, labels, cfg, log);
  const int null_label = model.null_index();
  for (int iter = 1; iter <= cfg.refinement_iterations; ++iter) {
    std::vector<TrainingExample> examples;
    std::size_t null_segments = 0;
    for (const Document& doc : docs) {
      const PrefixSums prefix = PrefixSums::build(doc, vocab_size);
      std::vector<int> candidates = doc.labels;
      candidates.push_back(null_label);
      const ScoreTable table = build_score_table(model, doc, candidates, prefix);
      DpConfig dp;
      dp.alpha = cfg.alpha_refine;
      const Segmentation seg = dp_segment(table, dp);
      for (const LabeledSegment& s : to_segments(seg)) {
        if (s.label == null_label) {
          ++null_segments;
          continue;
        }
        examples.push_back({bow(prefix, s.start, s.end), s.label});
      }
    }
    if (examples.empty()) {
      std::cerr << "warning: refinement iteration " << iter
                << " kept no labeled segments, skipping fine-tune\n";
      continue;
    }
    if (log) *log << "refinement iteration " << iter << ": " << examples.size()
                  << " segment examples, " << null_segments
                  << " segments discarded as null\n";
    TrainConfig tc = cfg.train;
    tc.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(iter);
    const std::vector<double> losses = fine_tune(model, examples, tc);
    pipeline_detail::log_losses(log, "refine", losses);
  }
  return model;
}

// Segments one document and derives its document-level outputs: the label
// set is the union of segment labels, and each class's soft score is the
// best score that class achieved on any predicted segment.
inline DocumentPrediction predict(const ScorerModel& model, const Document& doc,
                                  std::span<const int> candidates,
                                  double alpha) {
  const PrefixSums prefix = PrefixSums::build(doc, model.vocab_size);
  const ScoreTable table = build_score_table(model, doc, candidates, prefix);
  DpConfig dp;
  dp.alpha = alpha;
  DocumentPrediction out;
  out.doc_id = doc.id;
  out.segmentation = dp_segment(table, dp);
  out.label_set = out.segmentation.labels;
  std::sort(out.label_set.begin(), out.label_set.end());
  out.label_set.erase(std::unique(out.label_set.begin(), out.label_set.end()),
                      out.label_set.end());
  out.label_set.erase(
      std::remove(out.label_set.begin(), out.label_set.end(), model.null_index()),
      out.label_set.end());
  out.soft_scores.assign(static_cast<std::size_t>(model.n_classes), 0.0);
  for (const LabeledSegment& s : to_segments(out.segmentation)) {
    const std::vector<double> probs = forward(model, bow(prefix, s.start, s.end));
    for (int c = 0; c < model.n_classes; ++c) {
      out.soft_scores[static_cast<std::size_t>(c)] =
          std::max(out.soft_scores[static_cast<std::size_t>(c)],
                   probs[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prediction dump
// ---------------------------------------------------------------------------
//
// One document per line:
//   id <TAB> label,... <TAB> b0,b1,...,bu|seglabel,... <TAB> name:score,...
// Labels appear by name; a segment the model assigned to the null label is
// written as an empty name. Scores carry 9 decimal places so reruns of a
// deterministic pipeline produce byte-identical files.

struct PredictionRecord {
  std::string doc_id;
  std::vector<std::string> labels;          // predicted set, sorted names
  std::vector<int> boundaries;              // 0 = b0 < ... < bu
  std::vector<std::string> segment_labels;  // "" for the null label
  std::vector<std::pair<std::string, double>> scores;
};

inline PredictionRecord to_record(const DocumentPrediction& pred,
                                  const ScorerModel& model) {
  PredictionRecord rec;
  rec.doc_id = pred.doc_id;
  for (int label : pred.label_set) {
    rec.labels.push_back(model.class_names[static_cast<std::size_t>(label)]);
  }
  std::sort(rec.labels.begin(), rec.labels.end());
  rec.boundaries = pred.segmentation.boundaries;
  for (int label : pred.segmentation.labels) {
    rec.segment_labels.push_back(
        label == model.null_index()
            ? std::string()
            : model.class_names[static_cast<std::size_t>(label)]);
  }
  for (int c = 0; c < model.n_classes; ++c) {
    rec.scores.emplace_back(model.class_names[static_cast<std::size_t>(c)],
                            pred.soft_scores[static_cast<std::size_t>(c)]);
  }
  return rec;
}

inline void write_predictions(std::ostream& out,
                              std::span<const PredictionRecord> records) {
  const std::ios::fmtflags flags = out.flags();
  const std::streamsize precision = out.precision();
  out.setf(std::ios::fixed);
  out.precision(9);
  for (const PredictionRecord& rec : records) {
    out << rec.doc_id << '\t' << corpus_detail::join(rec.labels, ",") << '\t';
    for (std::size_t b = 0; b < rec.boundaries.size(); ++b) {
      if (b) out << ',';
      out << rec.boundaries[b];
    }
    out << '|' << corpus_detail::join(rec.segment_labels, ",") << '\t';
    for (std::size_t s = 0; s < rec.scores.size(); ++s) {
      if (s) out << ',';
      out << rec.scores[s].first << ':' << rec.scores[s].second;
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

inline void write_predictions_file(const std::string& path,
                                   std::span<const PredictionRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_predictions(out, records);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<PredictionRecord> read_predictions_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<PredictionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string_view> fields = corpus_detail::split(line, '\t');
    if (fields.size() != 4) {
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": expected 4 tab-separated fields");
    }
    PredictionRecord rec;
    rec.doc_id = std::string(fields[0]);
    if (rec.doc_id.empty()) {
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": empty document id");
    }
    rec.labels = corpus_detail::split_nonempty(fields[1], ',');
    std::sort(rec.labels.begin(), rec.labels.end());
    const std::vector<std::string_view> seg_parts =
        corpus_detail::split(fields[2], '|');
    if (seg_parts.size() != 2) {
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": malformed segmentation field");
    }
    for (std::string_view b : corpus_detail::split(seg_parts[0], ',')) {
      try {
        rec.boundaries.push_back(std::stoi(std::string(b)));
      } catch (const std::exception&) {
        throw std::runtime_error("predictions line " + std::to_string(line_no) +
                                 ": bad boundary");
      }
    }
    for (std::string_view s : corpus_detail::split(seg_parts[1], ',')) {
      rec.segment_labels.emplace_back(s);
    }
    if (rec.boundaries.size() != rec.segment_labels.size() + 1 ||
        rec.boundaries.front() != 0) {
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": segmentation does not tile the document");
    }
    for (std::size_t b = 1; b < rec.boundaries.size(); ++b) {
      if (rec.boundaries[b] <= rec.boundaries[b - 1]) {
        throw std::runtime_error("predictions line " + std::to_string(line_no) +
                                 ": boundaries not increasing");
      }
    }
    for (std::string_view pair : corpus_detail::split(fields[3], ',')) {
      const std::size_t colon = pair.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw std::runtime_error("predictions line " + std::to_string(line_no) +
                                 ": malformed score entry");
      }
      double value = 0.0;
      try {
        value = std::stod(std::string(pair.substr(colon + 1)));
      } catch (const std::exception&) {
        throw std::runtime_error("predictions line " + std::to_string(line_no) +
                                 ": bad score value");
      }
      rec.scores.emplace_back(std::string(pair.substr(0, colon)), value);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace creditseg
