// Command-line frontend: preprocess raw text, synthesize multilabel test
// documents, train a scorer, segment documents, and score predictions.
// All diagnostics go to stderr; data goes to --out files or stdout.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "creditseg/creditseg.hpp"

namespace {

using namespace creditseg;

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

LabelDict dict_from_names(const std::vector<std::string>& names) {
  LabelDict dict;
  dict.names = names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    dict.name_to_id[names[i]] = static_cast<int>(i);
  }
  return dict;
}

// Routes data either to --out or to stdout when no path was given.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
      path_ = path;
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void finish() {
    stream().flush();
    if (!path_.empty() && !file_) {
      throw std::runtime_error("write to '" + path_ + "' failed");
    }
  }

 private:
  std::ofstream file_;
  std::string path_;
};

void check_vocab_hash(std::uint64_t expected,
                      std::optional<std::uint64_t> found, const char* what) {
  if (found && *found != expected) {
    throw std::runtime_error(std::string("model/corpus vocabulary mismatch: ") +
                             what + " was built against vocabulary " +
                             corpus_detail::hash_to_hex(*found) +
                             ", expected " +
                             corpus_detail::hash_to_hex(expected));
  }
}

// Corpus files carry 2 tabs per line, synthetic set files 4; both are valid
// document sources for segmentation and evaluation.
bool file_is_synthetic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tabs =
        static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
    if (tabs == 2) return false;
    if (tabs == 4) return true;
    throw std::runtime_error("'" + path +
                             "' is neither a corpus nor a synthetic set file");
  }
  return false;  // empty files read fine as an empty corpus
}

// Loads the documents of either file kind, dropping synthetic ground truth.
CorpusFile read_documents(const std::string& path) {
  if (!file_is_synthetic(path)) return read_corpus_file(path);
  const SyntheticFile synth = read_synthetic_file(path);
  CorpusFile out;
  out.vocab_hash = synth.vocab_hash;
  for (const SyntheticStemmedDocument& syn : synth.documents) {
    out.documents.push_back(syn.document);
  }
  return out;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Fills options from a flat `key = value` file, keys named after the flags.
// Only options absent from the command line are touched, so flags override
// the file and the file overrides built-in defaults.
void apply_config_file(CLI::App& sub) {
  const CLI::Option* config_opt = sub.get_option_no_throw("--config");
  if (config_opt == nullptr || config_opt->count() == 0) return;
  const std::string path = config_opt->as<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim_view(line);
    if (text.empty() || text.front() == '#') continue;
    const auto where = [&] {
      return path + " line " + std::to_string(line_no);
    };
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(where() + ": expected key = value");
    }
    const std::string key(trim_view(text.substr(0, eq)));
    const std::string value(trim_view(text.substr(eq + 1)));
    if (key.empty()) throw std::runtime_error(where() + ": empty key");

    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw std::runtime_error(where() + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw std::runtime_error(where() + ": " + e.what());
    }
  }
}

// Required options may come from the command line or the config file, so
// they are checked only after both sources have been applied.
void check_required(const CLI::App& sub,
                    std::initializer_list<const char*> names) {
  std::string missing;
  for (const char* name : names) {
    if (sub.count(name) == 0) {
      missing += missing.empty() ? name : std::string(", ") + name;
    }
  }
  if (!missing.empty()) {
    throw std::runtime_error("missing required option(s): " + missing);
  }
}

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string config;
  std::string input;
  std::string out;
  std::string vocab_out;
};

int cmd_preprocess(const PreprocessArgs& args) {
  std::ifstream in(args.input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + args.input + "'");

  const std::unordered_set<std::string> stopwords = default_stopword_set();
  std::vector<StemmedDocument> docs;
  std::unordered_set<std::string> seen_ids;
  PreprocessStats stats;
  std::int64_t docs_dropped = 0;
  int bad_lines = 0;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string_view> fields = corpus_detail::split(line, '\t');
    auto complain = [&](const std::string& msg) {
      std::cerr << args.input << " line " << line_no << ": " << msg << "\n";
      ++bad_lines;
    };
    if (fields.size() != 3) {
      complain("expected 3 tab-separated fields (id, labels, text)");
      continue;
    }
    RawDocument raw;
    raw.id = std::string(fields[0]);
    if (raw.id.empty()) {
      complain("empty document id");
      continue;
    }
    if (!seen_ids.insert(raw.id).second) {
      complain("duplicate document id '" + raw.id + "'");
      continue;
    }
    raw.labels = corpus_detail::split_nonempty(fields[1], ',');
    try {
      for (const std::string& name : raw.labels) {
        corpus_detail::check_label_name(name);
      }
    } catch (const std::exception& e) {
      complain(e.what());
      continue;
    }
    raw.text = std::string(fields[2]);
    if (raw.text.empty()) {
      complain("empty document text");
      continue;
    }
    StemmedDocument doc = preprocess_document(raw, stopwords, &stats);
    if (doc.sentences.empty()) {
      std::cerr << "warning: document '" << doc.id
                << "' dropped, no sentences survived preprocessing\n";
      ++docs_dropped;
      continue;
    }
    docs.push_back(std::move(doc));
  }
  if (bad_lines > 0) {
    std::cerr << "error: " << bad_lines << " malformed line(s) in '"
              << args.input << "', no output written\n";
    return 1;
  }
  if (docs.empty()) {
    throw std::runtime_error("no documents survived preprocessing");
  }

  const Vocabulary vocab = build_vocabulary(docs);
  std::int64_t covered = 0;
  for (std::int64_t c : vocab.counts) covered += c;

  write_corpus_file(args.out, docs, vocab.content_hash());
  write_vocabulary_file(args.vocab_out, vocab);

  std::cerr << "documents: " << docs.size() << " kept, " << docs_dropped
            << " dropped (no surviving sentences)\n";
  std::cerr << "sentences: " << stats.sentences_kept << " kept, "
            << stats.sentences_dropped
            << " dropped by the 4..10 content-word rule\n";
  std::cerr << "stems: " << stats.stems_kept << " total, " << covered
            << " covered by the " << vocab.size() << "-token vocabulary\n";
  std::cerr << "wrote '" << args.out << "' and '" << args.vocab_out << "'\n";
  return 0;
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

struct SynthesizeArgs {
  std::string config;
  std::string singles;
  std::string multis;
  int count = 50;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synthesize(const SynthesizeArgs& args) {
  const CorpusFile singles = read_corpus_file(args.singles);
  const CorpusFile multis = read_corpus_file(args.multis);
  if (singles.vocab_hash && multis.vocab_hash &&
      *singles.vocab_hash != *multis.vocab_hash) {
    throw std::runtime_error(
        "singles and multis corpora carry different vocabulary hashes");
  }
  const std::vector<SyntheticStemmedDocument> synth = synthesize_test_set(
      singles.documents, multis.documents, args.count, args.seed);
  std::optional<std::uint64_t> hash =
      singles.vocab_hash ? singles.vocab_hash : multis.vocab_hash;
  write_synthetic_file(args.out, synth, hash);
  std::cerr << "wrote " << synth.size() << " synthetic documents to '"
            << args.out << "'\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string corpus;
  std::string vocab;
  std::string out;
  std::string method = "seg-noisy";
  double alpha = 0.3;
  int epochs = 100;
  int iterations = 3;
  int hidden = 512;
  int batch_size = 64;
  double dropout = 0.5;
  double lr_initial = 0.001;
  double lr_finetune = 0.0001;
  std::uint64_t seed = 0;
};

void validate_train_args(const TrainArgs& args) {
  std::vector<std::string> problems;
  if (args.alpha < 0.0) problems.push_back("--alpha must be >= 0");
  if (args.epochs < 1) problems.push_back("--epochs must be >= 1");
  if (args.iterations < 0) problems.push_back("--iterations must be >= 0");
  if (args.hidden < 1) problems.push_back("--hidden must be >= 1");
  if (args.batch_size < 1) problems.push_back("--batch-size must be >= 1");
  if (args.dropout < 0.0 || args.dropout >= 1.0) {
    problems.push_back("--dropout must be in [0, 1)");
  }
  if (args.lr_initial <= 0.0) problems.push_back("--lr-initial must be > 0");
  if (args.lr_finetune <= 0.0) problems.push_back("--lr-finetune must be > 0");
  if (!problems.empty()) {
    std::string joined = "invalid configuration:";
    for (const std::string& p : problems) joined += "\n  " + p;
    throw std::runtime_error(joined);
  }
}

int cmd_train(const TrainArgs& args) {
  validate_train_args(args);
  const Vocabulary vocab = read_vocabulary_file(args.vocab);
  const CorpusFile corpus = read_corpus_file(args.corpus);
  check_vocab_hash(vocab.content_hash(), corpus.vocab_hash, "corpus");
  if (corpus.documents.empty()) {
    throw std::runtime_error("corpus '" + args.corpus + "' has no documents");
  }

  const LabelDict labels = LabelDict::from_corpus(corpus.documents);
  if (labels.size() == 0) {
    throw std::runtime_error("corpus '" + args.corpus + "' carries no labels");
  }
  std::vector<Document> docs;
  docs.reserve(corpus.documents.size());
  for (const StemmedDocument& sd : corpus.documents) {
    docs.push_back(encode_document(sd, vocab, labels));
  }

  PipelineConfig cfg;
  cfg.train.hidden = args.hidden;
  cfg.train.dropout = args.dropout;
  cfg.train.epochs_per_iteration = args.epochs;
  cfg.train.lr_initial = args.lr_initial;
  cfg.train.lr_finetune = args.lr_finetune;
  cfg.train.batch_size = args.batch_size;
  cfg.alpha_refine = args.alpha;
  cfg.refinement_iterations = args.iterations;
  cfg.rng_seed = args.seed;

  ScorerModel model =
      args.method == "seg-refine"
          ? train_seg_refine(docs, vocab.size(), labels, cfg, &std::cerr)
          : train_seg_noisy(docs, vocab.size(), labels, cfg, &std::cerr);
  model.vocab_hash = vocab.content_hash();
  save_model(model, args.out);
  std::cerr << "wrote model '" << args.out << "' (vocabulary "
            << model.vocab_size << ", hidden " << model.hidden << ", classes "
            << model.n_classes << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string config;
  std::string model;
  std::string vocab;
  std::string corpus;
  std::string candidates = "all";
  std::string format = "dump";
  double alpha = 0.3;
  std::string out;
};

void write_segments_text(std::ostream& out, const ScorerModel& model,
                         const Document& doc, const Vocabulary& vocab,
                         const DocumentPrediction& pred) {
  const PrefixSums prefix = PrefixSums::build(doc, model.vocab_size);
  const std::streamsize precision = out.precision();
  out.setf(std::ios::fixed);
  out.precision(9);
  out << "# " << doc.id << ' ' << doc.n_sentences() << " sentences, objective "
      << pred.segmentation.objective << "\n";
  for (const LabeledSegment& s : to_segments(pred.segmentation)) {
    const std::vector<double> probs = forward(model, bow(prefix, s.start, s.end));
    const bool is_null = s.label == model.null_index();
    out << s.start << '-' << s.end << '\t'
        << (is_null ? "-" : model.class_names[static_cast<std::size_t>(s.label)])
        << '\t' << probs[static_cast<std::size_t>(s.label)] << '\t';
    for (int i = s.start; i <= s.end; ++i) {
      if (i > s.start) out << " / ";
      const Sentence& sent = doc.sentences[static_cast<std::size_t>(i - 1)];
      for (std::size_t t = 0; t < sent.token_ids.size(); ++t) {
        if (t) out << ' ';
        out << vocab.id_to_token[static_cast<std::size_t>(sent.token_ids[t])];
      }
    }
    out << "\n";
  }
  out.unsetf(std::ios::fixed);
  out.precision(precision);
}

int cmd_segment(const SegmentArgs& args) {
  if (args.alpha < 0.0) throw std::runtime_error("--alpha must be >= 0");
  const ScorerModel model = load_model(args.model);
  const Vocabulary vocab = read_vocabulary_file(args.vocab);
  if (vocab.content_hash() != model.vocab_hash) {
    throw std::runtime_error(
        "model/corpus vocabulary mismatch: model expects vocabulary " +
        corpus_detail::hash_to_hex(model.vocab_hash) + ", '" + args.vocab +
        "' hashes to " +
        corpus_detail::hash_to_hex(vocab.content_hash()));
  }
  const CorpusFile corpus = read_documents(args.corpus);
  check_vocab_hash(model.vocab_hash, corpus.vocab_hash, "corpus");

  const LabelDict labels = dict_from_names(model.class_names);
  std::vector<int> all_classes;
  for (int c = 0; c < model.n_classes; ++c) all_classes.push_back(c);

  OutputTarget target(args.out);
  std::vector<PredictionRecord> records;
  for (const StemmedDocument& sd : corpus.documents) {
    const Document doc = encode_document(sd, vocab, labels);
    std::vector<int> candidates;
    if (args.candidates == "all") {
      candidates = all_classes;
    } else {
      if (doc.labels.empty()) {
        throw std::runtime_error(
            "document '" + doc.id +
            "' has no labels; --candidates doc-labels needs labeled documents");
      }
      candidates = doc.labels;
      candidates.push_back(model.null_index());
    }
    const DocumentPrediction pred = predict(model, doc, candidates, args.alpha);
    if (args.format == "segments") {
      write_segments_text(target.stream(), model, doc, vocab, pred);
    } else {
      records.push_back(to_record(pred, model));
    }
  }
  if (args.format == "dump") {
    write_predictions(target.stream(), records);
  }
  target.finish();
  std::cerr << "segmented " << corpus.documents.size() << " documents\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string config;
  std::string predictions;
  std::string truth;
  std::string task = "segmentation";
  bool per_document = false;
  std::string out;
};

std::unordered_map<std::string, const PredictionRecord*> index_predictions(
    const std::vector<PredictionRecord>& records) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& rec : records) {
    if (!by_id.emplace(rec.doc_id, &rec).second) {
      throw std::runtime_error("duplicate prediction for document '" +
                               rec.doc_id + "'");
    }
  }
  return by_id;
}

// Every truth document needs a prediction and vice versa; report the first
// id that breaks the pairing.
template <typename TruthDocs, typename GetId>
void check_alignment(
    const TruthDocs& truth, GetId get_id,
    const std::unordered_map<std::string, const PredictionRecord*>& by_id) {
  std::unordered_set<std::string> truth_ids;
  for (const auto& doc : truth) {
    const std::string& id = get_id(doc);
    truth_ids.insert(id);
    if (!by_id.count(id)) {
      throw std::runtime_error("no prediction for document '" + id + "'");
    }
  }
  for (const auto& [id, rec] : by_id) {
    if (!truth_ids.count(id)) {
      throw std::runtime_error("prediction for unknown document '" + id + "'");
    }
  }
}

int evaluate_segmentation_task(const EvaluateArgs& args) {
  if (!file_is_synthetic(args.truth)) {
    throw std::runtime_error(
        "segmentation evaluation needs a synthetic set file with "
        "ground-truth boundaries; '" +
        args.truth + "' looks like a plain corpus");
  }
  const SyntheticFile truth = read_synthetic_file(args.truth);
  const std::vector<PredictionRecord> preds =
      read_predictions_file(args.predictions);
  const auto by_id = index_predictions(preds);
  check_alignment(
      truth.documents,
      [](const SyntheticStemmedDocument& d) -> const std::string& {
        return d.document.id;
      },
      by_id);

  // Map label names to dense ids; the null label ("") goes last so it can
  // never collide with a real class.
  std::set<std::string> names;
  for (const auto& syn : truth.documents) {
    names.insert(syn.true_labels.begin(), syn.true_labels.end());
  }
  for (const auto& rec : preds) {
    for (const std::string& name : rec.segment_labels) {
      if (!name.empty()) names.insert(name);
    }
  }
  std::map<std::string, int> name_to_id;
  for (const std::string& name : names) {
    name_to_id.emplace(name, static_cast<int>(name_to_id.size()));
  }
  const int null_id = static_cast<int>(name_to_id.size());

  std::vector<DocSegmentationEval> docs;
  for (const auto& syn : truth.documents) {
    const PredictionRecord& rec = *by_id.at(syn.document.id);
    DocSegmentationEval d;
    d.doc_id = syn.document.id;
    d.n_sentences = static_cast<int>(syn.document.sentences.size());
    if (rec.boundaries.back() != d.n_sentences) {
      throw std::runtime_error("prediction for document '" + syn.document.id +
                               "' does not tile its " +
                               std::to_string(d.n_sentences) + " sentences");
    }
    for (std::size_t s = 0; s + 1 < syn.true_boundaries.size(); ++s) {
      d.observed.push_back({syn.true_boundaries[s] + 1,
                            syn.true_boundaries[s + 1],
                            name_to_id.at(syn.true_labels[s])});
    }
    for (std::size_t s = 0; s + 1 < rec.boundaries.size(); ++s) {
      const std::string& name = rec.segment_labels[s];
      d.predicted.push_back({rec.boundaries[s] + 1, rec.boundaries[s + 1],
                             name.empty() ? null_id : name_to_id.at(name)});
    }
    docs.push_back(std::move(d));
  }

  EvalReport report;
  evaluate_segmentations(docs, args.per_document, report);
  OutputTarget target(args.out);
  target.stream() << report.serialize();
  target.finish();
  return 0;
}

int evaluate_classification_task(const EvaluateArgs& args) {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> observed_names;
  if (file_is_synthetic(args.truth)) {
    const SyntheticFile truth = read_synthetic_file(args.truth);
    for (const auto& syn : truth.documents) {
      ids.push_back(syn.document.id);
      observed_names.push_back(syn.document.labels);
    }
  } else {
    const CorpusFile truth = read_corpus_file(args.truth);
    for (const auto& doc : truth.documents) {
      ids.push_back(doc.id);
      observed_names.push_back(doc.labels);
    }
  }
  if (ids.empty()) {
    throw std::runtime_error("'" + args.truth + "' contains no documents");
  }

  const std::vector<PredictionRecord> preds =
      read_predictions_file(args.predictions);
  const auto by_id = index_predictions(preds);
  check_alignment(
      ids, [](const std::string& id) -> const std::string& { return id; },
      by_id);

  // Class universe: every label the truth mentions plus every class the
  // predictions scored, so extra model classes count as all-negative.
  std::set<std::string> names;
  for (const auto& labels : observed_names) {
    names.insert(labels.begin(), labels.end());
  }
  for (const auto& rec : preds) {
    for (const auto& [name, value] : rec.scores) names.insert(name);
  }
  std::map<std::string, int> name_to_id;
  for (const std::string& name : names) {
    name_to_id.emplace(name, static_cast<int>(name_to_id.size()));
  }
  const int n_classes = static_cast<int>(name_to_id.size());

  std::vector<DocLabelEval> docs;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const PredictionRecord& rec = *by_id.at(ids[i]);
    DocLabelEval d;
    d.doc_id = ids[i];
    for (const std::string& name : observed_names[i]) {
      d.observed.push_back(name_to_id.at(name));
    }
    for (const std::string& name : rec.labels) {
      const auto it = name_to_id.find(name);
      if (it == name_to_id.end()) {
        throw std::runtime_error("prediction for document '" + ids[i] +
                                 "' names unscored class '" + name + "'");
      }
      d.predicted.push_back(it->second);
    }
    d.soft_scores.assign(static_cast<std::size_t>(n_classes), 0.0);
    std::vector<bool> scored(static_cast<std::size_t>(n_classes), false);
    for (const auto& [name, value] : rec.scores) {
      const int id = name_to_id.at(name);
      d.soft_scores[static_cast<std::size_t>(id)] = value;
      scored[static_cast<std::size_t>(id)] = true;
    }
    for (const auto& [name, id] : name_to_id) {
      if (!scored[static_cast<std::size_t>(id)]) {
        throw std::runtime_error("prediction for document '" + ids[i] +
                                 "' lacks a score for class '" + name + "'");
      }
    }
    docs.push_back(std::move(d));
  }

  EvalReport report;
  evaluate_labels(docs, n_classes, args.per_document, report);
  OutputTarget target(args.out);
  target.stream() << report.serialize();
  target.finish();
  return 0;
}

int cmd_evaluate(const EvaluateArgs& args) {
  return args.task == "classification" ? evaluate_classification_task(args)
                                       : evaluate_segmentation_task(args);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distant-supervised segmentation of multilabel documents"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  CLI::App* preprocess =
      app.add_subcommand("preprocess",
                         "tokenize, filter, and stem a raw corpus; emit the "
                         "corpus and vocabulary files");
  preprocess->add_option("--config", pre.config,
                         "flat key = value configuration file; command-line "
                         "flags override it");
  preprocess->add_option("--input", pre.input, "raw corpus, one document per "
                         "line: id<TAB>label1,label2<TAB>text");
  preprocess->add_option("--out", pre.out, "output corpus file");
  preprocess->add_option("--vocab-out", pre.vocab_out,
                         "output vocabulary file");

  SynthesizeArgs syn;
  CLI::App* synthesize = app.add_subcommand(
      "synthesize",
      "concatenate single-label documents into a synthetic multilabel test "
      "set with known boundaries");
  synthesize->add_option("--config", syn.config,
                         "flat key = value configuration file; command-line "
                         "flags override it");
  synthesize->add_option("--singles", syn.singles,
                         "corpus of single-label documents");
  synthesize->add_option("--multis", syn.multis,
                         "corpus whose label sets define admissible "
                         "combinations");
  synthesize->add_option("--count", syn.count, "number of documents to build")
      ->check(CLI::PositiveNumber);
  synthesize->add_option("--seed", syn.seed, "random seed");
  synthesize->add_option("--out", syn.out, "output synthetic set file");

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "train a scorer model");
  train->add_option("--config", tr.config,
                    "flat key = value configuration file; command-line flags "
                    "override it");
  train->add_option("--corpus", tr.corpus, "preprocessed training corpus");
  train->add_option("--vocab", tr.vocab, "vocabulary file");
  train->add_option("--method", tr.method, "training method")
      ->check(CLI::IsMember({"seg-noisy", "seg-refine"}));
  train->add_option("--alpha", tr.alpha,
                    "segment penalty used while refining (seg-refine only)");
  train->add_option("--epochs", tr.epochs, "epochs per training iteration");
  train->add_option("--iterations", tr.iterations,
                    "refinement iterations (seg-refine only)");
  train->add_option("--hidden", tr.hidden, "hidden layer width");
  train->add_option("--batch-size", tr.batch_size, "minibatch size");
  train->add_option("--dropout", tr.dropout, "input dropout rate");
  train->add_option("--lr-initial", tr.lr_initial, "initial learning rate");
  train->add_option("--lr-finetune", tr.lr_finetune,
                    "fine-tuning learning rate");
  train->add_option("--seed", tr.seed, "random seed");
  train->add_option("--out", tr.out, "output model file");

  SegmentArgs seg;
  CLI::App* segment =
      app.add_subcommand("segment", "segment documents with a trained model");
  segment->add_option("--config", seg.config,
                      "flat key = value configuration file; command-line "
                      "flags override it");
  segment->add_option("--model", seg.model, "model file");
  segment->add_option("--vocab", seg.vocab, "vocabulary file");
  segment->add_option("--corpus", seg.corpus, "corpus to segment");
  segment->add_option("--candidates", seg.candidates,
                      "candidate labels per document: every class, or the "
                      "document's own labels plus the null label")
      ->check(CLI::IsMember({"all", "doc-labels"}));
  segment->add_option("--alpha", seg.alpha, "segment penalty");
  segment->add_option("--format", seg.format,
                      "dump: machine-readable predictions; segments: "
                      "annotated text")
      ->check(CLI::IsMember({"dump", "segments"}));
  segment->add_option("--out", seg.out, "output file (default stdout)");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score predictions against ground truth");
  evaluate->add_option("--config", ev.config,
                       "flat key = value configuration file; command-line "
                       "flags override it");
  evaluate->add_option("--predictions", ev.predictions, "predictions dump");
  evaluate->add_option("--truth", ev.truth,
                       "synthetic set file (segmentation) or corpus/synthetic "
                       "file (classification)");
  evaluate->add_option("--task", ev.task, "what to score")
      ->check(CLI::IsMember({"segmentation", "classification"}));
  evaluate->add_flag("--per-document", ev.per_document,
                     "include per-document metric rows");
  evaluate->add_option("--out", ev.out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (preprocess->parsed()) {
      apply_config_file(*preprocess);
      check_required(*preprocess, {"--input", "--out", "--vocab-out"});
      return cmd_preprocess(pre);
    }
    if (synthesize->parsed()) {
      apply_config_file(*synthesize);
      check_required(*synthesize, {"--singles", "--multis", "--out"});
      return cmd_synthesize(syn);
    }
    if (train->parsed()) {
      apply_config_file(*train);
      check_required(*train, {"--corpus", "--vocab", "--out"});
      return cmd_train(tr);
    }
    if (segment->parsed()) {
      apply_config_file(*segment);
      check_required(*segment, {"--model", "--vocab", "--corpus"});
      return cmd_segment(seg);
    }
    if (evaluate->parsed()) {
      apply_config_file(*evaluate);
      check_required(*evaluate, {"--predictions", "--truth"});
      return cmd_evaluate(ev);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
