#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "creditseg/corpus.hpp"
#include "creditseg/stopwords.hpp"

using namespace creditseg;

namespace {

// Unique temp path per test file run; tests clean up after themselves.
std::string tmp_path(const char* name) {
  return std::string("corpus_test_") + name + ".tmp";
}

StemmedDocument make_doc(std::string id, std::vector<std::string> labels,
                         std::vector<std::vector<std::string>> sents) {
  StemmedDocument d;
  d.id = std::move(id);
  d.labels = std::move(labels);
  d.sentences = std::move(sents);
  return d;
}

}  // namespace

TEST_CASE("tokenize lowercases, splits and drops pure numbers") {
  CHECK(tokenize("The CAT-dog runs 42 fast3 99") ==
        std::vector<std::string>{"the", "cat", "dog", "runs", "fast3"});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("don't") == std::vector<std::string>{"don", "t"});
  CHECK(tokenize("1 22 333") == std::vector<std::string>{});
}

TEST_CASE("stop word set covers tokenizer fragments") {
  const auto stops = default_stopword_set();
  CHECK(stops.count("the") == 1);
  CHECK(stops.count("isn") == 1);  // from "isn't"
  CHECK(stops.count("t") == 1);
  CHECK(stops.count("committee") == 0);
}

TEST_CASE("preprocess_sentence applies the full chain") {
  const auto stops = default_stopword_set();

  SECTION("stems survivors after removing stop words") {
    auto r = preprocess_sentence(
        "the falling oscillators plastered our generalizations hopping", stops);
    REQUIRE(r.has_value());
    CHECK(*r == std::vector<std::string>{"fall", "oscil", "plaster", "gener",
                                         "hop"});
  }
  SECTION("rejects sentences shorter than 4 content words") {
    CHECK_FALSE(preprocess_sentence("the cat sat on a mat", stops).has_value());
    CHECK_FALSE(preprocess_sentence("a the of is", stops).has_value());
    CHECK(preprocess_sentence("cat sat mat flat", stops).has_value());
  }
  SECTION("rejects sentences longer than 10 content words") {
    CHECK_FALSE(preprocess_sentence(
                    "alpha beta gamma delta epsilon zeta eta theta iota "
                    "kappa lambda",
                    stops)
                    .has_value());
    CHECK(preprocess_sentence("alpha beta gamma delta epsilon zeta eta theta "
                              "iota kappa",
                              stops)
              .has_value());
  }
}

TEST_CASE("preprocessing already-stemmed safe tokens is a fixed point") {
  const auto stops = default_stopword_set();
  auto first = preprocess_sentence("falling oscillators plastered hopping", stops);
  REQUIRE(first.has_value());
  std::string joined;
  for (const auto& t : *first) joined += t + " ";
  auto second = preprocess_sentence(joined, stops);
  REQUIRE(second.has_value());
  CHECK(*second == *first);
}

TEST_CASE("split_raw_sentences") {
  CHECK(split_raw_sentences("One ends here. Two ends here! Three?") ==
        std::vector<std::string>{"One ends here", "Two ends here", "Three"});
  CHECK(split_raw_sentences("Trailing text without a period") ==
        std::vector<std::string>{"Trailing text without a period"});
  CHECK(split_raw_sentences("Ellipsis... and more..") ==
        std::vector<std::string>{"Ellipsis", "and more"});
  const std::string with_sep = std::string("first part") + kSentenceSep +
                               " second part " + kSentenceSep + "third";
  CHECK(split_raw_sentences(with_sep) ==
        std::vector<std::string>{"first part", "second part", "third"});
}

TEST_CASE("build_vocabulary keeps tokens seen at least 4 times") {
  std::vector<StemmedDocument> corpus;
  corpus.push_back(make_doc("d1", {"x"},
                            {{"zeta", "alpha", "mid", "alpha"},
                             {"zeta", "alpha", "mid", "rare"}}));
  corpus.push_back(make_doc("d2", {"y"},
                            {{"zeta", "alpha", "mid", "zeta"},
                             {"mid", "rare", "rare"}}));
  const Vocabulary vocab = build_vocabulary(corpus);
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.id_to_token == std::vector<std::string>{"alpha", "mid", "zeta"});
  CHECK(vocab.id_of("alpha") == 0);
  CHECK(vocab.id_of("mid") == 1);
  CHECK(vocab.id_of("zeta") == 2);
  CHECK(vocab.id_of("rare") == -1);  // only 3 occurrences
  CHECK(vocab.counts == std::vector<std::int64_t>{4, 4, 4});
}

TEST_CASE("build_vocabulary rejects a corpus with no frequent tokens") {
  std::vector<StemmedDocument> corpus;
  corpus.push_back(make_doc("d1", {"x"}, {{"one", "two", "three", "four"}}));
  CHECK_THROWS_AS(build_vocabulary(corpus), std::runtime_error);
}

TEST_CASE("encode_document maps stems and keeps pruned sentences") {
  std::vector<StemmedDocument> corpus;
  corpus.push_back(make_doc(
      "d1", {"spam", "eggs"},
      {{"alpha", "alpha", "beta", "alpha"}, {"beta", "beta", "alpha", "beta"}}));
  const Vocabulary vocab = build_vocabulary(corpus);
  const LabelDict dict = LabelDict::from_corpus(corpus);
  REQUIRE(dict.size() == 2);
  CHECK(dict.names == std::vector<std::string>{"eggs", "spam"});

  StemmedDocument sd = make_doc(
      "q", {"spam"}, {{"alpha", "unknown", "beta"}, {"unknown", "unknown"}});
  const Document doc = encode_document(sd, vocab, dict);
  REQUIRE(doc.n_sentences() == 2);
  CHECK(doc.sentences[0].token_ids == std::vector<int>{0, 1});
  CHECK(doc.sentences[1].token_ids.empty());  // position preserved
  CHECK(doc.labels == std::vector<int>{1});

  StemmedDocument bad = make_doc("b", {"nope"}, {{"alpha"}});
  CHECK_THROWS_AS(encode_document(bad, vocab, dict), std::invalid_argument);
  StemmedDocument empty = make_doc("e", {"spam"}, {});
  CHECK_THROWS_AS(encode_document(empty, vocab, dict), std::invalid_argument);
}

TEST_CASE("prefix sums and bag-of-words ranges") {
  Document doc;
  doc.id = "d";
  doc.sentences.resize(3);
  doc.sentences[0].token_ids = {0, 0, 1};
  doc.sentences[1].token_ids = {1};
  doc.sentences[2].token_ids = {};
  const PrefixSums prefix = PrefixSums::build(doc, 2);

  SECTION("counts accumulate per sentence") {
    CHECK(prefix.count(0, 0) == 0);
    CHECK(prefix.count(1, 0) == 2);
    CHECK(prefix.count(1, 1) == 1);
    CHECK(prefix.count(2, 1) == 2);
    CHECK(prefix.count(3, 0) == 2);
  }
  SECTION("bow normalizes by the euclidean norm") {
    const BowVector whole = bow(prefix, 1, 3);
    CHECK(whole[0] == Catch::Approx(2.0 / std::sqrt(8.0)));
    CHECK(whole[1] == Catch::Approx(2.0 / std::sqrt(8.0)));
    const BowVector first = bow(prefix, 1, 1);
    CHECK(first[0] == Catch::Approx(2.0 / std::sqrt(5.0)));
    CHECK(first[1] == Catch::Approx(1.0 / std::sqrt(5.0)));
    const BowVector tail = bow(prefix, 2, 3);
    CHECK(tail[0] == 0.0);
    CHECK(tail[1] == 1.0);
  }
  SECTION("an all-pruned range stays the zero vector") {
    const BowVector empty = bow(prefix, 3, 3);
    CHECK(empty == BowVector{0.0, 0.0});
  }
  SECTION("bad ranges throw") {
    CHECK_THROWS_AS(bow(prefix, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(bow(prefix, 2, 1), std::out_of_range);
    CHECK_THROWS_AS(bow(prefix, 1, 4), std::out_of_range);
  }
}

TEST_CASE("synthesize_test_set stitches admissible combinations") {
  std::vector<StemmedDocument> singles;
  singles.push_back(make_doc("sa", {"a"}, {{"w1", "w2"}, {"w3", "w4"}}));
  singles.push_back(make_doc("sb", {"b"}, {{"w5", "w6"}}));
  singles.push_back(make_doc("sc", {"c"}, {{"w7"}, {"w8"}, {"w9"}}));
  std::vector<StemmedDocument> multis;
  multis.push_back(make_doc("m1", {"a", "b"}, {{"x"}}));
  multis.push_back(make_doc("m2", {"b", "c"}, {{"x"}}));

  const auto synth = synthesize_test_set(singles, multis, 20, 11);
  REQUIRE(synth.size() == 20);
  for (const auto& syn : synth) {
    const std::size_t k = syn.true_labels.size();
    REQUIRE((k == 2 || k == 3));
    // only {a,b} and {b,c} are admissible, and both have two labels
    CHECK(k == 2);
    CHECK(syn.document.labels.size() == 2);
    CHECK((syn.document.labels == std::vector<std::string>{"a", "b"} ||
           syn.document.labels == std::vector<std::string>{"b", "c"}));
    CHECK(syn.true_labels[0] != syn.true_labels[1]);
    REQUIRE(syn.true_boundaries.size() == k + 1);
    CHECK(syn.true_boundaries.front() == 0);
    CHECK(syn.true_boundaries.back() ==
          static_cast<int>(syn.document.sentences.size()));
    CHECK(syn.source_ids.size() == k);
  }

  SECTION("deterministic per seed") {
    const auto again = synthesize_test_set(singles, multis, 20, 11);
    REQUIRE(again.size() == synth.size());
    for (std::size_t i = 0; i < synth.size(); ++i) {
      CHECK(again[i].source_ids == synth[i].source_ids);
      CHECK(again[i].true_boundaries == synth[i].true_boundaries);
    }
  }
  SECTION("gives up when no combination is admissible") {
    std::vector<StemmedDocument> odd_multis;
    odd_multis.push_back(make_doc("m", {"c", "d"}, {{"x"}}));
    std::vector<StemmedDocument> ab_singles(singles.begin(), singles.begin() + 2);
    CHECK_THROWS_AS(synthesize_test_set(ab_singles, odd_multis, 1, 3),
                    std::runtime_error);
  }
  SECTION("requires both document kinds") {
    CHECK_THROWS_AS(synthesize_test_set({}, multis, 1, 3), std::runtime_error);
    CHECK_THROWS_AS(synthesize_test_set(singles, {}, 1, 3), std::runtime_error);
  }
}

TEST_CASE("encode_synthetic carries the true segmentation over") {
  std::vector<StemmedDocument> corpus;
  corpus.push_back(make_doc("d", {"a", "b"},
                            {{"alpha", "alpha", "alpha", "alpha"},
                             {"beta", "beta", "beta", "beta"}}));
  const Vocabulary vocab = build_vocabulary(corpus);
  const LabelDict dict = LabelDict::from_corpus(corpus);

  SyntheticStemmedDocument syn;
  syn.document = corpus[0];
  syn.true_boundaries = {0, 1, 2};
  syn.true_labels = {"a", "b"};
  syn.source_ids = {"s1", "s2"};
  const SyntheticDocument enc = encode_synthetic(syn, vocab, dict);
  CHECK(enc.true_segmentation.boundaries == std::vector<int>{0, 1, 2});
  CHECK(enc.true_segmentation.labels == std::vector<int>{0, 1});
  CHECK(enc.source_ids == std::vector<std::string>{"s1", "s2"});
}

TEST_CASE("split_train_test is a deterministic 80/20 split") {
  std::vector<StemmedDocument> docs;
  for (int i = 0; i < 10; ++i) {
    docs.push_back(make_doc("d" + std::to_string(i), {"x"}, {{"w"}}));
  }
  const auto [train, test] = split_train_test(docs, 5);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  std::set<std::string> seen;
  for (const auto& d : train) seen.insert(d.id);
  for (const auto& d : test) seen.insert(d.id);
  CHECK(seen.size() == 10);

  const auto [train2, test2] = split_train_test(docs, 5);
  for (std::size_t i = 0; i < test.size(); ++i) CHECK(test2[i].id == test[i].id);

  std::vector<StemmedDocument> few(docs.begin(), docs.begin() + 4);
  CHECK_THROWS_AS(split_train_test(few, 5), std::invalid_argument);
}

TEST_CASE("corpus file round trip") {
  std::vector<StemmedDocument> docs;
  docs.push_back(make_doc("doc1", {"comedy", "drama"},
                          {{"fall", "hop"}, {"gener", "oscil", "plaster"}}));
  docs.push_back(make_doc("doc2", {}, {{"fall", "fall", "fall", "fall"}}));
  const std::string path = tmp_path("roundtrip");
  write_corpus_file(path, docs, 0x0123456789abcdefULL);

  const CorpusFile back = read_corpus_file(path);
  REQUIRE(back.documents.size() == 2);
  REQUIRE(back.vocab_hash.has_value());
  CHECK(*back.vocab_hash == 0x0123456789abcdefULL);
  CHECK(back.documents[0].id == "doc1");
  CHECK(back.documents[0].labels ==
        std::vector<std::string>{"comedy", "drama"});
  CHECK(back.documents[0].sentences ==
        std::vector<std::vector<std::string>>{{"fall", "hop"},
                                              {"gener", "oscil", "plaster"}});
  CHECK(back.documents[1].labels.empty());
  std::remove(path.c_str());
}

TEST_CASE("corpus file rejects malformed lines") {
  const std::string path = tmp_path("badcorpus");
  {
    std::ofstream out(path);
    out << "only_two_fields\tcomedy\n";
  }
  CHECK_THROWS_WITH(read_corpus_file(path),
                    Catch::Matchers::ContainsSubstring("line 1"));
  {
    std::ofstream out(path);
    out << "d1\tcomedy\tok tokens here\x1f\x1fmore\n";
  }
  CHECK_THROWS_WITH(read_corpus_file(path),
                    Catch::Matchers::ContainsSubstring("empty sentence"));
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_corpus_file("no_such_file.tsv"), std::runtime_error);
}

TEST_CASE("synthetic file round trip") {
  std::vector<SyntheticStemmedDocument> docs(1);
  docs[0].document = make_doc("syn0", {"a", "b"},
                              {{"fall"}, {"hop"}, {"gener"}});
  docs[0].true_boundaries = {0, 2, 3};
  docs[0].true_labels = {"a", "b"};
  docs[0].source_ids = {"s9", "s4"};
  const std::string path = tmp_path("synth");
  write_synthetic_file(path, docs);

  const SyntheticFile back = read_synthetic_file(path);
  REQUIRE(back.documents.size() == 1);
  CHECK_FALSE(back.vocab_hash.has_value());
  CHECK(back.documents[0].true_boundaries == std::vector<int>{0, 2, 3});
  CHECK(back.documents[0].true_labels == std::vector<std::string>{"a", "b"});
  CHECK(back.documents[0].source_ids == std::vector<std::string>{"s9", "s4"});
  std::remove(path.c_str());
}

TEST_CASE("synthetic file validates the segmentation field") {
  const std::string path = tmp_path("badsynth");
  {
    std::ofstream out(path);
    out << "s0\ta,b\tw1 w2\x1fw3\t0,1|a\tsrc\n";  // boundary list too short
  }
  CHECK_THROWS_WITH(read_synthetic_file(path),
                    Catch::Matchers::ContainsSubstring("tile"));
  std::remove(path.c_str());
}

TEST_CASE("vocabulary file round trip and hash stability") {
  std::vector<StemmedDocument> corpus;
  corpus.push_back(make_doc(
      "d", {"x"},
      {{"alpha", "beta", "alpha", "beta"}, {"alpha", "beta", "alpha", "beta"}}));
  const Vocabulary vocab = build_vocabulary(corpus);
  const std::string path = tmp_path("vocab");
  write_vocabulary_file(path, vocab);
  const Vocabulary back = read_vocabulary_file(path);
  CHECK(back.id_to_token == vocab.id_to_token);
  CHECK(back.counts == vocab.counts);
  CHECK(back.content_hash() == vocab.content_hash());
  std::remove(path.c_str());

  Vocabulary other = vocab;
  other.counts[0] += 1;
  CHECK(other.content_hash() != vocab.content_hash());
}

TEST_CASE("vocabulary file rejects gaps and duplicates") {
  const std::string path = tmp_path("badvocab");
  {
    std::ofstream out(path);
    out << "alpha\t0\t5\nbeta\t2\t4\n";
  }
  CHECK_THROWS_WITH(read_vocabulary_file(path),
                    Catch::Matchers::ContainsSubstring("contiguous"));
  {
    std::ofstream out(path);
    out << "alpha\t0\t5\nalpha\t1\t4\n";
  }
  CHECK_THROWS_WITH(read_vocabulary_file(path),
                    Catch::Matchers::ContainsSubstring("duplicate"));
  std::remove(path.c_str());
}

TEST_CASE("preprocess_document assembles a stemmed document") {
  const auto stops = default_stopword_set();
  RawDocument raw;
  raw.id = "r1";
  raw.labels = {"drama", "comedy", "drama"};
  raw.text = "The falling oscillators plastered generalizations. Short one. "
             "Controlled hopping cats plastered everything nicely!";
  const StemmedDocument sd = preprocess_document(raw, stops);
  CHECK(sd.id == "r1");
  CHECK(sd.labels == std::vector<std::string>{"comedy", "drama"});
  REQUIRE(sd.sentences.size() == 2);  // "Short one." is rejected
  CHECK(sd.sentences[0] ==
        std::vector<std::string>{"fall", "oscil", "plaster", "gener"});
  CHECK(sd.sentences[1] ==
        std::vector<std::string>{"control", "hop", "cat", "plaster", "everyth",
                                 "nice"});
}
