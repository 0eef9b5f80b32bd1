#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "lcrprobe/corpus/annotations.hpp"
#include "lcrprobe/corpus/embeddings.hpp"
#include "lcrprobe/corpus/instances.hpp"
#include "lcrprobe/corpus/semeval.hpp"
#include "lcrprobe/corpus/text.hpp"
#include "lcrprobe/corpus/xml.hpp"
#include "lcrprobe/util.hpp"

using namespace lcrprobe;
using namespace lcrprobe::corpus;

namespace {

// Review with one sentence and three explicit opinions, in the Subtask 1
// schema; spans verified against the sentence text below.
const char* kSampleReview = R"(<?xml version="1.0" encoding="UTF-8"?>
<Reviews>
<Review rid="404464">
<sentences>
<sentence id="404464:0">
<text>Thalia is a beautiful restaurant with beautiful people serving you, but the food doesn&apos;t quite match up.</text>
<Opinions>
<Opinion target="people" category="SERVICE#GENERAL" polarity="positive" from="48" to="54"/>
<Opinion target="food" category="FOOD#QUALITY" polarity="negative" from="76" to="80"/>
<Opinion target="Thalia" category="AMBIENCE#GENERAL" polarity="positive" from="0" to="6"/>
</Opinions>
</sentence>
</sentences>
</Review>
</Reviews>
)";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse_semeval materializes reviews, sentences and opinions") {
  auto reviews = parse_semeval(kSampleReview);
  REQUIRE(reviews.size() == 1);
  CHECK(reviews[0].id == "404464");
  REQUIRE(reviews[0].sentences.size() == 1);
  const Sentence& s = reviews[0].sentences[0];
  CHECK(s.id == "404464:0");
  REQUIRE(s.opinions.size() == 3);
  CHECK(s.opinions[0].target == "people");
  CHECK(s.opinions[1].target == "food");
  CHECK(s.opinions[2].target == "Thalia");
  CHECK(s.opinions[1].polarity == Polarity::Negative);
  CHECK(s.opinions[1].category == "FOOD#QUALITY");

  // The (from, to) span covers exactly the target surface.
  CHECK(s.text.substr(s.opinions[1].from, s.opinions[1].to - s.opinions[1].from) == "food");
  CHECK(s.text.substr(s.opinions[2].from, s.opinions[2].to - s.opinions[2].from) == "Thalia");
}

TEST_CASE("empty Opinions element yields a sentence with zero opinions") {
  auto reviews = parse_semeval(R"(<Review rid="1"><sentences>
    <sentence id="1:0"><text>Nothing here.</text><Opinions/></sentence>
    </sentences></Review>)");
  REQUIRE(reviews.size() == 1);
  REQUIRE(reviews[0].sentences.size() == 1);
  CHECK(reviews[0].sentences[0].opinions.empty());
}

TEST_CASE("parse errors carry an element path") {
  CHECK_THROWS_WITH_AS(
      parse_semeval(R"(<Reviews><Review rid="1"><sentences>
        <sentence id="1:0"><text>x</text>
        <Opinions><Opinion target="a" category="C" polarity="positive" from="0"/></Opinions>
        </sentence></sentences></Review></Reviews>)"),
      doctest::Contains("Opinion[0]"), xml::ParseError);

  CHECK_THROWS_AS(parse_semeval("<Reviews><Review rid='1'>"), xml::ParseError);
  CHECK_THROWS_AS(parse_semeval("<Other/>"), xml::ParseError);
}

TEST_CASE("normalize_chars") {
  CHECK(normalize_chars("don’t") == "don't");
  CHECK(normalize_chars("a—b") == "a-b");
  CHECK(normalize_chars("a–b") == "a-b");
  CHECK(normalize_chars("plain text") == "plain text");

  // Idempotent, and same length in codepoints.
  std::string once = normalize_chars("it’s so—so – fine");
  CHECK(normalize_chars(once) == once);
  CHECK(utf8_decode(once).size() == utf8_decode("it’s so—so – fine").size());
}

TEST_CASE("filter_explicit drops NULL targets and empty spans") {
  auto reviews = parse_semeval(R"(<Review rid="1"><sentences>
    <sentence id="1:0"><text>The food was great but who knows why.</text><Opinions>
      <Opinion target="NULL" category="FOOD#QUALITY" polarity="positive" from="0" to="0"/>
      <Opinion target="food" category="FOOD#QUALITY" polarity="positive" from="4" to="8"/>
    </Opinions></sentence></sentences></Review>)");
  filter_explicit(reviews);
  REQUIRE(reviews[0].sentences[0].opinions.size() == 1);
  CHECK(reviews[0].sentences[0].opinions[0].target == "food");

  auto sample = parse_semeval(kSampleReview);
  filter_explicit(sample);
  CHECK(count_opinions(sample) == 3);

  std::vector<Review> empty;
  filter_explicit(empty);
  CHECK(empty.empty());
}

TEST_CASE("fallback tokenizer detaches punctuation and sets spans") {
  auto tokens = fallback_tokenize(std::string_view("Great food."));
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].surface == "Great");
  CHECK(tokens[0].from == 0);
  CHECK(tokens[0].to == 5);
  CHECK(tokens[1].surface == "food");
  CHECK(tokens[1].from == 6);
  CHECK(tokens[1].to == 10);
  CHECK(tokens[2].surface == ".");
  CHECK(tokens[2].from == 10);
  CHECK(tokens[2].to == 11);
  CHECK(tokens[0].lemma == "great");

  auto contraction = fallback_tokenize(std::string_view("doesn't match!"));
  REQUIRE(contraction.size() == 3);
  CHECK(contraction[0].surface == "doesn't");
  CHECK(contraction[2].surface == "!");

  auto wrapped = fallback_tokenize(std::string_view("(good)."));
  REQUIRE(wrapped.size() == 4);
  CHECK(wrapped[0].surface == "(");
  CHECK(wrapped[1].surface == "good");
  CHECK(wrapped[2].surface == ")");
  CHECK(wrapped[3].surface == ".");
}

TEST_CASE("annotation tokens pass through and bounds are checked") {
  SentenceAnnotation ann;
  ann.tokens = {{1, "Great", "great", "JJ", 2, "amod", 0, 5},
                {2, "food", "food", "NN", 0, "root", 6, 10}};
  auto tokens = tokenize_sentence(utf8_decode("Great food"), &ann);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].surface == "Great");
  CHECK(tokens[0].lemma == "great");
  CHECK(tokens[1].from == 6);

  SentenceAnnotation bad;
  bad.tokens = {{1, "ghost", "ghost", "NN", 0, "root", 50, 54}};
  CHECK_THROWS_AS(tokenize_sentence(utf8_decode("short text"), &bad), AlignmentError);
}

TEST_CASE("split_lcr around the sample review") {
  auto reviews = parse_semeval(kSampleReview);
  const Sentence& s = reviews[0].sentences[0];
  auto tokens = fallback_tokenize(utf8_decode(normalize_chars(s.text)));

  // Target at the start of the sentence: empty left context.
  auto thalia = split_lcr(tokens, s.opinions[2]);
  CHECK(thalia.left.empty());
  REQUIRE(thalia.target.size() == 1);
  CHECK(thalia.target[0].surface == "Thalia");
  CHECK(thalia.right.size() == tokens.size() - 1);

  // Mid-sentence target.
  auto food = split_lcr(tokens, s.opinions[1]);
  REQUIRE(food.target.size() == 1);
  CHECK(food.target[0].surface == "food");
  CHECK(food.left.back().surface == "the");
  CHECK(food.right.front().surface.substr(0, 4) == "does");

  // Single-token sentence equal to the target.
  Opinion solo;
  solo.target = "Food";
  solo.from = 0;
  solo.to = 4;
  solo.polarity = Polarity::Positive;
  auto solo_tokens = fallback_tokenize(std::string_view("Food"));
  auto inst = split_lcr(solo_tokens, solo);
  CHECK(inst.left.empty());
  CHECK(inst.target.size() == 1);
  CHECK(inst.right.empty());

  // No overlapping token at all.
  Opinion off;
  off.target = "nothing";
  off.from = 500;
  off.to = 507;
  CHECK_THROWS_AS(split_lcr(tokens, off), AlignmentError);
}

TEST_CASE("build_instances reconstructs sentences and counts classes") {
  auto reviews = parse_semeval(kSampleReview);
  CorpusStats stats;
  auto instances = build_instances(reviews, nullptr, &stats);
  REQUIRE(instances.size() == 3);
  CHECK(stats.instances == 3);
  CHECK(stats.per_class[0] == 2);  // positive
  CHECK(stats.per_class[2] == 1);  // negative
  CHECK(stats.warnings.empty());

  auto sentence_tokens = fallback_tokenize(utf8_decode(normalize_chars(
      reviews[0].sentences[0].text)));
  for (const OpinionInstance& inst : instances) {
    REQUIRE(inst.token_count() == sentence_tokens.size());
    for (std::size_t i = 0; i < inst.token_count(); ++i) {
      CHECK(inst.token(i).surface == sentence_tokens[i].surface);
      CHECK(inst.token(i).index == i);
    }
  }
}

TEST_CASE("annotation store round trip") {
  const std::string path = temp_path("lcrprobe_ann_test.tsv");
  util::write_file(path,
                   "# comment line\n"
                   "1:0\t1\tGreat\tgreat\tJJ\t2\tamod\t0\t5\n"
                   "1:0\t2\tfood\tfood\tNN\t0\troot\t6\t10\n");
  auto store = AnnotationStore::load(path);
  CHECK(store.sentence_count() == 1);
  const SentenceAnnotation* ann = store.find("1:0");
  REQUIRE(ann != nullptr);
  REQUIRE(ann->tokens.size() == 2);
  CHECK(ann->tokens[0].pos == "JJ");
  CHECK(ann->tokens[1].head == 0);
  CHECK(store.find("9:9") == nullptr);
  std::remove(path.c_str());

  const std::string bad = temp_path("lcrprobe_ann_bad.tsv");
  util::write_file(bad, "1:0\t1\tonly\tfour\tfields\n");
  CHECK_THROWS(AnnotationStore::load(bad));
  std::remove(bad.c_str());
}

TEST_CASE("embedding lookup: known words, OOV caching, OOV statistics") {
  const std::string path = temp_path("lcrprobe_emb_test.txt");
  util::write_file(path, "good 0.25 -0.5 1\nbad -1 0.125 2\n");
  auto table = EmbeddingTable::load(path, 7);
  std::remove(path.c_str());

  CHECK(table.dimension() == 3);
  CHECK(table.known("good"));
  CHECK(table.known("GOOD"));  // lookup key is the lowercased lemma
  CHECK(table.lookup("good") == std::vector<double>{0.25, -0.5, 1.0});

  const auto& first = table.lookup("zonkers");
  const auto& second = table.lookup("zonkers");
  CHECK(first == second);
  CHECK(&first == &second);
  CHECK(table.oov_count() == 1);

  // Per-coordinate std of many distinct OOV words approaches 0.052.
  double m1 = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (int w = 0; w < 10000; ++w) {
    const auto& vec = table.lookup("oovword" + std::to_string(w));
    for (double v : vec) {
      m1 += v;
      m2 += v * v;
      ++n;
    }
  }
  m1 /= static_cast<double>(n);
  const double stddev = std::sqrt(m2 / static_cast<double>(n) - m1 * m1);
  CHECK(stddev == doctest::Approx(0.052).epsilon(0.05));
}

TEST_CASE("embedding table enforces row widths") {
  const std::string path = temp_path("lcrprobe_emb_badrow.txt");
  util::write_file(path, "good 1 2 3\nbad 1 2\n");
  CHECK_THROWS(EmbeddingTable::load(path, 7));
  std::remove(path.c_str());
}
