#include "docclass/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "docclass/errors.hpp"
#include "docclass/random.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace docclass;

namespace {

std::vector<Label> labels_of(const std::string& codes) {
  std::vector<Label> out;
  for (char c : codes) out.push_back(parse_label(std::string(1, c)));
  return out;
}

}  // namespace

TEST_CASE("micro and macro F1 match the hand-tallied example") {
  const auto gold = labels_of("AABC");
  const auto pred = labels_of("ABBB");
  // TP=2, FP=2, FN=2 -> micro = 0.5
  CHECK(micro_f1(gold, pred) == doctest::Approx(0.5).epsilon(1e-12));
  // per-class F1: A=2/3, B=1/2, C..H=0 -> macro = (2/3 + 1/2)/8
  CHECK(macro_f1(gold, pred) == doctest::Approx(7.0 / 48.0).epsilon(1e-12));
  CHECK(macro_f1(gold, pred) == doctest::Approx(0.1458).epsilon(1e-3));
}

TEST_CASE("perfect prediction scores 1.0 on both metrics") {
  const auto gold = labels_of("ABCDEFGH");
  CHECK(micro_f1(gold, gold) == 1.0);
  CHECK(macro_f1(gold, gold) == 1.0);
}

TEST_CASE("single-class corpora expose the macro zero-support convention") {
  const auto gold = labels_of("AAAA");
  CHECK(micro_f1(gold, gold) == 1.0);
  CHECK(macro_f1(gold, gold) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("micro_f1 equals accuracy exactly on 1000 random instances") {
  Rng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<Label> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(all_labels()[rng.below(kNumClasses)]);
      pred.push_back(all_labels()[rng.below(kNumClasses)]);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (gold[i] == pred[i]) ++correct;
    }
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(n);
    CHECK(micro_f1(gold, pred) == accuracy);  // exact, not approximate
  }
}

TEST_CASE("micro_f1 is invariant under consistent label permutation") {
  Rng rng(405);
  std::array<Label, kNumClasses> perm = all_labels();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Label> gold, pred;
    for (int i = 0; i < 60; ++i) {
      gold.push_back(all_labels()[rng.below(kNumClasses)]);
      pred.push_back(all_labels()[rng.below(kNumClasses)]);
    }
    std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5, 6, 7};
    rng.shuffle(order);
    for (int c = 0; c < kNumClasses; ++c) perm[c] = all_labels()[order[c]];
    std::vector<Label> gold2, pred2;
    for (Label l : gold) gold2.push_back(perm[static_cast<int>(l)]);
    for (Label l : pred) pred2.push_back(perm[static_cast<int>(l)]);
    CHECK(micro_f1(gold, pred) == micro_f1(gold2, pred2));
  }
}

TEST_CASE("metrics reject malformed input") {
  CHECK_THROWS_AS(micro_f1(labels_of("AB"), labels_of("A")), Error);
  CHECK_THROWS_AS(micro_f1(labels_of(""), labels_of("")), Error);
  CHECK_THROWS_AS(macro_f1(labels_of("A"), labels_of("")), Error);
  CHECK_THROWS_AS(confusion_matrix(labels_of("A"), labels_of("")), Error);
}

TEST_CASE("confusion matrix counts gold rows against predicted columns") {
  const ConfusionMatrix m = confusion_matrix(labels_of("A"), labels_of("B"));
  CHECK(m(0, 1) == 1);
  CHECK(m.sum() == 1);

  const auto gold = labels_of("AABC");
  const auto pred = labels_of("ABBB");
  const ConfusionMatrix m2 = confusion_matrix(gold, pred);
  CHECK(m2(0, 0) == 1);  // A -> A
  CHECK(m2(0, 1) == 1);  // A -> B
  CHECK(m2(1, 1) == 1);  // B -> B
  CHECK(m2(2, 1) == 1);  // C -> B
  CHECK(m2.sum() == 4);
  // row sums equal gold class counts
  CHECK(m2.row(0).sum() == 2);
  CHECK(m2.row(1).sum() == 1);
  CHECK(m2.row(2).sum() == 1);
  // diagonal identity
  const ConfusionMatrix diag = confusion_matrix(gold, gold);
  CHECK(diag.trace() == 4);
  CHECK(diag.sum() == 4);
}

TEST_CASE("make_report ties the fields together") {
  const EvalReport report = make_report(labels_of("AABC"), labels_of("ABBB"));
  CHECK(report.n == 4);
  CHECK(report.micro_f1 == report.accuracy);
  CHECK(report.confusion.sum() == report.n);
  CHECK(static_cast<double>(report.confusion.trace()) / report.n ==
        report.accuracy);
  const nlohmann::json j = report_to_json(report);
  CHECK(j.at("n") == 4);
  CHECK(j.at("micro_f1") == report.micro_f1);
  CHECK(j.at("macro_f1") == report.macro_f1);
  CHECK(j.at("confusion").size() == kNumClasses);
  CHECK(j.at("confusion")[0].size() == kNumClasses);
}

TEST_CASE("confusion CSV has A..H headers and one row per gold class") {
  ConfusionMatrix m = ConfusionMatrix::Zero();
  m(0, 1) = 3;
  std::ostringstream out;
  write_confusion_csv(m, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "gold\\pred,A,B,C,D,E,F,G,H");
  std::getline(in, line);
  CHECK(line == "A,0,3,0,0,0,0,0,0");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == kNumClasses);
}

TEST_CASE("stratified folds partition the corpus and balance classes") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 100, .seed = 81});
  const FoldPlan plan = stratified_kfold(corpus, 10, 99);
  REQUIRE(plan.assignments.size() == corpus.size());
  std::vector<int> fold_sizes(10, 0);
  std::map<std::pair<Label, int>, int> class_fold;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const int f = plan.assignments[i];
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    ++fold_sizes[f];
    ++class_fold[{*corpus.documents[i].label, f}];
  }
  const auto [min_it, max_it] =
      std::minmax_element(fold_sizes.begin(), fold_sizes.end());
  CHECK(*max_it - *min_it <= 1);
  for (Label cls : all_labels()) {
    int lo = std::numeric_limits<int>::max(), hi = 0;
    for (int f = 0; f < 10; ++f) {
      const int count = class_fold.count({cls, f}) ? class_fold[{cls, f}] : 0;
      lo = std::min(lo, count);
      hi = std::max(hi, count);
    }
    CHECK(hi - lo <= 1);  // per-class stratification slack
  }
}

TEST_CASE("a class with fewer members than folds lands in distinct folds") {
  Corpus corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.documents.push_back({"a" + std::to_string(i), "x", Label::A, false});
  }
  for (int i = 0; i < 3; ++i) {
    corpus.documents.push_back({"b" + std::to_string(i), "y", Label::B, false});
  }
  const FoldPlan plan = stratified_kfold(corpus, 10, 7);
  std::set<int> b_folds;
  for (std::size_t i = 30; i < corpus.size(); ++i) {
    b_folds.insert(plan.assignments[i]);
  }
  CHECK(b_folds.size() == 3);
}

TEST_CASE("fold plans are deterministic per seed") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 80, .seed = 82});
  CHECK(stratified_kfold(corpus, 8, 1).assignments ==
        stratified_kfold(corpus, 8, 1).assignments);
  CHECK(stratified_kfold(corpus, 8, 1).assignments !=
        stratified_kfold(corpus, 8, 2).assignments);
  CHECK(plain_kfold(corpus, 8, 3).assignments ==
        plain_kfold(corpus, 8, 3).assignments);
}

TEST_CASE("plain folds also partition with balanced sizes") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 53, .seed = 83});
  const FoldPlan plan = plain_kfold(corpus, 7, 5);
  std::vector<int> sizes(7, 0);
  for (int f : plan.assignments) {
    REQUIRE(f >= 0);
    REQUIRE(f < 7);
    ++sizes[f];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
}

TEST_CASE("fold construction rejects bad arguments") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 24, .seed = 84});
  CHECK_THROWS_AS(stratified_kfold(corpus, 1, 0), Error);
  CHECK_THROWS_AS(stratified_kfold(corpus, 25, 0), Error);
  Corpus unlabeled = corpus;
  unlabeled.documents[3].label.reset();
  CHECK_THROWS_WITH_AS(stratified_kfold(unlabeled, 4, 0),
                       doctest::Contains(unlabeled.documents[3].id.c_str()), Error);
}

TEST_CASE("cross validation on separable data reaches micro-F1 1.0") {
  const Corpus corpus = testsupport::make_synthetic(
      {.n_docs = 160, .noise_prob = 0.0, .seed = 85});
  CvOptions options;
  options.k = 4;
  options.fold_seed = 5;
  const CvResult result =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, options);
  REQUIRE(result.folds.size() == 4);
  CHECK(result.mean_micro_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.stddev_micro_f1 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("random labels score at chance level") {
  // texts carry no class signal; labels are balanced by construction
  Corpus corpus = testsupport::make_synthetic({.n_docs = 400, .seed = 86});
  Rng rng(55);
  for (Document& doc : corpus.documents) {
    doc.label = all_labels()[rng.below(kNumClasses)];
  }
  CvOptions options;
  options.k = 5;
  options.fold_seed = 6;
  options.stratified = false;
  const CvResult result =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, options);
  CHECK(result.mean_micro_f1 > 0.125 - 0.05);
  CHECK(result.mean_micro_f1 < 0.125 + 0.05);
}

TEST_CASE("cv mean and stddev agree with the per-fold reports") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 96, .seed = 87});
  CvOptions options;
  options.k = 6;
  options.fold_seed = 1;
  const CvResult result =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, options);
  double sum = 0.0;
  for (const EvalReport& r : result.folds) sum += r.micro_f1;
  const double mean = sum / 6.0;
  CHECK(result.mean_micro_f1 == doctest::Approx(mean).epsilon(1e-12));
  double sq = 0.0;
  for (const EvalReport& r : result.folds) {
    sq += (r.micro_f1 - mean) * (r.micro_f1 - mean);
  }
  CHECK(result.stddev_micro_f1 ==
        doctest::Approx(std::sqrt(sq / 5.0)).epsilon(1e-12));
  const nlohmann::json j = cv_to_json(result);
  CHECK(j.at("folds").size() == 6);
  CHECK(j.at("k") == 6);
  CHECK(j.at("mean_micro_f1") == result.mean_micro_f1);
  CHECK(j.at("stddev_micro_f1") == result.stddev_micro_f1);
}

TEST_CASE("cv results are independent of the thread count") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 80, .seed = 88});
  CvOptions serial;
  serial.k = 4;
  serial.fold_seed = 9;
  serial.threads = 1;
  CvOptions parallel = serial;
  parallel.threads = 4;
  const CvResult a =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, serial);
  const CvResult b =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, parallel);
  CHECK(cv_to_json(a).dump() == cv_to_json(b).dump());
}

TEST_CASE("per-fold vocabularies never contain held-out-only terms") {
  // every document carries a unique token; fold i's vocabulary must not
  // know the tokens of fold i's documents
  Corpus corpus = testsupport::make_synthetic({.n_docs = 64, .seed = 89});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    corpus.documents[i].text += " uniq" + std::to_string(i);
  }
  CvOptions options;
  options.k = 4;
  options.fold_seed = 11;
  std::vector<int> fold_of(corpus.size());
  bool audited = false;
  options.fold_observer = [&](int fold, const EnsembleModel& model,
                              const EvalReport&) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const std::string uniq = "uniq" + std::to_string(i);
      const bool held_out = fold_of[i] == fold;
      const std::int32_t id = model.members[0].vocab.find(uniq);
      if (held_out) {
        CHECK(id == -1);
      } else {
        CHECK(id >= 0);
      }
    }
    audited = true;
  };
  const FoldPlan plan = stratified_kfold(corpus, 4, 11);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    fold_of[i] = plan.assignments[i];
  }
  cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, options);
  CHECK(audited);
}

TEST_CASE("leave-one-out sized cv still runs") {
  const Corpus corpus = testsupport::make_synthetic({.n_docs = 16, .seed = 90});
  CvOptions options;
  options.k = 16;
  options.fold_seed = 2;
  const CvResult result =
      cross_validate(corpus, {word_view(1, 1)}, SvmParams{}, options);
  CHECK(result.folds.size() == 16);
  for (const EvalReport& r : result.folds) CHECK(r.n == 1);
}

TEST_CASE("cross_validate rejects unlabeled and pseudo-labeled documents") {
  Corpus corpus = testsupport::make_synthetic({.n_docs = 24, .seed = 91});
  CvOptions options;
  options.k = 3;
  Corpus unlabeled = corpus;
  unlabeled.documents[5].label.reset();
  CHECK_THROWS_WITH_AS(
      cross_validate(unlabeled, {word_view(1, 1)}, SvmParams{}, options),
      doctest::Contains(unlabeled.documents[5].id.c_str()), Error);
  Corpus pseudo = corpus;
  pseudo.documents[5].pseudo_labeled = true;
  CHECK_THROWS_WITH_AS(
      cross_validate(pseudo, {word_view(1, 1)}, SvmParams{}, options),
      doctest::Contains("pseudo-labeled"), Error);
}

TEST_CASE("evaluate_model scores a trained model on gold labels") {
  const Corpus corpus = testsupport::make_synthetic(
      {.n_docs = 80, .noise_prob = 0.0, .seed = 92});
  const EnsembleModel model =
      train_ensemble(corpus, {word_view(1, 1)}, SvmParams{});
  const EvalReport report = evaluate_model(model, corpus);
  CHECK(report.micro_f1 == 1.0);  // training set of separable data
  CHECK(report.n == 80);
  Corpus missing = corpus;
  missing.documents[0].label.reset();
  CHECK_THROWS_WITH_AS(evaluate_model(model, missing),
                       doctest::Contains(missing.documents[0].id.c_str()), Error);
}
