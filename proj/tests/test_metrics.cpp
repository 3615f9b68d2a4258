#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "opc/error.hpp"
#include "opc/metrics.hpp"

using opc::Errc;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const opc::Error& e) {
    return e.code();
  }
  FAIL("expected an opc::Error");
  return Errc::Io;
}

opc::ConfusionMatrix from_rows(std::vector<std::vector<std::size_t>> rows) {
  opc::ConfusionMatrix cm;
  cm.k = rows.size();
  for (const auto& r : rows) cm.counts.insert(cm.counts.end(), r.begin(), r.end());
  return cm;
}

opc::ConfusionMatrix random_matrix(std::mt19937_64& rng) {
  opc::ConfusionMatrix cm;
  cm.k = 2 + rng() % 6;
  cm.counts.resize(cm.k * cm.k);
  for (auto& c : cm.counts) c = rng() % 3 == 0 ? 0 : rng() % 50;
  cm.counts[0] += 1;
  return cm;
}

}  // namespace

TEST_CASE("confusion tallies") {
  std::vector<int> t{0, 0, 1}, p{0, 1, 1};
  auto cm = opc::confusion(t, p, 2);
  CHECK(cm.counts == std::vector<std::size_t>{1, 1, 0, 1});
  CHECK(cm.total() == 3);

  std::vector<int> same{0, 1, 2, 2};
  auto diag = opc::confusion(same, same, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK((diag.at(i, j) != 0) == (i == j));

  std::vector<int> none;
  auto empty = opc::confusion(none, none, 4);
  CHECK(empty.counts == std::vector<std::size_t>(16, 0));

  std::vector<int> shorter{0};
  CHECK(code_of([&] { opc::confusion(t, shorter, 2); }) == Errc::LengthMismatch);
  std::vector<int> out{0, 0, 2};
  CHECK(code_of([&] { opc::confusion(t, out, 2); }) == Errc::LabelOutOfRange);
  std::vector<int> neg{0, -1, 1};
  CHECK(code_of([&] { opc::confusion(neg, p, 2); }) == Errc::LabelOutOfRange);
}

TEST_CASE("report on the hand-tally matrix") {
  auto r = opc::compute_report(from_rows({{1, 1}, {0, 1}}));
  CHECK(r.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.precision == std::vector<double>{1.0, 0.5});
  CHECK(r.recall == std::vector<double>{0.5, 1.0});
  CHECK(r.support == std::vector<std::size_t>{2, 1});
  CHECK(std::abs(r.weighted_recall - r.accuracy) < 1e-12);

  std::vector<std::string> names{"a", "b"};
  const auto text = opc::render_report(r, names);
  CHECK(text.find("66.67%") != std::string::npos);

  auto j = opc::report_to_json(r, names);
  CHECK(j.at("accuracy").get<double>() == r.accuracy);
  CHECK(j.at("classes").size() == 2);
}

TEST_CASE("report edge cases") {
  auto perfect = opc::compute_report(from_rows({{3, 0}, {0, 2}}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.weighted_precision == 1.0);
  CHECK(perfect.weighted_recall == 1.0);
  CHECK(perfect.weighted_f1 == 1.0);
  for (double v : perfect.f1) CHECK(v == 1.0);
  std::vector<std::string> names{"alpha", "beta"};
  const auto text = opc::render_report(perfect, names);
  CHECK(text.find("100.00%") != std::string::npos);
  CHECK(text.find("%") != std::string::npos);

  // class 1 never predicted
  auto skew = opc::compute_report(from_rows({{4, 0}, {2, 0}}));
  CHECK(skew.precision[1] == 0.0);
  CHECK(skew.recall[1] == 0.0);
  CHECK(skew.f1[1] == 0.0);

  CHECK(code_of([] { opc::compute_report(from_rows({{0, 0}, {0, 0}})); }) == Errc::EmptyMatrix);
}

TEST_CASE("long class names are truncated") {
  auto r = opc::compute_report(from_rows({{1, 0}, {0, 1}}));
  std::vector<std::string> names{"a_family_name_that_runs_far_too_long", "b"};
  const auto text = opc::render_report(r, names);
  CHECK(text.find("a_family_name_that_runs_far_too_long") == std::string::npos);
  CHECK(text.find("...") != std::string::npos);
  CHECK(text.find("a_family_name_th") != std::string::npos);
}

TEST_CASE("weighted recall equals accuracy") {
  std::mt19937_64 rng(100);
  for (int i = 0; i < 200; ++i) {
    auto r = opc::compute_report(random_matrix(rng));
    CHECK(std::abs(r.weighted_recall - r.accuracy) <= 1e-12);
  }
}

TEST_CASE("metrics are bounded and F1 never exceeds the larger of P and R") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 200; ++i) {
    auto r = opc::compute_report(random_matrix(rng));
    for (double v : {r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t c = 0; c < r.f1.size(); ++c) {
      CHECK(r.precision[c] >= 0.0);
      CHECK(r.precision[c] <= 1.0);
      CHECK(r.recall[c] >= 0.0);
      CHECK(r.recall[c] <= 1.0);
      CHECK(r.f1[c] <= std::max(r.precision[c], r.recall[c]) + 1e-15);
    }
  }
}

TEST_CASE("relabelling classes permutes per-class entries only") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 5, n = 1 + rng() % 200;
    std::vector<int> t(n), p(n);
    for (auto& v : t) v = static_cast<int>(rng() % k);
    for (auto& v : p) v = static_cast<int>(rng() % k);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> tp(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
      tp[i] = perm[static_cast<std::size_t>(t[i])];
      pp[i] = perm[static_cast<std::size_t>(p[i])];
    }
    auto a = opc::compute_report(opc::confusion(t, p, k));
    auto b = opc::compute_report(opc::confusion(tp, pp, k));
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.weighted_precision == doctest::Approx(b.weighted_precision).epsilon(1e-12));
    CHECK(a.weighted_recall == doctest::Approx(b.weighted_recall).epsilon(1e-12));
    CHECK(a.weighted_f1 == doctest::Approx(b.weighted_f1).epsilon(1e-12));
    for (std::size_t c = 0; c < k; ++c) {
      const auto q = static_cast<std::size_t>(perm[c]);
      CHECK(a.precision[c] == b.precision[q]);
      CHECK(a.recall[c] == b.recall[q]);
      CHECK(a.f1[c] == b.f1[q]);
      CHECK(a.support[c] == b.support[q]);
    }
  }
}
