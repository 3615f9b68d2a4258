#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "opc/corpus.hpp"
#include "opc/error.hpp"

namespace fs = std::filesystem;
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

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("opcml_corpus_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
  }
};

}  // namespace

TEST_CASE("parse_opcode_file keeps the first token of each line") {
  CHECK(opc::parse_opcode_file("MOV eax, 1\nPUSH ebx\nCALL func") ==
        opc::OpcodeSequence{"mov", "push", "call"});
  CHECK(opc::parse_opcode_file("jmp  short loc_40\n\n  ret") == opc::OpcodeSequence{"jmp", "ret"});
  CHECK(opc::parse_opcode_file("xor eax, eax\r\nret\r\n") == opc::OpcodeSequence{"xor", "ret"});
  CHECK(code_of([] { opc::parse_opcode_file(""); }) == Errc::EmptySequence);
  CHECK(code_of([] { opc::parse_opcode_file("\n  \n\t\r\n"); }) == Errc::EmptySequence);
}

TEST_CASE("render then parse is the identity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    opc::OpcodeSequence seq;
    const std::size_t len = 1 + rng() % 40;
    for (std::size_t i = 0; i < len; ++i) seq.push_back("op" + std::to_string(rng() % 12));
    CHECK(opc::parse_opcode_file(opc::render_opcode_file(seq)) == seq);
  }
}

TEST_CASE("label_from_filename splits at the last underscore") {
  auto a = opc::label_from_filename("turla_007.opcode");
  CHECK(a.family == "turla");
  CHECK(a.sample_id == "007");
  auto b = opc::label_from_filename("apt_28_012.opcode");
  CHECK(b.family == "apt_28");
  CHECK(b.sample_id == "012");
  CHECK(code_of([] { opc::label_from_filename("sample.opcode"); }) == Errc::MalformedName);
  CHECK(code_of([] { opc::label_from_filename("_12.opcode"); }) == Errc::MalformedName);
  CHECK(code_of([] { opc::label_from_filename("fam_.opcode"); }) == Errc::MalformedName);
  CHECK(code_of([] { opc::label_from_filename("fam_1.txt"); }) == Errc::MalformedName);

  for (std::string name : {"a_b_c_d.opcode", "x_1.opcode", "lazarus_group_0001.opcode"}) {
    auto l = opc::label_from_filename(name);
    CHECK(l.family + "_" + l.sample_id + ".opcode" == name);
  }
}

TEST_CASE("load_corpus orders, labels and skips") {
  SUBCASE("three valid files, two families") {
    TempDir dir("valid");
    dir.write("b_2.opcode", "push ebp\nret\n");
    dir.write("a_1.opcode", "mov eax, 1\n");
    dir.write("b_1.opcode", "call x\n");
    auto corpus = opc::load_corpus(dir.path);
    REQUIRE(corpus.samples.size() == 3);
    CHECK(corpus.class_index.size() == 2);
    CHECK(corpus.class_index.at("a") == 0);
    CHECK(corpus.class_index.at("b") == 1);
    CHECK(corpus.samples[0].sample_id == "1");
    CHECK(corpus.samples[1].family == "b");
    CHECK(corpus.samples[1].sample_id == "1");
    CHECK(corpus.samples[2].sequence == opc::OpcodeSequence{"push", "ret"});
  }
  SUBCASE("single empty file") {
    TempDir dir("empty");
    dir.write("a_1.opcode", "");
    CHECK(code_of([&] { opc::load_corpus(dir.path); }) == Errc::NoSamples);
  }
  SUBCASE("mixed valid and empty") {
    TempDir dir("mixed");
    dir.write("a_1.opcode", "mov\n");
    dir.write("a_2.opcode", "\n\n");
    dir.write("b_1.opcode", "ret\n");
    dir.write("noise.txt", "mov\n");
    dir.write("badname.opcode", "mov\n");
    auto corpus = opc::load_corpus(dir.path);
    CHECK(corpus.samples.size() == 2);
    CHECK(corpus.skipped_empty == 1);
    CHECK(corpus.skipped_malformed == 1);
  }
  SUBCASE("missing directory") {
    CHECK(code_of([] { opc::load_corpus("/nonexistent/opcml"); }) == Errc::Io);
  }
}

TEST_CASE("load_corpus is independent of file creation order") {
  TempDir first("order1"), second("order2");
  const std::vector<std::pair<std::string, std::string>> files{
      {"z_1.opcode", "mov\n"}, {"a_3.opcode", "push\n"}, {"m_2.opcode", "ret\n"}, {"a_1.opcode", "call\n"}};
  for (const auto& [n, t] : files) first.write(n, t);
  for (auto it = files.rbegin(); it != files.rend(); ++it) second.write(it->first, it->second);
  CHECK(opc::load_corpus(first.path).samples == opc::load_corpus(second.path).samples);
}

TEST_CASE("make_corpus rejects duplicates") {
  std::vector<opc::LabeledSample> s{{"a", "1", {"mov"}}, {"a", "1", {"ret"}}};
  CHECK(code_of([&] { opc::make_corpus(s); }) == Errc::InvalidArgument);
}

TEST_CASE("stratified_split examples") {
  auto s = opc::stratified_split({{"A", 10}, {"B", 10}}, 0.2, 7);
  CHECK(s.train.size() == 16);
  CHECK(s.test.size() == 4);
  std::size_t a_test = std::count_if(s.test.begin(), s.test.end(), [](std::size_t i) { return i < 10; });
  CHECK(a_test == 2);

  CHECK(code_of([] { opc::stratified_split({{"A", 5}}, 0.2, 1); }) == Errc::ClassTooSmall);
  CHECK(code_of([] { opc::stratified_split({{"A", 5}, {"B", 1}}, 0.2, 1); }) == Errc::ClassTooSmall);
  try {
    opc::stratified_split({{"A", 5}, {"lonely", 1}}, 0.2, 1);
  } catch (const opc::Error& e) {
    CHECK(std::string(e.what()).find("lonely") != std::string::npos);
  }

  for (std::uint64_t seed : {0u, 1u, 99u}) {
    auto u = opc::stratified_split({{"A", 7}, {"B", 3}}, 0.2, seed);
    CHECK(std::count_if(u.test.begin(), u.test.end(), [](std::size_t i) { return i < 7; }) == 1);
    CHECK(std::count_if(u.test.begin(), u.test.end(), [](std::size_t i) { return i >= 7; }) == 1);
  }
  auto x = opc::stratified_split({{"A", 10}, {"B", 10}}, 0.2, 7);
  CHECK(x.train == s.train);
  CHECK(x.test == s.test);
}

TEST_CASE("stratified_split invariants over random class maps") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<int> labels;
    for (std::size_t c = 0; c < k; ++c) labels.insert(labels.end(), 2 + rng() % 40, static_cast<int>(c));
    std::shuffle(labels.begin(), labels.end(), rng);
    const double f = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto split = opc::stratified_split(labels, k, f, rng());

    std::vector<int> seen(labels.size(), 0);
    for (auto i : split.train) seen[i]++;
    for (auto i : split.test) seen[i]++;
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));

    for (std::size_t c = 0; c < k; ++c) {
      const auto count = static_cast<double>(std::count(labels.begin(), labels.end(), static_cast<int>(c)));
      const auto in_test = static_cast<double>(
          std::count_if(split.test.begin(), split.test.end(), [&](std::size_t i) { return labels[i] == static_cast<int>(c); }));
      CHECK(std::abs(in_test - count * f) <= 1.0 + 1e-9);
      CHECK(in_test >= 1.0);
      CHECK(in_test < count);
    }
  }
}

TEST_CASE("synthetic corpus bookkeeping and determinism") {
  auto c = opc::generate_synthetic_corpus({2, 10, 50, 8, 1});
  CHECK(c.samples.size() == 20);
  CHECK(c.num_classes() == 2);
  for (const auto& s : c.samples) CHECK(s.sequence.size() == 50);
  auto again = opc::generate_synthetic_corpus({2, 10, 50, 8, 1});
  CHECK(c.samples == again.samples);
  auto other = opc::generate_synthetic_corpus({2, 10, 50, 8, 2});
  CHECK_FALSE(c.samples == other.samples);

  CHECK(code_of([] { opc::generate_synthetic_corpus({4, 1, 1, 3, 0}); }) == Errc::InvalidArgument);
  CHECK(code_of([] { opc::generate_synthetic_corpus({0, 1, 1, 3, 0}); }) == Errc::InvalidArgument);
  CHECK(opc::synthetic_opcode_names(40).back() == "op39");
}
