#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opc {

/// Opcode mnemonics in file order, lowercase, operands stripped.
using OpcodeSequence = std::vector<std::string>;

struct LabeledSample {
  std::string family;
  std::string sample_id;
  OpcodeSequence sequence;

  bool operator==(const LabeledSample&) const = default;
};

struct Corpus {
  std::vector<LabeledSample> samples;
  // family -> class id, ascending lexicographic, contiguous from 0
  std::map<std::string, int> class_index;
  std::size_t skipped_empty = 0;
  std::size_t skipped_malformed = 0;

  std::size_t num_classes() const { return class_index.size(); }
  std::vector<std::string> class_names() const;
  std::vector<int> labels() const;
  std::map<std::string, std::size_t> family_counts() const;
};

/// Builds a corpus from samples, assigning the lexicographic class index.
/// Throws InvalidArgument on an empty family or a duplicate (family, sample_id).
Corpus make_corpus(std::vector<LabeledSample> samples);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// First whitespace token of every non-empty line, lowercased.
/// Throws EmptySequence when no line carries a token.
OpcodeSequence parse_opcode_file(std::string_view text);

/// One token per line, LF-terminated. Inverse of parse_opcode_file.
std::string render_opcode_file(const OpcodeSequence& sequence);

struct FileLabel {
  std::string family;
  std::string sample_id;
};

/// "<family>_<id>.opcode", split at the last underscore.
FileLabel label_from_filename(std::string_view name);

/// Loads every `*.opcode` regular file under `root` (non-recursive) in
/// lexicographic filename order. Empty files and malformed names are skipped
/// and counted.
Corpus load_corpus(const std::filesystem::path& root);

/// Stratified split over row labels in [0, n_classes). Within each class the
/// rows are shuffled with a seeded generator and max(1, floor(count * f)) of
/// them go to the test side. Both index lists come back sorted ascending.
SplitIndices stratified_split(std::span<const int> labels, std::size_t n_classes,
                              double test_fraction, std::uint64_t seed,
                              std::span<const std::string> class_names = {});

/// Count-map form: rows are laid out class by class in map order.
SplitIndices stratified_split(const std::map<std::string, std::size_t>& counts_by_class,
                              double test_fraction, std::uint64_t seed);

struct SynthParams {
  std::size_t n_classes = 3;
  std::size_t samples_per_class = 30;
  std::size_t seq_len = 100;
  std::size_t vocab_size = 16;
  std::uint64_t seed = 42;
};

/// Families "class0".."classN-1", ids zero-padded to three digits. Class c
/// favours opcode c and the bigram (c, c+1) so classes separate on n-grams.
Corpus generate_synthetic_corpus(const SynthParams& params);

/// Mnemonic table used by the synthetic generator.
std::vector<std::string> synthetic_opcode_names(std::size_t vocab_size);

}  // namespace opc
