#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "opc/corpus.hpp"
#include "opc/matrix.hpp"

namespace opc {

/// Overlapping windows of `n` tokens joined by a single space.
std::vector<std::string> generate_ngrams(const OpcodeSequence& opcodes, std::size_t n);

class NGramVocabulary {
 public:
  NGramVocabulary() = default;
  /// `entries` must already be in (order, lexicographic) order.
  NGramVocabulary(std::vector<std::size_t> orders, std::vector<std::string> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::size_t>& orders() const { return orders_; }
  const std::vector<std::string>& entries() const { return entries_; }
  const std::string& at(std::size_t column) const { return entries_.at(column); }
  /// Column of an n-gram, or -1 when absent.
  long index_of(const std::string& ngram) const;

  bool operator==(const NGramVocabulary& other) const {
    return orders_ == other.orders_ && entries_ == other.entries_;
  }

 private:
  std::vector<std::size_t> orders_;
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Every distinct n-gram of the requested orders found in the training
/// sequences, ordered by (n, string). Throws EmptyVocabulary.
NGramVocabulary build_vocabulary(const std::vector<OpcodeSequence>& train_sequences,
                                 const std::vector<std::size_t>& orders = {1, 2});

/// Raw counts per vocabulary column; out-of-vocabulary n-grams are dropped.
std::vector<double> vectorize(const OpcodeSequence& sequence, const NGramVocabulary& vocab);

FeatureMatrix vectorize_all(const std::vector<OpcodeSequence>& sequences,
                            const std::vector<int>& labels, std::size_t n_classes,
                            const NGramVocabulary& vocab);

struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> scale;
};

/// Column means and population standard deviations; zero-variance columns get scale 1.
ScalerParams fit_scaler(const FeatureMatrix& train);
FeatureMatrix apply_scaler(const FeatureMatrix& matrix, const ScalerParams& params);
void apply_scaler_row(std::span<double> row, const ScalerParams& params);

/// Duplicates minority-class rows (uniform, with replacement) until every
/// present class reaches the majority count. Originals keep their positions;
/// duplicates are appended class by class.
FeatureMatrix random_oversample(const FeatureMatrix& matrix, std::uint64_t seed);

/// Distinct training tokens in lexicographic order -> id.
using TokenIndex = std::map<std::string, std::size_t>;
TokenIndex build_token_index(const std::vector<OpcodeSequence>& train_sequences);

struct SequenceEncoding {
  FeatureMatrix matrix;  // rows x length, values in [0, 1]
  TokenIndex token_index;
  std::size_t length = 0;
};

/// Token t -> (id + 1) / (|index| + 1); unknown tokens and padding -> 0.
std::vector<double> encode_sequence(const OpcodeSequence& sequence, const TokenIndex& token_index,
                                    std::size_t length);
SequenceEncoding encode_sequences(const std::vector<LabeledSample>& samples,
                                  const std::map<std::string, int>& class_index,
                                  const TokenIndex& token_index, std::size_t length);

inline constexpr int kFeatureFormatVersion = 1;

nlohmann::json features_to_json(const NGramVocabulary& vocab, const ScalerParams& scaler);
/// Throws IncompatibleArtifactVersion on a version mismatch.
std::pair<NGramVocabulary, ScalerParams> features_from_json(const nlohmann::json& doc);

}  // namespace opc
