#include "opc/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "opc/error.hpp"
#include "opc/random.hpp"

namespace opc {

std::vector<std::string> generate_ngrams(const OpcodeSequence& opcodes, std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "n-gram order must be >= 1");
  std::vector<std::string> out;
  if (opcodes.size() < n) return out;
  out.reserve(opcodes.size() - n + 1);
  for (std::size_t i = 0; i + n <= opcodes.size(); ++i) {
    std::string gram = opcodes[i];
    for (std::size_t k = 1; k < n; ++k) {
      gram += ' ';
      gram += opcodes[i + k];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

NGramVocabulary::NGramVocabulary(std::vector<std::size_t> orders, std::vector<std::string> entries)
    : orders_(std::move(orders)), entries_(std::move(entries)) {
  lookup_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!lookup_.emplace(entries_[i], i).second) {
      throw Error(Errc::InvalidArgument, "duplicate vocabulary entry '" + entries_[i] + "'");
    }
  }
}

long NGramVocabulary::index_of(const std::string& ngram) const {
  auto it = lookup_.find(ngram);
  return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

NGramVocabulary build_vocabulary(const std::vector<OpcodeSequence>& train_sequences,
                                 const std::vector<std::size_t>& orders) {
  std::vector<std::size_t> sorted_orders(orders);
  std::sort(sorted_orders.begin(), sorted_orders.end());
  sorted_orders.erase(std::unique(sorted_orders.begin(), sorted_orders.end()), sorted_orders.end());

  std::vector<std::string> entries;
  for (std::size_t n : sorted_orders) {
    std::set<std::string> grams;
    for (const auto& seq : train_sequences) {
      for (auto& g : generate_ngrams(seq, n)) grams.insert(std::move(g));
    }
    entries.insert(entries.end(), grams.begin(), grams.end());
  }
  if (entries.empty()) throw Error(Errc::EmptyVocabulary, "training sequences contain no tokens");
  return NGramVocabulary(std::move(sorted_orders), std::move(entries));
}

std::vector<double> vectorize(const OpcodeSequence& sequence, const NGramVocabulary& vocab) {
  if (vocab.empty()) throw Error(Errc::EmptyVocabulary, "cannot vectorize against an empty vocabulary");
  std::vector<double> row(vocab.size(), 0.0);
  for (std::size_t n : vocab.orders()) {
    for (const auto& g : generate_ngrams(sequence, n)) {
      long j = vocab.index_of(g);
      if (j >= 0) row[static_cast<std::size_t>(j)] += 1.0;
    }
  }
  return row;
}

FeatureMatrix vectorize_all(const std::vector<OpcodeSequence>& sequences,
                            const std::vector<int>& labels, std::size_t n_classes,
                            const NGramVocabulary& vocab) {
  if (sequences.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, "sequence and label counts differ");
  }
  FeatureMatrix m(sequences.size(), vocab.size(), n_classes);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    auto row = vectorize(sequences[i], vocab);
    std::copy(row.begin(), row.end(), m.row(i).begin());
    m.labels[i] = labels[i];
  }
  return m;
}

ScalerParams fit_scaler(const FeatureMatrix& train) {
  if (train.rows < 2) throw Error(Errc::TooFewRows, "scaler needs at least 2 rows");
  const double n = static_cast<double>(train.rows);
  ScalerParams p{std::vector<double>(train.cols, 0.0), std::vector<double>(train.cols, 0.0)};
  for (std::size_t i = 0; i < train.rows; ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < train.cols; ++j) p.mean[j] += r[j];
  }
  for (double& m : p.mean) m /= n;
  // two-pass variance
  for (std::size_t i = 0; i < train.rows; ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < train.cols; ++j) {
      double d = r[j] - p.mean[j];
      p.scale[j] += d * d;
    }
  }
  for (double& s : p.scale) {
    s = std::sqrt(s / n);
    if (!(s > 0.0)) s = 1.0;
  }
  return p;
}

void apply_scaler_row(std::span<double> row, const ScalerParams& params) {
  if (row.size() != params.mean.size() || row.size() != params.scale.size()) {
    throw Error(Errc::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                             " columns, scaler expects " +
                                             std::to_string(params.mean.size()));
  }
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - params.mean[j]) / params.scale[j];
}

FeatureMatrix apply_scaler(const FeatureMatrix& matrix, const ScalerParams& params) {
  if (matrix.cols != params.mean.size() || matrix.cols != params.scale.size()) {
    throw Error(Errc::DimensionMismatch, "matrix has " + std::to_string(matrix.cols) +
                                             " columns, scaler expects " +
                                             std::to_string(params.mean.size()));
  }
  FeatureMatrix out = matrix;
  for (std::size_t i = 0; i < out.rows; ++i) apply_scaler_row(out.row(i), params);
  return out;
}

FeatureMatrix random_oversample(const FeatureMatrix& matrix, std::uint64_t seed) {
  auto counts = matrix.class_counts();
  std::size_t present = 0;
  std::size_t majority = 0;
  for (std::size_t c : counts) {
    if (c > 0) ++present;
    majority = std::max(majority, c);
  }
  if (present < 2) throw Error(Errc::SingleClass, "oversampling needs at least 2 classes");

  std::vector<std::vector<std::size_t>> members(matrix.n_classes);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    members[static_cast<std::size_t>(matrix.labels[i])].push_back(i);
  }

  std::vector<std::size_t> order(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t c = 0; c < matrix.n_classes; ++c) {
    const auto& pool = members[c];
    if (pool.empty()) continue;
    for (std::size_t k = pool.size(); k < majority; ++k) {
      order.push_back(pool[uniform_index(rng, pool.size())]);
    }
  }
  return matrix.select(order);
}

TokenIndex build_token_index(const std::vector<OpcodeSequence>& train_sequences) {
  std::set<std::string> tokens;
  for (const auto& seq : train_sequences) tokens.insert(seq.begin(), seq.end());
  TokenIndex index;
  std::size_t next = 0;
  for (const auto& t : tokens) index.emplace(t, next++);
  return index;
}

std::vector<double> encode_sequence(const OpcodeSequence& sequence, const TokenIndex& token_index,
                                    std::size_t length) {
  if (length == 0) throw Error(Errc::InvalidArgument, "encoding length must be >= 1");
  const double denom = static_cast<double>(token_index.size() + 1);
  std::vector<double> out(length, 0.0);
  const std::size_t n = std::min(length, sequence.size());
  for (std::size_t t = 0; t < n; ++t) {
    auto it = token_index.find(sequence[t]);
    if (it != token_index.end()) out[t] = static_cast<double>(it->second + 1) / denom;
  }
  return out;
}

SequenceEncoding encode_sequences(const std::vector<LabeledSample>& samples,
                                  const std::map<std::string, int>& class_index,
                                  const TokenIndex& token_index, std::size_t length) {
  SequenceEncoding enc;
  enc.token_index = token_index;
  enc.length = length;
  enc.matrix = FeatureMatrix(samples.size(), length, class_index.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto row = encode_sequence(samples[i].sequence, token_index, length);
    std::copy(row.begin(), row.end(), enc.matrix.row(i).begin());
    enc.matrix.labels[i] = class_index.at(samples[i].family);
  }
  return enc;
}

nlohmann::json features_to_json(const NGramVocabulary& vocab, const ScalerParams& scaler) {
  return nlohmann::json{{"version", kFeatureFormatVersion},
                        {"orders", vocab.orders()},
                        {"entries", vocab.entries()},
                        {"mean", scaler.mean},
                        {"scale", scaler.scale}};
}

std::pair<NGramVocabulary, ScalerParams> features_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("version")) {
    throw Error(Errc::IncompatibleArtifactVersion, "feature document has no version");
  }
  int version = doc.at("version").get<int>();
  if (version != kFeatureFormatVersion) {
    throw Error(Errc::IncompatibleArtifactVersion,
                "feature document version " + std::to_string(version) + ", expected " +
                    std::to_string(kFeatureFormatVersion));
  }
  NGramVocabulary vocab(doc.at("orders").get<std::vector<std::size_t>>(),
                        doc.at("entries").get<std::vector<std::string>>());
  ScalerParams scaler{doc.at("mean").get<std::vector<double>>(),
                      doc.at("scale").get<std::vector<double>>()};
  if (scaler.mean.size() != vocab.size() || scaler.scale.size() != vocab.size()) {
    throw Error(Errc::DimensionMismatch, "scaler and vocabulary sizes differ");
  }
  return {std::move(vocab), std::move(scaler)};
}

}  // namespace opc
