#include "opc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "opc/error.hpp"
#include "opc/random.hpp"

namespace fs = std::filesystem;

namespace opc {

namespace {

constexpr std::string_view kExtension = ".opcode";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<std::string> Corpus::class_names() const {
  std::vector<std::string> names(class_index.size());
  for (const auto& [family, id] : class_index) names[static_cast<std::size_t>(id)] = family;
  return names;
}

std::vector<int> Corpus::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(class_index.at(s.family));
  return out;
}

std::map<std::string, std::size_t> Corpus::family_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : samples) ++counts[s.family];
  return counts;
}

Corpus make_corpus(std::vector<LabeledSample> samples) {
  Corpus corpus;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : samples) {
    if (s.family.empty()) throw Error(Errc::InvalidArgument, "sample with empty family");
    if (!seen.emplace(s.family, s.sample_id).second) {
      throw Error(Errc::InvalidArgument, "duplicate sample " + s.family + "_" + s.sample_id);
    }
    corpus.class_index.emplace(s.family, 0);
  }
  int next = 0;
  for (auto& [family, id] : corpus.class_index) id = next++;
  corpus.samples = std::move(samples);
  return corpus;
}

OpcodeSequence parse_opcode_file(std::string_view text) {
  OpcodeSequence tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;

    std::size_t begin = 0;
    while (begin < line.size() && is_space(line[begin])) ++begin;
    std::size_t end = begin;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (end == begin) continue;

    std::string token(line.substr(begin, end - begin));
    for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    tokens.push_back(std::move(token));
  }
  if (tokens.empty()) throw Error(Errc::EmptySequence, "no opcode tokens");
  return tokens;
}

std::string render_opcode_file(const OpcodeSequence& sequence) {
  std::string out;
  for (const auto& token : sequence) {
    out += token;
    out += '\n';
  }
  return out;
}

FileLabel label_from_filename(std::string_view name) {
  if (name.size() <= kExtension.size() || !name.ends_with(kExtension)) {
    throw Error(Errc::MalformedName, std::string(name) + " lacks the .opcode extension");
  }
  std::string_view stem = name.substr(0, name.size() - kExtension.size());
  std::size_t cut = stem.rfind('_');
  if (cut == std::string_view::npos) {
    throw Error(Errc::MalformedName, std::string(name) + " has no family/id underscore");
  }
  FileLabel label{std::string(stem.substr(0, cut)), std::string(stem.substr(cut + 1))};
  if (label.family.empty() || label.sample_id.empty()) {
    throw Error(Errc::MalformedName, std::string(name) + " has an empty family or sample id");
  }
  return label;
}

Corpus load_corpus(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(Errc::Io, "corpus directory " + root.string() + " is not readable");
  }

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.ends_with(kExtension)) names.push_back(std::move(name));
  }
  std::sort(names.begin(), names.end());

  std::vector<LabeledSample> samples;
  std::size_t skipped_empty = 0;
  std::size_t skipped_malformed = 0;
  for (const auto& name : names) {
    FileLabel label;
    try {
      label = label_from_filename(name);
    } catch (const Error&) {
      ++skipped_malformed;
      continue;
    }
    try {
      samples.push_back({label.family, label.sample_id, parse_opcode_file(read_file(root / name))});
    } catch (const Error& e) {
      if (e.code() != Errc::EmptySequence) throw;
      ++skipped_empty;
    }
  }
  if (samples.empty()) {
    throw Error(Errc::NoSamples, "no usable .opcode files in " + root.string());
  }

  Corpus corpus = make_corpus(std::move(samples));
  corpus.skipped_empty = skipped_empty;
  corpus.skipped_malformed = skipped_malformed;
  return corpus;
}

SplitIndices stratified_split(std::span<const int> labels, std::size_t n_classes,
                              double test_fraction, std::uint64_t seed,
                              std::span<const std::string> class_names) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  auto name_of = [&](std::size_t c) {
    return c < class_names.size() ? class_names[c] : "class id " + std::to_string(c);
  };

  std::vector<std::vector<std::size_t>> rows(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(labels[i]));
    }
    rows[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (rows[c].size() == 1) throw Error(Errc::ClassTooSmall, name_of(c) + " has a single sample");
    if (!rows[c].empty()) ++present;
  }
  if (present < 2) {
    throw Error(Errc::ClassTooSmall,
                present == 0 ? std::string("no samples") : "only one class present (" +
                    name_of(static_cast<std::size_t>(labels[0])) + ")");
  }

  SplitIndices split;
  split.seed = seed;
  Rng rng(seed);
  for (auto& members : rows) {
    if (members.empty()) continue;
    shuffle(std::span<std::size_t>(members), rng);
    // epsilon absorbs products such as 0.29 * 100 = 28.999999999999996
    auto n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(members.size()) * test_fraction + 1e-9));
    n_test = std::max<std::size_t>(n_test, 1);
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

SplitIndices stratified_split(const std::map<std::string, std::size_t>& counts_by_class,
                              double test_fraction, std::uint64_t seed) {
  std::vector<int> labels;
  std::vector<std::string> names;
  int id = 0;
  for (const auto& [name, count] : counts_by_class) {
    labels.insert(labels.end(), count, id++);
    names.push_back(name);
  }
  return stratified_split(labels, names.size(), test_fraction, seed, names);
}

std::vector<std::string> synthetic_opcode_names(std::size_t vocab_size) {
  static const char* const kMnemonics[] = {
      "mov", "push", "pop",  "call", "ret", "jmp", "cmp", "add",  "sub",  "xor", "lea",
      "test", "jz",  "jnz",  "and",  "or",  "inc", "dec", "shl",  "shr",  "nop", "imul",
      "idiv", "movzx", "movsx", "sar", "not", "neg", "leave", "int3", "cdq", "sete"};
  constexpr std::size_t kCount = sizeof(kMnemonics) / sizeof(kMnemonics[0]);
  std::vector<std::string> names;
  names.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    names.push_back(i < kCount ? std::string(kMnemonics[i]) : "op" + std::to_string(i));
  }
  return names;
}

Corpus generate_synthetic_corpus(const SynthParams& p) {
  if (p.n_classes < 1 || p.samples_per_class < 1 || p.seq_len < 1 || p.vocab_size < 1) {
    throw Error(Errc::InvalidArgument, "synthetic corpus counts must be >= 1");
  }
  if (p.vocab_size < p.n_classes) {
    throw Error(Errc::InvalidArgument, "vocab_size must be >= n_classes");
  }
  constexpr double kSignatureProb = 0.25;
  constexpr double kFollowProb = 0.5;

  const auto names = synthetic_opcode_names(p.vocab_size);
  std::vector<LabeledSample> samples;
  samples.reserve(p.n_classes * p.samples_per_class);
  for (std::size_t c = 0; c < p.n_classes; ++c) {
    const std::size_t signature = c;
    const std::size_t follower = (c + 1) % p.vocab_size;
    for (std::size_t s = 0; s < p.samples_per_class; ++s) {
      Rng rng(mix_seed(p.seed, c * 1000003ULL + s));
      OpcodeSequence seq;
      seq.reserve(p.seq_len);
      bool after_signature = false;
      for (std::size_t t = 0; t < p.seq_len; ++t) {
        std::size_t op;
        if (after_signature && uniform01(rng) < kFollowProb) {
          op = follower;
        } else if (uniform01(rng) < kSignatureProb) {
          op = signature;
        } else {
          op = uniform_index(rng, p.vocab_size);
        }
        after_signature = (op == signature);
        seq.push_back(names[op]);
      }
      char id[16];
      std::snprintf(id, sizeof(id), "%03zu", s);
      samples.push_back({"class" + std::to_string(c), id, std::move(seq)});
    }
  }
  return make_corpus(std::move(samples));
}

}  // namespace opc
