#include "opc/neural/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "opc/error.hpp"

namespace opc::neural {

namespace {

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(Errc::Io, "checkpoint is truncated");
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const CnnModel& model) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  const auto& a = model.arch;
  for (std::uint64_t v : {a.input_dim, a.num_classes, a.conv1_channels, a.conv2_channels, a.hidden,
                          a.kernel_size, a.stride, a.padding, model.fc1_input_dim}) {
    put<std::uint64_t>(out, v);
  }
  put<double>(out, a.dropout);
  for (auto p : model.parameters()) {
    for (double v : p) put<double>(out, v);
  }
  return out;
}

CnnModel decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw Error(Errc::IncompatibleArtifactVersion, "not an OPC1 checkpoint");
  }
  Reader in(bytes);
  in.get<std::uint32_t>();  // magic
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(Errc::IncompatibleArtifactVersion, "checkpoint version " + std::to_string(version) +
                                                       ", expected " + std::to_string(kCheckpointVersion));
  }
  CnnArchitecture a;
  a.input_dim = in.get<std::uint64_t>();
  a.num_classes = in.get<std::uint64_t>();
  a.conv1_channels = in.get<std::uint64_t>();
  a.conv2_channels = in.get<std::uint64_t>();
  a.hidden = in.get<std::uint64_t>();
  a.kernel_size = in.get<std::uint64_t>();
  a.stride = in.get<std::uint64_t>();
  a.padding = in.get<std::uint64_t>();
  const auto fc1_input_dim = in.get<std::uint64_t>();
  a.dropout = in.get<double>();

  CnnModel model = make_cnn(a, 0);
  if (model.fc1_input_dim != fc1_input_dim) {
    throw Error(Errc::ShapeMismatch, "checkpoint fc1 width disagrees with its architecture");
  }
  for (auto p : model.parameters()) {
    for (double& v : p) v = in.get<double>();
  }
  if (!in.at_end()) throw Error(Errc::Io, "trailing bytes after checkpoint parameters");
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const CnnModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  const std::string bytes = encode_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

CnnModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace opc::neural
