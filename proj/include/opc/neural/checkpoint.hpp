#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "opc/neural/cnn.hpp"

namespace opc::neural {

inline constexpr char kCheckpointMagic[4] = {'O', 'P', 'C', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout, all little-endian:
///   "OPC1" | u32 version | u64 input_dim, num_classes, conv1_channels,
///   conv2_channels, hidden, kernel_size, stride, padding, fc1_input_dim |
///   f64 dropout | f64 parameter arrays in CnnModel::parameters() order.
std::string encode_checkpoint(const CnnModel& model);
/// Throws IncompatibleArtifactVersion on a bad magic or version, Io on truncation.
CnnModel decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const CnnModel& model);
CnnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace opc::neural
