#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace levelgen {

/// Dense float32 tensor, row-major.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  std::size_t element_count() const noexcept;
};

/// Portable tensor file pair: `<stem>.json` header naming shape/dtype and a
/// sibling raw payload of little-endian float32 values in row-major order.
///
/// Header keys: format="levelgen-tensor", version=1, dtype="float32",
/// byte_order="little", shape=[...], data=<payload file name>.
void write_tensor(const std::filesystem::path& header_path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& header_path);

// Raw little-endian float32 payload helpers (shared with the weight loader).
std::vector<float> read_f32_le(const std::filesystem::path& path);
void write_f32_le(const std::filesystem::path& path, std::span<const float> values);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace levelgen
