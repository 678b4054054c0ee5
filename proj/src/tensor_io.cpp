#include "levelgen/tensor_io.hpp"

#include "levelgen/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace levelgen {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t Tensor::element_count() const noexcept
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string read_text_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text)
{
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error("write failed for " + path.string());
  }
}

std::vector<float> read_f32_le(const fs::path& path)
{
  const std::string bytes = read_text_file(path);
  if (bytes.size() % 4 != 0) {
    throw BadFormat(path.string() + ": payload size is not a multiple of 4 bytes");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 3; b >= 0; --b) {
      word = (word << 8) | static_cast<unsigned char>(bytes[i * 4 + static_cast<std::size_t>(b)]);
    }
    out[i] = std::bit_cast<float>(word);
  }
  return out;
}

void write_f32_le(const fs::path& path, std::span<const float> values)
{
  std::string bytes(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto word = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) {
      bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((word >> (8 * b)) & 0xFF);
    }
  }
  write_text_file(path, bytes);
}

void write_tensor(const fs::path& header_path, const Tensor& tensor)
{
  if (tensor.element_count() != tensor.data.size()) {
    throw ShapeMismatch("write_tensor: data size does not match shape");
  }
  const fs::path payload = fs::path(header_path).replace_extension(".bin");
  json header = {
      {"format", "levelgen-tensor"},
      {"version", 1},
      {"dtype", "float32"},
      {"byte_order", "little"},
      {"shape", tensor.shape},
      {"data", payload.filename().string()},
  };
  write_text_file(header_path, header.dump(2) + "\n");
  write_f32_le(payload, tensor.data);
}

Tensor read_tensor(const fs::path& header_path)
{
  json header;
  try {
    header = json::parse(read_text_file(header_path));
  } catch (const json::exception& e) {
    throw BadFormat(header_path.string() + ": " + e.what());
  }
  if (header.value("format", "") != "levelgen-tensor" || header.value("dtype", "") != "float32") {
    throw BadFormat(header_path.string() + ": not a float32 levelgen tensor");
  }
  Tensor t;
  t.shape = header.at("shape").get<std::vector<std::size_t>>();
  t.data = read_f32_le(header_path.parent_path() / header.at("data").get<std::string>());
  if (t.data.size() != t.element_count()) {
    throw BadFormat(header_path.string() + ": payload holds " + std::to_string(t.data.size()) +
                    " values, shape needs " + std::to_string(t.element_count()));
  }
  return t;
}

}  // namespace levelgen
