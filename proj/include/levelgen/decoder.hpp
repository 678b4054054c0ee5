#pragma once

#include "levelgen/game.hpp"
#include "levelgen/grid.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace levelgen {

enum class LayerKind { Dense, Reshape, ConvTranspose2d, Conv2d, BatchNorm, Relu, LeakyRelu, Tanh };

std::string_view to_string(LayerKind kind);

/// One inference layer with its parameters. Weight layouts follow the common
/// deep-learning conventions: dense [out, in], transposed conv
/// [in, out, k, k], conv [out, in, k, k], batch-norm per channel.
struct Layer {
  LayerKind kind = LayerKind::Relu;
  int in_features = 0;
  int out_features = 0;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  int padding = 0;
  double eps = 1e-5;
  double slope = 0.2;
  std::vector<int> shape;  // Reshape target (C, H, W)
  std::vector<float> weight;
  std::vector<float> bias;
  std::vector<float> running_mean;
  std::vector<float> running_var;
};

/// Feature map in double precision. A 1D vector is stored as shape {n}.
struct FeatureMap {
  std::vector<int> shape;
  std::vector<double> values;
};

/// Applies one layer. Exposed so kernels can be checked against naive loops.
FeatureMap apply_layer(const Layer& layer, const FeatureMap& input);

/// Shape produced by `layer` for an input of `input` shape. Throws ShapeChainBroken.
std::vector<int> layer_output_shape(const Layer& layer, const std::vector<int>& input);

/// Trained generator: latent vector -> (K, 32, 32) scores -> cropped argmax.
///
/// Weight files are a JSON manifest plus a raw little-endian float32 blob.
/// Manifest keys: format="levelgen-generator", version=1, dtype="float32",
/// latent_size, output_shape [K,H,W], crop [K,h,w], blob (file name), and
/// layers: [{kind, ...hyperparameters, params: [{name, shape}]}]. Parameters
/// are read from the blob in listed order and must consume it exactly.
class GeneratorModel {
public:
  GeneratorModel(int latent_size, std::vector<Layer> layers, std::array<int, 3> output_shape,
                 std::array<int, 3> crop_shape);

  static GeneratorModel load(const std::filesystem::path& manifest_path);

  int latent_size() const noexcept { return latent_size_; }
  std::array<int, 3> output_shape() const noexcept { return output_shape_; }
  std::array<int, 3> crop_shape() const noexcept { return crop_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  /// Raw (K, H, W) scores, flattened row-major. Throws LatentSizeMismatch.
  std::vector<double> forward(std::span<const double> z) const;

  /// Upper-left crop of the scores, argmax per cell (lowest channel wins ties).
  SegmentGrid decode(std::span<const double> z) const;

private:
  int latent_size_;
  std::vector<Layer> layers_;
  std::array<int, 3> output_shape_;
  std::array<int, 3> crop_;
};

/// Upper-left (K, h, w) crop of flattened (K, H, W) scores, argmax per cell.
SegmentGrid crop_argmax(std::span<const double> scores, std::array<int, 3> shape, std::array<int, 3> crop);

/// Latent vector -> tile segment.
class SegmentDecoder {
public:
  virtual ~SegmentDecoder() = default;
  virtual int latent_size() const = 0;
  virtual SegmentGrid decode(std::span<const double> z) const = 0;
};

class ModelDecoder final : public SegmentDecoder {
public:
  explicit ModelDecoder(GeneratorModel model) : model_(std::move(model)) {}
  int latent_size() const override { return model_.latent_size(); }
  SegmentGrid decode(std::span<const double> z) const override { return model_.decode(z); }
  const GeneratorModel& model() const noexcept { return model_; }

private:
  GeneratorModel model_;
};

/// GAN-free decoder for tests and fast experiments.
///
/// The grid is a pure function of z.
///
/// Mario: z0..z5 set gap, platform, pipe, enemy, coin and cannon counts and
/// fine placement comes from a hash of z quantized to steps of 0.05, so
/// vectors differing by at least 0.1 in any coordinate hash differently.
///
/// Zelda mimics a generator trained on a small room corpus: z snaps to the
/// nearest of kZeldaStubRooms hashed anchor latents and each anchor owns one
/// room, so nearby latents share a room. The anchor's z0 sets wall density
/// and z1 water density; its hash sets placement. Rooms keep a two-tile wall border and a floor corridor cross through
/// row 5 and column 8. Corridor water tiles are isolated single tiles. Every
/// non-wall tile is 4-connected to the corridor.
class StubDecoder final : public SegmentDecoder {
public:
  explicit StubDecoder(Game game, int latent_size);
  int latent_size() const override { return latent_size_; }
  SegmentGrid decode(std::span<const double> z) const override;

  Game game() const noexcept { return game_; }

private:
  SegmentGrid decode_zelda(std::span<const double> z) const;
  SegmentGrid decode_mario(std::span<const double> z) const;

  Game game_;
  int latent_size_;
  std::vector<double> anchors_;  // kZeldaStubRooms rows of latent_size_
};

/// Stub mapping for an arbitrary (K, H, W); Mario/Zelda sizes use the game stubs,
/// other shapes get hashed channel noise.
SegmentGrid stub_decode(std::span<const double> z, int channels, int height, int width);

inline constexpr int kZeldaDoorRow = 5;
inline constexpr int kZeldaStubRooms = 38;
inline constexpr int kZeldaDoorCol = 8;

}  // namespace levelgen
