#include "levelgen/decoder.hpp"

#include "levelgen/corpus.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/rng.hpp"
#include "levelgen/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace levelgen {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(LayerKind kind)
{
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Reshape: return "reshape";
    case LayerKind::ConvTranspose2d: return "conv_transpose2d";
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::BatchNorm: return "batch_norm";
    case LayerKind::Relu: return "relu";
    case LayerKind::LeakyRelu: return "leaky_relu";
    case LayerKind::Tanh: return "tanh";
  }
  return "relu";
}

namespace {

LayerKind parse_layer_kind(const std::string& s)
{
  for (auto k : {LayerKind::Dense, LayerKind::Reshape, LayerKind::ConvTranspose2d, LayerKind::Conv2d,
                 LayerKind::BatchNorm, LayerKind::Relu, LayerKind::LeakyRelu, LayerKind::Tanh}) {
    if (to_string(k) == s) return k;
  }
  throw BadFormat("unknown layer kind '" + s + "'");
}

std::size_t product(const std::vector<int>& shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

std::string shape_str(const std::vector<int>& s)
{
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += (i ? "," : "") + std::to_string(s[i]);
  }
  return out + ")";
}

void expect_size(const std::vector<float>& v, std::size_t n, const char* what, LayerKind kind)
{
  if (v.size() != n) {
    throw ShapeChainBroken(std::string(to_string(kind)) + " layer: " + what + " holds " + std::to_string(v.size()) +
                           " values, expected " + std::to_string(n));
  }
}

}  // namespace

std::vector<int> layer_output_shape(const Layer& l, const std::vector<int>& in)
{
  auto broken = [&](const std::string& why) {
    return ShapeChainBroken(std::string(to_string(l.kind)) + " layer cannot take input " + shape_str(in) + ": " + why);
  };
  switch (l.kind) {
    case LayerKind::Dense:
      if (product(in) != static_cast<std::size_t>(l.in_features)) throw broken("feature count");
      expect_size(l.weight, static_cast<std::size_t>(l.in_features) * static_cast<std::size_t>(l.out_features), "weight", l.kind);
      expect_size(l.bias, static_cast<std::size_t>(l.out_features), "bias", l.kind);
      return {l.out_features};
    case LayerKind::Reshape:
      if (product(in) != product(l.shape) || l.shape.empty()) throw broken("element count");
      return l.shape;
    case LayerKind::ConvTranspose2d: {
      if (in.size() != 3 || in[0] != l.in_channels) throw broken("channels");
      const int h = (in[1] - 1) * l.stride - 2 * l.padding + l.kernel;
      const int w = (in[2] - 1) * l.stride - 2 * l.padding + l.kernel;
      if (h <= 0 || w <= 0) throw broken("empty output");
      expect_size(l.weight, static_cast<std::size_t>(l.in_channels * l.out_channels * l.kernel * l.kernel), "weight", l.kind);
      if (!l.bias.empty()) expect_size(l.bias, static_cast<std::size_t>(l.out_channels), "bias", l.kind);
      return {l.out_channels, h, w};
    }
    case LayerKind::Conv2d: {
      if (in.size() != 3 || in[0] != l.in_channels) throw broken("channels");
      const int h = (in[1] + 2 * l.padding - l.kernel) / l.stride + 1;
      const int w = (in[2] + 2 * l.padding - l.kernel) / l.stride + 1;
      if (h <= 0 || w <= 0) throw broken("empty output");
      expect_size(l.weight, static_cast<std::size_t>(l.in_channels * l.out_channels * l.kernel * l.kernel), "weight", l.kind);
      if (!l.bias.empty()) expect_size(l.bias, static_cast<std::size_t>(l.out_channels), "bias", l.kind);
      return {l.out_channels, h, w};
    }
    case LayerKind::BatchNorm: {
      const auto c = static_cast<std::size_t>(in.size() == 3 ? in[0] : static_cast<int>(product(in)));
      expect_size(l.weight, c, "weight", l.kind);
      expect_size(l.bias, c, "bias", l.kind);
      expect_size(l.running_mean, c, "running_mean", l.kind);
      expect_size(l.running_var, c, "running_var", l.kind);
      return in;
    }
    case LayerKind::Relu:
    case LayerKind::LeakyRelu:
    case LayerKind::Tanh:
      return in;
  }
  return in;
}

FeatureMap apply_layer(const Layer& l, const FeatureMap& input)
{
  FeatureMap out;
  out.shape = layer_output_shape(l, input.shape);
  const auto& x = input.values;
  switch (l.kind) {
    case LayerKind::Dense: {
      out.values.resize(static_cast<std::size_t>(l.out_features));
      const auto n_in = static_cast<std::size_t>(l.in_features);
      for (std::size_t o = 0; o < out.values.size(); ++o) {
        double s = l.bias[o];
        const float* row = l.weight.data() + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) s += static_cast<double>(row[i]) * x[i];
        out.values[o] = s;
      }
      break;
    }
    case LayerKind::Reshape:
      out.values = x;
      break;
    case LayerKind::ConvTranspose2d: {
      const int ci = input.shape[0], hi = input.shape[1], wi = input.shape[2];
      const int co = out.shape[0], ho = out.shape[1], wo = out.shape[2];
      const int k = l.kernel;
      out.values.assign(static_cast<std::size_t>(co * ho * wo), 0.0);
      for (int o = 0; o < co; ++o) {
        const double b = l.bias.empty() ? 0.0 : l.bias[static_cast<std::size_t>(o)];
        std::fill_n(out.values.begin() + o * ho * wo, ho * wo, b);
      }
      for (int i = 0; i < ci; ++i) {
        for (int iy = 0; iy < hi; ++iy) {
          for (int ix = 0; ix < wi; ++ix) {
            const double v = x[static_cast<std::size_t>((i * hi + iy) * wi + ix)];
            if (v == 0.0) continue;
            for (int o = 0; o < co; ++o) {
              const float* kw = l.weight.data() + static_cast<std::size_t>(((i * co + o) * k) * k);
              double* plane = out.values.data() + static_cast<std::size_t>(o * ho * wo);
              for (int ky = 0; ky < k; ++ky) {
                const int y = iy * l.stride - l.padding + ky;
                if (y < 0 || y >= ho) continue;
                for (int kx = 0; kx < k; ++kx) {
                  const int xx = ix * l.stride - l.padding + kx;
                  if (xx < 0 || xx >= wo) continue;
                  plane[y * wo + xx] += v * static_cast<double>(kw[ky * k + kx]);
                }
              }
            }
          }
        }
      }
      break;
    }
    case LayerKind::Conv2d: {
      const int ci = input.shape[0], hi = input.shape[1], wi = input.shape[2];
      const int co = out.shape[0], ho = out.shape[1], wo = out.shape[2];
      const int k = l.kernel;
      out.values.resize(static_cast<std::size_t>(co * ho * wo));
      for (int o = 0; o < co; ++o) {
        for (int y = 0; y < ho; ++y) {
          for (int xx = 0; xx < wo; ++xx) {
            double s = l.bias.empty() ? 0.0 : l.bias[static_cast<std::size_t>(o)];
            for (int i = 0; i < ci; ++i) {
              for (int ky = 0; ky < k; ++ky) {
                const int iy = y * l.stride - l.padding + ky;
                if (iy < 0 || iy >= hi) continue;
                for (int kx = 0; kx < k; ++kx) {
                  const int ix = xx * l.stride - l.padding + kx;
                  if (ix < 0 || ix >= wi) continue;
                  s += x[static_cast<std::size_t>((i * hi + iy) * wi + ix)] *
                       static_cast<double>(l.weight[static_cast<std::size_t>(((o * ci + i) * k + ky) * k + kx)]);
                }
              }
            }
            out.values[static_cast<std::size_t>((o * ho + y) * wo + xx)] = s;
          }
        }
      }
      break;
    }
    case LayerKind::BatchNorm: {
      out.values = x;
      const std::size_t channels = l.weight.size();
      const std::size_t per = x.size() / channels;
      for (std::size_t c = 0; c < channels; ++c) {
        const double scale = l.weight[c] / std::sqrt(static_cast<double>(l.running_var[c]) + l.eps);
        for (std::size_t j = 0; j < per; ++j) {
          double& v = out.values[c * per + j];
          v = (v - l.running_mean[c]) * scale + l.bias[c];
        }
      }
      break;
    }
    case LayerKind::Relu:
      out.values = x;
      for (auto& v : out.values) v = std::max(v, 0.0);
      break;
    case LayerKind::LeakyRelu:
      out.values = x;
      for (auto& v : out.values) v = v < 0.0 ? v * l.slope : v;
      break;
    case LayerKind::Tanh:
      out.values = x;
      for (auto& v : out.values) v = std::tanh(v);
      break;
  }
  return out;
}

GeneratorModel::GeneratorModel(int latent_size, std::vector<Layer> layers, std::array<int, 3> output_shape,
                               std::array<int, 3> crop_shape)
    : latent_size_(latent_size), layers_(std::move(layers)), output_shape_(output_shape), crop_(crop_shape)
{
  if (latent_size_ < 1) {
    throw ShapeChainBroken("latent size must be positive");
  }
  std::vector<int> shape{latent_size_};
  for (const auto& l : layers_) {
    shape = layer_output_shape(l, shape);
  }
  const std::vector<int> expected(output_shape_.begin(), output_shape_.end());
  if (shape != expected) {
    throw ShapeChainBroken("layer chain ends in " + shape_str(shape) + ", manifest declares " + shape_str(expected));
  }
  if (crop_[0] != output_shape_[0] || crop_[1] < 1 || crop_[2] < 1 || crop_[1] > output_shape_[1] ||
      crop_[2] > output_shape_[2]) {
    throw ShapeChainBroken("crop region does not fit inside the output");
  }
}

GeneratorModel GeneratorModel::load(const fs::path& manifest_path)
{
  json m;
  try {
    m = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw BadFormat(manifest_path.string() + ": " + e.what());
  }
  try {
    if (m.value("format", "") != "levelgen-generator" || m.value("dtype", "") != "float32") {
      throw BadFormat(manifest_path.string() + ": not a float32 levelgen-generator manifest");
    }
    const std::vector<float> blob = read_f32_le(manifest_path.parent_path() / m.at("blob").get<std::string>());
    std::size_t cursor = 0;
    std::vector<Layer> layers;
    for (const auto& lj : m.at("layers")) {
      Layer l;
      l.kind = parse_layer_kind(lj.at("kind").get<std::string>());
      l.in_features = lj.value("in_features", 0);
      l.out_features = lj.value("out_features", 0);
      l.in_channels = lj.value("in_channels", 0);
      l.out_channels = lj.value("out_channels", 0);
      l.kernel = lj.value("kernel", 0);
      l.stride = lj.value("stride", 1);
      l.padding = lj.value("padding", 0);
      l.eps = lj.value("eps", 1e-5);
      l.slope = lj.value("slope", 0.2);
      if (lj.contains("shape")) l.shape = lj.at("shape").get<std::vector<int>>();
      for (const auto& pj : lj.value("params", json::array())) {
        const auto name = pj.at("name").get<std::string>();
        const auto shape = pj.at("shape").get<std::vector<int>>();
        const std::size_t n = product(shape);
        if (cursor + n > blob.size()) {
          throw BadFormat(manifest_path.string() + ": blob ends inside parameter '" + name + "'");
        }
        std::vector<float> values(blob.begin() + static_cast<std::ptrdiff_t>(cursor),
                                  blob.begin() + static_cast<std::ptrdiff_t>(cursor + n));
        cursor += n;
        if (name == "weight") l.weight = std::move(values);
        else if (name == "bias") l.bias = std::move(values);
        else if (name == "running_mean") l.running_mean = std::move(values);
        else if (name == "running_var") l.running_var = std::move(values);
        else throw BadFormat("unknown parameter name '" + name + "'");
      }
      layers.push_back(std::move(l));
    }
    if (cursor != blob.size()) {
      throw BadFormat(manifest_path.string() + ": blob has " + std::to_string(blob.size() - cursor) +
                      " unused values");
    }
    const auto out = m.at("output_shape").get<std::vector<int>>();
    const auto crop = m.at("crop").get<std::vector<int>>();
    if (out.size() != 3 || crop.size() != 3) {
      throw BadFormat(manifest_path.string() + ": output_shape and crop must have 3 entries");
    }
    return GeneratorModel(m.at("latent_size").get<int>(), std::move(layers), {out[0], out[1], out[2]},
                          {crop[0], crop[1], crop[2]});
  } catch (const json::exception& e) {
    throw BadFormat(manifest_path.string() + ": " + e.what());
  }
}

std::vector<double> GeneratorModel::forward(std::span<const double> z) const
{
  if (static_cast<int>(z.size()) != latent_size_) {
    throw LatentSizeMismatch("generator expects a latent vector of " + std::to_string(latent_size_) +
                             ", got " + std::to_string(z.size()));
  }
  FeatureMap fm{{latent_size_}, std::vector<double>(z.begin(), z.end())};
  for (const auto& l : layers_) {
    fm = apply_layer(l, fm);
  }
  return std::move(fm.values);
}

SegmentGrid crop_argmax(std::span<const double> scores, std::array<int, 3> shape, std::array<int, 3> crop)
{
  const int k = shape[0], h = shape[1], w = shape[2];
  SegmentGrid grid(crop[1], crop[2]);
  for (int r = 0; r < crop[1]; ++r) {
    for (int c = 0; c < crop[2]; ++c) {
      int best = 0;
      for (int ch = 1; ch < k; ++ch) {
        if (scores[static_cast<std::size_t>((ch * h + r) * w + c)] >
            scores[static_cast<std::size_t>((best * h + r) * w + c)]) {
          best = ch;
        }
      }
      grid.at(r, c) = static_cast<Channel>(best);
    }
  }
  return grid;
}

SegmentGrid GeneratorModel::decode(std::span<const double> z) const
{
  return crop_argmax(forward(z), output_shape_, crop_);
}

// ---------------------------------------------------------------------------
// Stub decoder

namespace {

std::uint64_t quantized_hash(std::span<const double> z)
{
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (double v : z) {
    const auto q = static_cast<std::int64_t>(std::floor(v / 0.05));
    h = mix_seed(h, static_cast<std::uint64_t>(q));
  }
  return h;
}

/// Latent coordinate i mapped to [0, 1], or a hashed fallback when z is shorter.
double unit_coord(std::span<const double> z, std::size_t i, Rng& fallback)
{
  if (i < z.size()) return std::clamp((z[i] + 1.0) / 2.0, 0.0, 1.0);
  return fallback.uniform();
}

}  // namespace

StubDecoder::StubDecoder(Game game, int latent_size) : game_(game), latent_size_(latent_size)
{
  if (latent_size_ < 1) {
    throw LatentSizeMismatch("stub decoder needs a positive latent size");
  }
  if (game_ == Game::Zelda) {
    Rng rng(0x5A454C4441524F4FULL);
    anchors_.resize(static_cast<std::size_t>(kZeldaStubRooms * latent_size_));
    for (double& a : anchors_) a = rng.uniform(-1.0, 1.0);
  }
}

SegmentGrid StubDecoder::decode(std::span<const double> z) const
{
  if (static_cast<int>(z.size()) != latent_size_) {
    throw LatentSizeMismatch("stub decoder expects a latent vector of " + std::to_string(latent_size_) +
                             ", got " + std::to_string(z.size()));
  }
  return game_ == Game::Zelda ? decode_zelda(z) : decode_mario(z);
}

SegmentGrid StubDecoder::decode_zelda(std::span<const double> z) const
{
  const auto& vocab = TileVocabulary::zelda();
  const Channel floor = vocab.channel_named("floor");
  const Channel wall = vocab.channel_named("wall");
  const Channel water = vocab.channel_named("water");
  constexpr int H = kZeldaRoomHeight, W = kZeldaRoomWidth;
  constexpr int top = 2, bottom = H - 3, left = 2, right = W - 3;

  const auto n = static_cast<std::size_t>(latent_size_);
  std::size_t room = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < static_cast<std::size_t>(kZeldaStubRooms); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += (z[i] - anchors_[k * n + i]) * (z[i] - anchors_[k * n + i]);
    if (d < best) best = d, room = k;
  }
  const std::span<const double> anchor(anchors_.data() + room * n, n);
  Rng rng(mix_seed(0x243F6A8885A308D3ULL, room));
  const double wall_p = 0.6 * unit_coord(anchor, 0, rng);
  const double water_p = 0.5 * unit_coord(anchor, 1, rng);

  SegmentGrid g(H, W, wall);
  auto corridor = [](int r, int c) { return r == kZeldaDoorRow || c == kZeldaDoorCol; };
  for (int r = top; r <= bottom; ++r) {
    for (int c = left; c <= right; ++c) {
      const double u = rng.uniform();
      if (corridor(r, c)) {
        g.at(r, c) = floor;
      } else {
        g.at(r, c) = u < wall_p ? wall : (u < wall_p + water_p ? water : floor);
      }
    }
  }
  // Isolated single water tiles on the corridor, away from the entries and the crossing.
  for (int r = top; r <= bottom; ++r) {
    for (int c = left; c <= right; ++c) {
      if (!corridor(r, c) || (r == kZeldaDoorRow && c == kZeldaDoorCol)) continue;
      if (r == top || r == bottom || c == left || c == right) continue;
      const double u = rng.uniform();
      if (u >= 0.3 * water_p) continue;
      const bool before = r == kZeldaDoorRow ? g.at(r, c - 1) == water : g.at(r - 1, c) == water;
      if (!before) g.at(r, c) = water;
    }
  }
  // Non-wall tiles cut off from the corridor become wall.
  std::vector<bool> seen(static_cast<std::size_t>(H * W), false);
  std::vector<std::pair<int, int>> stack{{kZeldaDoorRow, kZeldaDoorCol}};
  seen[static_cast<std::size_t>(kZeldaDoorRow * W + kZeldaDoorCol)] = true;
  while (!stack.empty()) {
    const auto [r, c] = stack.back();
    stack.pop_back();
    constexpr int dr[] = {-1, 1, 0, 0};
    constexpr int dc[] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      const int nr = r + dr[d], nc = c + dc[d];
      if (nr < top || nr > bottom || nc < left || nc > right) continue;
      const auto idx = static_cast<std::size_t>(nr * W + nc);
      if (seen[idx] || g.at(nr, nc) == wall) continue;
      seen[idx] = true;
      stack.emplace_back(nr, nc);
    }
  }
  for (int r = top; r <= bottom; ++r) {
    for (int c = left; c <= right; ++c) {
      if (g.at(r, c) != wall && !seen[static_cast<std::size_t>(r * W + c)]) g.at(r, c) = wall;
    }
  }
  return g;
}

SegmentGrid StubDecoder::decode_mario(std::span<const double> z) const
{
  const auto& v = TileVocabulary::mario();
  const Channel empty = v.channel_named("empty");
  const Channel ground = v.channel_named("ground");
  const Channel pipe = v.channel_named("pipe");
  const Channel coin = v.channel_named("coin");
  const Channel bullet_top = v.channel_named("bullet_top");
  const Channel bullet_body = v.channel_named("bullet_body");
  const Channel blocks[] = {v.channel_named("breakable"), v.channel_named("question"), v.channel_named("question_used")};
  const Channel enemies[] = {v.channel_named("goomba"), v.channel_named("green_koopa"), v.channel_named("red_koopa"),
                             v.channel_named("spiny")};
  constexpr int H = kMarioSegmentHeight, W = kMarioSegmentWidth;
  constexpr int ground_row = H - 2;  // rows 12 and 13 are ground

  Rng rng(quantized_hash(z));
  const int gaps = static_cast<int>(unit_coord(z, 0, rng) * 3.0);
  const int platforms = static_cast<int>(unit_coord(z, 1, rng) * 4.0);
  const int pipes = static_cast<int>(unit_coord(z, 2, rng) * 3.0);
  const int foes = static_cast<int>(unit_coord(z, 3, rng) * 5.0);
  const int coins = static_cast<int>(unit_coord(z, 4, rng) * 4.0);
  const bool cannon = unit_coord(z, 5, rng) > 0.8;

  SegmentGrid g(H, W, empty);
  for (int r = ground_row; r < H; ++r) {
    for (int c = 0; c < W; ++c) g.at(r, c) = ground;
  }
  // Gaps keep the first and last two columns so segments join on ground.
  for (int i = 0; i < gaps; ++i) {
    const int width = 1 + static_cast<int>(rng.below(4));
    const int start = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(W - 4 - width)));
    for (int c = start; c < start + width; ++c) {
      for (int r = ground_row; r < H; ++r) g.at(r, c) = empty;
    }
  }
  for (int i = 0; i < platforms; ++i) {
    const int row = 7 + static_cast<int>(rng.below(3));
    const int len = 2 + static_cast<int>(rng.below(4));
    const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(W - len)));
    for (int c = start; c < start + len; ++c) g.at(row, c) = blocks[rng.below(3)];
  }
  for (int i = 0; i < pipes; ++i) {
    const int c = 1 + static_cast<int>(rng.below(W - 2));
    if (g.at(ground_row, c) != ground) continue;
    const int height = 1 + static_cast<int>(rng.below(4));
    g.at(ground_row - height, c) = pipe;
  }
  if (cannon) {
    const int c = 1 + static_cast<int>(rng.below(W - 2));
    if (g.at(ground_row, c) == ground) {
      g.at(ground_row - 2, c) = bullet_top;
      g.at(ground_row - 1, c) = bullet_body;
    }
  }
  for (int i = 0; i < foes; ++i) {
    const int c = 3 + static_cast<int>(rng.below(W - 3));
    if (g.at(ground_row - 1, c) == empty) g.at(ground_row - 1, c) = enemies[rng.below(4)];
  }
  for (int i = 0; i < coins; ++i) {
    const int c = static_cast<int>(rng.below(W));
    const int r = 4 + static_cast<int>(rng.below(3));
    if (g.at(r, c) == empty) g.at(r, c) = coin;
  }
  return g;
}

SegmentGrid stub_decode(std::span<const double> z, int channels, int height, int width)
{
  if (channels == TileVocabulary::kZeldaChannels && height == kZeldaRoomHeight && width == kZeldaRoomWidth) {
    return StubDecoder(Game::Zelda, static_cast<int>(z.size())).decode(z);
  }
  if (channels == TileVocabulary::kMarioChannels && height == kMarioSegmentHeight && width == kMarioSegmentWidth) {
    return StubDecoder(Game::Mario, static_cast<int>(z.size())).decode(z);
  }
  Rng rng(quantized_hash(z));
  SegmentGrid g(height, width);
  for (auto& c : g.cells()) c = static_cast<Channel>(rng.below(static_cast<std::uint64_t>(channels)));
  return g;
}

}  // namespace levelgen
