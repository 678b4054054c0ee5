#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace levelgen {

enum class ActivationKind {
  Sawtooth,
  LinearPiecewise,
  Identity,
  Square,
  Cosine,
  Sine,
  Sigmoid,
  Gaussian,
  Triangle,
  Absolute,
};

inline constexpr std::array<ActivationKind, 10> kAllActivations = {
    ActivationKind::Sawtooth, ActivationKind::LinearPiecewise, ActivationKind::Identity,
    ActivationKind::Square,   ActivationKind::Cosine,          ActivationKind::Sine,
    ActivationKind::Sigmoid,  ActivationKind::Gaussian,        ActivationKind::Triangle,
    ActivationKind::Absolute,
};

// Function table. The periodic waves share period 2 in the summed input.
//
//   sawtooth(x)   = x - 2*floor((x+1)/2)            in [-1, 1)
//   linear(x)     = clamp(x, -1, 1)
//   identity(x)   = x
//   square(x)     = +1 if frac(x/2) < 1/2 else -1
//   cosine(x)     = cos(x)
//   sine(x)       = sin(x)
//   sigmoid(x)    = 2/(1+exp(-x)) - 1               in (-1, 1)
//   gaussian(x)   = exp(-2 x^2)                     in (0, 1]
//   triangle(x)   = 1 - 2*|sawtooth(x)|             in [-1, 1]
//   absolute(x)   = |x|
inline double activate(ActivationKind kind, double x)
{
  switch (kind) {
    case ActivationKind::Sawtooth:
      return x - 2.0 * std::floor((x + 1.0) / 2.0);
    case ActivationKind::LinearPiecewise:
      return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
    case ActivationKind::Identity:
      return x;
    case ActivationKind::Square: {
      const double half = x / 2.0;
      return (half - std::floor(half)) < 0.5 ? 1.0 : -1.0;
    }
    case ActivationKind::Cosine:
      return std::cos(x);
    case ActivationKind::Sine:
      return std::sin(x);
    case ActivationKind::Sigmoid:
      return 2.0 / (1.0 + std::exp(-x)) - 1.0;
    case ActivationKind::Gaussian:
      return std::exp(-2.0 * x * x);
    case ActivationKind::Triangle: {
      const double saw = x - 2.0 * std::floor((x + 1.0) / 2.0);
      return 1.0 - 2.0 * std::abs(saw);
    }
    case ActivationKind::Absolute:
      return std::abs(x);
  }
  return x;
}

std::string_view to_string(ActivationKind kind);
std::optional<ActivationKind> parse_activation(std::string_view name);

}  // namespace levelgen
