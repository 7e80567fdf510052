#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace entlab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
 public:
  enum class Kind {
    InvalidArgument,
    Degenerate,
    NonConvex,
    NonSmooth,
    Integration,
    Config,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline const char* to_string(Error::Kind k) {
  switch (k) {
    case Error::Kind::InvalidArgument: return "invalid_argument";
    case Error::Kind::Degenerate: return "degenerate";
    case Error::Kind::NonConvex: return "non_convex";
    case Error::Kind::NonSmooth: return "non_smooth";
    case Error::Kind::Integration: return "integration";
    case Error::Kind::Config: return "config";
  }
  return "unknown";
}

[[noreturn]] inline void fail(Error::Kind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Error::Kind::InvalidArgument, what);
}

/// Gaussian curvature of a constant-curvature model plane, K <= 0.
class Curvature {
 public:
  Curvature() = default;
  explicit Curvature(double K) : K_(K) {
    require(std::isfinite(K) && K <= 0.0, "curvature must be finite and non-positive, got " + std::to_string(K));
  }

  double value() const noexcept { return K_; }
  /// sqrt(-K); the length rescaling that maps this plane onto K = -1.
  double scale() const noexcept { return std::sqrt(-K_); }
  bool flat() const noexcept { return K_ == 0.0; }

  friend bool operator==(Curvature, Curvature) = default;

 private:
  double K_ = 0.0;
};

struct Tolerances {
  double identity = 1e-12;
  double solve = 1e-9;
};

}  // namespace entlab
