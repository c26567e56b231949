#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace gpsim {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Output depends only on (key, counter), so streams are reproducible across
/// platforms and can be split without shared state. The 64-bit seed is the key;
/// the 128-bit counter advances one block (four 32-bit words) at a time.
class Philox4x32 {
public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }

  result_type operator()();

  /// Raw block for an explicit counter; used by tests against known-answer vectors.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

/// Uniforms and standard normals on top of Philox.
///
/// Normals use the Box-Muller transform so that the sequence is identical on
/// every standard library (std::normal_distribution is implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(seed, stream) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();

private:
  Philox4x32 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive mix of a list of 64-bit words into one seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words);

/// FNV-1a over bytes; used to fold method names and config text into seeds/hashes.
std::uint64_t fnv1a64(std::string_view bytes);

std::uint64_t double_bits(double x);

}  // namespace gpsim
