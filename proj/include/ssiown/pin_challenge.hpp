#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssiown/bytes.hpp"
#include "ssiown/crypto.hpp"

namespace ssiown {

/// Tracking id minted per sale or transfer; rendered as lowercase hex.
struct Tid {
  ByteArray<16> value{};

  static Tid generate(Rng& rng) { return Tid{rng.draw<16>()}; }
  static std::optional<Tid> parse(std::string_view hex);
  std::string hex() const { return to_hex(value); }

  auto operator<=>(const Tid&) const = default;
};

class PinFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 6 to 8 characters from [A-Z0-9].
class Pin {
 public:
  static constexpr std::size_t kMinLength = 6;
  static constexpr std::size_t kMaxLength = 8;

  static bool is_valid(std::string_view s);
  static std::optional<Pin> parse(std::string_view s);
  static Pin generate(Rng& rng);

  const std::string& str() const { return value_; }
  bool operator==(const Pin&) const = default;

 private:
  explicit Pin(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

/// Exact rational kept in lowest terms with a positive denominator.
struct Rational {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  static Rational reduced(std::int64_t numerator, std::int64_t denominator);
  bool is_reduced() const;
  std::string to_string() const;

  bool operator==(const Rational&) const = default;
};

enum class ChallengeOp : std::uint8_t { add, sub, mul, div };

char symbol(ChallengeOp op);
std::optional<ChallengeOp> challenge_op_from_symbol(char c);

inline constexpr std::uint32_t kChallengeByMin = 100;
inline constexpr std::uint32_t kChallengeByMax = 9999;

/// Base-36 positional value, '0'-'9' -> 0..9 and 'A'-'Z' -> 10..35, most
/// significant character first. Throws PinFormatError on other characters.
std::uint64_t pin_numeric(std::string_view pin);

/// pin_value (op) challenge_by as an exact rational. Throws
/// std::invalid_argument if challenge_by is outside [100, 9999].
Rational evaluate_challenge(std::uint64_t pin_value, std::uint32_t challenge_by, ChallengeOp op);

struct PinChallenge {
  Tid tid;
  std::uint32_t challenge_by = kChallengeByMin;
  ChallengeOp challenge_type = ChallengeOp::add;

  /// challenge_by uniform in [100, 9999], operator uniform over all four.
  static PinChallenge draw(Rng& rng, const Tid& tid);
  Rational result_for(const Pin& pin) const {
    return evaluate_challenge(pin_numeric(pin.str()), challenge_by, challenge_type);
  }
};

}  // namespace ssiown
