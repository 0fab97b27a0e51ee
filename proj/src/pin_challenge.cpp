#include "ssiown/pin_challenge.hpp"

#include <numeric>

namespace ssiown {

namespace {

constexpr std::string_view kPinAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

int pin_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<Tid> Tid::parse(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  try {
    auto b = from_hex(hex);
    Tid t;
    std::copy(b.begin(), b.end(), t.value.begin());
    return t;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

bool Pin::is_valid(std::string_view s) {
  if (s.size() < kMinLength || s.size() > kMaxLength) return false;
  for (char c : s) {
    if (pin_digit(c) < 0) return false;
  }
  return true;
}

std::optional<Pin> Pin::parse(std::string_view s) {
  if (!is_valid(s)) return std::nullopt;
  return Pin(std::string(s));
}

Pin Pin::generate(Rng& rng) {
  std::size_t length = kMinLength + rng.uniform(kMaxLength - kMinLength + 1);
  std::string s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(kPinAlphabet[rng.uniform(36)]);
  return Pin(std::move(s));
}

Rational Rational::reduced(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  auto g = std::gcd(numerator, denominator);
  if (g == 0) g = 1;
  return Rational{numerator / g, denominator / g};
}

bool Rational::is_reduced() const {
  return denominator > 0 && std::gcd(numerator, denominator) == 1;
}

std::string Rational::to_string() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

char symbol(ChallengeOp op) {
  switch (op) {
    case ChallengeOp::add: return '+';
    case ChallengeOp::sub: return '-';
    case ChallengeOp::mul: return '*';
    case ChallengeOp::div: return '/';
  }
  return '?';
}

std::optional<ChallengeOp> challenge_op_from_symbol(char c) {
  switch (c) {
    case '+': return ChallengeOp::add;
    case '-': return ChallengeOp::sub;
    case '*': return ChallengeOp::mul;
    case '/': return ChallengeOp::div;
    default: return std::nullopt;
  }
}

std::uint64_t pin_numeric(std::string_view pin) {
  if (pin.empty() || pin.size() > Pin::kMaxLength) {
    throw PinFormatError("PIN must have 1 to 8 characters");
  }
  std::uint64_t v = 0;
  for (char c : pin) {
    int d = pin_digit(c);
    if (d < 0) throw PinFormatError(std::string("character outside PIN alphabet: ") + c);
    v = v * 36 + static_cast<std::uint64_t>(d);
  }
  return v;
}

Rational evaluate_challenge(std::uint64_t pin_value, std::uint32_t challenge_by, ChallengeOp op) {
  if (challenge_by < kChallengeByMin || challenge_by > kChallengeByMax) {
    throw std::invalid_argument("challengeBy outside [100, 9999]");
  }
  // 36^8 * 9999 stays far below 2^63.
  const auto a = static_cast<std::int64_t>(pin_value);
  const auto b = static_cast<std::int64_t>(challenge_by);
  switch (op) {
    case ChallengeOp::add: return Rational{a + b, 1};
    case ChallengeOp::sub: return Rational{a - b, 1};
    case ChallengeOp::mul: return Rational{a * b, 1};
    case ChallengeOp::div: return Rational::reduced(a, b);
  }
  throw std::invalid_argument("unknown challenge operator");
}

PinChallenge PinChallenge::draw(Rng& rng, const Tid& tid) {
  PinChallenge c;
  c.tid = tid;
  c.challenge_by = static_cast<std::uint32_t>(rng.uniform_range(kChallengeByMin, kChallengeByMax));
  c.challenge_type = static_cast<ChallengeOp>(rng.uniform(4));
  return c;
}

}  // namespace ssiown
