#include <catch_amalgamated.hpp>

#include <numeric>

#include "ssiown/pin_challenge.hpp"

using namespace ssiown;

namespace {

// Independent reference: positional base 36 over "0-9A-Z".
std::uint64_t oracle_value(const std::string& s) {
  const std::string alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::uint64_t v = 0;
  for (char c : s) v = v * 36 + alphabet.find(c);
  return v;
}

struct Frac {
  __int128 n, d;
};

Frac oracle_eval(std::uint64_t pin, std::uint32_t by, char op) {
  __int128 a = pin, b = by;
  switch (op) {
    case '+': return {a + b, 1};
    case '-': return {a - b, 1};
    case '*': return {a * b, 1};
    default: {
      auto g = std::gcd(static_cast<long long>(a), static_cast<long long>(b));
      return {a / g, b / g};
    }
  }
}

}  // namespace

TEST_CASE("pin format") {
  CHECK(Pin::is_valid("A1B2C3"));
  CHECK(Pin::is_valid("ZZZZZZZZ"));
  CHECK_FALSE(Pin::is_valid("A1B2C"));
  CHECK_FALSE(Pin::is_valid("A1B2C3D4E"));
  CHECK_FALSE(Pin::is_valid("a1b2c3"));
  CHECK_FALSE(Pin::is_valid("A1-2C3"));
  CHECK_FALSE(Pin::parse("short").has_value());

  Rng rng(11);
  std::array<int, 9> lengths{};
  for (int i = 0; i < 3000; ++i) {
    auto p = Pin::generate(rng);
    REQUIRE(Pin::is_valid(p.str()));
    lengths[p.str().size()]++;
  }
  CHECK(lengths[6] > 800);
  CHECK(lengths[7] > 800);
  CHECK(lengths[8] > 800);
}

TEST_CASE("tid parses 32 hex characters only") {
  Rng rng(1);
  auto t = Tid::generate(rng);
  CHECK(Tid::parse(t.hex()) == t);
  CHECK_FALSE(Tid::parse("abc").has_value());
  CHECK_FALSE(Tid::parse(std::string(32, 'g')).has_value());
}

TEST_CASE("pin numeric matches base-36 reference") {
  CHECK(pin_numeric("000000") == 0);
  CHECK(pin_numeric("00000Z") == 35);
  CHECK(pin_numeric("000010") == 36);
  CHECK(pin_numeric("ZZZZZZZZ") == 2821109907455ULL);  // 36^8 - 1
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    auto p = Pin::generate(rng);
    CHECK(pin_numeric(p.str()) == oracle_value(p.str()));
  }
  CHECK_THROWS_AS(pin_numeric("ab1234"), PinFormatError);
  CHECK_THROWS_AS(pin_numeric(""), PinFormatError);
}

TEST_CASE("challenge arithmetic is exact and pin-first") {
  CHECK(evaluate_challenge(36, 100, ChallengeOp::sub) == Rational{-64, 1});
  CHECK(evaluate_challenge(150, 100, ChallengeOp::div) == Rational{3, 2});
  CHECK(evaluate_challenge(7, 100, ChallengeOp::div) == Rational{7, 100});
  CHECK(evaluate_challenge(0, 100, ChallengeOp::div) == Rational{0, 1});
  CHECK_THROWS_AS(evaluate_challenge(1, 99, ChallengeOp::add), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_challenge(1, 10000, ChallengeOp::add), std::invalid_argument);

  Rng rng(3);
  const char ops[] = {'+', '-', '*', '/'};
  for (int i = 0; i < 2000; ++i) {
    auto pin = Pin::generate(rng);
    auto c = PinChallenge::draw(rng, Tid::generate(rng));
    REQUIRE(c.challenge_by >= 100);
    REQUIRE(c.challenge_by <= 9999);
    auto r = c.result_for(pin);
    auto o = oracle_eval(oracle_value(pin.str()), c.challenge_by, symbol(c.challenge_type));
    CHECK(static_cast<__int128>(r.numerator) == o.n);
    CHECK(static_cast<__int128>(r.denominator) == o.d);
    CHECK(r.is_reduced());
    (void)ops;
  }
}

TEST_CASE("challenge draws cover every operator") {
  Rng rng(4);
  std::array<int, 4> seen{};
  for (int i = 0; i < 400; ++i) seen[static_cast<int>(PinChallenge::draw(rng, {}).challenge_type)]++;
  for (int s : seen) CHECK(s > 60);
}

TEST_CASE("rational normalisation") {
  CHECK(Rational::reduced(4, -6) == Rational{-2, 3});
  CHECK(Rational::reduced(0, 5) == Rational{0, 1});
  CHECK_THROWS(Rational::reduced(1, 0));
  CHECK(Rational{3, 2}.to_string() == "3/2");
  CHECK(challenge_op_from_symbol('/') == ChallengeOp::div);
  CHECK_FALSE(challenge_op_from_symbol('%').has_value());
}
