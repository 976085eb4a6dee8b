#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "tcvar/error.hpp"
#include "tcvar/fp/encoding.hpp"
#include "tcvar/fp/ops.hpp"
#include "tcvar/fp/transcendental.hpp"

using namespace tcvar;
using namespace tcvar::fp;
using oracle::Rational;

namespace {

const Precision P3(3);

FpNum f3(std::int64_t m, std::int64_t e) { return FpNum(m, e, P3); }

FpNum random_fp(std::mt19937_64& rng, Precision p, std::int64_t elo, std::int64_t ehi) {
  std::uniform_int_distribution<std::int64_t> md(p.min_significand(), p.max_significand());
  std::uniform_int_distribution<std::int64_t> ed(std::max(elo, p.min_exponent()), std::min(ehi, p.max_exponent()));
  std::bernoulli_distribution neg(0.5);
  const std::int64_t m = md(rng);
  return FpNum(neg(rng) ? -m : m, ed(rng), p);
}

}  // namespace

TEST_CASE("precision and value invariants") {
  CHECK_THROWS_AS(Precision(1), InvalidPrecision);
  CHECK_THROWS_AS(Precision(33), InvalidPrecision);
  CHECK_NOTHROW(Precision(40, 64));
  CHECK_THROWS_AS(f3(3, 0), InvalidFpNum);
  CHECK_THROWS_AS(f3(8, 0), InvalidFpNum);
  CHECK_THROWS_AS(f3(4, 8), InvalidFpNum);
  CHECK_THROWS_AS(f3(4, -9), InvalidFpNum);
  CHECK_THROWS_AS(f3(0, 1), InvalidFpNum);
  CHECK(oracle::all_values(P3).size() == 129);
  CHECK(FpNum::one(P3) == f3(4, -2));
}

TEST_CASE("round_p examples") {
  CHECK(round_p(0, 5, P3).value == FpNum::zero(P3));
  CHECK(round_p(9, 0, P3).value == f3(4, 1));
  CHECK(round_p(4, -2, P3).value == f3(4, -2));
  CHECK(round_p(11, 0, P3).value == f3(6, 1));  // 11 ties between 10 and 12, even is 12
  CHECK(round_p(-9, 0, P3).value == f3(-4, 1));
  // Sticky breaks a tie away from even.
  CHECK(round_p(9, 0, P3, 1).value == f3(5, 1));
  CHECK(round_p(-9, 0, P3, -1).value == f3(-5, 1));
  // Carry out of the significand.
  CHECK(round_p(15, 0, P3).value == f3(4, 2));
}

TEST_CASE("round_p range events") {
  const auto big = round_p(1, 100, P3);
  CHECK(big.event == RangeEvent::Overflow);
  CHECK(big.value == FpNum::max_magnitude(P3));
  const auto nbig = round_p(-1, 100, P3);
  CHECK(nbig.value == FpNum::max_magnitude(P3, true));
  const auto tiny = round_p(1, -100, P3);
  CHECK(tiny.event == RangeEvent::Underflow);
  CHECK(tiny.value.is_zero());
  CHECK_FALSE(round_p(7, 7, P3).flagged());
  CHECK(round_p(15, 7, P3).event == RangeEvent::Overflow);
}

TEST_CASE("round_p agrees with brute-force nearest on a sweep") {
  const oracle::Nearest near(P3, -40, 40);
  for (std::int64_t m = -300; m <= 300; ++m) {
    for (std::int64_t e = -16; e <= 12; ++e) {
      const FpNum got = round_p(m, e, P3).value;
      REQUIRE_MESSAGE(got == near.round(Rational(m) * oracle::pow2(e)), "m=" << m << " e=" << e);
    }
  }
}

TEST_CASE("round_p is idempotent on valid values") {
  for (const auto& x : oracle::all_values(P3)) {
    CHECK(round_p(x.m(), x.e(), P3).value == x);
  }
  std::mt19937_64 rng(7);
  const Precision p20(20);
  for (int i = 0; i < 2000; ++i) {
    const FpNum x = random_fp(rng, p20, -1'000'000, 1'000'000);
    CHECK(round_p(x.m(), x.e(), p20).value == x);
  }
}

TEST_CASE("binary op examples") {
  CHECK(fp_add(f3(4, -2), f3(4, -2)) == f3(4, -1));
  CHECK(fp_div(f3(4, 0), f3(6, 0)) == f3(5, -3));
  CHECK(fp_compare(FpNum::zero(P3), f3(-4, -7)) == Ordering::Greater);
  for (const auto& x : oracle::all_values(P3)) CHECK(fp_mul(f3(4, -2), x) == x);
  CHECK_THROWS_AS(fp_div(f3(4, 0), FpNum::zero(P3)), DivisionByZero);
  CHECK_THROWS_AS(fp_add(f3(4, 0), FpNum(8, 0, Precision(4))), PrecisionMismatch);
}

TEST_CASE("exhaustive p=3 pairs match the exact oracle") {
  const auto vals = oracle::all_values(P3);
  const oracle::Nearest near(P3, -64, 64);
  for (const auto& a : vals) {
    const Rational va = oracle::value(a);
    for (const auto& b : vals) {
      const Rational vb = oracle::value(b);
      REQUIRE(fp_add(a, b) == near.round(va + vb));
      REQUIRE(fp_sub(a, b) == near.round(va - vb));
      REQUIRE(fp_mul(a, b) == near.round(va * vb));
      if (!b.is_zero()) REQUIRE(fp_div(a, b) == near.round(va / vb));
      const Ordering want = va < vb ? Ordering::Less : (va > vb ? Ordering::Greater : Ordering::Equal);
      REQUIRE(fp_compare(a, b) == want);
    }
  }
}

TEST_CASE("floor matches the exact integer floor") {
  const oracle::Nearest near(P3, -64, 64);
  for (const auto& a : oracle::all_values(P3)) {
    const Rational v = oracle::value(a);
    boost::multiprecision::cpp_int q = numerator(v) / denominator(v);
    if (q * denominator(v) > numerator(v)) q -= 1;  // truncation went up for negatives
    REQUIRE(fp_floor(a) == near.round(Rational(q)));
  }
  CHECK(fp_floor(f3(-5, -2)) == f3(-4, -1));  // floor(-1.25) = -2
  CHECK(fp_floor(f3(5, -4)) == FpNum::zero(P3));
}

TEST_CASE("iterated addition") {
  const FpNum one = FpNum::one(P3);
  const FpNum x = f3(-7, 3);
  CHECK(fp_iter_add(std::vector<FpNum>{x}) == x);
  CHECK(fp_iter_add(std::vector<FpNum>(4, one)) == f3(4, 0));
  const std::vector<FpNum> tail{one, f3(4, -8), f3(4, -8)};
  CHECK(fp_iter_add(tail) == f3(4, -2));
  CHECK_THROWS_AS(fp_iter_add(std::vector<FpNum>{}), EmptyInput);

  // Single rounding differs from a left fold here: 1 + 1/8 + 1/8 = 1.25 exactly.
  const std::vector<FpNum> fold{one, f3(4, -5), f3(4, -5)};
  CHECK(fp_iter_add(fold) == f3(5, -2));
  CHECK(fp_add(fp_add(one, f3(4, -5)), f3(4, -5)) == one);
}

TEST_CASE("iterated addition matches the exact sum, with cancellation and far tails") {
  std::mt19937_64 rng(11);
  for (int pbits : {3, 5, 8}) {
    const Precision p(pbits);
    const oracle::Nearest near(p, -(1 << pbits) - 70, (1 << pbits) + 70);
    for (int trial = 0; trial < 1500; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 12);
      std::vector<FpNum> xs;
      Rational exact = 0;
      for (int i = 0; i < n; ++i) {
        FpNum v = random_fp(rng, p, -(1 << pbits), (1 << pbits) - 1);
        if (trial % 3 == 0 && i > 0 && rng() % 2) v = xs[rng() % xs.size()].negated();  // cancellation
        if (trial % 5 == 0) v = random_fp(rng, p, -6, 2);                             // clustered
        xs.push_back(v);
        exact += oracle::value(v);
      }
      const FpNum got = fp_iter_add(xs);
      REQUIRE_MESSAGE(got == near.round(exact), "p=" << pbits << " trial=" << trial);
      std::shuffle(xs.begin(), xs.end(), rng);
      REQUIRE(fp_iter_add(xs) == got);
    }
  }
}

TEST_CASE("far-below terms still decide ties") {
  // 1 + 1/8 is the midpoint between 1 and 1.25 at p=3; a tail far below the
  // window, of either sign, pushes it off the tie.
  const FpNum one = FpNum::one(P3);
  const FpNum half_ulp = f3(4, -5);
  const FpNum tiny = f3(4, -8);
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp, f3(-4, -7), f3(5, -7)}) == f3(5, -2));
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp, f3(4, -2), f3(-4, -2), tiny}) == f3(5, -2));
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp}) == one);
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp, tiny}) == f3(5, -2));
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp, tiny.negated()}) == one);
  CHECK(fp_iter_add(std::vector<FpNum>{one, half_ulp, tiny, tiny.negated()}) == one);
}

TEST_CASE("iterated multiplication") {
  const FpNum two = f3(4, -1);
  CHECK(fp_iter_mul(std::vector<FpNum>{f3(-6, 2)}) == f3(-6, 2));
  CHECK(fp_iter_mul(std::vector<FpNum>{two, FpNum::zero(P3), two}) == FpNum::zero(P3));
  CHECK(fp_iter_mul(std::vector<FpNum>{two, two, two}) == f3(4, 1));
  CHECK_THROWS_AS(fp_iter_mul(std::vector<FpNum>{}), EmptyInput);
  std::mt19937_64 rng(5);
  const oracle::Nearest near(P3, -200, 200);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<FpNum> xs;
    Rational exact = 1;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      xs.push_back(random_fp(rng, P3, -8, 7));
      exact *= oracle::value(xs.back());
    }
    const FpNum got = fp_iter_mul(xs);
    REQUIRE(got == near.round(exact));
    std::shuffle(xs.begin(), xs.end(), rng);
    REQUIRE(fp_iter_mul(xs) == got);
  }
}

TEST_CASE("encoding round trip and canonical form") {
  for (int pbits = 2; pbits <= 6; ++pbits) {
    const Precision p(pbits);
    for (const auto& x : oracle::all_values(p)) REQUIRE(decode(encode(x)) == x);
  }
  const auto z = encode(FpNum::zero(P3));
  for (std::size_t i = 0; i < z.width(); ++i) CHECK(z[i] == (i == EncodingLayout(P3).zero_flag()));
  CHECK(decode(encode(f3(-5, 3))) == f3(-5, 3));
  CHECK(encode(f3(-5, 3)).str() == "1101" "0" "0011");

  std::vector<std::uint8_t> bad(z.width(), 0);
  bad[EncodingLayout(P3).zero_flag()] = 1;
  bad[EncodingLayout(P3).magnitude(2)] = 1;
  bad[EncodingLayout(P3).magnitude(0)] = 1;
  CHECK_THROWS_AS(decode(FpEncoding(P3, bad)), MalformedEncoding);
  CHECK_THROWS_AS(decode(FpEncoding(P3, std::vector<std::uint8_t>(5, 0))), MalformedEncoding);
  CHECK_THROWS_AS(decode(FpEncoding(P3, std::vector<std::uint8_t>(z.width(), 0))), MalformedEncoding);

  std::mt19937_64 rng(3);
  for (int pbits : {12, 20, 32}) {
    const Precision p(pbits);
    for (int i = 0; i < 500; ++i) {
      const FpNum x = random_fp(rng, p, p.min_exponent(), p.max_exponent());
      REQUIRE(decode(encode(x)) == x);
    }
  }
}

TEST_CASE("enumerate_all is sorted and complete") {
  const auto all = enumerate_all(P3);
  CHECK(all.size() == 129);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(oracle::value(all[i - 1]) < oracle::value(all[i]));
}

namespace {

oracle::Wide relative_error(const FpNum& got, const oracle::Wide& want) {
  return boost::multiprecision::abs(oracle::wide(got) - want) / want;
}

}  // namespace

TEST_CASE("exp examples") {
  CHECK(fp_exp(FpNum::zero(P3)).value == f3(4, -2));
  const Precision p8(8);
  const auto e1 = fp_exp(FpNum::one(p8));
  CHECK_FALSE(e1.flagged());
  CHECK(relative_error(e1.value, boost::multiprecision::exp(oracle::Wide(1))) <= oracle::Wide(1) / 256);
  const FpNum ln2 = from_double(0.6931471805599453, p8);
  const auto two = fp_exp(ln2).value;
  CHECK(relative_error(two, oracle::Wide(2)) <= oracle::Wide(1) / 256);
  CHECK(fp_exp(FpNum::max_magnitude(p8)).event == RangeEvent::Overflow);
  CHECK(fp_exp(FpNum::max_magnitude(p8, true)).event == RangeEvent::Underflow);
}

TEST_CASE("sqrt examples") {
  CHECK(fp_sqrt(FpNum::zero(P3)).is_zero());
  CHECK(fp_sqrt(f3(4, 0)) == f3(4, -1));
  const Precision p8(8);
  const FpNum r2 = fp_sqrt(FpNum(128, -6, p8));
  CHECK(relative_error(r2, boost::multiprecision::sqrt(oracle::Wide(2))) <= oracle::Wide(1) / 256);
  CHECK_THROWS_AS(fp_sqrt(f3(-4, 0)), DomainError);
}

TEST_CASE("exp and sqrt stay within relative 2^-p on random inputs") {
  std::mt19937_64 rng(2024);
  for (int pbits : {6, 8, 10}) {
    const Precision p(pbits);
    const oracle::Wide bound = boost::multiprecision::ldexp(oracle::Wide(1), -pbits);
    int checked_exp = 0;
    for (int i = 0; i < 10000; ++i) {
      // Mostly arguments whose exponential is representable, plus a slice of
      // the full range to exercise saturation and flush.
      const FpNum x = (i % 4 == 0) ? random_fp(rng, p, p.min_exponent(), p.max_exponent())
                                   : random_fp(rng, p, -pbits - 6, 1);
      const Rounded r = fp_exp(x);
      if (r.flagged()) continue;
      ++checked_exp;
      const oracle::Wide want = boost::multiprecision::exp(oracle::wide(x));
      REQUIRE_MESSAGE(relative_error(r.value, want) <= bound, x);
    }
    CHECK(checked_exp > 7000);
    for (int i = 0; i < 10000; ++i) {
      const FpNum x = random_fp(rng, p, p.min_exponent(), p.max_exponent()).abs();
      const oracle::Wide want = boost::multiprecision::sqrt(oracle::wide(x));
      REQUIRE_MESSAGE(relative_error(fp_sqrt(x), want) <= bound, x);
    }
  }
}
