#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>

#include "doctest.h"
#include "oracles.hpp"
#include "squfof/contfrac.hpp"
#include "squfof/nt.hpp"

using namespace squfof;

TEST_CASE("isqrt on boundaries and exact squares") {
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(1) == 1);
  CHECK(isqrt(21) == 4);
  Int t = 1;
  for (int i = 0; i < 18; ++i) t *= 10;
  CHECK(isqrt(t) == 1000000000);
  CHECK(isqrt(t - 1) == 999999999);
}

TEST_CASE("isqrt bracket property on random inputs") {
  oracle::Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    Int n = rng.bits(64);
    Int r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
  }
  for (int i = 0; i < 200; ++i) {
    Int n = rng.bits(200);
    Int r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
  }
}

TEST_CASE("word-size isqrt agrees with the arbitrary-precision path") {
  auto int_of_u128 = [](u128 v) -> Int {
    return Int(static_cast<unsigned long>(static_cast<u64>(v >> 64))) *
               (Int(1) << 64) +
           Int(static_cast<unsigned long>(static_cast<u64>(v)));
  };
  oracle::Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    Int n = rng.bits(63);
    u64 v = mpz_get_ui(n.get_mpz_t());
    CHECK(Int(static_cast<unsigned long>(isqrt_u64(v))) == isqrt(n));
  }
  for (int i = 0; i < 500; ++i) {
    Int n = rng.bits(120);
    CHECK(int_of_u128(isqrt_u128(FastExpansion::to_u128(n))) == isqrt(n));
  }
}

TEST_CASE("perfect square detection") {
  CHECK(is_perfect_square(4) == Int(2));
  CHECK(is_perfect_square(1) == Int(1));
  CHECK(is_perfect_square(0) == Int(0));
  CHECK(!is_perfect_square(5));
  CHECK(!is_perfect_square(2));

  oracle::Rng rng(3);
  for (int i = 0; i < 3000; ++i) {
    Int n = rng.bits(80);
    auto r = is_perfect_square(n);
    Int q = isqrt(n);
    CHECK(static_cast<bool>(r) == (q * q == n));
    if (r) CHECK(*r == q);
    CHECK(is_perfect_square(n * n) == n);
  }
}

TEST_CASE("word-size square tests agree with the mpz path") {
  oracle::Rng rng(4);
  for (int i = 0; i < 3000; ++i) {
    Int n = rng.bits(62);
    u64 v = mpz_get_ui(n.get_mpz_t());
    u64 root = 0;
    bool s = is_square_u64(v, &root);
    auto ref = is_perfect_square(Int(static_cast<unsigned long>(v)));
    CHECK(s == static_cast<bool>(ref));
    if (s) CHECK(Int(static_cast<unsigned long>(root)) == *ref);
  }
}

TEST_CASE("probable prime test on known values") {
  CHECK(is_probable_prime(2));
  CHECK(is_probable_prime(1000000007));
  CHECK(!is_probable_prime(1));
  CHECK(!is_probable_prime(Int(1000000007) * 1000000009));
  oracle::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    Int n = rng.bits(20) + 2;
    CHECK(is_probable_prime(n) == oracle::is_prime_slow(n));
  }
}

namespace {

// Brute-force solver: scan every B in (-|mod|, |mod|] for one satisfying all
// three composition congruences, keeping the smallest |B| (positive on tie).
std::optional<Int> scan_congruences(const Int& a1, const Int& b1,
                                    const Int& a2, const Int& b2, const Int& m,
                                    const Int& D, const Int& modulus) {
  Int mod = abs(modulus);
  std::optional<Int> best;
  for (Int B = -mod + 1; B <= mod; ++B) {
    Int r1 = (a2 * m * B - m * b1 * a2) % mod;
    Int r2 = (a1 * m * B - m * b2 * a1) % mod;
    Int r3 = (((b1 + b2) / 2) * m * B - m * (b1 * b2 + D) / 2) % mod;
    if (r1 != 0 || r2 != 0 || r3 != 0) continue;
    if (!best || abs(B) < abs(*best) || (abs(B) == abs(*best) && B > *best))
      best = B;
  }
  return best;
}

}  // namespace

TEST_CASE("congruence solver equals exhaustive scan on cycle pairs") {
  int checked = 0;
  for (long Dv : {85, 136, 221, 901, 1096}) {
    Int D(Dv);
    QuadForm start = principal_form(D);
    std::vector<QuadForm> cyc{start};
    for (QuadForm g = rho(start); !(g == start); g = rho(g)) cyc.push_back(g);
    for (size_t i = 0; i < cyc.size(); ++i)
      for (size_t j = i; j < cyc.size(); j += 3) {
        const QuadForm &f = cyc[i], &g = cyc[j];
        Int m = gcd(gcd(f.a, g.a), Int((f.b + g.b) / 2));
        Int modulus = 2 * f.a * g.a;
        if (abs(modulus) > 3000) continue;
        Int B = solve_congruence_system(f.a, f.b, g.a, g.b, m, D, modulus);
        auto ref = scan_congruences(f.a, f.b, g.a, g.b, m, D, modulus);
        REQUIRE(ref);
        CHECK(B == *ref);
        ++checked;
      }
  }
  CHECK(checked > 50);
}

TEST_CASE("composing the principal form with itself solves to B = b") {
  for (long Dv : {13, 21 * 4, 901, 3701}) {
    QuadForm e = principal_form(Int(Dv));
    Int m = gcd(gcd(e.a, e.a), e.b);
    Int B = solve_congruence_system(e.a, e.b, e.a, e.b, m, e.D, 2 * e.a * e.a);
    CHECK((B - e.b) % (2 * e.a * e.a) == 0);
  }
}
