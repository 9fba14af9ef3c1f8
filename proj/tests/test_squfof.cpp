#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "squfof/squfof.hpp"

using namespace squfof;

TEST_CASE("first even-index square pseudo-square for 21") {
  auto hit = find_square_form(21);
  REQUIRE(hit.has_value());
  CHECK(hit->state.index == 2);
  CHECK(hit->state.Q == 4);
  CHECK(hit->root == 2);
  CHECK(hit->state.index % 2 == 0);

  // The scan must agree with a plain walk checking every even index.
  auto idx = oracle::even_square_indices(21, 100);
  REQUIRE(!idx.empty());
  CHECK(idx.front() == hit->state.index);
}

TEST_CASE("square hits agree with the exhaustive scan on random input") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 15; ++trial) {
    Int N = rng.prime(13) * rng.prime(13);
    auto idx = oracle::even_square_indices(N, 4000);
    SqufofConfig cfg;
    cfg.multiplier = 1;
    cfg.max_forward_steps = 4000;
    auto hit = find_square_form(N, cfg);
    if (idx.empty()) {
      CHECK(!hit.has_value());
      continue;
    }
    REQUIRE(hit.has_value());
    CHECK(hit->state.index == idx.front());
    CHECK(hit->root * hit->root == hit->state.Q);
    CHECK(hit->root > 1);
    // Stored forms sit at indices 2^n and live in the right world.
    for (const QuadForm& f : hit->stored) CHECK(f.D == 4 * N);
  }
}

TEST_CASE("the jump lands on a square root of the square form") {
  oracle::Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Int N = rng.prime(12) * rng.prime(12);
    auto hit = find_square_form(N);
    if (!hit) continue;
    QuadForm G = jump_to_inverse_cycle(hit->state, hit->stored);
    CHECK(is_reduced(G));
    CHECK(G.D == 4 * N);
    // When nothing cancels in the self-composition, the bare square root,
    // squared, returns to the cycle of the hit form.
    QuadForm g0 = sqrt_of_square_form(form_from_cf(hit->state));
    if (gcd(hit->root, 2 * hit->state.P) == 1) {
      QuadForm F = reduce(form_from_cf(hit->state)).form;
      QuadForm g = compose_reduce(g0, g0).form;
      bool found = false;
      for (long i = 0; i < 8 * default_max_steps(N) && !found; ++i) {
        if (g == F) found = true;
        g = rho(g);
      }
      CHECK(found);
    }
    // The jump is that root composed with the stored forms picked out by
    // the bits of index/2, least significant first.
    QuadForm manual = g0;
    long half = hit->state.index / 2;
    for (size_t n = 0; (half >> n) != 0; ++n) {
      if (!((half >> n) & 1)) continue;
      if (n >= hit->stored.size()) break;
      manual = compose_reduce(manual, hit->stored[n]).form;
    }
    CHECK(manual == G);
  }
}

TEST_CASE("serial factorization on small inputs") {
  FactorReport r21 = squfof_factor(21);
  CHECK(r21.factor_small == 3);
  CHECK(r21.factor_large == 7);
  CHECK(r21.valid());

  FactorReport r9 = squfof_factor(9);
  CHECK(r9.factor_small == 3);
  CHECK(r9.factor_large == 3);

  CHECK_THROWS_AS(squfof_factor(10007), std::domain_error);
  CHECK_THROWS_AS(squfof_factor(Int(1) << 61), std::invalid_argument);
}

TEST_CASE("short-period inputs succeed through the multiplier ladder") {
  // N = m^2 - 1 has a length-2 expansion and no useful square; the ladder
  // must rescue it.
  for (long m : {10, 100, 314}) {
    Int N = Int(m) * m - 1;
    FactorReport r = squfof_factor(N);
    CHECK(r.valid());
    CHECK(N % r.factor_small == 0);
  }
  FactorReport r99 = squfof_factor(99);
  CHECK(r99.valid());
  CHECK(r99.multiplier >= 1);
}

TEST_CASE("random semiprimes factor correctly across sizes") {
  oracle::Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    Int p = rng.prime(10), q = rng.prime(10);
    Int N = p * q;
    FactorReport r = squfof_factor(N);
    CHECK(r.valid());
    CHECK(r.factor_small == oracle::smallest_factor(N));
  }
  for (int trial = 0; trial < 25; ++trial) {
    Int N = rng.prime(24) * rng.prime(24);
    FactorReport r = squfof_factor(N);
    CHECK(r.valid());
    CHECK(N % r.factor_small == 0);
    CHECK(r.forward_steps > 0);
  }
  for (int trial = 0; trial < 5; ++trial) {
    Int N = rng.prime(31) * rng.prime(31);
    FactorReport r = squfof_factor(N);
    CHECK(r.valid());
    CHECK(N % r.factor_small == 0);
  }
}

TEST_CASE("reverse search classifies trivial symmetry without lying") {
  oracle::Rng rng(53);
  int factored = 0, other = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Int N = rng.prime(14) * rng.prime(14);
    auto hit = find_square_form(N);
    if (!hit) continue;
    QuadForm G = jump_to_inverse_cycle(hit->state, hit->stored);
    ReverseResult rr = reverse_symmetry_search(G, N, default_max_steps(N));
    if (rr.outcome == ReverseResult::Outcome::factor_found) {
      REQUIRE(rr.report.has_value());
      CHECK(rr.report->valid());
      CHECK(N % rr.report->factor_small == 0);
      ++factored;
    } else {
      ++other;
    }
  }
  CHECK(factored > other);
}

TEST_CASE("multiplier ladder is fixed and squarefree") {
  const auto& lad = multiplier_ladder();
  CHECK(lad.front() == 1);
  for (size_t i = 1; i < lad.size(); ++i) {
    CHECK(lad[i] > lad[i - 1]);
    CHECK(lad[i] % 2 == 1);
    for (int d = 2; d * d <= lad[i]; ++d) CHECK(lad[i] % (d * d) != 0);
  }
}
