#pragma once

// Independent reference implementations used only by tests.  Everything here
// is brute force on purpose: slow, obvious, and easy to audit.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "squfof/infra.hpp"
#include "squfof/qforms.hpp"

namespace oracle {

using squfof::Int;
using squfof::QuadForm;

// Smallest prime factor by trial division; returns n for primes.
inline Int smallest_factor(const Int& n) {
  if (n < 4) return n;
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (Int d = 3; d * d <= n; d += 2)
    if (n % d == 0) return d;
  return n;
}

inline bool is_prime_slow(const Int& n) {
  return n >= 2 && smallest_factor(n) == n;
}

// All reduced forms of discriminant D, by direct scan of the definition:
// b in (0, sqrt(D)), b == D (mod 2), ac = (b^2 - D)/4, |sqrt(D)-2|a|| < b.
inline std::vector<QuadForm> all_reduced_forms(const Int& D) {
  std::vector<QuadForm> out;
  Int rD = squfof::isqrt(D);
  for (Int b = 1; b <= rD; ++b) {
    if (mpz_odd_p(b.get_mpz_t()) != mpz_odd_p(D.get_mpz_t())) continue;
    Int ac4 = b * b - D;  // negative
    if (ac4 % 4 != 0) continue;
    Int ac = ac4 / 4;
    for (Int a = 1; a * a <= -ac; ++a) {
      if (ac % a != 0) continue;
      for (const Int& aa : {Int(a), Int(-ac / a)}) {
        Int cc = ac / aa;
        for (int sgn : {1, -1}) {
          QuadForm f(sgn * aa, b, sgn >= 0 ? cc : -cc);
          if (squfof::is_reduced(f)) out.push_back(f);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const QuadForm& x, const QuadForm& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Fundamental solution of x^2 - N y^2 = 1 by scanning y upward.
inline std::pair<Int, Int> pell_fundamental(const Int& N) {
  for (Int y = 1;; ++y) {
    auto x = squfof::is_perfect_square(N * y * y + 1);
    if (x) return {*x, y};
  }
}

// Partial quotients of sqrt(N) from a high-precision floating expansion.
inline std::vector<long> float_quotients(const Int& N, int count) {
  mpf_set_default_prec(1024);
  mpf_class x;
  mpf_sqrt(x.get_mpf_t(), mpf_class(N, 1024).get_mpf_t());
  std::vector<long> out;
  for (int i = 0; i < count; ++i) {
    mpf_class fl;
    mpf_floor(fl.get_mpf_t(), x.get_mpf_t());
    out.push_back(static_cast<long>(fl.get_d()));
    x = 1 / (x - fl);
  }
  return out;
}

// Even indices i <= bound where Q_i of the standard expansion of sqrt(N) is
// a perfect square with root > 1.
inline std::vector<long> even_square_indices(const Int& N, long bound) {
  std::vector<long> out;
  squfof::CFState s =
      squfof::init_expansion(N, squfof::Convention::standard);
  for (long i = 1; i <= bound; ++i) {
    s = squfof::step_forward(s);
    if (s.index % 2 != 0) continue;
    auto r = squfof::is_perfect_square(s.Q);
    if (r && *r > 1) out.push_back(s.index);
  }
  return out;
}

// Position of g on the cycle walk, by linear scan.
inline std::optional<size_t> cycle_index(const squfof::CycleWalk& w,
                                         const QuadForm& g) {
  for (size_t i = 0; i < w.forms.size(); ++i)
    if (w.forms[i] == g) return i;
  return std::nullopt;
}

struct Rng {
  gmp_randstate_t st;
  explicit Rng(unsigned long seed) {
    gmp_randinit_mt(st);
    gmp_randseed_ui(st, seed);
  }
  ~Rng() { gmp_randclear(st); }

  Int bits(int n) {
    Int x;
    mpz_urandomb(x.get_mpz_t(), st, n);
    return x;
  }
  Int below(const Int& n) {
    Int x;
    mpz_urandomm(x.get_mpz_t(), st, n.get_mpz_t());
    return x;
  }
  // Random prime of exactly `n` bits; optionally a fixed residue mod 8.
  Int prime(int n, int mod8 = -1) {
    while (true) {
      Int p = bits(n - 1) | (Int(1) << (n - 1)) | 1;
      mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
      if (mpz_sizeinbase(p.get_mpz_t(), 2) != static_cast<size_t>(n)) continue;
      if (mod8 >= 0 && mpz_fdiv_ui(p.get_mpz_t(), 8) != (unsigned)mod8)
        continue;
      return p;
    }
  }
  Int semiprime(int factor_bits, int mod8_p = -1, int mod8_q = -1) {
    while (true) {
      Int p = prime(factor_bits, mod8_p);
      Int q = prime(factor_bits, mod8_q);
      if (p != q) return p * q;
    }
  }
};

}  // namespace oracle
