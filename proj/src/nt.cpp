#include "squfof/nt.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace squfof {

Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt: negative argument");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

u64 isqrt_u64(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  // sqrt() may be off by one in either direction near 2^53 and above.
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

u128 isqrt_u128(u128 n) {
  if (n <= UINT64_MAX) return isqrt_u64(static_cast<u64>(n));
  // Seed from the high bits, then fix up with Newton steps.
  int shift = 0;
  u128 t = n;
  while (t > UINT64_MAX) {
    t >>= 2;
    shift += 1;
  }
  u128 r = static_cast<u128>(isqrt_u64(static_cast<u64>(t))) << shift;
  // Newton iteration converges in a couple of rounds from this seed.
  for (int i = 0; i < 6; ++i) {
    u128 next = (r + n / r) >> 1;
    if (next >= r) break;
    r = next;
  }
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

namespace {

// Residue filters: squares mod 64, 63 and 65 are sparse.
struct SquareFilters {
  std::array<bool, 64> m64{};
  std::array<bool, 63> m63{};
  std::array<bool, 65> m65{};
  SquareFilters() {
    for (unsigned i = 0; i < 64; ++i) m64[(i * i) % 64] = true;
    for (unsigned i = 0; i < 63; ++i) m63[(i * i) % 63] = true;
    for (unsigned i = 0; i < 65; ++i) m65[(i * i) % 65] = true;
  }
};
const SquareFilters kFilters;

}  // namespace

std::optional<Int> is_perfect_square(const Int& n) {
  if (n < 0) return std::nullopt;
  if (!kFilters.m64[mpz_fdiv_ui(n.get_mpz_t(), 64)]) return std::nullopt;
  if (!kFilters.m63[mpz_fdiv_ui(n.get_mpz_t(), 63)]) return std::nullopt;
  if (!kFilters.m65[mpz_fdiv_ui(n.get_mpz_t(), 65)]) return std::nullopt;
  Int r = isqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

bool is_square_u64(u64 n, u64* root) {
  if (!kFilters.m64[n % 64]) return false;
  if (!kFilters.m63[n % 63]) return false;
  if (!kFilters.m65[n % 65]) return false;
  u64 r = isqrt_u64(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

bool is_square_u128(u128 n, u128* root) {
  if (!kFilters.m64[static_cast<unsigned>(n % 64)]) return false;
  if (!kFilters.m63[static_cast<unsigned>(n % 63)]) return false;
  if (!kFilters.m65[static_cast<unsigned>(n % 65)]) return false;
  u128 r = isqrt_u128(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

bool is_probable_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

namespace {

// Residue class r mod m; m == 0 encodes "not yet constrained".
struct ResidueClass {
  Int r;
  Int m;
};

// Solve k*x == v (mod M) as a residue class.
ResidueClass solve_linear(const Int& k, const Int& v, const Int& M) {
  Int kk = k % M;
  if (kk < 0) kk += M;
  Int vv = v % M;
  if (vv < 0) vv += M;
  if (kk == 0) {
    if (vv != 0) throw std::domain_error("inconsistent system");
    return {0, 1};  // no constraint
  }
  Int g = gcd(kk, M);
  if (vv % g != 0) throw std::domain_error("inconsistent system");
  Int m2 = M / g;
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), Int(kk / g).get_mpz_t(), m2.get_mpz_t()) == 0)
    throw std::domain_error("inconsistent system");
  Int r = (vv / g) * inv % m2;
  return {r, m2};
}

ResidueClass merge(const ResidueClass& x, const ResidueClass& y) {
  Int g = gcd(x.m, y.m);
  Int diff = y.r - x.r;
  if (diff % g != 0) throw std::domain_error("inconsistent system");
  Int m1g = x.m / g;
  Int m2g = y.m / g;
  Int inv;
  mpz_invert(inv.get_mpz_t(), m1g.get_mpz_t(), m2g.get_mpz_t());
  Int t = (diff / g) * inv % m2g;
  Int m = x.m * m2g;  // lcm
  Int r = (x.r + x.m * t) % m;
  if (r < 0) r += m;
  return {r, m};
}

}  // namespace

Int solve_congruence_system(const Int& a1, const Int& b1, const Int& a2,
                            const Int& b2, const Int& m, const Int& D,
                            const Int& modulus) {
  Int M = abs(modulus);
  if (M == 0) throw std::domain_error("zero modulus");
  ResidueClass acc{0, 1};
  acc = merge(acc, solve_linear(a2 * m, m * b1 * a2, M));
  acc = merge(acc, solve_linear(a1 * m, m * b2 * a1, M));
  acc = merge(acc, solve_linear(((b1 + b2) / 2) * m, m * (b1 * b2 + D) / 2, M));
  // Smallest |B| over the solution class; tie toward the positive value.
  Int L = acc.m;
  Int B = acc.r % L;
  if (B < 0) B += L;
  if (2 * B > L) B -= L;
  return B;
}

}  // namespace squfof
