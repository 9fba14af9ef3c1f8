#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>

namespace squfof {

/// Arbitrary-precision integer used throughout the library.
using Int = mpz_class;

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// floor(sqrt(n)); exact, integer-only. Requires n >= 0.
Int isqrt(const Int& n);

u64 isqrt_u64(u64 n);
u128 isqrt_u128(u128 n);

/// Returns sqrt(n) when n is a perfect square, nullopt otherwise.
/// Cheap residue filters (mod 64/63/65) run before the isqrt.
std::optional<Int> is_perfect_square(const Int& n);

/// Word-size variant. If root != nullptr it receives sqrt(n) on success.
bool is_square_u64(u64 n, u64* root = nullptr);
bool is_square_u128(u128 n, u128* root = nullptr);

Int gcd(const Int& a, const Int& b);

/// Miller-Rabin backed probable-prime test.
bool is_probable_prime(const Int& n);

/// Solves the three composition congruences
///   a2*m*B == m*b1*a2,  a1*m*B == m*b2*a1,
///   ((b1+b2)/2)*m*B == m*(b1*b2+D)/2     (all mod |modulus|)
/// for B, returning the solution of smallest absolute value.
/// Ties between +B and -B break toward the positive value.
/// Throws std::domain_error if no common solution exists.
Int solve_congruence_system(const Int& a1, const Int& b1, const Int& a2,
                            const Int& b2, const Int& m, const Int& D,
                            const Int& modulus);

inline double to_double(const Int& n) { return n.get_d(); }

}  // namespace squfof
