#pragma once

#include <optional>

#include "squfof/nt.hpp"
#include "squfof/report.hpp"

namespace squfof {

/// Which surd is being expanded.
///   normalized: (sqrt(N)+P)/2 with P = r or r-1 chosen odd; discriminant N.
///               Requires N == 1 (mod 4), N odd.
///   standard:   sqrt(N) seeded as the reduced associate sqrt(N)+r, so the
///               two-sided expansion is purely periodic; discriminant 4N.
enum class Convention { normalized, standard };

/// One position of the two-sided continued fraction.  The complete quotient
/// at `index` is x = (sqrt(N) + P) / Q, where P is the paper-style P_{i-1}
/// and Q is Q_i.  Qprev = Q_{i-1} keeps the recursion on integers < 2*sqrt(N).
struct CFState {
  Int N;
  Int P;      // P_{i-1}
  Int Q;      // Q_i  (the pseudo-square)
  Int Qprev;  // Q_{i-1}
  Int b;      // b_i = floor((r + P) / Q)
  long index = 0;
  Convention conv = Convention::standard;
  Int r;  // cached floor(sqrt(N))
};

/// Same cycle position: identical surd, independent of index bookkeeping.
bool same_position(const CFState& x, const CFState& y);

CFState init_expansion(const Int& N, Convention conv);

CFState step_forward(const CFState& s);
CFState step_backward(const CFState& s);

/// 4 * ceil(sqrt(N)): generous default bound for full-cycle walks.
long default_max_steps(const Int& N);

/// Least pi > 0 with state(pi) == state(0); nullopt if not found in max_steps.
std::optional<long> find_period(const CFState& s0, long max_steps);

struct SymmetrySearch {
  enum class Outcome {
    factor_found,
    trivial_symmetry,          // symmetry hit but gcd(Q_s, N) in {1, N}
    odd_period_qr_minus_one,   // odd-period symmetry, -1 is a QR of N
    exhausted,
  };
  Outcome outcome = Outcome::exhausted;
  std::optional<FactorReport> report;
  long sym_index = -1;  // index s of the symmetry coefficient Q_s
  Int Qs;
  bool even_period = false;
};

/// Walks forward from s0 watching for P_i == P_{i-1} (even-period symmetry)
/// or Q_{i+1} == Q_i (odd-period symmetry) and extracts gcd(Q_s, N).
SymmetrySearch symmetry_factor(const CFState& s0, long max_steps);

/// Convergent numerators/denominators mod N; tracks the pseudo-square
/// identity A_{i-1}^2 - B_{i-1}^2 N = (-1)^i Q_i.
struct Convergents {
  Int N;
  Int A_prev, B_prev;  // A_{i-1}, B_{i-1}
  Int A, B;            // A_i, B_i
  long index = 0;

  static Convergents start(const CFState& s0);
  void step(const Int& b_next);
};

// ---------------------------------------------------------------------------
// Word-size fast path.  Valid for N < 2^124: every CF quantity stays below
// 2*sqrt(N) < 2^63 and fits a u64; intermediate products use 128-bit math.
// Must agree bit-exactly with the mpz path (differential-tested).
// ---------------------------------------------------------------------------

struct FastState {
  u64 P = 0;
  u64 Q = 0;
  u64 Qprev = 0;
  u64 b = 0;
  long index = 0;
};

class FastExpansion {
 public:
  FastExpansion(u128 N, Convention conv);

  static bool fits(const Int& N);
  static u128 to_u128(const Int& N);

  FastState initial() const { return init_; }
  void step(FastState& s) const;
  void step_back(FastState& s) const;

  /// Seed a state from arbitrary (P_{i-1}, Q_i) with P^2 == N (mod Q).
  FastState seed(u64 P, u64 Q, long index) const;

  u128 N() const { return N_; }
  u64 r() const { return r_; }

 private:
  u128 N_;
  u64 r_;
  Convention conv_;
  FastState init_;
};

CFState to_cfstate(const FastExpansion& e, const FastState& s, Convention conv);

}  // namespace squfof
