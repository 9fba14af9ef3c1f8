#pragma once

#include <optional>
#include <vector>

#include "squfof/contfrac.hpp"
#include "squfof/qforms.hpp"
#include "squfof/report.hpp"

namespace squfof {

struct SqufofConfig {
  long max_forward_steps = 0;  // 0: 6 * ceil(N^(1/4)) * log2(N)
  long max_reverse_steps = 0;  // 0: derived from the square's index
  bool store_powers_of_two = true;
  int multiplier = 1;  // 1: escalate through the squarefree ladder
  enum class TrivialSquarePolicy { skip_and_continue, abort };
  TrivialSquarePolicy trivial_square_policy =
      TrivialSquarePolicy::skip_and_continue;
};

long default_forward_bound(const Int& N);

/// The squarefree odd multiplier ladder used on failure.
const std::vector<int>& multiplier_ladder();

struct SquareFormHit {
  CFState state;  // even index, Q a perfect square
  Int root;
  std::vector<QuadForm> stored;  // forms recorded at indices 2^n
  long forward_steps = 0;
  long squares_tested = 0;
};

/// Forward CF scan of sqrt(N) for the first even-index square pseudo-square
/// with root > 1.  nullopt when max_forward_steps is exhausted.
std::optional<SquareFormHit> find_square_form(const Int& N,
                                              const SqufofConfig& cfg = {});

/// Square-root form of the hit, composed with the stored forms selected by
/// the set bits of index/2 (LSB first, reducing after each step).
QuadForm jump_to_inverse_cycle(const CFState& square_state,
                               const std::vector<QuadForm>& stored);

struct ReverseResult {
  enum class Outcome { factor_found, trivial_symmetry, exhausted };
  Outcome outcome = Outcome::exhausted;
  std::optional<FactorReport> report;
  long steps = 0;
};

/// Tandem walk of the cycle of G and its reversal until either stream hits
/// P_i == P_{i-1}; extracts gcd(Q_s, N).
ReverseResult reverse_symmetry_search(const QuadForm& G, const Int& N,
                                      long bound);

/// Full serial SQUFOF.  Throws std::domain_error on prime input and
/// std::runtime_error when every multiplier is exhausted.
FactorReport squfof_factor(const Int& N, const SqufofConfig& cfg = {});

}  // namespace squfof
