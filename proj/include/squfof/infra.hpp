#pragma once

#include <optional>
#include <vector>

#include "squfof/contfrac.hpp"
#include "squfof/qforms.hpp"
#include "squfof/report.hpp"

namespace squfof {

/// Distance along a cycle in natural-log units, reduced mod the regulator
/// when it is known.
struct DistanceValue {
  double value = 0.0;
  std::optional<double> modulus;  // the regulator R

  DistanceValue reduced() const;
  DistanceValue operator+(const DistanceValue& o) const;
};

/// Nearest-multiple reduction of x mod R into [0, R).
double mod_regulator(double x, double R);

/// Per-step distance increment log x_k = log((sqrt(N)+P)/Q) of the state.
double step_distance(const CFState& s);

/// Regulator: total distance around the principal cycle, by full traversal.
double regulator(const Int& N, Convention conv);

/// A reduced form's cycle annotated with the distance of each position
/// from the starting form.  Test/search helper for Theorem-6 style checks.
struct CycleWalk {
  std::vector<QuadForm> forms;
  std::vector<double> dist;  // dist[i] = D(forms[0], forms[i])
  double total = 0.0;        // distance around the full cycle

  static CycleWalk of(const QuadForm& start, long max_steps);
  std::optional<double> distance_to(const QuadForm& g) const;
};

/// Residual |LHS - RHS| (mod R, nearest) of the infrastructure distance
/// formula for F1 ~ Fk at distance dF and G1 ~ Gl at distance dG.
/// The LHS is measured by walking the cycle of F1#G1.
double check_distance_formula(const QuadForm& F1, const QuadForm& Fk,
                              double dF, const QuadForm& G1,
                              const QuadForm& Gl, double dG, double R,
                              long max_steps);

struct BsgsOptions {
  long baby_step_bound = 0;  // 0: derived from N
  long giant_step_bound = 256;
};

/// Baby-step giant-step factorization given the regulator.  Returns nullopt
/// when only trivial symmetry divisors exist (prime N or obstruction).
/// report.forward_steps counts giant steps, report.reverse_steps baby steps.
std::optional<FactorReport> bsgs_factor(const Int& N, double R,
                                        const BsgsOptions& opts = {});

}  // namespace squfof
