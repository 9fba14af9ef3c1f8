#pragma once

#include <array>
#include <optional>
#include <utility>

#include "squfof/contfrac.hpp"
#include "squfof/nt.hpp"

namespace squfof {

/// Indefinite integral binary quadratic form a*x^2 + b*x*y + c*y^2 with
/// cached discriminant D = b^2 - 4ac > 0, non-square, D == 0 or 1 (mod 4).
struct QuadForm {
  Int a, b, c;
  Int D;

  QuadForm() = default;
  QuadForm(Int a_, Int b_, Int c_);

  bool operator==(const QuadForm& o) const {
    return a == o.a && b == o.b && c == o.c;
  }
  bool operator!=(const QuadForm& o) const { return !(*this == o); }
};

Int discriminant(const Int& a, const Int& b, const Int& c);

/// Exact integer evaluation of |sqrt(D) - 2|a|| < b < sqrt(D).
bool is_reduced(const QuadForm& f);

/// T_m: (a, b, c) -> (a, b + 2am, ((b+2am)^2 - D) / 4a).
QuadForm apply_Tm(const QuadForm& f, const Int& m);

/// W: (a, b, c) -> (c, -b, a).
QuadForm apply_W(const QuadForm& f);

/// (a, b, c) -> (c, b, a), the symmetric reverse.
QuadForm reversal(const QuadForm& f);

struct ReductionResult {
  QuadForm form;
  double dist = 0.0;  // reduction distance D_rho
  int steps = 0;      // number of W applications
  // Accumulated GL2 word (row-major s,t,u,v); replaying it on the input
  // reproduces the reduced form.
  std::array<Int, 4> word{1, 0, 0, 1};
};

ReductionResult reduce(const QuadForm& f);

/// Applies the matrix gamma = (s,t;u,v) to f: f(sx+ty, ux+vy).
QuadForm apply_word(const QuadForm& f, const std::array<Int, 4>& w);

/// Adjacency map: unique reduced right neighbor of a reduced form.
QuadForm rho(const QuadForm& f);
QuadForm rho_inv(const QuadForm& f);

/// Infrastructure distance gained by one rho step leaving form `from`:
/// (1/2) log |(sqrt(D) + b) / (sqrt(D) - b)|, the log ratio of the root of
/// the departed form to its conjugate.  Each rho step multiplies the ideal
/// of the form by that root, so sums of these increments track exact ideal
/// positions and composition is additive in them (mod the regulator).
double rho_step_distance(const QuadForm& from);

/// Composition per the Dirichlet algorithm; returns the composed form and
/// the cancelled factor m = gcd(a1, a2, (b1+b2)/2).
std::pair<QuadForm, Int> compose(const QuadForm& f, const QuadForm& g);

struct ComposeReduced {
  QuadForm form;
  Int m;
  double dist_rho = 0.0;
};

/// Reduced composition (#): compose then reduce, keeping the inputs to the
/// infrastructure distance formula.
ComposeReduced compose_reduce(const QuadForm& f, const QuadForm& g);

/// CF state -> form bridge.  For the normalized convention with Q even this
/// is f+ = (Q/2, P, (P^2-N)/2Q) of discriminant N (negated for sign = -1);
/// otherwise (Q, 2P, (P^2-N)/Q) of discriminant 4N.
QuadForm form_from_cf(const CFState& s, int sign = +1);

/// Inverse bridge; convention inferred from the discriminant's parity.
CFState cf_from_form(const QuadForm& f);

/// Walks the cycle of a reduced form looking for a symmetry pair
/// (c,b,a) -> (a,b,c).  Returns (a, certified divisor of D) or nullopt
/// after a full cycle (class not ambiguous).
std::optional<std::pair<Int, Int>> is_ambiguous_class_symmetry(
    const QuadForm& f, long max_steps);

/// F = (r^2, b, c) -> reduce((r, b, r*c)): a reduced form whose square lies
/// in the cycle of F.
QuadForm sqrt_of_square_form(const QuadForm& F);

/// The identity form of discriminant D: (1, b0, ...) reduced.
QuadForm principal_form(const Int& D);

}  // namespace squfof
