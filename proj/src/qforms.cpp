#include "squfof/qforms.hpp"

#include <cmath>
#include <stdexcept>

namespace squfof {

namespace {

Int mod_nonneg(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Unique b' == b (mod 2|a|) in the normalization interval J_{a,D}:
//   |a| > sqrt(D): b' in (-|a|, |a|]
//   |a| < sqrt(D): b' in (sqrt(D) - 2|a|, sqrt(D)), i.e. [rD+1-2|a|, rD].
Int normalize_b(const Int& a, const Int& b, const Int& rD) {
  Int aa = abs(a);
  Int upper = (aa > rD) ? aa : rD;
  Int two_a = 2 * aa;
  return upper - mod_nonneg(upper - b, two_a);
}

// Distance gained by one surd step leaving a form with middle coefficient b:
// half the log of the ratio of the root to its conjugate.
double surd_log(const Int& b, double sqrtD) {
  double bb = to_double(b);
  return 0.5 * std::log(std::fabs((sqrtD + bb) / (sqrtD - bb)));
}

}  // namespace

Int discriminant(const Int& a, const Int& b, const Int& c) {
  return b * b - 4 * a * c;
}

QuadForm::QuadForm(Int a_, Int b_, Int c_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
  D = discriminant(a, b, c);
  if (D <= 0) throw std::domain_error("QuadForm: discriminant must be > 0");
  unsigned long rem = mpz_fdiv_ui(D.get_mpz_t(), 4);
  if (rem != 0 && rem != 1)
    throw std::domain_error("QuadForm: D must be 0 or 1 (mod 4)");
  if (is_perfect_square(D))
    throw std::domain_error("QuadForm: square discriminant");
}

bool is_reduced(const QuadForm& f) {
  if (f.b <= 0) return false;
  if (f.b * f.b >= f.D) return false;
  Int two_a = 2 * abs(f.a);
  Int lo = two_a - f.b;  // sqrt(D) must exceed 2|a| - b
  if (lo > 0 && lo * lo >= f.D) return false;
  Int hi = two_a + f.b;  // and stay below 2|a| + b
  if (hi * hi <= f.D) return false;
  return true;
}

QuadForm apply_Tm(const QuadForm& f, const Int& m) {
  Int b2 = f.b + 2 * f.a * m;
  Int c2 = (b2 * b2 - f.D) / (4 * f.a);
  return QuadForm(f.a, b2, c2);
}

QuadForm apply_W(const QuadForm& f) { return QuadForm(f.c, -f.b, f.a); }

QuadForm reversal(const QuadForm& f) { return QuadForm(f.c, f.b, f.a); }

QuadForm apply_word(const QuadForm& f, const std::array<Int, 4>& w) {
  const Int& s = w[0];
  const Int& t = w[1];
  const Int& u = w[2];
  const Int& v = w[3];
  Int a2 = f.a * s * s + f.b * s * u + f.c * u * u;
  Int b2 = 2 * f.a * s * t + f.b * (s * v + t * u) + 2 * f.c * u * v;
  Int c2 = f.a * t * t + f.b * t * v + f.c * v * v;
  return QuadForm(a2, b2, c2);
}

namespace {

void word_mul_T(std::array<Int, 4>& w, const Int& m) {
  // w <- w * (1, m; 0, 1)
  w[1] += w[0] * m;
  w[3] += w[2] * m;
}

void word_mul_W(std::array<Int, 4>& w) {
  // w <- w * (0, -1; 1, 0)
  Int s = w[0], t = w[1], u = w[2], v = w[3];
  w[0] = t;
  w[1] = -s;
  w[2] = v;
  w[3] = -u;
}

// T-normalization; contributes no reduction distance.
QuadForm normalize(const QuadForm& f, const Int& rD, std::array<Int, 4>& w) {
  Int b2 = normalize_b(f.a, f.b, rD);
  if (b2 == f.b) return f;
  Int m = (b2 - f.b) / (2 * f.a);
  word_mul_T(w, m);
  Int c2 = (b2 * b2 - f.D) / (4 * f.a);
  return QuadForm(f.a, b2, c2);
}

}  // namespace

ReductionResult reduce(const QuadForm& f) {
  if (f.a == 0 && f.c == 0) throw std::domain_error("reduce: degenerate form");
  ReductionResult res;
  Int rD = isqrt(f.D);
  double sqrtD = std::sqrt(to_double(f.D));
  QuadForm g = normalize(f, rD, res.word);
  // Each W application followed by renormalization is one surd step; the
  // bound below is far above the O(log max|coeff|) guarantee.
  long cap = 2 * static_cast<long>(mpz_sizeinbase(
                 Int(abs(f.a) + abs(f.b) + abs(f.c)).get_mpz_t(), 2)) +
             64;
  while (!is_reduced(g)) {
    if (res.steps > cap) throw std::logic_error("reduce: no convergence");
    res.dist += surd_log(g.b, sqrtD);
    word_mul_W(res.word);
    g = apply_W(g);
    g = normalize(g, rD, res.word);
    res.steps += 1;
  }
  res.form = g;
  return res;
}

QuadForm rho(const QuadForm& f) {
  if (!is_reduced(f)) throw std::domain_error("rho: form not reduced");
  Int rD = isqrt(f.D);
  Int b2 = normalize_b(f.c, -f.b, rD);
  Int c2 = (b2 * b2 - f.D) / (4 * f.c);
  return QuadForm(f.c, b2, c2);
}

QuadForm rho_inv(const QuadForm& f) {
  if (!is_reduced(f)) throw std::domain_error("rho_inv: form not reduced");
  Int rD = isqrt(f.D);
  Int b0 = normalize_b(f.a, -f.b, rD);
  Int a0 = (b0 * b0 - f.D) / (4 * f.a);
  return QuadForm(a0, b0, f.a);
}

double rho_step_distance(const QuadForm& from) {
  return surd_log(from.b, std::sqrt(to_double(from.D)));
}

std::pair<QuadForm, Int> compose(const QuadForm& f, const QuadForm& g) {
  if (f.D != g.D) throw std::domain_error("compose: discriminant mismatch");
  Int half = (f.b + g.b) / 2;
  Int m = gcd(gcd(f.a, g.a), half);
  Int modulus = 2 * f.a * g.a;
  Int B = solve_congruence_system(f.a, f.b, g.a, g.b, m, f.D, modulus);
  Int a3 = f.a * g.a / (m * m);
  Int num = (B * B - f.D) * m * m;
  Int den = 4 * f.a * g.a;
  if (num % den != 0) throw std::logic_error("compose: non-integral c");
  return {QuadForm(a3, B, num / den), m};
}

ComposeReduced compose_reduce(const QuadForm& f, const QuadForm& g) {
  auto [h, m] = compose(f, g);
  ReductionResult red = reduce(h);
  return {red.form, m, red.dist};
}

QuadForm form_from_cf(const CFState& s, int sign) {
  Int num = s.P * s.P - s.N;
  if (s.conv == Convention::normalized && mpz_even_p(s.Q.get_mpz_t())) {
    Int den = 2 * s.Q;
    if (num % den != 0)
      throw std::domain_error("form_from_cf: parity violation");
    Int c = num / den;
    if (sign >= 0) return QuadForm(s.Q / 2, s.P, c);
    return QuadForm(-s.Q / 2, s.P, -c);
  }
  if (num % s.Q != 0) throw std::domain_error("form_from_cf: parity violation");
  Int c = num / s.Q;
  if (sign >= 0) return QuadForm(s.Q, 2 * s.P, c);
  return QuadForm(-s.Q, 2 * s.P, -c);
}

CFState cf_from_form(const QuadForm& f) {
  CFState s;
  Int N, P, Q;
  if (mpz_odd_p(f.D.get_mpz_t())) {
    N = f.D;
    Q = 2 * abs(f.a);
    P = (f.a > 0) ? f.b : f.b;
    s.conv = Convention::normalized;
  } else {
    N = f.D / 4;
    if (mpz_odd_p(f.b.get_mpz_t()))
      throw std::domain_error("cf_from_form: odd b with even discriminant");
    Q = abs(f.a);
    P = f.b / 2;
    s.conv = Convention::standard;
  }
  Int rem = P * P - N;
  if (rem % Q != 0)
    throw std::domain_error("cf_from_form: P^2 != N (mod Q)");
  s.N = N;
  s.P = P;
  s.Q = Q;
  s.Qprev = (N - P * P) / Q;
  s.r = isqrt(N);
  Int bq;
  mpz_fdiv_q(bq.get_mpz_t(), Int(s.r + P).get_mpz_t(), Q.get_mpz_t());
  s.b = bq;
  s.index = 0;
  return s;
}

std::optional<std::pair<Int, Int>> is_ambiguous_class_symmetry(
    const QuadForm& f, long max_steps) {
  QuadForm g = f;
  for (long i = 0; i < max_steps; ++i) {
    QuadForm h = rho(g);
    if (h.a == g.c && h.b == g.b && h.c == g.a) {
      Int aa = abs(h.a);
      Int div = (h.D % aa == 0) ? aa : aa / 2;
      return std::make_pair(h.a, div);
    }
    g = h;
    if (g == f) break;  // full cycle, no symmetry pair
  }
  return std::nullopt;
}

QuadForm sqrt_of_square_form(const QuadForm& F) {
  auto root = is_perfect_square(F.a);
  if (!root) throw std::domain_error("sqrt_of_square_form: not a square form");
  return reduce(QuadForm(*root, F.b, *root * F.c)).form;
}

QuadForm principal_form(const Int& D) {
  if (mpz_fdiv_ui(D.get_mpz_t(), 4) == 0) {
    Int N = D / 4;
    Int r = isqrt(N);
    return QuadForm(1, 2 * r, r * r - N);
  }
  Int rD = isqrt(D);
  Int b0 = (mpz_odd_p(rD.get_mpz_t()) != 0) ? rD : rD - 1;
  return QuadForm(1, b0, (b0 * b0 - D) / 4);
}

}  // namespace squfof
