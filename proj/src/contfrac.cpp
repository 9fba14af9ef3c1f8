#include "squfof/contfrac.hpp"

#include <cassert>
#include <stdexcept>

namespace squfof {

namespace {

Int u128_to_int(u128 v) {
  Int hi = static_cast<unsigned long>(v >> 64);
  Int lo = static_cast<unsigned long>(v);
  return (hi << 64) | lo;
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

bool same_position(const CFState& x, const CFState& y) {
  return x.N == y.N && x.conv == y.conv && x.P == y.P && x.Q == y.Q;
}

CFState init_expansion(const Int& N, Convention conv) {
  if (N < 2) throw std::invalid_argument("init_expansion: N must be >= 2");
  Int r = isqrt(N);
  if (r * r == N)
    throw std::domain_error("init_expansion: perfect square");
  CFState s;
  s.N = N;
  s.r = r;
  s.conv = conv;
  s.index = 0;
  if (conv == Convention::standard) {
    // Expansion of sqrt(N)+r: purely periodic, Q0 = 1 divides 2*P_{-1}.
    s.P = r;
    s.Q = 1;
    s.Qprev = N - r * r;
    s.b = 2 * r;
  } else {
    if (mpz_fdiv_ui(N.get_mpz_t(), 4) != 1)
      throw std::domain_error("init_expansion: normalized needs N == 1 (mod 4)");
    s.P = (mpz_odd_p(r.get_mpz_t()) != 0) ? r : r - 1;
    s.Q = 2;
    s.Qprev = (N - s.P * s.P) / 2;
    s.b = floor_div(r + s.P, s.Q);
  }
  return s;
}

CFState step_forward(const CFState& s) {
  CFState t;
  t.N = s.N;
  t.r = s.r;
  t.conv = s.conv;
  t.index = s.index + 1;
  t.P = s.b * s.Q - s.P;
  t.Qprev = s.Q;
  t.Q = s.Qprev + s.b * (s.P - t.P);
  t.b = floor_div(s.r + t.P, t.Q);
  return t;
}

CFState step_backward(const CFState& s) {
  CFState t;
  t.N = s.N;
  t.r = s.r;
  t.conv = s.conv;
  t.index = s.index - 1;
  t.Q = s.Qprev;
  Int bm = floor_div(s.r + s.P, t.Q);
  t.P = bm * t.Q - s.P;
  t.Qprev = s.Q - bm * (t.P - s.P);
  t.b = floor_div(s.r + t.P, t.Q);
  return t;
}

long default_max_steps(const Int& N) {
  Int r = isqrt(N);
  if (r * r < N) r += 1;
  Int bound = 4 * r;
  if (!bound.fits_slong_p()) return LONG_MAX / 2;
  return bound.get_si();
}

std::optional<long> find_period(const CFState& s0, long max_steps) {
  CFState s = s0;
  for (long i = 1; i <= max_steps; ++i) {
    s = step_forward(s);
    if (same_position(s, s0)) return i;
  }
  return std::nullopt;
}

SymmetrySearch symmetry_factor(const CFState& s0, long max_steps) {
  SymmetrySearch out;
  CFState s = s0;
  for (long i = 0; i < max_steps; ++i) {
    CFState t = step_forward(s);
    // The start point of a purely periodic expansion is itself a (trivial)
    // symmetry point; detection begins past it.
    if (i > 0 || !(t.P == s.P || t.Q == s.Q)) {
      if (t.P == s.P || t.Q == s.Q) {
        bool even = (t.P == s.P);
        out.sym_index = s.index;
        out.Qs = s.Q;
        out.even_period = even;
        Int g = gcd(s.Q, s.N);
        if (g > 1 && g < s.N) {
          FactorReport rep;
          rep.n = s.N;
          rep.factor_small = g;
          rep.factor_large = s.N / g;
          if (rep.factor_small > rep.factor_large)
            std::swap(rep.factor_small, rep.factor_large);
          rep.method = Method::symmetry_walk;
          rep.forward_steps = i + 1;
          out.outcome = SymmetrySearch::Outcome::factor_found;
          out.report = rep;
        } else {
          out.outcome = even ? SymmetrySearch::Outcome::trivial_symmetry
                             : SymmetrySearch::Outcome::odd_period_qr_minus_one;
        }
        return out;
      }
    }
    s = t;
  }
  out.outcome = SymmetrySearch::Outcome::exhausted;
  return out;
}

Convergents Convergents::start(const CFState& s0) {
  if (s0.conv != Convention::standard)
    throw std::invalid_argument("Convergents: standard expansion only");
  Convergents c;
  c.N = s0.N;
  c.A_prev = 1;
  c.B_prev = 0;
  c.A = s0.r % s0.N;  // b0 of sqrt(N) is r, not the internal 2r
  c.B = 1;
  c.index = 0;
  return c;
}

void Convergents::step(const Int& b_next) {
  Int An = (b_next * A + A_prev) % N;
  Int Bn = (b_next * B + B_prev) % N;
  A_prev = A;
  B_prev = B;
  A = An;
  B = Bn;
  index += 1;
}

// ---------------------------------------------------------------------------
// Fast path
// ---------------------------------------------------------------------------

bool FastExpansion::fits(const Int& N) {
  return N > 0 && mpz_sizeinbase(N.get_mpz_t(), 2) <= 124;
}

u128 FastExpansion::to_u128(const Int& N) {
  Int hi = N >> 64;
  Int lo = N - (hi << 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

FastExpansion::FastExpansion(u128 N, Convention conv) : N_(N), conv_(conv) {
  u128 r = isqrt_u128(N);
  if (r * r == N) throw std::domain_error("FastExpansion: perfect square");
  r_ = static_cast<u64>(r);
  FastState s;
  s.index = 0;
  if (conv == Convention::standard) {
    s.P = r_;
    s.Q = 1;
    s.Qprev = static_cast<u64>(N - r * r);
    s.b = 2 * r_;
  } else {
    if (N % 4 != 1)
      throw std::domain_error("FastExpansion: normalized needs N == 1 (mod 4)");
    s.P = (r_ & 1) ? r_ : r_ - 1;
    s.Q = 2;
    s.Qprev = static_cast<u64>((N - static_cast<u128>(s.P) * s.P) / 2);
    s.b = (r_ + s.P) / 2;
  }
  init_ = s;
}

void FastExpansion::step(FastState& s) const {
  u64 Pn = static_cast<u64>(static_cast<u128>(s.b) * s.Q - s.P);
  i128 t = static_cast<i128>(s.b) *
           (static_cast<i128>(s.P) - static_cast<i128>(Pn));
  u64 Qn = static_cast<u64>(static_cast<i128>(s.Qprev) + t);
  s.Qprev = s.Q;
  s.P = Pn;
  s.Q = Qn;
  s.b = (r_ + s.P) / s.Q;
  s.index += 1;
}

void FastExpansion::step_back(FastState& s) const {
  u64 Qm = s.Qprev;
  u64 bm = (r_ + s.P) / Qm;
  u64 Pm = static_cast<u64>(static_cast<u128>(bm) * Qm - s.P);
  i128 t = static_cast<i128>(bm) *
           (static_cast<i128>(Pm) - static_cast<i128>(s.P));
  u64 Qpm = static_cast<u64>(static_cast<i128>(s.Q) - t);
  s.Q = Qm;
  s.P = Pm;
  s.Qprev = Qpm;
  s.b = (r_ + s.P) / s.Q;
  s.index -= 1;
}

FastState FastExpansion::seed(u64 P, u64 Q, long index) const {
  FastState s;
  s.P = P;
  s.Q = Q;
  u128 num = N_ - static_cast<u128>(P) * P;
  if (num % Q != 0)
    throw std::invalid_argument("FastExpansion::seed: P^2 != N (mod Q)");
  s.Qprev = static_cast<u64>(num / Q);
  s.b = (r_ + P) / Q;
  s.index = index;
  return s;
}

CFState to_cfstate(const FastExpansion& e, const FastState& s,
                   Convention conv) {
  CFState t;
  t.N = u128_to_int(e.N());
  t.P = static_cast<unsigned long>(s.P);
  t.Q = static_cast<unsigned long>(s.Q);
  t.Qprev = static_cast<unsigned long>(s.Qprev);
  t.b = static_cast<unsigned long>(s.b);
  t.index = s.index;
  t.conv = conv;
  t.r = static_cast<unsigned long>(e.r());
  return t;
}

}  // namespace squfof
