#include "squfof/squfof.hpp"

#include <stdexcept>

namespace squfof {

std::string method_name(Method m) {
  switch (m) {
    case Method::squfof: return "squfof";
    case Method::squfof_multiplier: return "squfof_multiplier";
    case Method::bsgs: return "bsgs";
    case Method::parallel_segments: return "parallel_segments";
    case Method::parallel_multipliers: return "parallel_multipliers";
    case Method::symmetry_walk: return "symmetry_walk";
    case Method::perfect_square: return "perfect_square";
  }
  return "unknown";
}

namespace {

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

Int from_u64(u64 v) { return Int(static_cast<unsigned long>(v)); }

// The forward scan and the reverse tandem walk are the hot loops; both run
// on a word-size engine when the discriminant fits and on mpz otherwise.
// The two engines expose the same interface and are differential-tested.

struct FastEng {
  using State = FastState;
  FastExpansion e;

  explicit FastEng(const Int& M)
      : e(FastExpansion::to_u128(M), Convention::standard) {}

  State initial() const { return e.initial(); }
  void step(State& s) const { e.step(s); }
  State seed(const Int& P, const Int& Q) const {
    return e.seed(P.get_ui(), Q.get_ui(), 0);
  }
  static std::optional<Int> square_root_Q(const State& s) {
    u64 rt;
    if (is_square_u64(s.Q, &rt)) return from_u64(rt);
    return std::nullopt;
  }
  static Int P(const State& s) { return from_u64(s.P); }
  static Int Q(const State& s) { return from_u64(s.Q); }
  static Int Qprev(const State& s) { return from_u64(s.Qprev); }
  CFState to_cf(const State& s) const {
    return to_cfstate(e, s, Convention::standard);
  }
};

struct MpzEng {
  using State = CFState;
  CFState s0;

  explicit MpzEng(const Int& M)
      : s0(init_expansion(M, Convention::standard)) {}

  State initial() const { return s0; }
  void step(State& s) const { s = step_forward(s); }
  State seed(const Int& P, const Int& Q) const {
    State s;
    s.N = s0.N;
    s.r = s0.r;
    s.conv = Convention::standard;
    s.index = 0;
    s.P = P;
    s.Q = Q;
    Int num = s0.N - P * P;
    if (num % Q != 0)
      throw std::invalid_argument("seed: P^2 != N (mod Q)");
    s.Qprev = num / Q;
    Int bq;
    mpz_fdiv_q(bq.get_mpz_t(), Int(s0.r + P).get_mpz_t(), Q.get_mpz_t());
    s.b = bq;
    return s;
  }
  static std::optional<Int> square_root_Q(const State& s) {
    return is_perfect_square(s.Q);
  }
  static Int P(const State& s) { return s.P; }
  static Int Q(const State& s) { return s.Q; }
  static Int Qprev(const State& s) { return s.Qprev; }
  CFState to_cf(const State& s) const { return s; }
};

struct ScanCounters {
  long forward = 0;
  long squares = 0;
};

// Advances s until an even-index square Q_i with root > 1 appears, recording
// the forms at indices 2^n along the way.  Returns the root, or nullopt when
// the step budget runs out.
template <class Eng>
std::optional<Int> scan_for_square(const Eng& eng, typename Eng::State& s,
                                   long max_steps, ScanCounters& c,
                                   std::vector<QuadForm>& stored,
                                   bool store) {
  while (c.forward < max_steps) {
    eng.step(s);
    ++c.forward;
    // The state at index i holds P_{i-1}, Q_{i-1}, Q_i, so the form at CF
    // index i-1 is (Q_{i-1}, 2*P_{i-1}, -Q_i).
    if (store && is_power_of_two(s.index - 1))
      stored.emplace_back(Eng::Qprev(s), 2 * Eng::P(s), -Eng::Q(s));
    if ((s.index & 1) == 0) {
      if (auto rt = Eng::square_root_Q(s)) {
        ++c.squares;
        if (*rt > 1) return rt;
      }
    }
  }
  return std::nullopt;
}

template <class Eng>
ReverseResult reverse_tandem(const Eng& eng, const Int& gcd_target,
                             const QuadForm& G, long bound) {
  ReverseResult rr;
  Int P0 = G.b / 2;
  auto main = eng.seed(P0, abs(G.c));
  auto twin = eng.seed(P0, abs(G.a));
  for (long i = 0; i < bound; ++i) {
    Int Qs;
    bool hit = false;
    for (auto* str : {&main, &twin}) {
      Int Pold = Eng::P(*str);
      Int Qold = Eng::Q(*str);
      eng.step(*str);
      if (Eng::P(*str) == Pold) {
        Qs = Qold;
        hit = true;
        break;
      }
    }
    rr.steps = i + 1;
    if (!hit) continue;
    Int g = gcd(Qs, gcd_target);
    if (g > 1 && g < gcd_target) {
      FactorReport rep;
      rep.n = gcd_target;
      rep.factor_small = g;
      rep.factor_large = gcd_target / g;
      if (rep.factor_small > rep.factor_large)
        std::swap(rep.factor_small, rep.factor_large);
      rep.method = Method::squfof;
      rep.reverse_steps = rr.steps;
      rr.outcome = ReverseResult::Outcome::factor_found;
      rr.report = rep;
    } else {
      rr.outcome = ReverseResult::Outcome::trivial_symmetry;
    }
    return rr;
  }
  rr.outcome = ReverseResult::Outcome::exhausted;
  return rr;
}

long reverse_bound(const SqufofConfig& cfg, long square_index,
                   const Int& M) {
  if (cfg.max_reverse_steps > 0) return cfg.max_reverse_steps;
  long bits = static_cast<long>(mpz_sizeinbase(M.get_mpz_t(), 2));
  return square_index + 64 * bits + 1024;
}

// One multiplier attempt on M = k*N; extracts factors of N.
template <class Eng>
std::optional<FactorReport> attempt(const Int& M, const Int& N,
                                    const SqufofConfig& cfg) {
  Eng eng(M);
  auto s = eng.initial();
  long maxf = cfg.max_forward_steps > 0 ? cfg.max_forward_steps
                                        : default_forward_bound(M);
  ScanCounters c;
  std::vector<QuadForm> stored;
  long total_reverse = 0;
  while (true) {
    auto root =
        scan_for_square(eng, s, maxf, c, stored, cfg.store_powers_of_two);
    if (!root) return std::nullopt;
    QuadForm G = jump_to_inverse_cycle(eng.to_cf(s), stored);
    ReverseResult rr =
        reverse_tandem(eng, M, G, reverse_bound(cfg, s.index, M));
    total_reverse += rr.steps;
    if (rr.outcome == ReverseResult::Outcome::factor_found) {
      Int g = gcd(rr.report->factor_small, N);
      if (!(g > 1 && g < N)) g = gcd(rr.report->factor_large, N);
      if (g > 1 && g < N) {
        FactorReport rep;
        rep.n = N;
        rep.factor_small = g;
        rep.factor_large = N / g;
        if (rep.factor_small > rep.factor_large)
          std::swap(rep.factor_small, rep.factor_large);
        rep.method = Method::squfof;
        rep.forward_steps = c.forward;
        rep.reverse_steps = total_reverse;
        rep.squares_tested = c.squares;
        return rep;
      }
      // A divisor of M that collapses to 1 or N modulo the multiplier is as
      // useless as a trivial symmetry; keep scanning.
    }
    if (cfg.trivial_square_policy == SqufofConfig::TrivialSquarePolicy::abort)
      return std::nullopt;
  }
}

std::optional<FactorReport> attempt_any(const Int& M, const Int& N,
                                        const SqufofConfig& cfg) {
  if (FastExpansion::fits(M)) return attempt<FastEng>(M, N, cfg);
  return attempt<MpzEng>(M, N, cfg);
}

}  // namespace

long default_forward_bound(const Int& N) {
  Int q = isqrt(isqrt(N));
  if (q * q * q * q < N) q += 1;
  long bits = static_cast<long>(mpz_sizeinbase(N.get_mpz_t(), 2));
  Int bound = 6 * q * bits;
  if (!bound.fits_slong_p()) return LONG_MAX / 2;
  return bound.get_si();
}

const std::vector<int>& multiplier_ladder() {
  static const std::vector<int> ks = {1, 3, 5, 7, 11, 13, 15, 17};
  return ks;
}

std::optional<SquareFormHit> find_square_form(const Int& N,
                                              const SqufofConfig& cfg) {
  long maxf = cfg.max_forward_steps > 0 ? cfg.max_forward_steps
                                        : default_forward_bound(N);
  SquareFormHit hit;
  ScanCounters c;
  std::optional<Int> root;
  if (FastExpansion::fits(N)) {
    FastEng eng(N);
    auto s = eng.initial();
    root = scan_for_square(eng, s, maxf, c, hit.stored,
                           cfg.store_powers_of_two);
    hit.state = eng.to_cf(s);
  } else {
    MpzEng eng(N);
    auto s = eng.initial();
    root = scan_for_square(eng, s, maxf, c, hit.stored,
                           cfg.store_powers_of_two);
    hit.state = s;
  }
  if (!root) return std::nullopt;
  hit.root = *root;
  hit.forward_steps = c.forward;
  hit.squares_tested = c.squares;
  return hit;
}

QuadForm jump_to_inverse_cycle(const CFState& st,
                               const std::vector<QuadForm>& stored) {
  auto root = is_perfect_square(st.Q);
  if (!root || (st.index & 1))
    throw std::invalid_argument(
        "jump_to_inverse_cycle: need an even-index square Q");
  // Square root of the form at the hit: (s, 2*P_{i-1}, -Q_{i-1}*s).
  QuadForm F0(*root, 2 * st.P, -(st.Qprev * *root));
  QuadForm G = reduce(F0).form;
  long half = st.index / 2;
  for (std::size_t n = 0; (half >> n) != 0; ++n) {
    if (!((half >> n) & 1)) continue;
    if (n >= stored.size()) break;
    G = compose_reduce(G, stored[n]).form;
  }
  return G;
}

ReverseResult reverse_symmetry_search(const QuadForm& G, const Int& N,
                                      long bound) {
  if (mpz_fdiv_ui(G.D.get_mpz_t(), 4) != 0)
    throw std::invalid_argument(
        "reverse_symmetry_search: discriminant must be 4*M");
  Int M = G.D / 4;
  if (FastExpansion::fits(M)) {
    FastEng eng(M);
    return reverse_tandem(eng, N, G, bound);
  }
  MpzEng eng(M);
  return reverse_tandem(eng, N, G, bound);
}

FactorReport squfof_factor(const Int& N, const SqufofConfig& cfg) {
  if (N < 3) throw std::invalid_argument("squfof_factor: N must be >= 3");
  if (mpz_even_p(N.get_mpz_t()))
    throw std::invalid_argument("squfof_factor: N must be odd");
  if (auto rt = is_perfect_square(N)) {
    FactorReport rep;
    rep.n = N;
    rep.factor_small = *rt;
    rep.factor_large = *rt;
    rep.method = Method::perfect_square;
    return rep;
  }
  if (is_probable_prime(N))
    throw std::domain_error("squfof_factor: prime input");

  std::vector<int> ks;
  if (cfg.multiplier != 1)
    ks.push_back(cfg.multiplier);
  else
    ks = multiplier_ladder();

  for (int k : ks) {
    Int g = gcd(N, Int(k));
    if (g > 1 && g < N) {
      FactorReport rep;
      rep.n = N;
      rep.factor_small = g;
      rep.factor_large = N / g;
      rep.method = Method::squfof_multiplier;
      rep.multiplier = k;
      return rep;
    }
    Int M = k * N;
    if (is_perfect_square(M)) continue;
    if (auto rep = attempt_any(M, N, cfg)) {
      rep->method = (k == 1) ? Method::squfof : Method::squfof_multiplier;
      rep->multiplier = k;
      return *rep;
    }
  }
  throw std::runtime_error("squfof_factor: multiplier ladder exhausted");
}

}  // namespace squfof
