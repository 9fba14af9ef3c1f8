#include "squfof/infra.hpp"

#include <cmath>
#include <stdexcept>

namespace squfof {

DistanceValue DistanceValue::reduced() const {
  if (!modulus) return *this;
  return {mod_regulator(value, *modulus), modulus};
}

DistanceValue DistanceValue::operator+(const DistanceValue& o) const {
  DistanceValue out{value + o.value, modulus ? modulus : o.modulus};
  return out.reduced();
}

double mod_regulator(double x, double R) {
  double y = std::fmod(x, R);
  if (y < 0) y += R;
  return y;
}

namespace {

// Residual of x mod R, folded to the nearest multiple (range [0, R/2]).
double nearest_residual(double x, double R) {
  double y = mod_regulator(x, R);
  return std::min(y, R - y);
}

}  // namespace

double step_distance(const CFState& s) {
  double sqrtN = std::sqrt(to_double(s.N));
  return std::log((sqrtN + to_double(s.P)) / to_double(s.Q));
}

double regulator(const Int& N, Convention conv) {
  if (FastExpansion::fits(N)) {
    FastExpansion e(FastExpansion::to_u128(N), conv);
    FastState s0 = e.initial();
    FastState s = s0;
    double sqrtN = std::sqrt(static_cast<double>(e.N()));
    double sum = 0.0;
    long cap = default_max_steps(N);
    for (long i = 0; i < cap; ++i) {
      e.step(s);
      sum += std::log((sqrtN + static_cast<double>(s.P)) /
                      static_cast<double>(s.Q));
      if (s.P == s0.P && s.Q == s0.Q) return sum;
    }
    throw std::runtime_error("regulator: period not found within step bound");
  }
  CFState s0 = init_expansion(N, conv);
  CFState s = s0;
  double sum = 0.0;
  long cap = default_max_steps(N);
  for (long i = 0; i < cap; ++i) {
    s = step_forward(s);
    sum += step_distance(s);
    if (same_position(s, s0)) return sum;
  }
  throw std::runtime_error("regulator: period not found within step bound");
}

CycleWalk CycleWalk::of(const QuadForm& start, long max_steps) {
  CycleWalk w;
  w.forms.push_back(start);
  w.dist.push_back(0.0);
  QuadForm g = start;
  double d = 0.0;
  for (long i = 0; i < max_steps; ++i) {
    QuadForm h = rho(g);
    d += rho_step_distance(g);
    if (h == start) {
      w.total = d;
      return w;
    }
    w.forms.push_back(h);
    w.dist.push_back(d);
    g = h;
  }
  throw std::runtime_error("CycleWalk: cycle longer than max_steps");
}

std::optional<double> CycleWalk::distance_to(const QuadForm& g) const {
  for (size_t i = 0; i < forms.size(); ++i)
    if (forms[i] == g) return dist[i];
  return std::nullopt;
}

double check_distance_formula(const QuadForm& F1, const QuadForm& Fk,
                              double dF, const QuadForm& G1,
                              const QuadForm& Gl, double dG, double R,
                              long max_steps) {
  ComposeReduced c1 = compose_reduce(F1, G1);
  ComposeReduced c2 = compose_reduce(Fk, Gl);
  CycleWalk walk = CycleWalk::of(c1.form, max_steps);
  auto lhs = walk.distance_to(c2.form);
  if (!lhs) throw std::domain_error("check_distance_formula: not equivalent");
  double rhs = dF + dG + c2.dist_rho - c1.dist_rho;
  return nearest_residual(*lhs - rhs, R);
}

namespace {

struct SymmetryHit {
  Int divisor_a;  // coefficient at the symmetry pair
  long steps;
};

// Walk `dir` (+1 forward / -1 backward) from `start` looking for a
// reversal pair of adjacent reduced forms.
std::optional<SymmetryHit> scan_for_symmetry(const QuadForm& start, int dir,
                                             long bound) {
  QuadForm g = start;
  for (long i = 0; i < bound; ++i) {
    QuadForm h = (dir > 0) ? rho(g) : rho_inv(g);
    const QuadForm& left = (dir > 0) ? g : h;
    const QuadForm& right = (dir > 0) ? h : g;
    if (right.a == left.c && right.b == left.b && right.c == left.a)
      return SymmetryHit{right.a, i + 1};
    g = h;
  }
  return std::nullopt;
}

std::optional<FactorReport> factor_from_symmetry(const Int& N, const Int& a) {
  Int g = gcd(abs(a), N);
  if (g <= 1 || g >= N) return std::nullopt;
  FactorReport rep;
  rep.n = N;
  rep.factor_small = g;
  rep.factor_large = N / g;
  if (rep.factor_small > rep.factor_large)
    std::swap(rep.factor_small, rep.factor_large);
  return rep;
}

}  // namespace

std::optional<FactorReport> bsgs_factor(const Int& N, double R,
                                        const BsgsOptions& opts) {
  if (N < 3 || mpz_even_p(N.get_mpz_t()))
    throw std::invalid_argument("bsgs_factor: N must be odd and >= 3");
  if (is_perfect_square(N))
    throw std::invalid_argument("bsgs_factor: perfect square");

  auto t0 = std::chrono::steady_clock::now();
  double logN = std::log(to_double(N));
  long baby_bound = opts.baby_step_bound;
  if (baby_bound == 0)
    baby_bound = 512 + 32 * static_cast<long>(
                           mpz_sizeinbase(N.get_mpz_t(), 2));

  // Tiny cycles: the whole cycle is cheaper than giant-step bookkeeping.
  if (R < 16.0 * logN) {
    SymmetrySearch sym =
        symmetry_factor(init_expansion(N, Convention::standard),
                        default_max_steps(N));
    if (sym.outcome == SymmetrySearch::Outcome::factor_found) {
      FactorReport rep = *sym.report;
      rep.method = Method::bsgs;
      rep.reverse_steps = rep.forward_steps;
      rep.forward_steps = 0;
      rep.wall_time = std::chrono::steady_clock::now() - t0;
      return rep;
    }
    return std::nullopt;
  }

  QuadForm E = principal_form(4 * N);

  // Base form a couple of steps into the principal cycle.
  QuadForm F = E;
  double delta = 0.0;
  for (int i = 0; i < 2; ++i) {
    delta += rho_step_distance(F);
    F = rho(F);
  }

  // delta(F#G) = delta(F) + delta(G) + D_rho  (mod R).
  auto combine = [&](const QuadForm& x, double dx, const QuadForm& y,
                     double dy) {
    ComposeReduced cr = compose_reduce(x, y);
    double d = dx + dy + cr.dist_rho;
    return std::pair<QuadForm, double>(cr.form, d);
  };

  // Next cycle position congruent to R/2 (mod R) at or after delta.
  auto gap_to_target = [&](double d) {
    double k = std::ceil((d - R / 2.0) / R);
    double T = R / 2.0 + k * R;
    if (T < d) T += R;
    return T - d;
  };

  std::vector<std::pair<QuadForm, double>> stored;
  long giants = 0;
  while (gap_to_target(delta) > R / 4.0 && giants < opts.giant_step_bound) {
    stored.emplace_back(F, delta);
    std::tie(F, delta) = combine(F, delta, F, delta);
    giants += 1;
  }

  // Compose with stored giants until within ~log N of the symmetry point.
  long adjust = 0;
  while (gap_to_target(delta) > 4.0 * logN && adjust < 128) {
    double gap = gap_to_target(delta);
    const std::pair<QuadForm, double>* best = nullptr;
    for (const auto& sf : stored)
      if (sf.second <= gap && (!best || sf.second > best->second)) best = &sf;
    if (!best) break;
    std::tie(F, delta) = combine(F, delta, best->first, best->second);
    giants += 1;
    adjust += 1;
  }

  // Baby steps in both directions; prefer whichever symmetry certifies a
  // nontrivial divisor.
  std::optional<SymmetryHit> fwd = scan_for_symmetry(F, +1, baby_bound);
  std::optional<SymmetryHit> back = scan_for_symmetry(F, -1, baby_bound);
  for (const auto* hit : {&fwd, &back}) {
    if (!*hit) continue;
    auto rep = factor_from_symmetry(N, (*hit)->divisor_a);
    if (!rep) continue;
    rep->method = Method::bsgs;
    rep->forward_steps = giants;
    rep->reverse_steps = (*hit)->steps;
    rep->wall_time = std::chrono::steady_clock::now() - t0;
    return rep;
  }
  return std::nullopt;
}

}  // namespace squfof
