#include "squfof/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "squfof/squfof.hpp"

namespace squfof {

namespace {

long bits_of(const Int& n) {
  return static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

long pow2_clamped(long e, long cap) {
  if (e >= 62) return cap;
  return std::min(cap, 1L << e);
}

}  // namespace

int default_ladder_size(const Int& N) {
  long s = bits_of(N) / 4 - 3;
  return static_cast<int>(std::clamp(s, 2L, 30L));
}

std::pair<std::vector<QuadForm>, QuadForm> prepare_ladder(const Int& N,
                                                          int size) {
  if (size < 1 || size > 60)
    throw std::invalid_argument("prepare_ladder: size must be in [1, 60]");
  QuadForm F0 = principal_form(4 * N);
  F0 = rho(rho(F0));
  std::vector<QuadForm> ladder;
  ladder.reserve(size + 1);
  ladder.push_back(F0);
  for (int i = 1; i <= size; ++i)
    ladder.push_back(compose_reduce(ladder.back(), ladder.back()).form);
  return {ladder, ladder.back()};
}

WorkerMessage worker_run(const Int& gcd_target, const Segment& seg,
                         long hard_cap) {
  WorkerMessage out;
  out.seq = seg.seq;
  out.kind = WorkerMessage::Kind::segment_exhausted;
  const long size = static_cast<long>(seg.ladder.size()) - 1;
  if (size < 0 || seg.F_start.D != seg.F_end.D) {
    out.kind = WorkerMessage::Kind::shutdown;  // malformed segment
    return out;
  }
  if (hard_cap <= 0) hard_cap = pow2_clamped(size + 5, 100000000L) + 4096;
  const long rev_bound =
      pow2_clamped(size + 3, 100000000L) + 64 * bits_of(gcd_target) + 1024;

  QuadForm h = seg.F_start;
  long steps = 0;
  long squares = 0;
  bool done = (h == seg.F_end);
  while (!done && steps < hard_cap) {
    // One stride: two adjacency steps, so squares are only tested on the
    // even-parity positions (positive leading coefficient).
    for (int t = 0; t < 2 && !done; ++t) {
      h = rho(h);
      ++steps;
      if (h == seg.F_end) {
        done = true;
        break;
      }
      if (h.a <= 0) continue;
      auto rt = is_perfect_square(h.a);
      if (!rt) continue;
      ++squares;
      if (*rt == 1) continue;
      try {
        QuadForm Ftest = reduce(reversal(sqrt_of_square_form(h))).form;
        Ftest = compose_reduce(Ftest, seg.F_rootS).form;
        // The ladder entry at j-1 covers half the distance the count
        // threshold 2^j stands for: the test form needs to travel only
        // half of the scanned arc.
        long cnt = steps / 2;
        for (long j = size; j >= 1; --j) {
          if (cnt > (1L << j)) {
            Ftest = compose_reduce(Ftest, seg.ladder[j - 1]).form;
            cnt -= 1L << j;
          }
        }
        ReverseResult rr =
            reverse_symmetry_search(Ftest, gcd_target, rev_bound);
        steps += rr.steps;
        if (rr.outcome == ReverseResult::Outcome::factor_found) {
          out.kind = WorkerMessage::Kind::factor_found;
          out.report = *rr.report;
          out.report.method = Method::parallel_segments;
          out.report.forward_steps = steps;
          out.report.squares_tested = squares;
          out.steps = steps;
          out.squares = squares;
          return out;
        }
      } catch (const std::exception&) {
        // degenerate jump; keep scanning the segment
      }
    }
  }
  out.steps = steps;
  out.squares = squares;
  return out;
}

namespace {

FactorReport coordinator_attempt(const Int& M, const Int& gcd_target,
                                 int size, int workers, long budget) {
  auto [ladder, F] = prepare_ladder(M, size);
  QuadForm E = principal_form(4 * M);

  std::mutex mu;
  std::condition_variable cv_seg;
  std::condition_variable cv_room;
  std::deque<Segment> queue;
  bool stop = false;
  std::optional<FactorReport> winner;
  long steps_used = 0;
  long squares_seen = 0;

  auto worker_loop = [&]() {
    while (true) {
      Segment seg;
      {
        std::unique_lock<std::mutex> lk(mu);
        cv_seg.wait(lk, [&] { return stop || !queue.empty(); });
        if (stop) return;
        seg = std::move(queue.front());
        queue.pop_front();
        cv_room.notify_all();
      }
      WorkerMessage msg = worker_run(gcd_target, seg);
      {
        std::lock_guard<std::mutex> lk(mu);
        steps_used += msg.steps;
        squares_seen += msg.squares;
        if (msg.kind == WorkerMessage::Kind::factor_found && !winner) {
          winner = msg.report;  // at-most-once: later results are dropped
          stop = true;
          cv_seg.notify_all();
        }
        cv_room.notify_all();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker_loop);

  // Segment minting state per the root/step recurrence; segment 0 runs from
  // the ladder base with an identity-position root.
  QuadForm F_start = F;
  QuadForm F_end = compose_reduce(F, F).form;
  QuadForm F_rootS = ladder[size - 1];
  QuadForm F_rootE = F;
  const QuadForm F_step = ladder[size - 1];
  long seq = 0;

  {
    std::unique_lock<std::mutex> lk(mu);
    while (!stop) {
      if (steps_used > budget) {
        stop = true;
        cv_seg.notify_all();
        break;
      }
      if (static_cast<long>(queue.size()) < workers + 1) {
        Segment s;
        s.ladder = ladder;
        s.seq = seq;
        if (seq == 0) {
          s.F_start = ladder[0];
          s.F_end = F;
          s.F_rootS = E;
        } else {
          s.F_start = F_start;
          s.F_end = F_end;
          s.F_rootS = F_rootS;
          F_start = F_end;
          F_rootS = F_rootE;
          F_rootE = compose_reduce(F_rootE, F_step).form;
          F_end = compose_reduce(F_rootE, F_rootE).form;
        }
        ++seq;
        queue.push_back(std::move(s));
        cv_seg.notify_one();
      } else {
        cv_room.wait_for(lk, std::chrono::milliseconds(20));
      }
    }
  }
  for (auto& t : pool) t.join();

  if (winner) {
    winner->forward_steps = steps_used;
    winner->squares_tested = squares_seen;
    return *winner;
  }
  throw std::runtime_error("coordinator_run: step budget exhausted");
}

FactorReport trivial_split_checks(const Int& N) {
  if (N < 3) throw std::invalid_argument("parallel: N must be >= 3");
  if (mpz_even_p(N.get_mpz_t()))
    throw std::invalid_argument("parallel: N must be odd");
  if (auto rt = is_perfect_square(N)) {
    FactorReport rep;
    rep.n = N;
    rep.factor_small = *rt;
    rep.factor_large = *rt;
    rep.method = Method::perfect_square;
    return rep;
  }
  if (is_probable_prime(N))
    throw std::domain_error("parallel: prime input");
  FactorReport none;
  none.n = 0;
  return none;
}

}  // namespace

FactorReport coordinator_run(const Int& N, int size, int workers,
                             long max_total_steps) {
  if (workers < 1)
    throw std::invalid_argument("coordinator_run: workers must be >= 1");
  long budget =
      max_total_steps > 0 ? max_total_steps : 8 * default_forward_bound(N);
  return coordinator_attempt(N, N, size, workers, budget);
}

FactorReport parallel_factor(const Int& N, const ParallelConfig& cfg) {
  FactorReport pre = trivial_split_checks(N);
  if (pre.n != 0) return pre;
  int workers = std::max(1, cfg.workers);
  for (int k : multiplier_ladder()) {
    Int g = gcd(N, Int(k));
    if (g > 1 && g < N) {
      FactorReport rep;
      rep.n = N;
      rep.factor_small = g;
      rep.factor_large = N / g;
      rep.method = Method::parallel_segments;
      rep.multiplier = k;
      return rep;
    }
    Int M = k * N;
    if (is_perfect_square(M)) continue;
    int size = cfg.ladder_size > 0 ? cfg.ladder_size : default_ladder_size(M);
    long budget = cfg.max_total_steps > 0 ? cfg.max_total_steps
                                          : 8 * default_forward_bound(M);
    try {
      FactorReport rep = coordinator_attempt(M, N, size, workers, budget);
      rep.method = Method::parallel_segments;
      rep.multiplier = k;
      return rep;
    } catch (const std::runtime_error&) {
      // budget exhausted for this multiplier; escalate
    }
  }
  throw std::runtime_error("parallel_factor: multiplier ladder exhausted");
}

FactorReport multiplier_factor(const Int& N, int workers,
                               const std::vector<int>& multipliers) {
  FactorReport pre = trivial_split_checks(N);
  if (pre.n != 0) return pre;
  if (workers < 1 || multipliers.empty())
    throw std::invalid_argument("multiplier_factor: need workers and ks");

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::optional<FactorReport> winner;

  auto loop = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= multipliers.size()) return;
      {
        std::lock_guard<std::mutex> lk(mu);
        if (winner) return;
      }
      SqufofConfig cfg;
      cfg.multiplier = multipliers[i];
      try {
        FactorReport rep = squfof_factor(N, cfg);
        std::lock_guard<std::mutex> lk(mu);
        if (!winner) {
          rep.method = Method::parallel_multipliers;
          winner = rep;
        }
        return;
      } catch (const std::exception&) {
        // this multiplier failed; take the next one
      }
    }
  };

  int nthreads = std::min<int>(workers, multipliers.size());
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (winner) return *winner;
  throw std::runtime_error("multiplier_factor: all multipliers exhausted");
}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

namespace {

const char* bench_method_name(BenchMethod m) {
  return m == BenchMethod::segments ? "segments" : "multipliers";
}

std::vector<int> first_multipliers(int workers) {
  const auto& ks = multiplier_ladder();
  int n = std::clamp<int>(workers, 1, static_cast<int>(ks.size()));
  return std::vector<int>(ks.begin(), ks.begin() + n);
}

}  // namespace

BenchTable bench(const std::vector<Int>& Ns,
                 const std::vector<int>& workers_list,
                 const std::vector<BenchMethod>& methods) {
  BenchTable table;
  for (BenchMethod m : methods) {
    for (int w : workers_list) {
      int trial = 0;
      for (const Int& N : Ns) {
        BenchRow row;
        row.n_bits = static_cast<int>(bits_of(N));
        row.method = bench_method_name(m);
        row.workers = w;
        row.trial = trial++;
        auto t0 = std::chrono::steady_clock::now();
        try {
          FactorReport rep;
          if (m == BenchMethod::segments) {
            ParallelConfig cfg;
            cfg.workers = w;
            rep = parallel_factor(N, cfg);
          } else {
            rep = multiplier_factor(N, w, first_multipliers(w));
          }
          row.fwd_steps = rep.forward_steps;
          row.squares_tested = rep.squares_tested;
        } catch (const std::exception&) {
          row.fwd_steps = -1;
          row.squares_tested = -1;
        }
        auto t1 = std::chrono::steady_clock::now();
        row.wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

std::string BenchTable::csv() const {
  std::ostringstream os;
  os << "n_bits,method,workers,trial,wall_ms,fwd_steps,squares_tested\n";
  for (const auto& r : rows)
    os << r.n_bits << ',' << r.method << ',' << r.workers << ',' << r.trial
       << ',' << r.wall_ms << ',' << r.fwd_steps << ',' << r.squares_tested
       << '\n';
  return os.str();
}

std::map<std::string, BenchStats> BenchTable::aggregate() const {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : rows) {
    std::ostringstream key;
    key << r.n_bits << '/' << r.method << '/' << r.workers;
    groups[key.str()].push_back(r.wall_ms);
  }
  std::map<std::string, BenchStats> out;
  for (auto& [key, xs] : groups) {
    BenchStats st;
    st.count = static_cast<int>(xs.size());
    double sum = 0;
    for (double x : xs) sum += x;
    st.mean = sum / xs.size();
    std::sort(xs.begin(), xs.end());
    std::size_t h = xs.size() / 2;
    st.median = (xs.size() % 2) ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
    double ss = 0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.stddev = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
    out[key] = st;
  }
  return out;
}

std::string BenchTable::json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"n_bits", r.n_bits},
                         {"method", r.method},
                         {"workers", r.workers},
                         {"trial", r.trial},
                         {"wall_ms", r.wall_ms},
                         {"fwd_steps", r.fwd_steps},
                         {"squares_tested", r.squares_tested}});
  }
  j["aggregate"] = nlohmann::json::object();
  for (const auto& [key, st] : aggregate())
    j["aggregate"][key] = {{"mean_ms", st.mean},
                           {"median_ms", st.median},
                           {"stddev_ms", st.stddev},
                           {"count", st.count}};
  return j.dump();
}

}  // namespace squfof
