#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "squfof/qforms.hpp"
#include "squfof/report.hpp"

namespace squfof {

/// Work unit handed to one worker: scan the principal cycle from F_start
/// until F_end reappears.  F_rootS is a form whose square sits at F_start;
/// the ladder holds the squared offset forms used to jump a square hit back
/// toward its symmetry point.
struct Segment {
  QuadForm F_start;
  QuadForm F_end;
  QuadForm F_rootS;
  std::vector<QuadForm> ladder;
  long seq = 0;
};

struct WorkerMessage {
  enum class Kind : std::uint8_t {
    assign = 1,
    factor_found = 2,
    segment_exhausted = 3,
    shutdown = 4,
  };
  Kind kind = Kind::shutdown;
  Segment segment;      // assign
  FactorReport report;  // factor_found
  long seq = 0;         // segment_exhausted
  long steps = 0;       // scan statistics piggybacked on the reply
  long squares = 0;
};

/// ladder[0] is the principal form cycled two steps forward; ladder[i] is
/// the reduced square of ladder[i-1].  Returns (ladder, ladder[size]).
std::pair<std::vector<QuadForm>, QuadForm> prepare_ladder(const Int& N,
                                                          int size);

int default_ladder_size(const Int& N);

/// Scans one segment in strides of two adjacency steps, testing positive
/// leading coefficients for squares; a hit is jumped toward its symmetry
/// point via F_rootS and the ladder, then resolved by the tandem reverse
/// walk.  gcd_target is the number factors are extracted against (N itself,
/// or the un-multiplied N when the segment discriminant is 4kN).
WorkerMessage worker_run(const Int& gcd_target, const Segment& seg,
                         long hard_cap = 0);

/// Coordinator: mints disjoint segments by the root/step recurrence and
/// hands them to `workers` threads; first validated factor wins.  Throws
/// std::runtime_error when the global step budget is exhausted.
FactorReport coordinator_run(const Int& N, int size, int workers,
                             long max_total_steps = 0);

struct ParallelConfig {
  int workers = 1;
  int ladder_size = 0;       // 0: default_ladder_size
  long max_total_steps = 0;  // 0: derived budget per multiplier
};

/// Segment-parallel factoring with the same multiplier escalation as the
/// serial path; factors of the multiplier are stripped from the result.
FactorReport parallel_factor(const Int& N, const ParallelConfig& cfg = {});

/// Baseline: each worker runs serial SQUFOF on k*N for its own multiplier k;
/// the first factor not coming from k wins.
FactorReport multiplier_factor(const Int& N, int workers,
                               const std::vector<int>& multipliers);

struct BenchRow {
  int n_bits = 0;
  std::string method;
  int workers = 1;
  int trial = 0;
  double wall_ms = 0.0;
  long fwd_steps = 0;
  long squares_tested = 0;
};

struct BenchStats {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct BenchTable {
  std::vector<BenchRow> rows;

  std::string csv() const;
  std::string json() const;
  /// Wall-time statistics keyed by "bits/method/workers".
  std::map<std::string, BenchStats> aggregate() const;
};

enum class BenchMethod { segments, multipliers };

BenchTable bench(const std::vector<Int>& Ns,
                 const std::vector<int>& workers_list,
                 const std::vector<BenchMethod>& methods);

// Framed binary encoding of WorkerMessage for the multi-process transport:
// 4-byte big-endian payload length, then a kind tag and the fields, each
// integer as sign byte + 4-byte big-endian length + big-endian magnitude.
std::vector<std::uint8_t> encode_frame(const WorkerMessage& m);

/// Decodes one frame starting at data; returns the message and the total
/// bytes consumed.  Throws std::runtime_error on truncated or malformed
/// input.
std::pair<WorkerMessage, std::size_t> decode_frame(const std::uint8_t* data,
                                                   std::size_t len);

}  // namespace squfof
