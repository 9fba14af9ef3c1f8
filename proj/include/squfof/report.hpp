#pragma once

#include <chrono>
#include <string>

#include "squfof/nt.hpp"

namespace squfof {

enum class Method {
  squfof,
  squfof_multiplier,
  bsgs,
  parallel_segments,
  parallel_multipliers,
  symmetry_walk,
  perfect_square,
};

std::string method_name(Method m);

/// Outcome of a successful factoring attempt. factor_small * factor_large == n.
struct FactorReport {
  Int n;
  Int factor_small;
  Int factor_large;
  Method method = Method::squfof;
  long forward_steps = 0;
  long reverse_steps = 0;
  long squares_tested = 0;
  int multiplier = 1;
  std::chrono::duration<double> wall_time{0};

  bool valid() const {
    return factor_small > 1 && factor_small <= factor_large &&
           factor_large < n && factor_small * factor_large == n;
  }
};

}  // namespace squfof
