#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "squfof/infra.hpp"
#include "squfof/parallel.hpp"
#include "squfof/qforms.hpp"
#include "squfof/squfof.hpp"

using json = nlohmann::json;
using namespace squfof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoFactor = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

Int parse_int(const std::string& s) {
  Int v;
  // base 0: decimal, or hex with an 0x prefix
  if (mpz_set_str(v.get_mpz_t(), s.c_str(), 0) != 0)
    throw CLI::ValidationError("not an integer: " + s);
  if (v < 0) throw CLI::ValidationError("negative input: " + s);
  return v;
}

json report_json(const FactorReport& rep) {
  return json{{"n", rep.n.get_str()},
              {"factors", {rep.factor_small.get_str(), rep.factor_large.get_str()}},
              {"method", method_name(rep.method)},
              {"multiplier", rep.multiplier},
              {"forward_steps", rep.forward_steps},
              {"reverse_steps", rep.reverse_steps},
              {"squares_tested", rep.squares_tested},
              {"wall_ms", rep.wall_time.count() * 1000.0}};
}

void emit(const std::string& command, const json& payload, bool as_json) {
  if (!as_json) return;
  json rec{{"schema_version", 1}, {"command", command}, {"payload", payload}};
  std::cout << rec.dump() << "\n";
}

int print_report(const std::string& command, const FactorReport& rep,
                 bool as_json) {
  if (!rep.valid() && rep.method != Method::perfect_square) {
    std::cerr << "internal error: invalid factor pair\n";
    return kExitInvariant;
  }
  if (rep.factor_small * rep.factor_large != rep.n) {
    std::cerr << "internal error: product check failed\n";
    return kExitInvariant;
  }
  if (as_json) {
    emit(command, report_json(rep), true);
  } else {
    std::cout << rep.n << " = " << rep.factor_small << " x "
              << rep.factor_large << "  [" << method_name(rep.method);
    if (rep.multiplier != 1) std::cout << ", multiplier " << rep.multiplier;
    std::cout << ", fwd " << rep.forward_steps << ", rev "
              << rep.reverse_steps << ", squares " << rep.squares_tested
              << "]\n";
  }
  return kExitOk;
}

int default_workers() {
  if (const char* env = std::getenv("SQUFOF_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

// Splits off a single factor of 2 so the core algorithms only see odd N.
std::optional<FactorReport> strip_even(const Int& N) {
  if (mpz_odd_p(N.get_mpz_t())) return std::nullopt;
  FactorReport rep;
  rep.n = N;
  rep.factor_small = 2;
  rep.factor_large = N / 2;
  rep.method = Method::squfof;
  return rep;
}

Int random_prime(gmp_randstate_t st, int bits) {
  Int p;
  do {
    mpz_urandomb(p.get_mpz_t(), st, bits - 1);
    p |= (Int(1) << (bits - 1)) | 1;
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
  } while (mpz_sizeinbase(p.get_mpz_t(), 2) != static_cast<size_t>(bits));
  return p;
}

int run_selftest(bool as_json) {
  long failures = 0;
  auto check = [&](bool ok, const char* what) {
    if (!ok) {
      ++failures;
      std::cerr << "selftest: FAIL " << what << "\n";
    }
  };
  try {
    CFState s = init_expansion(21, Convention::standard);
    check(find_period(s, 100).value_or(-1) == 6, "cf period of sqrt(21)");
    SymmetrySearch sym = symmetry_factor(s, 100);
    check(sym.outcome == SymmetrySearch::Outcome::factor_found &&
              sym.report->factor_small == 3,
          "symmetry factor of 21");

    FactorReport rep = squfof_factor(Int("1000000016000000063"));
    check(rep.valid(), "squfof 60-bit semiprime");

    for (Int D : {Int(136), Int(901), Int(7656), Int(9013)}) {
      QuadForm e = principal_form(D);
      check(is_reduced(e), "principal form reduced");
      CycleWalk cw = CycleWalk::of(e, 4096);
      for (const auto& f : cw.forms) check(is_reduced(f), "cycle reduced");
      auto cr = compose_reduce(e, e);
      check(cr.form.D == D, "composition discriminant");
    }

    double R = regulator(13, Convention::normalized);
    check(std::abs(R - std::log((3.0 + std::sqrt(13.0)) / 2.0)) < 1e-9,
          "regulator of 13");

    WorkerMessage m;
    m.kind = WorkerMessage::Kind::factor_found;
    m.report = rep;
    auto bytes = encode_frame(m);
    auto [back, used] = decode_frame(bytes.data(), bytes.size());
    check(used == bytes.size() &&
              back.report.factor_small == rep.factor_small,
          "wire round trip");
  } catch (const std::exception& e) {
    ++failures;
    std::cerr << "selftest: exception: " << e.what() << "\n";
  }
  emit("selftest", json{{"failures", failures}}, as_json);
  if (failures == 0) {
    if (!as_json) std::cout << "selftest: ok\n";
    return kExitOk;
  }
  return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Square forms factorization toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "one-line JSON output");

  // factor
  auto* cmd_factor = app.add_subcommand("factor", "factor N with SQUFOF");
  std::string arg_n;
  int opt_mult = 1;
  long opt_max_steps = 0;
  cmd_factor->add_option("N", arg_n)->required();
  cmd_factor->add_option("--mult", opt_mult, "fixed multiplier k");
  cmd_factor->add_option("--max-steps", opt_max_steps, "forward step bound");

  // cf
  auto* cmd_cf = app.add_subcommand("cf", "continued fraction table");
  std::string cf_n;
  long cf_steps = 20;
  bool cf_norm = false, cf_back = false;
  cmd_cf->add_option("N", cf_n)->required();
  cmd_cf->add_option("--steps", cf_steps, "rows to print");
  cmd_cf->add_flag("--normalized", cf_norm, "normalized surd, N == 1 mod 4");
  cmd_cf->add_flag("--back", cf_back, "walk backward instead");

  // cycle
  auto* cmd_cycle = app.add_subcommand("cycle", "principal cycle of forms");
  std::string cy_d;
  long cy_max = 100000;
  cmd_cycle->add_option("D", cy_d)->required();
  cmd_cycle->add_option("--max-steps", cy_max);

  // regulator
  auto* cmd_reg = app.add_subcommand("regulator", "cycle regulator");
  std::string rg_n;
  bool rg_norm = false;
  cmd_reg->add_option("N", rg_n)->required();
  cmd_reg->add_flag("--normalized", rg_norm);

  // bsgs
  auto* cmd_bsgs = app.add_subcommand("bsgs", "baby-step giant-step factor");
  std::string bs_n;
  cmd_bsgs->add_option("N", bs_n)->required();

  // pfactor
  auto* cmd_pf = app.add_subcommand("pfactor", "parallel factor");
  std::string pf_n, pf_method = "segments";
  int pf_workers = default_workers();
  int pf_size = 0;
  cmd_pf->add_option("N", pf_n)->required();
  cmd_pf->add_option("--workers", pf_workers);
  cmd_pf->add_option("--method", pf_method)
      ->check(CLI::IsMember({"segments", "multipliers"}));
  cmd_pf->add_option("--size", pf_size, "ladder size");

  // bench
  auto* cmd_bench = app.add_subcommand("bench", "benchmark harness");
  int bn_bits = 48;
  int bn_trials = 5;
  unsigned long bn_seed = 42;
  std::vector<int> bn_workers{1};
  std::string bn_method = "segments";
  bool bn_csv = false;
  cmd_bench->add_option("--bits", bn_bits, "semiprime size in bits");
  cmd_bench->add_option("--trials", bn_trials);
  cmd_bench->add_option("--workers", bn_workers, "worker counts");
  cmd_bench->add_option("--method", bn_method)
      ->check(CLI::IsMember({"segments", "multipliers", "both"}));
  cmd_bench->add_option("--seed", bn_seed, "deterministic RNG seed");
  cmd_bench->add_flag("--csv", bn_csv, "CSV output (default)");

  // selftest
  app.add_subcommand("selftest", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_factor->parsed()) {
      Int N = parse_int(arg_n);
      if (auto even = strip_even(N)) return print_report("factor", *even, as_json);
      SqufofConfig cfg;
      cfg.multiplier = opt_mult;
      cfg.max_forward_steps = opt_max_steps;
      return print_report("factor", squfof_factor(N, cfg), as_json);
    }

    if (cmd_cf->parsed()) {
      Int N = parse_int(cf_n);
      Convention conv = cf_norm ? Convention::normalized : Convention::standard;
      CFState s = init_expansion(N, conv);
      json rows = json::array();
      if (!as_json)
        std::cout << std::setw(6) << "i" << std::setw(22) << "b"
                  << std::setw(22) << "P" << std::setw(22) << "Q\n";
      for (long i = 0; i <= cf_steps; ++i) {
        // Row 0 of the sqrt(N) table shows the classical b0 = floor(sqrt N);
        // the internal purely periodic seed uses 2r there.
        Int b_shown = (s.index == 0 && conv == Convention::standard) ? s.r : s.b;
        if (as_json)
          rows.push_back({{"i", s.index},
                          {"b", b_shown.get_str()},
                          {"P", s.P.get_str()},
                          {"Q", s.Q.get_str()}});
        else
          std::cout << std::setw(6) << s.index << std::setw(22) << b_shown
                    << std::setw(22) << s.P << std::setw(22) << s.Q << "\n";
        s = cf_back ? step_backward(s) : step_forward(s);
      }
      emit("cf", rows, as_json);
      return kExitOk;
    }

    if (cmd_cycle->parsed()) {
      Int D = parse_int(cy_d);
      QuadForm e = principal_form(D);
      CycleWalk cw = CycleWalk::of(e, cy_max);
      json rows = json::array();
      for (std::size_t i = 0; i < cw.forms.size(); ++i) {
        const QuadForm& f = cw.forms[i];
        if (as_json)
          rows.push_back({{"i", i},
                          {"a", f.a.get_str()},
                          {"b", f.b.get_str()},
                          {"c", f.c.get_str()},
                          {"dist", cw.dist[i]}});
        else
          std::cout << std::setw(6) << i << "  (" << f.a << ", " << f.b
                    << ", " << f.c << ")  d=" << std::setprecision(12)
                    << cw.dist[i] << "\n";
      }
      if (!as_json)
        std::cout << "cycle length " << cw.forms.size() << ", regulator "
                  << std::setprecision(15) << cw.total << "\n";
      emit("cycle", json{{"rows", rows}, {"regulator", cw.total}}, as_json);
      return kExitOk;
    }

    if (cmd_reg->parsed()) {
      Int N = parse_int(rg_n);
      double R = regulator(
          N, rg_norm ? Convention::normalized : Convention::standard);
      if (as_json)
        emit("regulator", json{{"N", N.get_str()}, {"R", R}}, true);
      else
        std::cout << std::setprecision(15) << R << "\n";
      return kExitOk;
    }

    if (cmd_bsgs->parsed()) {
      Int N = parse_int(bs_n);
      if (auto even = strip_even(N)) return print_report("bsgs", *even, as_json);
      double R = regulator(N, Convention::standard);
      auto rep = bsgs_factor(N, R);
      if (!rep) {
        std::cerr << "bsgs: no nontrivial factor found\n";
        return kExitNoFactor;
      }
      return print_report("bsgs", *rep, as_json);
    }

    if (cmd_pf->parsed()) {
      Int N = parse_int(pf_n);
      if (auto even = strip_even(N)) return print_report("pfactor", *even, as_json);
      FactorReport rep;
      if (pf_method == "segments") {
        ParallelConfig cfg;
        cfg.workers = pf_workers;
        cfg.ladder_size = pf_size;
        rep = parallel_factor(N, cfg);
      } else {
        rep = multiplier_factor(N, pf_workers, multiplier_ladder());
      }
      return print_report("pfactor", rep, as_json);
    }

    if (cmd_bench->parsed()) {
      gmp_randstate_t st;
      gmp_randinit_mt(st);
      gmp_randseed_ui(st, bn_seed);
      std::vector<Int> Ns;
      for (int i = 0; i < bn_trials; ++i) {
        Int p = random_prime(st, bn_bits / 2);
        Int q = random_prime(st, bn_bits - bn_bits / 2);
        Ns.push_back(p * q);
      }
      gmp_randclear(st);
      std::vector<BenchMethod> methods;
      if (bn_method == "segments" || bn_method == "both")
        methods.push_back(BenchMethod::segments);
      if (bn_method == "multipliers" || bn_method == "both")
        methods.push_back(BenchMethod::multipliers);
      BenchTable table = bench(Ns, bn_workers, methods);
      if (as_json)
        std::cout << table.json() << "\n";
      else
        std::cout << table.csv();
      return kExitOk;
    }

    if (app.get_subcommand("selftest")->parsed()) return run_selftest(as_json);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return kExitNoFactor;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kExitNoFactor;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
