#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tap/solver.hpp"

namespace tap {

// Deterministic across standard libraries: the distribution is ours, not
// <random>'s.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [lo, hi].
  int uniform(int lo, int hi);
  bool coin(double p);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class Shape { random, caterpillar, balanced, gadget_chain };
const char* to_string(Shape s);
std::optional<Shape> parse_shape(const std::string& s);

struct GenParams {
  int n = 10;
  int m = 15;
  Shape shape = Shape::random;
  bool leaf_links_only = false;
  std::uint64_t seed = 1;
};

// Always feasible: links are added until every edge is covered, so the
// link count may exceed `m` slightly. gadget_chain ignores `m`.
Instance generate(const GenParams& params);

struct FuzzOptions {
  int count = 100;
  std::uint64_t seed = 1;
  int min_n = 4;
  int max_n = 16;
  int max_m = 30;
  int threads = 0;  // 0: hardware concurrency
  int oracle_max_n = 16;
  OracleOptions oracle;
  CoverOptions cover;
  bool minimize = true;
  std::string out_dir;  // counterexamples are written here when non-empty
};

struct FuzzCase {
  int index = 0;
  GenParams params;
  int n = 0;
  int m = 0;
  int alg = -1;
  int opt = -1;       // -1: oracle not run or over budget
  int baseline = -1;
  std::vector<std::string> failures;
  int falsifications = 0;
  int steps = 0;
  int extra_credit_steps = 0;
  std::string counterexample;  // path of the minimized instance, if written
};

struct FuzzReport {
  std::vector<FuzzCase> cases;
  int ratio_violations = 0;
  int infeasible_outputs = 0;
  int audit_failures = 0;
  int errors = 0;
  int oracle_solved = 0;
  double worst_ratio = 0.0;

  bool clean() const { return ratio_violations + infeasible_outputs + audit_failures + errors == 0; }
};

// Failure labels for one instance: "infeasible", "ratio", "audit: ...",
// "error: ...". Empty when all checks pass.
std::vector<std::string> check_instance(const Instance& instance, const CoverOptions& cover_options,
                                        const OracleOptions& oracle_options, bool run_oracle,
                                        FuzzCase* record = nullptr);

// Greedily deletes links and leaves while `fails` keeps holding.
Instance minimize_instance(const Instance& instance,
                           const std::function<bool(const Instance&)>& fails);

FuzzReport fuzz(const FuzzOptions& options);

struct BenchRow {
  int n = 0;
  int m = 0;
  std::string phase;
  double millis = 0.0;
};

// Phases per size: golden tickets, leaf edge cover, full cover loop.
std::vector<BenchRow> bench(const std::vector<std::pair<int, int>>& sizes, std::uint64_t seed);

}  // namespace tap
