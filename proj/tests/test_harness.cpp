#include <filesystem>

#include "doctest.h"
#include "tap/harness.hpp"

using namespace tap;

namespace {

using Pairs = std::vector<std::pair<NodeId, NodeId>>;

// Four leaves under the root, paired by two links.
Instance paired_star() {
  return build_instance(5, 0, Pairs{{0, 1}, {0, 2}, {0, 3}, {0, 4}}, Pairs{{1, 2}, {3, 4}});
}

bool has_prefix(const std::vector<std::string>& v, const std::string& p) {
  for (const std::string& s : v)
    if (s.rfind(p, 0) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("generator") {
  SUBCASE("deterministic") {
    GenParams p{25, 50, Shape::random, false, 77};
    CHECK(generate(p) == generate(p));
    p.seed = 78;
    CHECK_FALSE(generate(p) == generate(GenParams{25, 50, Shape::random, false, 77}));
  }
  SUBCASE("smallest tree") {
    Instance in = generate(GenParams{2, 1, Shape::random, false, 3});
    CHECK(in.node_count() == 2);
    CHECK(in.link_count() == 1);
  }
  SUBCASE("every shape is feasible with the requested size") {
    for (int shape = 0; shape < 4; ++shape) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance in = generate(GenParams{30, 45, static_cast<Shape>(shape), seed % 2 == 0, seed});
        CAPTURE(shape);
        CAPTURE(seed);
        if (shape != static_cast<int>(Shape::gadget_chain)) {
          CHECK(in.node_count() == 30);
          CHECK(in.link_count() >= 30 / 2);
        }
        std::vector<LinkId> all(in.link_count());
        for (int i = 0; i < in.link_count(); ++i) all[i] = i;
        CHECK(is_feasible(in, Solution{all}));
      }
    }
  }
  SUBCASE("shape names") {
    for (Shape s : {Shape::random, Shape::caterpillar, Shape::balanced, Shape::gadget_chain})
      CHECK(parse_shape(to_string(s)) == s);
    CHECK_FALSE(parse_shape("spiral").has_value());
  }
}

TEST_CASE("check_instance") {
  SUBCASE("clean on the paired star") {
    CHECK(check_instance(paired_star(), {}, {}, true).empty());
  }
  SUBCASE("forced tickets break the leaf cover bound") {
    CoverOptions o;
    o.forced_gt = 2;
    auto failures = check_instance(paired_star(), o, {}, true);
    CHECK(has_prefix(failures, "audit: leaf cover weight"));
  }
  SUBCASE("no oracle, no bound checks") {
    CoverOptions o;
    o.forced_gt = 2;
    FuzzCase rec;
    auto failures = check_instance(paired_star(), o, {}, false, &rec);
    CHECK_FALSE(has_prefix(failures, "audit: leaf cover weight"));
    CHECK(rec.opt == -1);
    CHECK(rec.alg >= 2);
  }
  SUBCASE("infeasible input is reported as an error") {
    Instance in = build_instance(3, 0, Pairs{{0, 1}, {0, 2}}, Pairs{{1, 0}});
    CHECK(has_prefix(check_instance(in, {}, {}, true), "error: "));
  }
}

TEST_CASE("minimization") {
  Instance big = generate(GenParams{14, 30, Shape::random, false, 9});
  // Keep instances whose optimum is at least 3.
  auto fails = [](const Instance& x) {
    OracleResult o = exact_opt(x);
    return o.status == OracleStatus::optimal && o.value >= 3;
  };
  REQUIRE(fails(big));
  Instance small = minimize_instance(big, fails);
  CHECK(fails(small));
  CHECK(small.node_count() <= big.node_count());
  CHECK(small.link_count() <= big.link_count());
  CHECK(small.link_count() < big.link_count());
}

TEST_CASE("small fuzz campaign") {
  FuzzOptions o;
  o.count = 150;
  o.seed = 4;
  o.max_n = 14;
  o.max_m = 30;
  o.threads = 2;
  o.oracle_max_n = 14;
  FuzzReport r = fuzz(o);
  CHECK(r.cases.size() == 150);
  CHECK(r.ratio_violations == 0);
  CHECK(r.infeasible_outputs == 0);
  CHECK(r.errors == 0);
  CHECK(r.oracle_solved > 100);
  CHECK(r.worst_ratio <= 4.0 / 3.0 + 1e-9);
  SUBCASE("oracle off") {
    o.oracle_max_n = -1;
    FuzzReport q = fuzz(o);
    CHECK(q.oracle_solved == 0);
    for (const FuzzCase& c : q.cases) CHECK(c.opt == -1);
  }
  SUBCASE("same seed, same campaign") {
    o.threads = 1;
    FuzzReport q = fuzz(o);
    for (std::size_t i = 0; i < q.cases.size(); ++i) {
      CHECK(q.cases[i].alg == r.cases[i].alg);
      CHECK(q.cases[i].opt == r.cases[i].opt);
    }
  }
}

TEST_CASE("counterexamples are written and minimized") {
  auto dir = std::filesystem::temp_directory_path() / "tap-harness-test";
  std::filesystem::remove_all(dir);
  FuzzOptions o;
  o.count = 10;
  o.seed = 2;
  o.max_n = 10;
  o.max_m = 20;
  o.threads = 1;
  o.oracle_max_n = 10;
  o.cover.forced_gt = 2;
  o.out_dir = dir.string();
  FuzzReport r = fuzz(o);
  CHECK(r.audit_failures > 0);
  int written = 0;
  for (const FuzzCase& c : r.cases) {
    if (c.counterexample.empty()) continue;
    ++written;
    Instance small = read_instance_file(c.counterexample);
    CHECK(small.node_count() <= c.n);
    CHECK_FALSE(check_instance(small, o.cover, o.oracle, true).empty());
  }
  CHECK(written > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench rows") {
  auto rows = bench({{200, 600}}, 1);
  REQUIRE(rows.size() == 3);
  for (const BenchRow& r : rows) {
    CHECK(r.n == 200);
    CHECK(r.millis >= 0.0);
  }
}
