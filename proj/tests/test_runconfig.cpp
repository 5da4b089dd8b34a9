#include "qflag/runconfig.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

using namespace qflag;

TEST_CASE("subset parsing is 1-based and validated") {
  CHECK(parse_subset("", 2).empty());
  CHECK(parse_subset("1", 2) == std::vector<int>{0});
  CHECK(parse_subset("2, 1,2", 2) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(parse_subset("9", 2), DomainError);
  CHECK_THROWS_AS(parse_subset("0", 2), DomainError);
  CHECK_THROWS_AS(parse_subset("1,", 2), DomainError);
  CHECK_THROWS_AS(parse_subset("a", 2), DomainError);
  CHECK_THROWS_AS(parse_subset("1.5", 2), DomainError);
  CHECK(parse_real_list("0.3, 0.7") == std::vector<double>{0.3, 0.7});
}

TEST_CASE("config validation") {
  RunConfig c;
  c.lie_type = LieType::A;
  c.rank = 2;
  CHECK_NOTHROW(c.validate());
  c.q = 1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.q = 0.5;
  c.M = 9;
  CHECK_THROWS_AS(c.validate(), DomainError);  // 9 + 8 > 16
  c.M = 8;
  c.S = {2};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.S = {1};
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("case list removes duplicates and keeps order") {
  RunConfig c;
  c.cases = {{LieType::A, 2, 0.5, {0}}, {LieType::A, 2, 0.3, {0}}, {LieType::A, 2, 0.5, {0, 0}}, {LieType::B, 2, 0.5, {}}};
  const auto list = c.case_list();
  REQUIRE(list.size() == 3);
  CHECK(list[0].q == 0.5);
  CHECK(list[1].q == 0.3);
  CHECK(list[2].type == LieType::B);
  RunConfig single;
  CHECK(single.case_list().size() == 1);
}

TEST_CASE("config round trip through JSON") {
  RunConfig c;
  c.lie_type = LieType::B;
  c.rank = 2;
  c.q = 0.1 + 0.2;  // not exactly representable in short decimal
  c.S = {1};
  c.gates.relation = 3e-7;
  c.battery_depth = 3;
  c.cases = {{LieType::A, 1, 0.25, {}}};
  const RunConfig d = config_from_json(json::parse(dump_json(to_json(c))));
  CHECK(d.lie_type == LieType::B);
  CHECK(d.q == c.q);
  CHECK(d.S == c.S);
  CHECK(d.gates.relation == c.gates.relation);
  CHECK(d.battery_depth == 3);
  CHECK(d.cases == c.cases);
  CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"gates", {{"nope", 1.0}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"rank", "two"}}), DomainError);
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(dump_json(json(0.1)) == "0.10000000000000001");
  CHECK(dump_json(json(2.0)) == "2.0");
  CHECK(dump_json(json(std::nan(""))) == "null");
  CHECK(dump_json(json::array({1, 2})) == "[1, 2]");
}

TEST_CASE("complex matrices export row-major with a shape header") {
  Eigen::MatrixXcd m(2, 3);
  m << cplx(1, 2), 3, 4, 5, 6, cplx(0, -1);
  const json j = matrix_json(m);
  CHECK(j.at("shape") == json::array({2, 3}));
  REQUIRE(j.at("data").size() == 6);
  CHECK(j.at("data")[1] == json::array({3.0, 0.0}));
  CHECK(j.at("data")[5] == json::array({0.0, -1.0}));
}

TEST_CASE("reports are deterministic apart from wall time and survive a round trip") {
  RunConfig c;
  c.lie_type = LieType::A;
  c.rank = 2;
  c.S = {0};
  c.workers = 2;
  c.cases = {{LieType::A, 2, 0.5, {0}}, {LieType::A, 1, 0.5, {}}};
  auto a = run_cases(c), b = run_cases(c);
  REQUIRE(a.size() == 2);
  CHECK(a[0].label == b[0].label);
  CHECK(a[1].lie_type == 'A');
  CHECK(a[1].rank == 1);
  for (auto* v : {&a, &b})
    for (auto& r : *v) r.seconds = 0.0;
  CHECK(dump_json(report_json(c, a)) == dump_json(report_json(c, b)));
  const CaseReport back = report_from_json(json::parse(dump_json(to_json(a[0]))));
  CHECK(dump_json(to_json(back)) == dump_json(to_json(a[0])));
  CHECK(report_json(c, a).at("pass").get<bool>());
}

TEST_CASE("cache directory honours the override variable") {
  const auto dir = std::filesystem::temp_directory_path() / "qflag-test-cache";
  std::filesystem::remove_all(dir);
  ::setenv("QFLAG_CACHE_DIR", dir.c_str(), 1);
  CHECK(cache_dir() == dir.string());
  RunConfig c;
  c.use_cache = true;
  const auto first = run_cases(c);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), {}) == 1);
  const auto second = run_cases(c);
  CHECK(second[0].seconds == first[0].seconds);  // served from the cache
  ::unsetenv("QFLAG_CACHE_DIR");
  std::filesystem::remove_all(dir);
}
