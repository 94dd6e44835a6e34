#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "cutpaste/experiment.hpp"

using namespace cutpaste;

namespace {

ExperimentConfig config(std::string name) {
  ExperimentConfig c;
  c.experiment = std::move(name);
  c.q = 7;
  c.m = 2;
  c.seeds = {1, 2};
  c.ext_degrees = {1};
  c.samples = 500;
  return c;
}

}  // namespace

TEST_CASE("seed pairing") {
  using P = std::vector<std::pair<std::uint64_t, std::uint64_t>>;
  CHECK(seed_pairs({1, 2, 3, 4}) == P{{1, 2}, {3, 4}});
  CHECK(seed_pairs({1, 2, 5}) == P{{1, 2}, {5, 6}});
  CHECK(seed_pairs({9}) == P{{9, 10}});
}

TEST_CASE("config validation") {
  auto c = config("equality");
  CHECK_NOTHROW(c.validate());
  c.experiment = "nope";
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config("equality");
  c.q = 9;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.q = 3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config("equality");
  c.m = 7;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config("equality");
  c.ext_degrees = {7};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(run(c), InvalidArgument);
}

TEST_CASE("reports are deterministic and independent of workers") {
  for (const char* name : {"decomposition", "singular-fibers", "universal-iso"}) {
    CAPTURE(name);
    auto c = config(name);
    const Report a = run(c);
    const Report b = run(c);
    c.workers = 4;
    const Report w = run(c);
    CHECK(a.stable() == b.stable());
    Json sw = w.stable();
    sw["config"]["workers"] = 1;
    CHECK(a.stable() == sw);
    CHECK(report_diff(a.doc, b.doc).empty());
    CHECK(a.exit_code == kExitOk);
    for (const auto& row : a.doc["rows"]) {
      CHECK(row.contains("anchor"));
      CHECK(!row["anchor"].get<std::string>().empty());
    }
  }
}

TEST_CASE("cancellation report embeds the transcript") {
  auto c = config("cancellation");
  c.m = 5;
  const Report r = run(c);
  CHECK(r.exit_code == kExitOk);
  REQUIRE(r.doc["rows"].size() == 1);
  CHECK(r.doc["rows"][0]["verdict"] == "PASS");
  CHECK(r.doc["rows"][0]["outputs"]["derivation"]["steps"].size() == 7);
}

TEST_CASE("class table rows") {
  auto c = config("class-table");
  const Report r = run(c);
  const auto& rows = r.doc["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["outputs"]["count"] == 99);
  CHECK(rows[1]["outputs"]["euler"] == 9);
  CHECK(rows[2]["verdict"] == "WARN");
  CHECK(rows[2]["outputs"]["euler"] == 9);
  CHECK(rows[2]["outputs"]["claimed_euler"] == 8);
  CHECK(r.exit_code == kExitOk);
}

TEST_CASE("diff reports changed counts but not timings") {
  auto c = config("decomposition");
  const Report a = run(c);
  c.seeds = {3, 4};
  const Report b = run(c);
  CHECK_FALSE(report_diff(a.doc, b.doc).empty());
  Json t = a.doc;
  t["timings"] = Json::array();
  CHECK(report_diff(a.doc, t).empty());
  CHECK_THROWS_AS(report_diff(a.doc, run(config("class-table")).doc), InvalidArgument);
}

TEST_CASE("budget overruns have their own exit code") {
  auto c = config("decomposition");
  c.budget = 1000;
  const Report r = run(c);
  CHECK(r.exit_code == kExitBudget);
  CHECK(r.doc["error"]["kind"] == "budget");
}

TEST_CASE("shared pencil files round trip") {
  const Pencil a = make_pencil(Field::create(7), 2, 1);
  const std::string path = "shared_pencil_test.json";
  {
    std::ofstream out(path);
    out << to_json(a).dump(2);
  }
  const Pencil back = pencil_from_json(to_json(a));
  CHECK(back.equation() == a.equation());
  CHECK(back.certified);
  auto c = config("equality");
  c.shared_from = path;
  c.seeds = {5, 6};
  const Report r = run(c);
  CHECK(r.doc["rows"].size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("CSV export") {
  const Report r = run(config("decomposition"));
  const std::string csv = report_csv(r.doc);
  CHECK(csv.rfind("row,label,q,k,count", 0) == 0);
  CHECK(csv.find("\"X0\"") != std::string::npos);
}
