#include "doctest.h"

#include <numeric>
#include <set>

#include "cutpaste/enumerate.hpp"
#include "cutpaste/error.hpp"

using namespace cutpaste;

TEST_CASE("cells tile projective space") {
  for (std::uint64_t q : {5u, 7u, 25u})
    for (std::size_t n = 0; n <= 3; ++n) {
      const auto cd = CellDecomposition::projective(n, q);
      std::uint64_t sum = 0;
      for (const auto& c : cd.cells()) {
        CHECK(c.offset == sum);
        sum += c.size;
      }
      std::uint64_t expect = 1, pw = 1;
      for (std::size_t i = 0; i < n; ++i) expect += (pw *= q);
      CHECK(sum == expect);
      CHECK(cd.total() == projective_size(n, q));
    }
  CHECK(projective_size(3, 5) == 156);
}

TEST_CASE("points are distinct normalized representatives in index order") {
  const auto cd = CellDecomposition::projective(2, 7);
  std::set<std::vector<Raw>> seen;
  std::uint64_t expect = 0;
  for_each_point(cd, 0, cd.total(), [&](const Raw* x, std::uint64_t i) {
    CHECK(i == expect++);
    std::vector<Raw> v(x, x + 3);
    std::vector<Raw> w(3);
    cd.point(i, w.data());
    CHECK(v == w);
    CHECK(cd.index_of(v) == i);
    std::size_t lead = 0;
    while (v[lead] == 0) ++lead;
    CHECK(v[lead] == 1);
    CHECK(seen.insert(v).second);
  });
  CHECK(seen.size() == 57);
}

TEST_CASE("ranged enumeration resumes mid-cell") {
  const auto cd = CellDecomposition::projective(3, 5);
  for (std::uint64_t b : {0u, 1u, 124u, 125u, 149u, 155u}) {
    std::uint64_t n = 0;
    for_each_point(cd, b, cd.total(), [&](const Raw* x, std::uint64_t i) {
      std::vector<Raw> w(4);
      cd.point(i, w.data());
      CHECK(std::equal(w.begin(), w.end(), x));
      ++n;
    });
    CHECK(n == cd.total() - b);
  }
}

TEST_CASE("normalization") {
  const Field f = Field::create(7);
  std::vector<Raw> v{0, 3, 5};
  CHECK(normalize_projective(f.kernel(), v));
  CHECK(v == std::vector<Raw>{0, 1, 4});
  std::vector<Raw> z{0, 0};
  CHECK_FALSE(normalize_projective(f.kernel(), z));
}

TEST_CASE("parallel chunks reduce identically for any worker count") {
  auto run = [](unsigned w) {
    return parallel_chunks<std::uint64_t>(100003, w, [](std::uint64_t b, std::uint64_t e) {
      std::uint64_t s = 0;
      for (std::uint64_t i = b; i < e; ++i) s += i * i % 977;
      return s;
    });
  };
  const auto one = run(1);
  const std::uint64_t total = std::accumulate(one.begin(), one.end(), std::uint64_t{0});
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = run(w);
    CHECK(std::accumulate(many.begin(), many.end(), std::uint64_t{0}) == total);
  }
  CHECK(parallel_chunks<int>(0, 4, [](std::uint64_t, std::uint64_t) { return 1; }).empty());
}

TEST_CASE("budget fails up front") {
  Budget b(100);
  b.charge(60, "first");
  CHECK(b.used() == 60);
  CHECK_THROWS_AS(b.charge(41, "second"), BudgetExceeded);
  CHECK(b.used() == 60);
  b.charge(40, "third");
  CHECK(b.used() == 100);
}
