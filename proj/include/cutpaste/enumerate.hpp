#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "cutpaste/field.hpp"

namespace cutpaste {

// One affine cell of P^n: points whose first nonzero coordinate is `lead`
// (normalized to 1), with the `free` coordinates after it arbitrary.
struct Cell {
  std::size_t lead = 0;
  std::size_t free = 0;
  std::uint64_t size = 0;    // q^free
  std::uint64_t offset = 0;  // global index of the cell's first point
};

// P^n = A^n ⊔ A^{n-1} ⊔ ... ⊔ A^0 over a field with q elements. Points are
// indexed globally: cells in order of increasing lead, and inside a cell the
// free coordinates read as a base-q number with the last coordinate least
// significant. This is lexicographic order on normalized representatives
// with (1, ...) first.
class CellDecomposition {
 public:
  static CellDecomposition projective(std::size_t n, std::uint64_t q);

  std::size_t dim() const noexcept { return n_; }
  std::uint64_t field_size() const noexcept { return q_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::uint64_t total() const noexcept { return total_; }

  // Writes the n + 1 coordinates of point `index`.
  void point(std::uint64_t index, Raw* out) const;
  // Inverse of point() for a normalized representative.
  std::uint64_t index_of(std::span<const Raw> normalized) const;

 private:
  std::size_t n_ = 0;
  std::uint64_t q_ = 0;
  std::uint64_t total_ = 0;
  std::vector<Cell> cells_;
};

// (q^{n+1} - 1) / (q - 1)
std::uint64_t projective_size(std::size_t n, std::uint64_t q);

// Scales a vector so that its first nonzero coordinate is 1. Returns false
// for the zero vector.
bool normalize_projective(const FieldKernel& k, std::span<Raw> v) noexcept;

// Calls fn(const Raw* coords, std::uint64_t index) for every point with
// index in [begin, end), in index order.
template <class Fn>
void for_each_point(const CellDecomposition& cd, std::uint64_t begin, std::uint64_t end, Fn&& fn) {
  if (begin >= end) return;
  const std::size_t n = cd.dim();
  const auto q = static_cast<Raw>(cd.field_size());
  std::vector<Raw> x(n + 1);
  cd.point(begin, x.data());
  std::size_t lead = 0;
  while (x[lead] == 0) ++lead;
  for (std::uint64_t i = begin;;) {
    fn(static_cast<const Raw*>(x.data()), i);
    if (++i == end) break;
    // odometer over the free coordinates lead+1..n
    std::size_t j = n;
    while (j > lead) {
      if (++x[j] < q) break;
      x[j] = 0;
      --j;
    }
    if (j == lead) {
      x[lead] = 0;
      ++lead;
      x[lead] = 1;
    }
  }
}

// Worker count 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested) noexcept;

// Splits [0, total) into contiguous chunks, runs fn(begin, end) -> T on up to
// `workers` threads and returns the chunk results in chunk order, so any
// in-order reduction is independent of the worker count.
template <class T, class Fn>
std::vector<T> parallel_chunks(std::uint64_t total, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  const std::uint64_t nchunks = total == 0 ? 0 : std::min<std::uint64_t>(total, std::uint64_t{workers} * 8);
  std::vector<T> results(nchunks);
  auto bounds = [&](std::uint64_t c) {
    return std::pair{total * c / nchunks, total * (c + 1) / nchunks};
  };
  if (workers <= 1 || nchunks <= 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      auto [b, e] = bounds(c);
      results[c] = fn(b, e);
    }
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < std::min<std::uint64_t>(workers, nchunks); ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c; (c = next.fetch_add(1)) < nchunks;) {
        auto [b, e] = bounds(c);
        results[c] = fn(b, e);
      }
    });
  }
  pool.clear();
  return results;
}

// Hard cap on point evaluations. Enumerations charge their full cost before
// starting, so an over-budget request fails up front instead of truncating.
class Budget {
 public:
  static constexpr std::uint64_t kDefaultLimit = 5'000'000'000ULL;
  static constexpr const char* kEnvVar = "CUTPASTE_BUDGET";

  // Default limit, overridable through the CUTPASTE_BUDGET environment
  // variable.
  static std::uint64_t default_limit();

  explicit Budget(std::uint64_t limit = default_limit()) : limit_(limit) {}

  // Throws BudgetExceeded when the charge would exceed the limit.
  void charge(std::uint64_t evaluations, std::string_view what);

  std::uint64_t used() const noexcept { return used_.load(); }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

// Shared settings for counting and scanning operations.
struct EnumContext {
  Budget* budget = nullptr;
  unsigned workers = 1;

  void charge(std::uint64_t evaluations, std::string_view what) const {
    if (budget) budget->charge(evaluations, what);
  }
};

}  // namespace cutpaste
