#include "cutpaste/enumerate.hpp"

#include <cstdlib>
#include <string>

#include "cutpaste/error.hpp"

namespace cutpaste {

std::uint64_t projective_size(std::size_t n, std::uint64_t q) {
  std::uint64_t total = 0, pw = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    total += pw;
    pw *= q;
  }
  return total;
}

CellDecomposition CellDecomposition::projective(std::size_t n, std::uint64_t q) {
  CellDecomposition cd;
  cd.n_ = n;
  cd.q_ = q;
  std::uint64_t offset = 0;
  for (std::size_t lead = 0; lead <= n; ++lead) {
    Cell c;
    c.lead = lead;
    c.free = n - lead;
    c.size = 1;
    for (std::size_t i = 0; i < c.free; ++i) c.size *= q;
    c.offset = offset;
    offset += c.size;
    cd.cells_.push_back(c);
  }
  cd.total_ = offset;
  return cd;
}

void CellDecomposition::point(std::uint64_t index, Raw* out) const {
  if (index >= total_) throw InvalidArgument("projective point index out of range");
  std::size_t ci = 0;
  while (index >= cells_[ci].offset + cells_[ci].size) ++ci;
  const Cell& c = cells_[ci];
  std::uint64_t r = index - c.offset;
  for (std::size_t i = 0; i <= n_; ++i) out[i] = 0;
  out[c.lead] = 1;
  for (std::size_t j = n_; j > c.lead; --j) {
    out[j] = static_cast<Raw>(r % q_);
    r /= q_;
  }
}

std::uint64_t CellDecomposition::index_of(std::span<const Raw> x) const {
  if (x.size() != n_ + 1) throw InvalidArgument("point has wrong dimension");
  std::size_t lead = 0;
  while (lead <= n_ && x[lead] == 0) ++lead;
  if (lead > n_ || x[lead] != 1) throw InvalidArgument("point is not a normalized representative");
  std::uint64_t r = 0;
  for (std::size_t j = lead + 1; j <= n_; ++j) r = r * q_ + x[j];
  return cells_[lead].offset + r;
}

bool normalize_projective(const FieldKernel& k, std::span<Raw> v) noexcept {
  std::size_t lead = 0;
  while (lead < v.size() && v[lead] == 0) ++lead;
  if (lead == v.size()) return false;
  const Raw s = k.inv(v[lead]);
  for (std::size_t i = lead; i < v.size(); ++i) v[i] = k.mul(v[i], s);
  return true;
}

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::uint64_t Budget::default_limit() {
  if (const char* env = std::getenv(kEnvVar)) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultLimit;
}

void Budget::charge(std::uint64_t evaluations, std::string_view what) {
  std::uint64_t cur = used_.load();
  do {
    if (evaluations > limit_ || cur > limit_ - evaluations)
      throw BudgetExceeded(std::string(what) + " needs " + std::to_string(evaluations) +
                           " point evaluations; budget " + std::to_string(limit_) + " with " +
                           std::to_string(cur) + " already used");
  } while (!used_.compare_exchange_weak(cur, cur + evaluations));
}

}  // namespace cutpaste
