#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace audiolib {

/// Half-open byte interval [begin, end).
struct ByteRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const noexcept { return end - begin; }
  bool operator==(const ByteRange&) const = default;
};

std::string to_string(const ByteRange& r);

/// Set of disjoint, non-adjacent byte ranges. Inserting merges neighbours.
class IntervalSet {
 public:
  void insert(ByteRange r);

  /// Total number of covered bytes.
  std::int64_t covered() const noexcept { return covered_; }

  bool covers(ByteRange r) const;

  /// Portions of r already present.
  std::vector<ByteRange> intersect(ByteRange r) const;

  /// Portions of [0, size) not yet present.
  std::vector<ByteRange> gaps(std::int64_t size) const;

  std::vector<ByteRange> ranges() const;
  bool empty() const noexcept { return spans_.empty(); }

 private:
  std::map<std::int64_t, std::int64_t> spans_;  // begin -> end
  std::int64_t covered_ = 0;
};

}  // namespace audiolib
