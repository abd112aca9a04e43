#include "audiolib/intervals.hpp"

#include <algorithm>

namespace audiolib {

std::string to_string(const ByteRange& r) {
  return "[" + std::to_string(r.begin) + "," + std::to_string(r.end) + ")";
}

void IntervalSet::insert(ByteRange r) {
  if (r.begin >= r.end) return;
  auto it = spans_.upper_bound(r.begin);
  if (it != spans_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= r.begin) it = prev;
  }
  while (it != spans_.end() && it->first <= r.end) {
    r.begin = std::min(r.begin, it->first);
    r.end = std::max(r.end, it->second);
    covered_ -= it->second - it->first;
    it = spans_.erase(it);
  }
  spans_.emplace(r.begin, r.end);
  covered_ += r.end - r.begin;
}

bool IntervalSet::covers(ByteRange r) const {
  if (r.begin >= r.end) return true;
  auto it = spans_.upper_bound(r.begin);
  if (it == spans_.begin()) return false;
  --it;
  return it->first <= r.begin && it->second >= r.end;
}

std::vector<ByteRange> IntervalSet::intersect(ByteRange r) const {
  std::vector<ByteRange> out;
  auto it = spans_.upper_bound(r.begin);
  if (it != spans_.begin()) --it;
  for (; it != spans_.end() && it->first < r.end; ++it) {
    const auto b = std::max(r.begin, it->first);
    const auto e = std::min(r.end, it->second);
    if (b < e) out.push_back({b, e});
  }
  return out;
}

std::vector<ByteRange> IntervalSet::gaps(std::int64_t size) const {
  std::vector<ByteRange> out;
  std::int64_t cursor = 0;
  for (const auto& [b, e] : spans_) {
    if (b >= size) break;
    if (b > cursor) out.push_back({cursor, b});
    cursor = std::max(cursor, e);
  }
  if (cursor < size) out.push_back({cursor, size});
  return out;
}

std::vector<ByteRange> IntervalSet::ranges() const {
  std::vector<ByteRange> out;
  out.reserve(spans_.size());
  for (const auto& [b, e] : spans_) out.push_back({b, e});
  return out;
}

}  // namespace audiolib
