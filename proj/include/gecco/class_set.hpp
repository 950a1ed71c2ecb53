#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace gecco {

/// Index of an event class inside one EventLog. Ids follow the lexicographic
/// order of class names, so ordering ids orders names.
using ClassId = std::uint32_t;

/// Sorted, duplicate-free set of event classes. Ordering is lexicographic on
/// the sorted members, which doubles as the deterministic tie-break order.
class ClassSet {
 public:
  ClassSet() = default;
  ClassSet(std::initializer_list<ClassId> ids) : ids_(ids) { normalize(); }
  explicit ClassSet(std::vector<ClassId> ids) : ids_(std::move(ids)) { normalize(); }

  static ClassSet singleton(ClassId id) {
    ClassSet s;
    s.ids_.push_back(id);
    return s;
  }

  bool empty() const noexcept { return ids_.empty(); }
  std::size_t size() const noexcept { return ids_.size(); }
  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }
  ClassId operator[](std::size_t i) const { return ids_[i]; }
  std::span<const ClassId> ids() const noexcept { return ids_; }

  bool contains(ClassId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

  bool is_subset_of(const ClassSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }
  bool is_proper_subset_of(const ClassSet& other) const {
    return size() < other.size() && is_subset_of(other);
  }

  bool intersects(const ClassSet& other) const {
    auto a = ids_.begin();
    auto b = other.ids_.begin();
    while (a != ids_.end() && b != other.ids_.end()) {
      if (*a == *b) return true;
      if (*a < *b) ++a; else ++b;
    }
    return false;
  }

  ClassSet unite(const ClassSet& other) const {
    ClassSet out;
    out.ids_.reserve(size() + other.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                   std::back_inserter(out.ids_));
    return out;
  }

  ClassSet with(ClassId id) const {
    ClassSet out = *this;
    auto pos = std::lower_bound(out.ids_.begin(), out.ids_.end(), id);
    if (pos == out.ids_.end() || *pos != id) out.ids_.insert(pos, id);
    return out;
  }

  ClassSet without(const ClassSet& other) const {
    ClassSet out;
    std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out.ids_));
    return out;
  }

  friend bool operator==(const ClassSet&, const ClassSet&) = default;
  friend auto operator<=>(const ClassSet& a, const ClassSet& b) {
    return std::lexicographical_compare_three_way(a.ids_.begin(), a.ids_.end(), b.ids_.begin(),
                                                  b.ids_.end());
  }

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<ClassId> ids_;
};

struct ClassSetHash {
  std::size_t operator()(const ClassSet& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (ClassId id : s) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace gecco
