#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "aosa/types.hpp"

namespace aosa {

/// Sorted, duplicate-free set of class labels.
///
/// Also serves as the bijection between known-class labels and classifier
/// output positions: the i-th smallest label maps to output i.
class ClassSet {
 public:
  ClassSet() = default;
  ClassSet(std::initializer_list<ClassLabel> labels);
  explicit ClassSet(std::span<const ClassLabel> labels);

  /// [0, n) convenience.
  static ClassSet range(ClassLabel n);

  bool contains(ClassLabel label) const noexcept;
  std::optional<std::size_t> index_of(ClassLabel label) const noexcept;
  ClassLabel at(std::size_t index) const { return labels_.at(index); }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }

  auto begin() const noexcept { return labels_.begin(); }
  auto end() const noexcept { return labels_.end(); }

  friend bool operator==(const ClassSet&, const ClassSet&) = default;

 private:
  std::vector<ClassLabel> labels_;
};

}  // namespace aosa
