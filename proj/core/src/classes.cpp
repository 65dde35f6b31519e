#include "aosa/classes.hpp"

#include <algorithm>

namespace aosa {

ClassSet::ClassSet(std::initializer_list<ClassLabel> labels)
    : ClassSet(std::span<const ClassLabel>(labels.begin(), labels.size())) {}

ClassSet::ClassSet(std::span<const ClassLabel> labels) : labels_(labels.begin(), labels.end()) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

ClassSet ClassSet::range(ClassLabel n) {
  ClassSet out;
  for (ClassLabel c = 0; c < n; ++c) out.labels_.push_back(c);
  return out;
}

bool ClassSet::contains(ClassLabel label) const noexcept {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

std::optional<std::size_t> ClassSet::index_of(ClassLabel label) const noexcept {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

}  // namespace aosa
