#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aosa/types.hpp"

namespace aosa {

/// One sample as it arrives from disk or a generator, before normalization.
struct SampleRecord {
  SampleId id = 0;
  ClassLabel label = 0;
  std::vector<float> feature;
};

/// Immutable table of (id, label, unit-norm feature) rows.
///
/// Rows are ordered by strictly increasing id. Features live in one
/// contiguous row-major buffer; `feature(row)` returns a view into it.
class FeatureStore {
 public:
  FeatureStore() = default;

  /// Validates and L2-normalizes `records`. Records are sorted by id;
  /// duplicate ids, ragged dimensions and labels outside [0, n_classes)
  /// raise SchemaError, non-finite or zero-norm vectors raise DataError.
  static FeatureStore from_records(std::vector<SampleRecord> records, std::uint32_t dim,
                                   std::uint32_t n_classes);

  std::size_t size() const noexcept { return ids_.size(); }
  std::uint32_t dim() const noexcept { return dim_; }
  std::uint32_t n_classes() const noexcept { return n_classes_; }

  SampleId id(std::size_t row) const { return ids_[row]; }
  ClassLabel label(std::size_t row) const { return labels_[row]; }
  std::span<const float> feature(std::size_t row) const {
    return {features_.data() + row * dim_, dim_};
  }

  const std::vector<SampleId>& ids() const noexcept { return ids_; }

  std::optional<std::size_t> row_of(SampleId id) const noexcept;
  /// Like row_of, but a missing id is a DataError.
  std::size_t require_row(SampleId id) const;

  friend bool operator==(const FeatureStore&, const FeatureStore&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::uint32_t n_classes_ = 0;
  std::vector<SampleId> ids_;
  std::vector<ClassLabel> labels_;
  std::vector<float> features_;
};

/// Vectors whose norm is already within this of 1 are kept bit-for-bit.
inline constexpr double kUnitNormTolerance = 1e-6;

inline constexpr char kStoreMagic[4] = {'A', 'O', 'S', 'A'};
inline constexpr std::uint32_t kStoreVersion = 1;

/// Reads either the binary store (detected by its magic) or JSONL.
FeatureStore load_feature_store(const std::filesystem::path& path);

FeatureStore parse_feature_store(std::span<const std::byte> bytes);

/// Binary little-endian encoding:
///   "AOSA" | u32 version | u64 n_samples | u32 dim | u32 n_classes
///   then n_samples x [u64 id | i32 label | dim x f32]
std::vector<std::byte> serialize_feature_store(const FeatureStore& store);

/// Writes via a temporary file and rename.
void save_feature_store(const FeatureStore& store, const std::filesystem::path& path);

}  // namespace aosa
