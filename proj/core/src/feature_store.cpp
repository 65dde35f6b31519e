#include "aosa/feature_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include <json.hpp>

#include "aosa/errors.hpp"

namespace aosa {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::vector<std::byte>& out, T value) {
  std::byte raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  bool get(T& value) {
    if (remaining() < sizeof(T)) return false;
    std::byte raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    std::memcpy(&value, raw, sizeof(T));
    pos_ += sizeof(T);
    return true;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

FeatureStore parse_binary(std::span<const std::byte> bytes) {
  ByteReader in(bytes.subspan(sizeof(kStoreMagic)));
  std::uint32_t version = 0;
  std::uint64_t n_samples = 0;
  std::uint32_t dim = 0;
  std::uint32_t n_classes = 0;
  if (!in.get(version)) throw FormatError("feature store: truncated header");
  if (version != kStoreVersion)
    throw FormatError("feature store: unsupported version " + std::to_string(version));
  if (!in.get(n_samples) || !in.get(dim) || !in.get(n_classes))
    throw FormatError("feature store: truncated header");
  if (dim == 0) throw SchemaError("feature store: dim must be positive");

  const std::size_t record_bytes = sizeof(std::uint64_t) + sizeof(std::int32_t) + dim * sizeof(float);
  const std::size_t available = in.remaining() / record_bytes;
  if (available != n_samples || in.remaining() % record_bytes != 0) {
    throw SchemaError("feature store: header declares " + std::to_string(n_samples) +
                      " records but payload holds " + std::to_string(available) +
                      (in.remaining() % record_bytes ? " plus a partial record" : ""));
  }

  std::vector<SampleRecord> records(n_samples);
  for (auto& rec : records) {
    in.get(rec.id);
    in.get(rec.label);
    rec.feature.resize(dim);
    for (auto& v : rec.feature) in.get(v);
  }
  return FeatureStore::from_records(std::move(records), dim, n_classes);
}

FeatureStore parse_jsonl(std::string_view text) {
  std::vector<SampleRecord> records;
  std::optional<std::uint32_t> dim;
  ClassLabel max_label = -1;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string where = "jsonl line " + std::to_string(line_no);
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("label") || !obj.contains("feature"))
      throw SchemaError(where + ": expected object with id, label, feature");
    const auto& jid = obj["id"];
    const auto& jlabel = obj["label"];
    const auto& jfeat = obj["feature"];
    if (!jid.is_number_integer() || jid.get<std::int64_t>() < 0)
      throw SchemaError(where + ": id must be a non-negative integer");
    if (!jlabel.is_number_integer()) throw SchemaError(where + ": label must be an integer");
    if (!jfeat.is_array() || jfeat.empty())
      throw SchemaError(where + ": feature must be a non-empty array");

    SampleRecord rec;
    rec.id = jid.get<std::uint64_t>();
    rec.label = jlabel.get<ClassLabel>();
    rec.feature.reserve(jfeat.size());
    for (const auto& v : jfeat) {
      if (!v.is_number()) throw SchemaError(where + ": feature entries must be numbers");
      rec.feature.push_back(v.get<float>());
    }
    if (!dim) dim = static_cast<std::uint32_t>(rec.feature.size());
    if (rec.feature.size() != *dim)
      throw SchemaError(where + ": feature has length " + std::to_string(rec.feature.size()) +
                        ", expected " + std::to_string(*dim));
    max_label = std::max(max_label, rec.label);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw SchemaError("jsonl: no records");
  return FeatureStore::from_records(std::move(records), *dim,
                                    static_cast<std::uint32_t>(std::max(max_label + 1, 0)));
}

}  // namespace

FeatureStore FeatureStore::from_records(std::vector<SampleRecord> records, std::uint32_t dim,
                                        std::uint32_t n_classes) {
  if (dim == 0) throw SchemaError("feature store: dim must be positive");
  std::sort(records.begin(), records.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.id < b.id; });

  FeatureStore store;
  store.dim_ = dim;
  store.n_classes_ = n_classes;
  store.ids_.reserve(records.size());
  store.labels_.reserve(records.size());
  store.features_.reserve(records.size() * dim);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string who = "sample " + std::to_string(rec.id);
    if (i > 0 && records[i - 1].id == rec.id) throw SchemaError("feature store: duplicate id " + std::to_string(rec.id));
    if (rec.feature.size() != dim)
      throw SchemaError(who + ": feature length " + std::to_string(rec.feature.size()) +
                        " does not match dim " + std::to_string(dim));
    if (rec.label < 0 || static_cast<std::uint32_t>(rec.label) >= n_classes)
      throw SchemaError(who + ": label " + std::to_string(rec.label) + " outside [0, " +
                        std::to_string(n_classes) + ")");

    double sq = 0.0;
    for (float v : rec.feature) {
      if (!std::isfinite(v)) throw DataError(who + ": non-finite feature entry");
      sq += static_cast<double>(v) * v;
    }
    const double norm = std::sqrt(sq);
    if (norm == 0.0) throw DataError(who + ": zero-norm feature vector");

    store.ids_.push_back(rec.id);
    store.labels_.push_back(rec.label);
    if (std::abs(norm - 1.0) <= kUnitNormTolerance) {
      store.features_.insert(store.features_.end(), rec.feature.begin(), rec.feature.end());
    } else {
      for (float v : rec.feature) store.features_.push_back(static_cast<float>(v / norm));
    }
  }
  return store;
}

std::optional<std::size_t> FeatureStore::row_of(SampleId id) const noexcept {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t FeatureStore::require_row(SampleId id) const {
  if (auto row = row_of(id)) return *row;
  throw DataError("sample id " + std::to_string(id) + " not in feature store");
}

FeatureStore parse_feature_store(std::span<const std::byte> bytes) {
  if (bytes.size() >= sizeof(kStoreMagic) &&
      std::memcmp(bytes.data(), kStoreMagic, sizeof(kStoreMagic)) == 0) {
    return parse_binary(bytes);
  }
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos || text[first] != '{')
    throw FormatError("feature store: unrecognized magic (expected 'AOSA' or JSONL)");
  return parse_jsonl(text);
}

FeatureStore load_feature_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open feature store: " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_feature_store(std::as_bytes(std::span<const char>(raw)));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::byte> serialize_feature_store(const FeatureStore& store) {
  std::vector<std::byte> out;
  out.reserve(24 + store.size() * (12 + store.dim() * sizeof(float)));
  for (char c : kStoreMagic) out.push_back(static_cast<std::byte>(c));
  put(out, kStoreVersion);
  put(out, static_cast<std::uint64_t>(store.size()));
  put(out, store.dim());
  put(out, store.n_classes());
  for (std::size_t row = 0; row < store.size(); ++row) {
    put(out, store.id(row));
    put(out, store.label(row));
    for (float v : store.feature(row)) put(out, v);
  }
  return out;
}

void save_feature_store(const FeatureStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize_feature_store(store);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write feature store: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace aosa
