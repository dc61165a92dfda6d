#pragma once

#include "wolfsearch/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wolfsearch {

struct Template
{
  std::string identity;
  std::string item_id;
  Embedding embedding;
};

//! Labeled template store. Immutable after construction.
class EnrollmentSet
{
public:
  //! Validates: non-empty identities, shared embed_dim, unique
  //! (identity, item_id) keys.
  EnrollmentSet(std::string name, std::size_t embed_dim, std::vector<Template> templates);

  const std::string& name() const { return name_; }
  std::size_t embed_dim() const { return embed_dim_; }
  std::size_t size() const { return templates_.size(); }
  bool empty() const { return templates_.empty(); }
  const std::vector<Template>& templates() const { return templates_; }
  const Template& operator[](std::size_t i) const { return templates_[i]; }

  std::vector<Embedding> embeddings() const;
  //! Distinct identities in order of first appearance.
  std::vector<std::string> identities() const;

private:
  std::string name_;
  std::size_t embed_dim_;
  std::vector<Template> templates_;
};

EnrollmentSet load_enrollment(const std::filesystem::path& path);
void save_enrollment(const EnrollmentSet& set, const std::filesystem::path& path);

struct DevEvalSplit
{
  EnrollmentSet dev;
  EnrollmentSet eval;
};

//! Identity-disjoint split. dev receives ceil(dev_fraction * #identities)
//! identities, capped so that eval keeps at least one.
DevEvalSplit split_dev_eval(const EnrollmentSet& set, double dev_fraction, std::uint64_t seed);

struct PairIndex
{
  std::size_t first;
  std::size_t second;
  bool operator==(const PairIndex&) const = default;
};

struct PairOptions
{
  //! Lists longer than this are replaced by a seeded uniform sample
  //! (without replacement) of exactly this many pairs.
  std::size_t max_pairs = 1'000'000;
  std::uint64_t seed = 0;
};

struct PairSet
{
  std::vector<PairIndex> genuine;
  std::vector<PairIndex> impostor;
  std::size_t genuine_total = 0;
  std::size_t impostor_total = 0;
  bool sampled = false;
};

//! All unordered same-identity pairs (genuine) and cross-identity pairs
//! (impostor), as indices into set.templates(), first < second.
PairSet genuine_impostor_pairs(const EnrollmentSet& set, const PairOptions& options = {});

} // namespace wolfsearch
