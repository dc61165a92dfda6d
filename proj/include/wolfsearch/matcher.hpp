#pragma once

#include "wolfsearch/core.hpp"
#include "wolfsearch/oracle.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace wolfsearch {

enum class MatcherKind
{
  cosine,
  neg_euclidean,
  external
};

struct MatcherSpec
{
  MatcherKind kind = MatcherKind::cosine;
  std::size_t embed_dim = 0;
  std::optional<oracle::Endpoint> external;

  void validate() const;
};

//! Similarity scorer; higher means more similar for every kind.
class Matcher
{
public:
  explicit Matcher(MatcherSpec spec);

  double match(const Embedding& probe, const Embedding& tmpl) const;
  //! Arithmetic mean of match() over every template vector.
  double mean_score(const Embedding& probe, const std::vector<Embedding>& templates) const;

  const MatcherSpec& spec() const { return spec_; }
  std::size_t embed_dim() const { return spec_.embed_dim; }

private:
  MatcherSpec spec_;
  std::shared_ptr<oracle::Pool> pool_;
};

double cosine_similarity(const Embedding& a, const Embedding& b);

} // namespace wolfsearch
