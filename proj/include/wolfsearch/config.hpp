#pragma once

#include "wolfsearch/generator.hpp"
#include "wolfsearch/matcher.hpp"
#include "wolfsearch/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wolfsearch::config {

//! Fixed offsets added to the experiment seed so every random stream is
//! derived from one number.
namespace seed_offset {
inline constexpr std::uint64_t mixture = 0;
inline constexpr std::uint64_t layout = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t surrogate = 3;
inline constexpr std::uint64_t optimizer = 4;
inline constexpr std::uint64_t pairs = 5;
} // namespace seed_offset

struct SynthSection
{
  std::size_t embed_dim = 0;
  std::size_t identities = 0;
  std::size_t items_per_identity = 0;
  double within_identity_sigma = 0;
  double dev_fraction = 0.5;
  std::size_t surrogate_identities = 0;
  //! Added to every cluster center; lets two configs describe shifted
  //! populations.
  std::optional<std::vector<double>> shift;
  std::variant<std::vector<synth::Cluster>, synth::ClusterLayout> clusters;

  //! Resolves the cluster list for a given experiment seed.
  synth::MixtureSpec mixture(std::uint64_t seed) const;
};

//! Partial generator description; dims of external oracles are filled in
//! from the generator itself.
struct SystemSection
{
  std::string name;
  MatcherKind matcher_kind = MatcherKind::cosine;
  std::optional<oracle::Endpoint> oracle;
  std::filesystem::path enrollment;
  double weight = 1.0;
  //! Explicit match threshold for the FMR trace; unset means "EER of the
  //! system's own enrollment pairs".
  std::optional<double> threshold;
};

struct LveSection
{
  std::size_t population = 22;
  std::size_t iterations = 1000;
  double sigma0 = 0.5;
  std::size_t threads = 1;
  bool fmr_trace = true;
  bool conflict_probe = true;
  std::size_t max_pairs = 1'000'000;
};

struct EvalSection
{
  std::optional<std::filesystem::path> dev;
  std::optional<std::filesystem::path> eval;
  MatcherKind matcher_kind = MatcherKind::cosine;
  std::optional<oracle::Endpoint> oracle;
  std::size_t max_pairs = 1'000'000;
  std::optional<std::filesystem::path> reference;
  std::optional<double> bandwidth;
  //! Defaults to true for cosine matchers: density is measured on the unit
  //! sphere where cosine similarity lives.
  std::optional<bool> normalize;
};

struct OutputSection
{
  std::optional<std::filesystem::path> dir;
  int indent = 2;
};

struct Experiment
{
  std::filesystem::path base_dir;
  std::uint64_t seed = 0;
  std::optional<SynthSection> synth;
  std::optional<GeneratorSpec> generator;
  std::vector<SystemSection> systems;
  std::map<std::string, std::vector<std::string>> settings;
  LveSection lve;
  std::optional<EvalSection> eval;
  OutputSection output;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  //! Systems named by the setting, or every system when none is given.
  std::vector<SystemSection> systems_for(const std::optional<std::string>& setting) const;
};

//! Strict parser: unknown keys and wrong types are ConfigErrors naming the
//! offending key path.
Experiment parse_experiment(const nlohmann::json& doc, std::filesystem::path base_dir);
Experiment load_experiment(const std::filesystem::path& path);

oracle::Endpoint parse_endpoint(const nlohmann::json& j, const std::string& where);
GeneratorSpec parse_generator(const nlohmann::json& j);

} // namespace wolfsearch::config
