#pragma once

#include "wolfsearch/config.hpp"
#include "wolfsearch/eval.hpp"
#include "wolfsearch/lve.hpp"
#include "wolfsearch/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace wolfsearch::commands {

struct Manifest
{
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> setting;
  std::optional<std::filesystem::path> master;
};

struct SynthOutput
{
  std::filesystem::path dir;
  std::size_t dev_identities = 0;
  std::size_t eval_identities = 0;
};

//! Writes enrollment.csv, dev.csv, eval.csv, optionally surrogate.csv, and
//! provenance.json.
SynthOutput cmd_synth(const Manifest& manifest);

struct LveOutput
{
  lve::LveConfig config;
  lve::LveResult result;
  std::optional<lve::ConflictReport> conflict;
};

//! Writes result.json, trace.csv and master.csv.
LveOutput cmd_lve(const Manifest& manifest);

//! Writes eval_report.json plus the dev genuine/impostor score columns.
eval::EvalReport cmd_eval(const Manifest& manifest);

//! Writes density.json and density_points.csv.
synth::DensityReport cmd_density(const Manifest& manifest);

//! Reads a master embedding from a result.json (best.embedding) or from an
//! embedding CSV (first row).
Embedding load_master(const std::filesystem::path& path);

//! Builds the LVE configuration the lve command would run.
lve::LveConfig build_lve_config(const config::Experiment& experiment,
                                const std::optional<std::string>& setting,
                                std::uint64_t seed);

} // namespace wolfsearch::commands
