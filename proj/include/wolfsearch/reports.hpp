#pragma once

#include "wolfsearch/eval.hpp"
#include "wolfsearch/lve.hpp"
#include "wolfsearch/synth.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wolfsearch::reports {

using nlohmann::ordered_json;

//! JSON has no infinities; +-inf become the strings "inf" / "-inf".
ordered_json number(double x);
ordered_json vector_json(const RealVector& v);

struct LveRunInfo
{
  std::string setting;
  std::uint64_t seed = 0;
  std::vector<std::size_t> template_counts;
};

ordered_json lve_result_json(const lve::LveConfig& config,
                             const lve::LveResult& result,
                             const LveRunInfo& info,
                             const std::optional<lve::ConflictReport>& conflict);

//! Columns: iteration (1-based), best_score, then per system k (1-based)
//! system_k_mean and, when traced, system_k_fmr.
std::string trace_csv(const lve::LveResult& result);

ordered_json eval_report_json(const eval::EvalReport& report);

ordered_json density_report_json(const synth::DensityReport& report, bool normalized);

} // namespace wolfsearch::reports
