#pragma once

// Internal-only bridge so report assembly can embed sub-documents without
// re-deriving their JSON shape. Not installed with the public headers.

#include <json.hpp>

#include "gcause/invariance.hpp"
#include "gcause/knockoff.hpp"
#include "gcause/synth.hpp"

namespace gcause::detail {

nlohmann::json inference_config_json(const InferenceConfig& config);
nlohmann::json decision_matrix_json(const DecisionMatrix& matrix,
                                    const InferenceConfig& config);
nlohmann::json diagnostics_json(const KnockoffDiagnostics& diag);
nlohmann::json graph_json(const CausalGraph& graph);

}  // namespace gcause::detail
