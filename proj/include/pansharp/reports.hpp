#pragma once

// JSON forms of the loss and metric reports (nlohmann/json).

#include <json.hpp>

#include "pansharp/caploss.hpp"
#include "pansharp/metrics.hpp"
#include "pansharp/recolor.hpp"

namespace pansharp {

inline nlohmann::json loss_params_json(const LossParams& p, const RecolorParams& rc)
{
    return {
        {"gamma", p.gamma},
        {"alpha_cap", p.alpha_cap},
        {"alpha_ms", p.alpha_ms},
        {"alpha_l1", p.alpha_l1},
        {"pool_sizes", p.pool_sizes},
        {"downscale_factor", p.downscale_factor},
        {"window", rc.window},
        {"hf_filter_size", rc.hf_filter_size},
    };
}

/// Flat object with the six loss fields plus the parameter set.
inline nlohmann::json to_json(const LossReport& r, const LossParams& p, const RecolorParams& rc)
{
    return {
        {"cap", r.cap},
        {"perceptual_ms", r.perceptual_ms},
        {"l1_ms", r.l1_ms},
        {"fidelity", r.fidelity},
        {"rc", r.rc},
        {"total", r.total},
        {"parameters", loss_params_json(p, rc)},
    };
}

inline nlohmann::json to_json(const CapWeights& w, double gamma)
{
    return {{"gamma", gamma}, {"layers", w.layers}};
}

inline nlohmann::json to_json(const MetricsReport& r)
{
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json out = {
        {"ergas", opt(r.ergas)},
        {"scc", opt(r.scc)},
        {"qnr", opt(r.qnr)},
        {"d_lambda", opt(r.d_lambda)},
        {"d_s", opt(r.d_s)},
        {"parameters",
         {
             {"ratio", r.params.ratio},
             {"ergas_protocol", r.ergas_protocol},
             {"scc_kernel", scc_kernel_name},
             {"q_block", r.params.qnr.q_block},
             {"q_block_used", r.q_block_used},
             {"p", r.params.qnr.p},
             {"q", r.params.qnr.q},
             {"alpha", r.params.qnr.alpha},
             {"beta", r.params.qnr.beta},
         }},
    };
    if (!r.errors.empty()) {
        out["errors"] = r.errors;
    }
    return out;
}

} // namespace pansharp
