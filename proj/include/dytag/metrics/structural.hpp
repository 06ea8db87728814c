#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "dytag/core/graph.hpp"
#include "dytag/metrics/mmd.hpp"
#include "dytag/metrics/power_law.hpp"
#include "dytag/metrics/spectrum.hpp"

namespace dytag {

inline void require_nonempty(const DyTag& g, std::string_view what)
{
    if (g.num_nodes() == 0) throw InvalidArgument(std::string(what) + " graph is empty");
}

/// MMD^2 between per-node degree scalars (total degree unless overridden).
inline double degree_mmd(const DyTag& generated, const DyTag& truth, const MmdConfig& cfg = {},
                         DegreeSide side = DegreeSide::all)
{
    require_nonempty(generated, "generated");
    require_nonempty(truth, "ground-truth");
    const auto x = scalar_samples(degree_sequence(generated, side));
    const auto y = scalar_samples(degree_sequence(truth, side));
    return mmd_squared(x, y, cfg);
}

/// MMD^2 between the normalized-Laplacian eigenvalue multisets, each
/// eigenvalue a 1-d sample.
inline double spectra_mmd(const DyTag& generated, const DyTag& truth, const MmdConfig& cfg = {},
                          const SpectrumOptions& opts = {})
{
    require_nonempty(generated, "generated");
    require_nonempty(truth, "ground-truth");
    const auto x = scalar_samples(laplacian_spectrum(generated, opts, "generated graph"));
    const auto y = scalar_samples(laplacian_spectrum(truth, opts, "ground-truth graph"));
    return mmd_squared(x, y, cfg);
}

struct StructuralReport {
    double degree_mmd = 0.0;
    double spectra_mmd = 0.0;
    std::optional<PowerLawFit> power_law; ///< fit of the generated degree sequence
    std::string power_law_error;          ///< why the fit is absent

    bool power_law_valid() const { return power_law && power_law_validity(*power_law); }

    nlohmann::json to_json() const
    {
        nlohmann::json j{{"degree_mmd", degree_mmd}, {"spectra_mmd", spectra_mmd}};
        if (power_law) {
            j["alpha"] = power_law->alpha;
            j["d_k"] = power_law->d_k;
            j["k_min"] = power_law->k_min;
            j["n_tail"] = power_law->n_tail;
        } else {
            j["alpha"] = nullptr;
            j["d_k"] = nullptr;
            j["power_law_error"] = power_law_error;
        }
        j["power_law_valid"] = power_law_valid();
        return j;
    }
};

inline StructuralReport structural_report(const DyTag& generated, const DyTag& truth, const MmdConfig& cfg = {},
                                          std::int64_t k_min = 2, const SpectrumOptions& opts = {})
{
    StructuralReport r;
    r.degree_mmd = degree_mmd(generated, truth, cfg);
    r.spectra_mmd = spectra_mmd(generated, truth, cfg, opts);
    try {
        r.power_law = fit_power_law(degree_sequence(generated), k_min);
    } catch (const NumericError& e) {
        r.power_law_error = e.what();
    }
    return r;
}

} // namespace dytag
