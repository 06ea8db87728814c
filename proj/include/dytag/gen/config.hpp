#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "dytag/util/error.hpp"

namespace dytag {

enum class GenMode { tdgg, idgg };

/// How each round's active sources are chosen in transductive mode.
enum class SourceSelection {
    replay,  ///< sources of the ground-truth continuation, S per round
    uniform, ///< seeded uniform sample of the source set
};

inline std::string to_string(GenMode m) { return m == GenMode::tdgg ? "tdgg" : "idgg"; }
inline std::string to_string(SourceSelection s) { return s == SourceSelection::replay ? "replay" : "uniform"; }

inline GenMode parse_gen_mode(const std::string& s)
{
    if (s == "tdgg") return GenMode::tdgg;
    if (s == "idgg") return GenMode::idgg;
    throw InvalidArgument("unknown generation mode: " + s + " (expected tdgg or idgg)");
}

inline SourceSelection parse_source_selection(const std::string& s)
{
    if (s == "replay") return SourceSelection::replay;
    if (s == "uniform") return SourceSelection::uniform;
    throw InvalidArgument("unknown source selection: " + s + " (expected replay or uniform)");
}

struct GenConfig {
    std::size_t rounds = 20;            ///< K
    std::size_t edges_per_round = 50;   ///< S
    std::size_t seed_edges = 1000;
    std::size_t recall_k = 10;
    std::size_t walks = 10;
    std::size_t walk_len = 10;
    std::size_t memory_cap_chars = 1000;
    bool reflection = false;
    GenMode mode = GenMode::tdgg;
    SourceSelection source_selection = SourceSelection::replay;
    std::size_t r_src = 0;              ///< idgg; 0 derives the rate from the seed
    std::size_t r_dst = 0;
    std::uint64_t rng_seed = 0;
    std::size_t jobs = 1;
    std::size_t policy_attempts = 3;    ///< invalid selections tolerated per agent before the round aborts

    void validate() const
    {
        if (edges_per_round == 0) throw InvalidArgument("edges_per_round must be >= 1");
        if (recall_k == 0) throw InvalidArgument("recall_k must be >= 1");
        if (walks == 0 || walk_len == 0) throw InvalidArgument("walks and walk_len must be >= 1");
        if (memory_cap_chars == 0) throw InvalidArgument("memory_cap_chars must be >= 1");
        if (policy_attempts == 0) throw InvalidArgument("policy_attempts must be >= 1");
    }

    std::size_t target_new_edges() const noexcept { return rounds * edges_per_round; }

    nlohmann::json to_json() const
    {
        return {{"rounds", rounds},
                {"edges_per_round", edges_per_round},
                {"seed_edges", seed_edges},
                {"recall_k", recall_k},
                {"walks", walks},
                {"walk_len", walk_len},
                {"memory_cap_chars", memory_cap_chars},
                {"reflection", reflection},
                {"mode", to_string(mode)},
                {"source_selection", to_string(source_selection)},
                {"r_src", r_src},
                {"r_dst", r_dst},
                {"rng_seed", rng_seed},
                {"jobs", jobs},
                {"policy_attempts", policy_attempts}};
    }
};

} // namespace dytag
