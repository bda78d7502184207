#include "ringside/critic/collect.hpp"

#include <fmt/format.h>

#include "ringside/common/errors.hpp"
#include "ringside/rating/tournament.hpp"
#include "ringside/runtime/play.hpp"

namespace ringside::critic {

std::vector<int> split_episodes(int L, int k) {
    if (k < 1 || L < 1) throw ContractViolation("split_episodes needs L >= 1 and k >= 1");
    std::vector<int> out(static_cast<std::size_t>(k), L / k);
    for (int i = 0; i < L % k; ++i) out[static_cast<std::size_t>(i)]++;
    return out;
}

CollectResult collect_trajectories(const std::string& candidate_id, const runtime::PolicySpec& candidate,
                                   const rating::EloTable& table, const SpecResolver& resolve,
                                   const CollectOptions& options, Rng& rng) {
    if (options.k < 1) throw ContractViolation("collect_trajectories needs k >= 1");
    if (options.L < options.k) throw ContractViolation("collect_trajectories needs L >= k");
    if (table.contains(candidate_id)) throw ContractViolation("candidate " + candidate_id + " is already rated");

    CollectResult out;
    out.opponents = rating::softmax_sample(table, static_cast<std::size_t>(options.k), options.temperature, rng);
    const std::uint64_t base = rng.next_u64() ^ options.seed;

    struct Episode {
        int opponent;
        int index;
    };
    std::vector<Episode> episodes;
    const std::vector<int> per = split_episodes(options.L, options.k);
    for (int o = 0; o < options.k; ++o) {
        for (int e = 0; e < per[static_cast<std::size_t>(o)]; ++e) episodes.push_back({o, e});
    }
    std::vector<runtime::PolicySpec> specs;
    for (const auto& id : out.opponents) specs.push_back(resolve(id));

    out.records.resize(episodes.size());
    rating::parallel_for(static_cast<int>(episodes.size()), options.threads, [&](int i) {
        const Episode& ep = episodes[static_cast<std::size_t>(i)];
        const std::string& opp = out.opponents[static_cast<std::size_t>(ep.opponent)];
        const bool candidate_first = ep.index % 2 == 0;
        arena::MatchOptions mo;
        mo.match_id = fmt::format("c{:016x}-o{:02d}-e{:02d}", base, ep.opponent, ep.index);
        mo.policy_ids = candidate_first ? std::array<std::string, 2>{candidate_id, opp}
                                        : std::array<std::string, 2>{opp, candidate_id};
        const runtime::PolicySpec& opp_spec = specs[static_cast<std::size_t>(ep.opponent)];
        const std::uint64_t seed = derive_seed({base, static_cast<std::uint64_t>(ep.opponent),
                                                static_cast<std::uint64_t>(ep.index)});
        out.records[static_cast<std::size_t>(i)] =
            candidate_first ? runtime::play_match(candidate, opp_spec, options.env, seed, mo)
                            : runtime::play_match(opp_spec, candidate, options.env, seed, mo);
    });

    std::vector<arena::Transcript> transcripts;
    for (const auto& r : out.records) transcripts.push_back(*r.transcript);
    out.trajectory = compress_trajectory(transcripts, candidate_id);
    out.stats = rating::compute_stats(out.records, candidate_id);
    return out;
}

}  // namespace ringside::critic
