#include "ringside/rating/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "ringside/common/errors.hpp"

namespace ringside::rating {

void TournamentConfig::validate() const {
    if (n < 2) throw ConfigError("tournament.n must be >= 2");
    if (t < 1) throw ConfigError("tournament.t must be >= 1");
    if (matches_per_pair < 1) throw ConfigError("tournament.matches_per_pair must be >= 1");
    if (!(k_factor > 0.0)) throw ConfigError("tournament.k_factor must be > 0");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, count));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<MatchJob> plan_tournament(const std::vector<std::string>& pool, const TournamentConfig& config) {
    config.validate();
    std::vector<std::string> candidates = pool;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.size() < 2) throw RequestError("a tournament needs at least two policies");

    const std::size_t n = std::min<std::size_t>(config.n, candidates.size());
    std::vector<std::string> chosen;
    Rng rng(derive_seed({config.base_seed, 0x7041u}));
    while (chosen.size() < n) {
        const auto i = rng.below(candidates.size());
        chosen.push_back(candidates[i]);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(i));
    }
    std::sort(chosen.begin(), chosen.end());

    std::vector<MatchJob> jobs;
    int pair = 0;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        for (std::size_t j = i + 1; j < chosen.size(); ++j, ++pair) {
            for (int m = 0; m < config.matches_per_pair; ++m) {
                MatchJob job;
                job.pair_index = pair;
                job.match_index = m;
                job.team_0 = m % 2 == 0 ? chosen[i] : chosen[j];
                job.team_1 = m % 2 == 0 ? chosen[j] : chosen[i];
                job.seed = derive_seed({config.base_seed, static_cast<std::uint64_t>(pair),
                                        static_cast<std::uint64_t>(m)});
                job.match_id = fmt::format("t{:016x}-p{:03d}-m{:02d}", config.base_seed, pair, m);
                jobs.push_back(std::move(job));
            }
        }
    }
    return jobs;
}

TournamentResult run_tournament(const std::vector<std::string>& pool, const EloTable& initial,
                                const TournamentConfig& config, const MatchFn& match_fn) {
    const std::vector<MatchJob> jobs = plan_tournament(pool, config);

    TournamentResult result;
    result.records.resize(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), config.t,
                 [&](int i) { result.records[i] = match_fn(jobs[i]); });

    result.table = initial;
    result.table.k_factor = config.k_factor;
    for (const auto& job : jobs) {
        result.participants.push_back(job.team_0);
        result.participants.push_back(job.team_1);
    }
    std::sort(result.participants.begin(), result.participants.end());
    result.participants.erase(std::unique(result.participants.begin(), result.participants.end()),
                              result.participants.end());

    // jobs are generated in (pair, match) order already
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& rec = result.records[i];
        const int s = rec.score(arena::Team::team_0);
        result.table.record(jobs[i].team_0, jobs[i].team_1, s > 0 ? 1.0 : s < 0 ? 0.0 : 0.5);
    }
    return result;
}

}  // namespace ringside::rating
