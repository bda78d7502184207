#include "ringside/orchestrator/commands.hpp"

#include <fstream>

#include <fmt/format.h>

#include "ringside/common/errors.hpp"
#include "ringside/common/files.hpp"
#include "ringside/rating/export.hpp"
#include "ringside/runtime/play.hpp"

namespace ringside::orchestrator {

namespace {

void save_transcript(const fs::path& dir, const arena::MatchRecord& record) {
    if (!record.transcript) return;
    fs::create_directories(dir);
    write_file_atomic(dir / (record.match_id + ".jsonl"), arena::transcript_to_string(*record.transcript));
}

}  // namespace

runtime::PolicySpec member_spec(const pools::GlobalPool& pool, const pools::PolicyRecord& record,
                                const runtime::RuntimeSettings& settings) {
    return runtime::spec_for_source(record.source, (pool.policy_dir(record.id) / record.source_ref).string(), settings);
}

fs::path matches_dir(const fs::path& pool_root) { return pool_root / "history" / "matches"; }

rating::MatchFn pool_match_fn(const pools::GlobalPool& pool, const arena::EnvConfig& env,
                              const runtime::RuntimeSettings& settings, std::optional<fs::path> record_dir) {
    // specs are resolved up front so workers never touch the filesystem
    std::map<std::string, runtime::PolicySpec> specs;
    for (const auto& r : pool.members()) specs.emplace(r.id, member_spec(pool, r, settings));
    return [specs = std::move(specs), env, record_dir](const rating::MatchJob& job) {
        arena::MatchOptions mo;
        mo.match_id = job.match_id;
        mo.policy_ids = {job.team_0, job.team_1};
        mo.record_transcript = record_dir.has_value();
        arena::MatchRecord rec = runtime::play_match(specs.at(job.team_0), specs.at(job.team_1), env, job.seed, mo);
        if (record_dir) {
            save_transcript(*record_dir, rec);
            rec.transcript.reset();
        }
        return rec;
    };
}

EvaluateResult evaluate(const pools::GlobalPool& pool, const std::string& a, const std::string& b, int L,
                        std::uint64_t seed, const arena::EnvConfig& env, const runtime::RuntimeSettings& settings,
                        std::optional<fs::path> record_dir) {
    if (L < 1) throw UsageError("evaluate needs at least one match");
    const runtime::PolicySpec spec_a = member_spec(pool, pool.get(a), settings);
    const runtime::PolicySpec spec_b = member_spec(pool, pool.get(b), settings);
    EvaluateResult out;
    for (int m = 0; m < L; ++m) {
        const bool a_first = m % 2 == 0;
        arena::MatchOptions mo;
        mo.match_id = fmt::format("e{:016x}-m{:02d}", derive_seed({seed}), m);
        mo.policy_ids = a_first ? std::array<std::string, 2>{a, b} : std::array<std::string, 2>{b, a};
        mo.record_transcript = record_dir.has_value();
        const std::uint64_t s = derive_seed({seed, static_cast<std::uint64_t>(m)});
        arena::MatchRecord rec = a_first ? runtime::play_match(spec_a, spec_b, env, s, mo)
                                         : runtime::play_match(spec_b, spec_a, env, s, mo);
        if (record_dir) {
            save_transcript(*record_dir, rec);
            rec.transcript.reset();
        }
        out.records.push_back(std::move(rec));
    }
    if (a == b) {
        // self-play: score from the team_0 seat
        int w = 0, d = 0, l = 0;
        for (const auto& r : out.records) {
            const int s = r.score(arena::Team::team_0);
            (s > 0 ? w : s == 0 ? d : l)++;
        }
        out.stats = rating::MatchStats::from_counts(w, d, l);
    } else {
        out.stats = rating::compute_stats(out.records, a);
    }
    return out;
}

rating::TournamentResult run_pool_tournament(pools::GlobalPool& pool, const rating::TournamentConfig& config,
                                             const arena::EnvConfig& env, const runtime::RuntimeSettings& settings,
                                             std::optional<fs::path> record_dir) {
    const rating::EloTable table = pool.elo_table(config.k_factor);
    auto result = rating::run_tournament(pool.ids(), table, config, pool_match_fn(pool, env, settings, record_dir));
    pool.apply_tournament(result);
    pool.write_elo_csv();
    return result;
}

void export_elo(const pools::GlobalPool& pool, const fs::path& out) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw StorageError("cannot write " + out.string());
    rating::write_elo_csv(f, pool.elo_rows());
    if (!f) throw StorageError("cannot write " + out.string());
}

void replay(const fs::path& pool_root, const std::string& match_id, std::ostream& out) {
    if (match_id.find('/') != std::string::npos || match_id.empty()) throw LookupError("bad match id '" + match_id + "'");
    const fs::path file = matches_dir(pool_root) / (match_id + ".jsonl");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LookupError("no recorded match " + match_id);
    const arena::Transcript t = arena::read_transcript(in);
    out << fmt::format("match {} seed {} team_0={} team_1={}\n", t.match_id, t.seed, t.policy_ids[0], t.policy_ids[1]);
    for (const auto& s : t.steps) {
        out << fmt::format(
            "{:4d}  t0 F={:7.2f} A={:6.2f} pos=({:7.2f},{:7.2f}) E={:6.2f} | t1 F={:7.2f} A={:6.2f} pos=({:7.2f},{:7.2f}) "
            "E={:6.2f}\n",
            s.step, s.actions[0].force, s.actions[0].angle_delta, s.positions[0].x, s.positions[0].y, s.energies[0],
            s.actions[1].force, s.actions[1].angle_delta, s.positions[1].x, s.positions[1].y, s.energies[1]);
    }
    if (t.fault) {
        out << fmt::format("fault: {} at step {}: {}\n", arena::to_string(t.fault->side), t.fault->step,
                           t.fault->reason);
    }
    out << "outcome: " << arena::to_string(t.outcome) << "\n";
}

}  // namespace ringside::orchestrator
