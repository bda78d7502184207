#include "ringside/orchestrator/evolve.hpp"

#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ringside/common/errors.hpp"
#include "ringside/common/files.hpp"
#include "ringside/common/timestamp.hpp"
#include "ringside/critic/collect.hpp"
#include "ringside/critic/memory.hpp"
#include "ringside/critic/reflect.hpp"
#include "ringside/orchestrator/commands.hpp"
#include "ringside/planner/planner.hpp"
#include "ringside/pools/pool.hpp"
#include "ringside/runtime/validate.hpp"

namespace ringside::orchestrator {

using nlohmann::json;

namespace {

json stats_json(const rating::MatchStats& s) {
    return {{"wins", s.wins},           {"draws", s.draws},         {"losses", s.losses},
            {"L", s.L},                 {"score_avg", s.score_avg}, {"win_fraction", s.win_fraction}};
}

int promoted_count(const pools::GlobalPool& pool) {
    int n = 0;
    for (const auto& r : pool.members()) n += r.promotion_iteration.has_value();
    return n;
}

std::string fallback_reflection(const rating::MatchStats& s) {
    return fmt::format(
        "#Reflection: No structured analysis is available. The policy scored {} wins, {} draws and {} losses "
        "over {} matches (win fraction {:.2f}).\n",
        s.wins, s.draws, s.losses, s.L, s.win_fraction);
}

std::string new_run_id(const fs::path& history) {
    const std::string base =
        "run_" + format_policy_id(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
    std::string id = base;
    for (int n = 1; fs::exists(history / id); ++n) id = base + "_" + std::to_string(n);
    return id;
}

// One full-pool tournament; all members take part.
void refresh_ratings(pools::GlobalPool& global, const RunConfig& config, int salt) {
    if (global.size() < 2) return;
    rating::TournamentConfig t = config.tournament;
    t.n = static_cast<int>(global.size());
    t.base_seed = derive_seed({config.tournament.base_seed, static_cast<std::uint64_t>(salt)});
    run_pool_tournament(global, t, config.env, config.runtime);
}

class CandidateRun {
public:
    CandidateRun(const RunConfig& config, pools::GlobalPool& global, pools::LocalPool& local, IdClock& clock,
                 planner::InstrumentedLlm& llm, const planner::PromptLibrary& prompts, critic::ReflectionMemory& memory,
                 const fs::path& run_dir, const fs::path& work_dir)
        : config_(config),
          global_(global),
          local_(local),
          clock_(clock),
          llm_(llm),
          prompts_(prompts),
          memory_(memory),
          run_dir_(run_dir),
          work_dir_(work_dir) {
        options_.prompts = &prompts_;
        options_.policy_format = config.policy_format;
        options_.debug_rounds = config.debug_rounds;
    }

    // Fills `report`; returns the promoted record on success.
    std::optional<pools::PolicyRecord> run(CandidateReport& report) {
        const int calls_before = llm_.calls();
        report.llm_call_budget = planner::candidate_call_budget(config_.max_local_iters, config_.debug_rounds);
        std::optional<pools::PolicyRecord> promoted;
        try {
            promoted = attempt(report);
            if (!promoted) report.outcome = "discarded";
        } catch (const GatewayError& e) {
            report.outcome = "gateway_error";
            report.error = e.what();
        } catch (const DebugExhausted& e) {
            report.outcome = "debug_exhausted";
            report.error = e.what();
        } catch (const StagnationError& e) {
            report.outcome = "stagnation";
            report.error = e.what();
        }
        report.llm_calls = llm_.calls() - calls_before;
        if (!report.error.empty()) spdlog::warn("candidate skipped: {}", report.error);
        return promoted;
    }

private:
    planner::PromptBundle bundle(const std::vector<pools::PolicyRecord>& seeds) const {
        planner::PromptBundle b;
        b.env_info = planner::build_env_prompt(config_.env, config_.ablations.aux_info, prompts_);
        for (const auto& s : seeds) b.seeds.push_back({s.id, s.source, s.explanation});
        if (config_.ablations.reflection_memory) b.memory_digest = memory_.digest;
        return b;
    }

    runtime::PolicySpec spec_for(const std::string& source, const std::string& name) const {
        const fs::path file = work_dir_ / (name + "." + pools::source_filename(source).substr(7));
        write_file_atomic(file, source);
        return runtime::spec_for_source(source, file.string(), config_.runtime);
    }

    std::string debugged(const std::string& source) {
        const planner::Validator validator = [this](const std::string& src) {
            return runtime::validate_policy(spec_for(src, "validate"), config_.env);
        };
        return planner::debug_policy(source, llm_, validator, config_.debug_rounds, options_);
    }

    std::set<std::string> taken_ids() const {
        std::set<std::string> taken;
        for (const auto& id : global_.ids()) taken.insert(id);
        for (const auto& e : local_.entries()) taken.insert(e.record.id);
        return taken;
    }

    std::optional<pools::PolicyRecord> attempt(CandidateReport& report) {
        const std::vector<pools::PolicyRecord> seeds = pools::seed_local(global_, local_, 3);
        planner::PromptBundle b = bundle(seeds);

        planner::GeneratedPolicy gen = planner::generate_initial_policy(b, llm_, options_);
        gen.source = debugged(gen.source);
        std::optional<std::string> lineage;

        for (int round = 0;; ++round) {
            pools::PolicyRecord rec;
            rec.id = clock_.next(taken_ids());
            rec.source = gen.source;
            rec.source_ref = pools::source_filename(gen.source);
            rec.backend = pools::backend_for_source(gen.source);
            rec.explanation = gen.rationale;
            rec.lineage = lineage;
            rec.created_at = format_iso8601(clock_.last_time());

            const rating::EloTable table = global_.elo_table(config_.tournament.k_factor);
            critic::CollectOptions co;
            co.k = std::min(config_.k_opponents, static_cast<int>(table.ratings.size()));
            co.L = config_.L;
            co.temperature = config_.temperature;
            co.seed = derive_seed({config_.seed, static_cast<std::uint64_t>(report.iteration),
                                   static_cast<std::uint64_t>(report.attempt), static_cast<std::uint64_t>(round)});
            co.threads = config_.tournament.t;
            co.env = config_.env;
            Rng rng(co.seed);
            const critic::CollectResult collected = critic::collect_trajectories(
                rec.id, spec_for(rec.source, rec.id), table,
                [this](const std::string& id) { return member_spec(global_, global_.get(id), config_.runtime); }, co,
                rng);
            const pools::LocalEntry entry = local_.record_candidate(rec, {collected.trajectory}, collected.stats);

            GenerationReport g;
            g.id = rec.id;
            g.round = round;
            g.stats = collected.stats;
            g.opponents = collected.opponents;
            spdlog::info("iteration {} candidate {} round {}: win fraction {:.2f} vs {}", report.iteration, rec.id,
                         round, collected.stats.win_fraction, fmt::join(collected.opponents, ","));

            if (collected.stats.win_fraction >= config_.promotion_threshold) {
                g.feedback = "none";
                report.generations.push_back(g);
                pools::PolicyRecord promoted =
                    pools::promote(entry, global_, config_.promotion_threshold, report.iteration,
                                   global_.elo_table().initial_rating);
                report.outcome = "promoted";
                report.promoted_id = promoted.id;
                return promoted;
            }
            if (round >= config_.max_local_iters) {
                g.feedback = "none";
                report.generations.push_back(g);
                return std::nullopt;
            }

            // improve on the failed candidate
            b = bundle(seeds);
            b.old_code = rec.source;
            if (config_.ablations.two_step_reflection) {
                std::string text;
                try {
                    const critic::ReflectionReport r = critic::reflect(rec.source, collected.trajectory, llm_, prompts_);
                    text = r.raw;
                    g.feedback = "reflection";
                    if (config_.ablations.reflection_memory) {
                        memory_ = critic::append_and_compact(memory_, r, rec.id, llm_, prompts_);
                        memory_.save(global_.root() / "reflection_memory.md");
                        b.memory_digest = memory_.digest;
                    }
                } catch (const ReflectionError& e) {
                    spdlog::warn("reflection failed ({}), using a stats summary", e.what());
                    text = fallback_reflection(collected.stats);
                    g.feedback = "fallback";
                }
                local_.set_reflection(rec.id, text);
                b.reflection = text;
            } else {
                b.raw_trajectory = critic::trajectory_to_json(collected.trajectory);
                g.feedback = "raw";
            }
            report.generations.push_back(g);

            gen = planner::generate_iter_policy(b, llm_, options_);
            gen.source = debugged(gen.source);
            lineage = rec.id;
        }
    }

    const RunConfig& config_;
    pools::GlobalPool& global_;
    pools::LocalPool& local_;
    IdClock& clock_;
    planner::InstrumentedLlm& llm_;
    const planner::PromptLibrary& prompts_;
    critic::ReflectionMemory& memory_;
    fs::path run_dir_;
    fs::path work_dir_;
    planner::PlannerOptions options_;
};

}  // namespace

json report_json(const RunReport& report) {
    json j;
    j["run_id"] = report.run_id;
    j["promotions_at_start"] = report.promotions_at_start;
    j["promotions"] = report.promotions;
    j["early_stopped"] = report.early_stopped;
    j["llm_calls_by_kind"] = report.llm_calls_by_kind;
    j["candidates"] = json::array();
    for (const auto& c : report.candidates) {
        json cj{{"iteration", c.iteration},
                {"attempt", c.attempt},
                {"outcome", c.outcome},
                {"llm_calls", c.llm_calls},
                {"llm_call_budget", c.llm_call_budget},
                {"promoted_id", c.promoted_id ? json(*c.promoted_id) : json(nullptr)},
                {"elo_snapshot", c.elo_snapshot}};
        if (!c.error.empty()) cj["error"] = c.error;
        cj["generations"] = json::array();
        for (const auto& g : c.generations) {
            cj["generations"].push_back({{"id", g.id},
                                         {"round", g.round},
                                         {"stats", stats_json(g.stats)},
                                         {"opponents", g.opponents},
                                         {"feedback", g.feedback}});
        }
        j["candidates"].push_back(std::move(cj));
    }
    return j;
}

RunReport evolve(const RunConfig& config, std::shared_ptr<planner::LlmGateway> llm) {
    config.validate();
    fs::create_directories(config.pool);
    pools::PoolLock lock(config.pool);

    IdClock clock = config.id_start ? IdClock(*parse_policy_id(*config.id_start)) : IdClock();
    pools::GlobalPool global = pools::GlobalPool::init_global(config.pool, clock);
    pools::LocalPool local(config.pool);

    RunReport report;
    const fs::path history = config.pool / "history";
    report.run_id = new_run_id(history);
    report.run_dir = history / report.run_id;
    const fs::path work_dir = report.run_dir / "work";
    fs::create_directories(work_dir);

    // leftovers of an interrupted run
    pools::reset_local(local, report.run_dir / "interrupted");

    if (!llm) llm = planner::make_gateway(config.llm);
    planner::InstrumentedLlm counted(llm, report.run_dir / "llm.jsonl");
    const planner::PromptLibrary prompts = config.prompts_dir.empty()
                                               ? planner::PromptLibrary::embedded()
                                               : planner::PromptLibrary::with_overrides(config.prompts_dir);
    critic::ReflectionMemory memory =
        critic::ReflectionMemory::load(config.pool / "reflection_memory.md", static_cast<std::size_t>(config.memory_budget));

    report.promotions_at_start = promoted_count(global);
    report.promotions = report.promotions_at_start;

    bool stale = false;
    for (const auto& r : global.members()) stale = stale || r.games == 0;
    if (stale) refresh_ratings(global, config, report.promotions);

    auto write_report = [&] {
        for (auto kind : planner::kAllPromptKinds) {
            report.llm_calls_by_kind[std::string(planner::to_string(kind))] = counted.calls(kind);
        }
        write_file_atomic(report.run_dir / "run_report.json", report_json(report).dump(2) + "\n");
    };

    int failures = 0;
    int attempt = 0;
    while (report.promotions < config.iteration_budget) {
        if (config.early_stop > 0 && failures >= config.early_stop) {
            report.early_stopped = true;
            spdlog::info("stopping early after {} failed candidates in a row", failures);
            break;
        }
        CandidateReport cand;
        cand.iteration = report.promotions + 1;
        cand.attempt = attempt++;
        CandidateRun run(config, global, local, clock, counted, prompts, memory, report.run_dir, work_dir);
        const auto promoted = run.run(cand);
        const fs::path archive =
            report.run_dir / fmt::format("iter_{:03d}_attempt_{:03d}_{}", cand.iteration, cand.attempt, cand.outcome);
        pools::reset_local(local, archive);
        if (promoted) {
            ++report.promotions;
            failures = 0;
            refresh_ratings(global, config, report.promotions);
            for (const auto& r : global.members()) cand.elo_snapshot[r.id] = r.elo;
            spdlog::info("promoted {} ({}/{})", promoted->id, report.promotions, config.iteration_budget);
        } else {
            ++failures;
        }
        report.candidates.push_back(std::move(cand));
        write_report();
    }
    global.write_elo_csv();
    fs::remove_all(work_dir);
    write_report();
    return report;
}

}  // namespace ringside::orchestrator
