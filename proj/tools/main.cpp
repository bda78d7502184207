#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ringside/common/errors.hpp"
#include "ringside/orchestrator/commands.hpp"
#include "ringside/orchestrator/config.hpp"
#include "ringside/orchestrator/evolve.hpp"

namespace fs = std::filesystem;
using namespace ringside;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

// Env / runtime settings come from the config file when one is given.
orchestrator::RunConfig base_config(const std::string& config_path) {
    return config_path.empty() ? orchestrator::RunConfig{} : orchestrator::load_run_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ringside: evolve and rate programmatic policies for the sumo arena"};
    app.require_subcommand(1);
    std::string pool_opt;
    std::string config_path;
    std::string log_level = "info";
    app.add_option("--pool", pool_opt, "pool directory (default: pool, or the config's value)");
    app.add_option("--config", config_path, "run config (TOML)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

    auto* init = app.add_subcommand("init", "create a pool holding the builtin random policy");

    auto* evolve = app.add_subcommand("evolve", "run the improvement loop");
    evolve->add_option("--config", config_path, "run config (TOML)")->required();

    std::string id_a, id_b;
    int matches = 10;
    std::uint64_t seed = 0;
    auto* evaluate = app.add_subcommand("evaluate", "play two pool members against each other");
    evaluate->add_option("--a", id_a)->required();
    evaluate->add_option("--b", id_b)->required();
    evaluate->add_option("--matches", matches)->capture_default_str()->check(CLI::PositiveNumber);
    evaluate->add_option("--seed", seed)->capture_default_str();

    rating::TournamentConfig tcfg;
    bool n_given = false;
    auto* tournament = app.add_subcommand("tournament", "rate pool members against each other");
    tournament->add_option("--n", tcfg.n, "participants (default: whole pool)")->check(CLI::PositiveNumber);
    tournament->add_option("--t", tcfg.t, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    tournament->add_option("--seed", tcfg.base_seed)->capture_default_str();
    tournament->add_option("--matches-per-pair", tcfg.matches_per_pair)->capture_default_str();

    std::string out_path = "elo.csv";
    auto* export_elo = app.add_subcommand("export-elo", "write the rating table as CSV");
    export_elo->add_option("--out", out_path)->capture_default_str();

    std::string match_id;
    auto* replay = app.add_subcommand("replay", "print a recorded match step by step");
    replay->add_option("--match", match_id)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }
    spdlog::set_level(spdlog::level::from_str(log_level));
    n_given = tournament->count("--n") > 0;

    try {
        orchestrator::RunConfig config = base_config(config_path);
        if (!pool_opt.empty()) config.pool = pool_opt;
        const fs::path pool_root = config.pool;

        if (*init) {
            IdClock clock;
            auto pool = pools::GlobalPool::init_global(pool_root, clock);
            std::cout << fmt::format("pool {} holds {} policies\n", pool_root.string(), pool.size());
        } else if (*evolve) {
            const auto report = orchestrator::evolve(config);
            std::cout << fmt::format("run {}: {} promoted policies ({} at start), report in {}\n", report.run_id,
                                     report.promotions, report.promotions_at_start,
                                     (report.run_dir / "run_report.json").string());
        } else if (*evaluate) {
            auto pool = pools::GlobalPool::open(pool_root);
            const auto result = orchestrator::evaluate(pool, id_a, id_b, matches, seed, config.env, config.runtime,
                                                       orchestrator::matches_dir(pool_root));
            nlohmann::ordered_json j{{"a", id_a},
                                     {"b", id_b},
                                     {"wins", result.stats.wins},
                                     {"draws", result.stats.draws},
                                     {"losses", result.stats.losses},
                                     {"L", result.stats.L},
                                     {"score_avg", result.stats.score_avg},
                                     {"win_fraction", result.stats.win_fraction}};
            j["matches"] = nlohmann::ordered_json::array();
            for (const auto& r : result.records) j["matches"].push_back(r.match_id);
            std::cout << j.dump(2) << "\n";
        } else if (*tournament) {
            auto pool = pools::GlobalPool::open(pool_root);
            if (!n_given) tcfg.n = static_cast<int>(pool.size());
            tcfg.validate();
            const auto result = orchestrator::run_pool_tournament(pool, tcfg, config.env, config.runtime,
                                                                  orchestrator::matches_dir(pool_root));
            std::cout << fmt::format("{} matches among {} policies; ratings in {}\n", result.records.size(),
                                     result.participants.size(), pool.elo_csv_path().string());
        } else if (*export_elo) {
            auto pool = pools::GlobalPool::open(pool_root);
            orchestrator::export_elo(pool, out_path);
            std::cout << fmt::format("wrote {} rows to {}\n", pool.size(), out_path);
        } else if (*replay) {
            orchestrator::replay(pool_root, match_id, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return 0;
}
