#include "ringside/runtime/validate.hpp"

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"

namespace ringside::runtime {

ValidationReport validate_policy(const PolicySpec& spec, const arena::EnvConfig& config) {
    ValidationReport report;
    const auto t0 = std::chrono::steady_clock::now();
    auto done = [&] {
        report.wall_time =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        return report;
    };
    try {
        auto policy = make_policy(spec);
        arena::Arena arena(config);
        const auto obs = arena.reset(0);
        policy->start(arena::Team::team_0, config, 0);
        const arena::Action raw = policy->act(obs[0]);
        policy->finish();
        arena::clamp_action(raw, config);  // non-finite components fault here
        report.passed = true;
    } catch (const PolicyFault& f) {
        report.reason = f.reason();
        report.traceback = f.detail().empty() ? f.reason() : f.detail();
    } catch (const ConfigError& e) {
        report.reason = "invalid policy spec";
        report.traceback = e.what();
    }
    return done();
}

}  // namespace ringside::runtime
