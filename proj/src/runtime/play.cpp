#include "ringside/runtime/play.hpp"

#include "ringside/common/errors.hpp"

namespace ringside::runtime {

namespace {

// Stands in for a policy whose construction failed; faults on start.
class BrokenPolicy final : public Policy {
public:
    BrokenPolicy(std::string reason, std::string detail) : reason_(std::move(reason)), detail_(std::move(detail)) {}
    void start(arena::Team, const arena::EnvConfig&, std::uint64_t) override { throw PolicyFault(reason_, detail_); }
    arena::Action act(const arena::Observation&) override { throw PolicyFault(reason_, detail_); }

private:
    std::string reason_;
    std::string detail_;
};

std::unique_ptr<Policy> build(const PolicySpec& spec) {
    try {
        return make_policy(spec);
    } catch (const PolicyFault& f) {
        return std::make_unique<BrokenPolicy>(f.reason(), f.detail());
    } catch (const Error& e) {
        return std::make_unique<BrokenPolicy>("policy could not be created", e.what());
    }
}

}  // namespace

arena::MatchRecord play_match(const PolicySpec& team0, const PolicySpec& team1, const arena::EnvConfig& config,
                              std::uint64_t seed, const arena::MatchOptions& options) {
    auto p0 = build(team0);
    auto p1 = build(team1);
    return arena::run_match(*p0, *p1, config, seed, options);
}

}  // namespace ringside::runtime
