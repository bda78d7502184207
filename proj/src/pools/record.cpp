#include "ringside/pools/record.hpp"

#include <nlohmann/json.hpp>


namespace ringside::pools {

using nlohmann::json;

std::string source_filename(const std::string& source) {
    const auto kind = runtime::builtin_kind_of(source);
    if (!kind) return "source.py";
    return *kind == runtime::BuiltinKind::heuristic ? "source.heuristic" : "source.random";
}

runtime::Backend backend_for_source(const std::string& source) {
    return runtime::is_builtin_source(source) ? runtime::Backend::builtin : runtime::Backend::external;
}

json record_meta(const PolicyRecord& r) {
    json j;
    j["id"] = r.id;
    j["backend"] = std::string(runtime::to_string(r.backend));
    j["source_ref"] = r.source_ref;
    j["elo"] = r.elo;
    j["explanation"] = r.explanation;
    j["lineage"] = r.lineage ? json(*r.lineage) : json(nullptr);
    j["promotion_win_fraction"] = r.promotion_win_fraction ? json(*r.promotion_win_fraction) : json(nullptr);
    j["promotion_iteration"] = r.promotion_iteration ? json(*r.promotion_iteration) : json(nullptr);
    j["created_at"] = r.created_at;
    j["games"] = r.games;
    j["wins"] = r.wins;
    j["draws"] = r.draws;
    j["losses"] = r.losses;
    return j;
}

PolicyRecord record_from_meta(const json& j) {
    PolicyRecord r;
    r.id = j.at("id").get<std::string>();
    r.backend = runtime::backend_from_string(j.at("backend").get<std::string>());
    r.source_ref = j.at("source_ref").get<std::string>();
    r.elo = j.at("elo").get<double>();
    r.explanation = j.at("explanation").get<std::string>();
    if (!j.at("lineage").is_null()) r.lineage = j.at("lineage").get<std::string>();
    if (!j.at("promotion_win_fraction").is_null()) r.promotion_win_fraction = j.at("promotion_win_fraction").get<double>();
    if (!j.at("promotion_iteration").is_null()) r.promotion_iteration = j.at("promotion_iteration").get<int>();
    r.created_at = j.at("created_at").get<std::string>();
    r.games = j.at("games").get<int>();
    r.wins = j.at("wins").get<int>();
    r.draws = j.at("draws").get<int>();
    r.losses = j.at("losses").get<int>();
    return r;
}

}  // namespace ringside::pools
