#include "ringside/pools/pool.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ringside/common/errors.hpp"

namespace ringside::pools {

using nlohmann::json;

namespace {

constexpr const char* kMeta = "meta.json";

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw StorageError("cannot create " + p.string() + ": " + ec.message());
}

json load_json(const fs::path& p) {
    const std::string text = read_file(p);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw StorageError("corrupt file " + p.string() + ": " + e.what());
    }
}

PolicyRecord load_record(const fs::path& dir) {
    const fs::path meta = dir / kMeta;
    PolicyRecord r;
    try {
        r = record_from_meta(load_json(meta));
    } catch (const json::exception& e) {
        throw StorageError("corrupt file " + meta.string() + ": " + e.what());
    } catch (const ContractViolation& e) {
        throw StorageError("corrupt file " + meta.string() + ": " + e.what());
    }
    r.source = read_file(dir / r.source_ref);
    return r;
}

// Writes meta + source into `dir`, which must exist.
void write_record(const fs::path& dir, const PolicyRecord& r) {
    write_file_atomic(dir / r.source_ref, r.source);
    write_file_atomic(dir / kMeta, record_meta(r).dump(2) + "\n");
}

std::vector<fs::path> entry_dirs(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::exists(dir, ec)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (!e.is_directory() || name.empty() || name[0] == '.') continue;
        out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

const char* role_name(LocalRole r) { return r == LocalRole::seed ? "seed" : "candidate"; }

json stats_json(const rating::MatchStats& s) {
    return json{{"wins", s.wins},         {"draws", s.draws},         {"losses", s.losses},
                {"L", s.L},               {"score_avg", s.score_avg}, {"win_fraction", s.win_fraction}};
}

}  // namespace

GlobalPool GlobalPool::init_global(const fs::path& root, IdClock& clock, double initial_rating) {
    for (const char* sub : {"global", "local", "history"}) ensure_dir(root / sub);
    GlobalPool pool(root);
    if (pool.size() == 0) {
        PolicyRecord r;
        r.id = clock.next({});
        r.backend = runtime::Backend::builtin;
        r.source = kRandomSource;
        r.source_ref = source_filename(r.source);
        r.elo = initial_rating;
        r.explanation = "Uniform random force and steering over the whole action box.";
        r.created_at = format_iso8601(clock.last_time());
        pool.add(r);
        pool.write_elo_csv();
    }
    return pool;
}

GlobalPool GlobalPool::open(const fs::path& root) {
    if (!fs::is_directory(root / "global")) {
        throw StorageError("no pool at " + root.string() + " (run init first)");
    }
    return GlobalPool(root);
}

std::vector<PolicyRecord> GlobalPool::members() const {
    std::vector<PolicyRecord> out;
    for (const auto& d : entry_dirs(dir())) out.push_back(load_record(d));
    return out;
}

std::vector<std::string> GlobalPool::ids() const {
    std::vector<std::string> out;
    for (const auto& d : entry_dirs(dir())) out.push_back(d.filename().string());
    return out;
}

bool GlobalPool::contains(const std::string& id) const {
    return !id.empty() && id[0] != '.' && fs::is_regular_file(policy_dir(id) / kMeta);
}

PolicyRecord GlobalPool::get(const std::string& id) const {
    if (!contains(id)) throw LookupError("no policy '" + id + "' in the global pool");
    return load_record(policy_dir(id));
}

void GlobalPool::add(const PolicyRecord& record) {
    if (fs::exists(policy_dir(record.id))) throw ConflictError("policy " + record.id + " already exists");
    const fs::path tmp = dir() / (".incoming-" + record.id);
    std::error_code ec;
    fs::remove_all(tmp, ec);
    ensure_dir(tmp);
    write_record(tmp, record);
    fs::rename(tmp, policy_dir(record.id), ec);
    if (ec) throw StorageError("cannot publish " + record.id + ": " + ec.message());
}

void GlobalPool::update(const PolicyRecord& record) {
    if (!contains(record.id)) throw LookupError("no policy '" + record.id + "' in the global pool");
    write_record(policy_dir(record.id), record);
}

rating::EloTable GlobalPool::elo_table(double k_factor, double initial_rating) const {
    rating::EloTable t;
    t.k_factor = k_factor;
    t.initial_rating = initial_rating;
    for (const auto& r : members()) t.ratings[r.id] = r.elo;
    return t;
}

void GlobalPool::apply_tournament(const rating::TournamentResult& result) {
    std::map<std::string, std::array<int, 3>> counts;  // wins, draws, losses
    for (const auto& rec : result.records) {
        for (int side = 0; side < 2; ++side) {
            const int s = rec.score(side == 0 ? arena::Team::team_0 : arena::Team::team_1);
            auto& c = counts[rec.policy_ids[side]];
            ++c[s > 0 ? 0 : s == 0 ? 1 : 2];
        }
    }
    for (auto r : members()) {
        bool changed = false;
        if (auto it = result.table.ratings.find(r.id); it != result.table.ratings.end() && it->second != r.elo) {
            r.elo = it->second;
            changed = true;
        }
        if (auto it = counts.find(r.id); it != counts.end()) {
            r.wins += it->second[0];
            r.draws += it->second[1];
            r.losses += it->second[2];
            r.games += it->second[0] + it->second[1] + it->second[2];
            changed = true;
        }
        if (changed) update(r);
    }
}

std::vector<rating::EloRow> GlobalPool::elo_rows() const {
    std::vector<rating::EloRow> rows;
    for (const auto& r : members()) {
        rows.push_back({r.id, r.elo, r.games, r.wins, r.draws, r.losses, r.promotion_iteration});
    }
    return rows;
}

void GlobalPool::write_elo_csv() const {
    std::ostringstream os;
    rating::write_elo_csv(os, elo_rows());
    write_file_atomic(elo_csv_path(), os.str());
}

LocalPool::LocalPool(fs::path pool_root) : root_(std::move(pool_root)) { ensure_dir(dir()); }

LocalEntry LocalPool::load(const fs::path& entry_dir) const {
    LocalEntry e;
    e.record = load_record(entry_dir);
    const json meta = load_json(entry_dir / kMeta);
    e.role = meta.value("role", "candidate") == "seed" ? LocalRole::seed : LocalRole::candidate;
    e.avg_win_fraction = meta.value("avg_win_fraction", 0.0);
    if (meta.contains("stats") && !meta.at("stats").is_null()) {
        const json& s = meta.at("stats");
        e.stats = rating::MatchStats::from_counts(s.at("wins").get<int>(), s.at("draws").get<int>(),
                                                  s.at("losses").get<int>());
    }
    for (const auto& doc : trajectory_documents(e.record.id)) {
        try {
            e.trajectories.push_back(critic::trajectory_from_json(doc));
        } catch (const ContractViolation& ex) {
            throw StorageError("corrupt trajectory in " + entry_dir.string() + ": " + ex.what());
        }
    }
    if (fs::exists(entry_dir / "reflection.md")) e.reflection = read_file(entry_dir / "reflection.md");
    return e;
}

std::vector<LocalEntry> LocalPool::entries() const {
    std::vector<LocalEntry> out;
    for (const auto& d : entry_dirs(dir())) out.push_back(load(d));
    return out;
}

std::vector<LocalEntry> LocalPool::seeds() const {
    std::vector<LocalEntry> out;
    for (auto& e : entries()) {
        if (e.role == LocalRole::seed) out.push_back(std::move(e));
    }
    return out;
}

std::optional<LocalEntry> LocalPool::find(const std::string& id) const {
    const fs::path d = dir() / id;
    if (id.empty() || id[0] == '.' || !fs::is_regular_file(d / kMeta)) return std::nullopt;
    return load(d);
}

bool LocalPool::empty() const { return entry_dirs(dir()).empty(); }

void LocalPool::add_seed(const PolicyRecord& record) {
    const fs::path d = dir() / record.id;
    if (fs::exists(d)) throw ConflictError("local pool already holds " + record.id);
    ensure_dir(d);
    write_record(d, record);
    json meta = record_meta(record);
    meta["role"] = role_name(LocalRole::seed);
    write_file_atomic(d / kMeta, meta.dump(2) + "\n");
}

LocalEntry LocalPool::record_candidate(const PolicyRecord& record,
                                       const std::vector<critic::CompressedTrajectory>& trajectories,
                                       const rating::MatchStats& stats) {
    const fs::path d = dir() / record.id;
    if (fs::exists(d)) throw ConflictError("local pool already holds " + record.id);
    const fs::path tmp = dir() / (".incoming-" + record.id);
    std::error_code ec;
    fs::remove_all(tmp, ec);
    ensure_dir(tmp);
    write_record(tmp, record);
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        write_file_atomic(tmp / ("trajectory_" + std::to_string(i) + ".json"),
                          critic::trajectory_to_json(trajectories[i]) + "\n");
    }
    json meta = record_meta(record);
    meta["role"] = role_name(LocalRole::candidate);
    meta["avg_win_fraction"] = stats.win_fraction;
    meta["stats"] = stats_json(stats);
    write_file_atomic(tmp / kMeta, meta.dump(2) + "\n");
    fs::rename(tmp, d, ec);
    if (ec) throw StorageError("cannot store candidate " + record.id + ": " + ec.message());
    return load(d);
}

void LocalPool::set_reflection(const std::string& id, const std::string& markdown) {
    const fs::path d = dir() / id;
    if (!fs::is_directory(d)) throw LookupError("no local entry " + id);
    write_file_atomic(d / "reflection.md", markdown);
}

std::vector<std::string> LocalPool::trajectory_documents(const std::string& id) const {
    std::vector<std::string> docs;
    const fs::path d = dir() / id;
    for (int i = 0;; ++i) {
        const fs::path p = d / ("trajectory_" + std::to_string(i) + ".json");
        if (!fs::exists(p)) break;
        std::string text = read_file(p);
        if (!text.empty() && text.back() == '\n') text.pop_back();
        docs.push_back(std::move(text));
    }
    return docs;
}

std::vector<PolicyRecord> seed_local(const GlobalPool& global, LocalPool& local, int count) {
    std::vector<PolicyRecord> members = global.members();
    std::sort(members.begin(), members.end(), [](const PolicyRecord& a, const PolicyRecord& b) {
        if (a.elo != b.elo) return a.elo > b.elo;
        if (a.created_at != b.created_at) return a.created_at > b.created_at;
        return a.id > b.id;
    });
    if (count < 0) count = 0;
    if (members.size() > static_cast<std::size_t>(count)) members.resize(static_cast<std::size_t>(count));
    for (const auto& r : members) {
        if (!local.find(r.id)) local.add_seed(r);
    }
    return members;
}

void reset_local(LocalPool& local, const fs::path& archive_dir) {
    const auto dirs = entry_dirs(local.dir());
    if (dirs.empty()) return;
    ensure_dir(archive_dir);
    for (const auto& d : dirs) {
        fs::path target = archive_dir / d.filename();
        for (int n = 1; fs::exists(target); ++n) target = archive_dir / (d.filename().string() + "." + std::to_string(n));
        std::error_code ec;
        fs::rename(d, target, ec);
        if (ec) throw StorageError("cannot archive " + d.string() + ": " + ec.message());
    }
}

PolicyRecord promote(const LocalEntry& entry, GlobalPool& global, double threshold, int iteration,
                     double initial_rating) {
    if (!(entry.avg_win_fraction >= threshold)) {
        throw GateViolation("policy " + entry.record.id + " has win fraction " +
                            std::to_string(entry.avg_win_fraction) + ", below the promotion threshold " +
                            std::to_string(threshold));
    }
    PolicyRecord r = entry.record;
    r.elo = initial_rating;
    r.promotion_win_fraction = entry.avg_win_fraction;
    r.promotion_iteration = iteration;
    r.games = r.wins = r.draws = r.losses = 0;
    global.add(r);
    return r;
}

PoolLock::PoolLock(const fs::path& root) : path_(root / "run.lock") {
    for (int attempt = 0; attempt < 2; ++attempt) {
        const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
        if (fd >= 0) {
            const std::string pid = std::to_string(::getpid()) + "\n";
            [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
            ::close(fd);
            return;
        }
        if (errno != EEXIST) throw StorageError("cannot create lock " + path_.string());
        long owner = 0;
        try {
            owner = std::stol(read_file(path_));
        } catch (const std::exception&) {
            owner = 0;
        }
        if (owner > 0 && (::kill(static_cast<pid_t>(owner), 0) == 0 || errno == EPERM)) {
            throw ConflictError("pool " + root.string() + " is in use by pid " + std::to_string(owner));
        }
        std::error_code ec;
        fs::remove(path_, ec);  // stale lock
    }
    throw ConflictError("cannot acquire lock " + path_.string());
}

PoolLock::~PoolLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

}  // namespace ringside::pools
