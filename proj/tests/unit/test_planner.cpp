#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ringside/common/errors.hpp"
#include "ringside/planner/llm.hpp"
#include "ringside/planner/mock.hpp"
#include "ringside/planner/planner.hpp"
#include "ringside/planner/prompts.hpp"
#include "ringside/runtime/builtin.hpp"

using namespace ringside;
using namespace ringside::planner;
using namespace std::chrono_literals;

namespace {

// Records every request and answers from a fixed list.
class ScriptedLlm final : public LlmGateway {
public:
    explicit ScriptedLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string chat(const ChatRequest& r) override {
        requests.push_back(r);
        const std::size_t i = std::min(requests.size() - 1, replies_.size() - 1);
        return replies_[i];
    }
    std::vector<ChatRequest> requests;

private:
    std::vector<std::string> replies_;
};

runtime::ValidationReport never_fixed(const std::string&) {
    return {false, "policy raised an error", "Traceback\nZeroDivisionError: division by zero", 0ms};
}

PromptBundle basic_bundle() {
    PromptBundle b;
    b.env_info = build_env_prompt(arena::EnvConfig{}, true);
    return b;
}

}  // namespace

TEST(Templates, VariablesAndSections) {
    EXPECT_EQ(render_template("a {{x}} b", {{"x", "1"}}), "a 1 b");
    EXPECT_EQ(render_template("{{#s}}on {{x}}{{/s}}.", {{"s", "yes"}, {"x", "2"}}), "on 2.");
    EXPECT_EQ(render_template("{{#s}}on{{/s}}.", {{"s", ""}}), ".");
    EXPECT_EQ(render_template("{{#s}}on{{/s}}.", {{"s", "false"}}), ".");
    EXPECT_EQ(render_template("x\n{{#s}}\nbody\n{{/s}}\ny", {{"s", "1"}}), "x\nbody\ny");
    EXPECT_THROW(render_template("{{missing}}", {}), ContractViolation);
}

TEST(Templates, EnvPromptHonoursAuxFlag) {
    const arena::EnvConfig c;
    const std::string with = build_env_prompt(c, true);
    const std::string without = build_env_prompt(c, false);
    EXPECT_NE(with.find("350"), std::string::npos);
    EXPECT_LT(without.size(), with.size());
    EXPECT_EQ(without.find("{{"), std::string::npos);
}

TEST(Templates, EveryAssetRenders) {
    const auto& lib = PromptLibrary::embedded();
    for (const char* name : {"generate_system", "init_user", "iter_user", "debug_system", "debug_user",
                             "reflect_system", "reflect_user", "compact_system", "compact_user", "task_goal"}) {
        EXPECT_FALSE(lib.get(name).empty()) << name;
    }
    EXPECT_THROW(lib.get("nope"), LookupError);
}

TEST(PromptHash, StableAndSensitive) {
    ChatRequest a{PromptKind::init, "sys", "user"};
    ChatRequest b{PromptKind::iter, "sys", "user"};
    ChatRequest c{PromptKind::init, "sysu", "ser"};
    EXPECT_EQ(prompt_hash(a), prompt_hash(b));  // kind is metadata only
    EXPECT_NE(prompt_hash(a), prompt_hash(c));
    EXPECT_EQ(prompt_hash(a).size(), 16u);
}

TEST(Generation, ParseFencedReply) {
    const auto g = parse_generation("Here.\n```python\ndef act(obs):\n    return [1, 0]\n```\n#Rationale: push.\n");
    EXPECT_EQ(g.source, "def act(obs):\n    return [1, 0]\n");
    EXPECT_EQ(g.rationale, "push.");
    const auto bare = parse_generation("policy = random\n#Rationale: none");
    EXPECT_EQ(bare.source, "policy = random\n");
    EXPECT_EQ(bare.rationale, "none");
}

TEST(Generation, InitPromptCarriesSeedsAndMemory) {
    PromptBundle b = basic_bundle();
    b.seeds = {{"20260101_000000", "policy = random\n", "baseline"}};
    b.memory_digest = "- Fix: watch the edge";
    PlannerOptions o;
    const auto r = build_init_request(b, o);
    EXPECT_EQ(r.kind, PromptKind::init);
    EXPECT_NE(r.user.find("policy = random"), std::string::npos);
    EXPECT_NE(r.user.find("watch the edge"), std::string::npos);
    EXPECT_NE(r.system.find("#Rationale:"), std::string::npos);
    b.memory_digest.clear();
    EXPECT_EQ(build_init_request(b, o).user.find("watch the edge"), std::string::npos);
}

TEST(Generation, IterPromptNeedsFeedback) {
    PromptBundle b = basic_bundle();
    b.old_code = "policy = heuristic\n";
    EXPECT_THROW(build_iter_request(b, {}), ContractViolation);
    b.raw_trajectory = R"({"an":"x"})";
    const auto r = build_iter_request(b, {});
    EXPECT_NE(r.user.find(R"({"an":"x"})"), std::string::npos);
    EXPECT_NE(r.user.find("policy = heuristic"), std::string::npos);
}

TEST(Generation, StagnationRetriesOnceThenFails) {
    PromptBundle b = basic_bundle();
    b.old_code = "policy = heuristic\naggression = 0.5\n";
    b.reflection = "#Reflection: x";
    ScriptedLlm same({"```\npolicy = heuristic\naggression = 0.5\n```\n#Rationale: same"});
    EXPECT_THROW(generate_iter_policy(b, same, {}), StagnationError);
    EXPECT_EQ(same.requests.size(), 2u);

    ScriptedLlm recovers({"```\npolicy = heuristic\naggression = 0.5\n```\n", "```\npolicy = heuristic\naggression = 0.6\n```\n"});
    EXPECT_EQ(generate_iter_policy(b, recovers, {}).source, "policy = heuristic\naggression = 0.6\n");
    EXPECT_EQ(recovers.requests.size(), 2u);
}

TEST(Debug, NeverFixingMockUsesExactlyMaxRounds) {
    for (int rounds : {1, 3, 5}) {
        auto mock = std::make_shared<MockLlm>();
        InstrumentedLlm llm(mock);
        int validations = 0;
        const Validator v = [&](const std::string& s) {
            ++validations;
            return never_fixed(s);
        };
        try {
            debug_policy("def act(obs):\n    return 1/0\n", llm, v, rounds, {});
            FAIL();
        } catch (const DebugExhausted& e) {
            EXPECT_NE(e.last_traceback().find("ZeroDivisionError"), std::string::npos);
        }
        EXPECT_EQ(llm.calls(PromptKind::debug), rounds);
        EXPECT_EQ(llm.calls(), rounds);
        EXPECT_EQ(validations, rounds + 1);
    }
}

TEST(Debug, StopsAsSoonAsValid) {
    ScriptedLlm llm({"```\nfixed\n```"});
    const Validator v = [](const std::string& s) {
        return s == "fixed\n" ? runtime::ValidationReport{true, "", "", 0ms} : never_fixed(s);
    };
    EXPECT_EQ(debug_policy("broken\n", llm, v, 3, {}), "fixed\n");
    ASSERT_EQ(llm.requests.size(), 1u);
    EXPECT_EQ(llm.requests[0].kind, PromptKind::debug);
    EXPECT_NE(llm.requests[0].user.find("ZeroDivisionError"), std::string::npos);
    EXPECT_NE(llm.requests[0].user.find("broken"), std::string::npos);
}

TEST(Budget, Formula) {
    EXPECT_EQ(candidate_call_budget(0, 3), 4);
    EXPECT_EQ(candidate_call_budget(8, 3), 4 + 8 * 8);
}

TEST(Mock, ReplyPrecedence) {
    MockLlm m;
    ChatRequest r{PromptKind::init, "s", "u"};
    EXPECT_THROW(m.chat(r), GatewayError);  // nothing configured for init
    m.set_ladder({});
    EXPECT_NE(m.chat(r).find("aggression = 0.25"), std::string::npos);
    EXPECT_NE(m.chat(r).find("aggression = 0.1"), std::string::npos);  // later inits are weak
    m.queue(PromptKind::init, "queued");
    EXPECT_EQ(m.chat(r), "queued");
    m.add_reply(prompt_hash(r), "by hash");
    EXPECT_EQ(m.chat(r), "by hash");
    ChatRequest it{PromptKind::iter, "s", "other"};
    EXPECT_NE(m.chat(it).find("aggression = 0.3"), std::string::npos);
    EXPECT_EQ(m.rungs_issued(), 2);
}

TEST(Mock, RepeatLastAndBuiltins) {
    MockLlm m;
    m.queue(PromptKind::reflect, "one");
    m.set_repeat_last(true);
    ChatRequest r{PromptKind::reflect, "s", "u"};
    EXPECT_EQ(m.chat(r), "one");
    EXPECT_EQ(m.chat(r), "one");
    ChatRequest d{PromptKind::debug, "s", render_template(PromptLibrary::embedded().get("debug_user"),
                                                           {{"traceback", "tb"}, {"code", "x = 1"}})};
    EXPECT_NE(m.chat(d).find("x = 1"), std::string::npos);
}

TEST(Mock, SummarizerDropsTimestampsAndDuplicates) {
    const std::string in = "### 20260101_000000\n- Fix: a\n- Fix: a\n- Error at 2026-01-01T10:00:00Z: b\n";
    const std::string out = mock_summarize(in);
    EXPECT_EQ(out, "- Fix: a\n- Error at : b\n");
}

class HttpLlmTest : public ::testing::Test {
protected:
    void SetUp() override {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        thread_.join();
    }
    LlmConfig config() const {
        LlmConfig c;
        c.backend = LlmBackend::http;
        c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
        c.model = "test-model";
        c.backoff_initial = 1ms;
        c.request_timeout = 2000ms;
        return c;
    }
    static std::string completion(const std::string& text) {
        return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}}.dump();
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

TEST_F(HttpLlmTest, RetriesServerErrorsThenSucceeds) {
    std::atomic<int> hits{0};
    std::string seen_body;
    server_.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 500;
            return;
        }
        seen_body = req.body;
        res.set_content(completion("hello"), "application/json");
    });
    HttpLlm llm(config());
    EXPECT_EQ(llm.chat({PromptKind::init, "sys", "usr"}), "hello");
    EXPECT_EQ(hits.load(), 2);
    const auto body = nlohmann::json::parse(seen_body);
    EXPECT_EQ(body["model"], "test-model");
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_EQ(body["messages"][1]["content"], "usr");
}

TEST_F(HttpLlmTest, AuthFailureIsNotRetried) {
    std::atomic<int> hits{0};
    server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
    });
    HttpLlm llm(config());
    EXPECT_THROW(llm.chat({PromptKind::init, "s", "u"}), GatewayError);
    EXPECT_EQ(hits.load(), 1);
}

TEST_F(HttpLlmTest, GivesUpAfterMaxRetries) {
    std::atomic<int> hits{0};
    server_.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    auto c = config();
    c.max_retries = 2;
    HttpLlm llm(c);
    EXPECT_THROW(llm.chat({PromptKind::init, "s", "u"}), GatewayError);
    EXPECT_EQ(hits.load(), 3);
}

TEST(HttpLlmConfig, MissingKeyVariable) {
    LlmConfig c;
    c.backend = LlmBackend::http;
    c.base_url = "http://127.0.0.1:1/v1";
    c.model = "m";
    c.api_key_env = "RINGSIDE_TEST_UNSET_KEY_VAR";
    EXPECT_THROW(HttpLlm{c}, ConfigError);
}
