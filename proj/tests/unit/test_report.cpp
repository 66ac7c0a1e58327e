#include "fixtures.hpp"

#include "hyperprob/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace hyperprob;

namespace {

RunReport sample() {
    Mdp m = m_coin();
    Formula f = parse_formula("exists sched s. exists st x(s). init(x) & P(F a(x)) = 1");
    RunReport r;
    r.engine = Engine::Enum;
    r.verdict = check(m, f);
    r.quantifiers = count_quantifiers(f);
    r.model = model_stats(m, r.quantifiers.states);
    r.subformulas = count_subformulas(*f.body);
    return r;
}

}  // namespace

TEST_CASE("model stats") {
    ModelStats s = model_stats(m_coin(), 2);
    CHECK(s.states == 3);
    CHECK(s.transitions == 5);
    CHECK(s.choices == 4);
    CHECK(s.scheduler_space == "2");
    CHECK(s.composed_states == "9");
}

TEST_CASE("engine names") {
    CHECK(parse_engine("smt-eager") == Engine::SmtEager);
    CHECK(to_string(Engine::SmtExternal) == "smt-external");
    CHECK_THROWS(parse_engine("magic"));
}

TEST_CASE("JSON report matches the golden file") {
    Mdp m = m_coin();
    std::string json = report_json(m, sample(), false);
    std::ifstream in(std::string(HYPERPROB_GOLDEN_DIR) + "/m_coin_report.json", std::ios::binary);
    REQUIRE(in);
    std::ostringstream golden;
    golden << in.rdbuf();
    CHECK(json == golden.str());
    auto parsed = nlohmann::json::parse(json);
    CHECK(parsed["schema_version"] == 1);
    CHECK(parsed["verdict"]["schedulers"][0]["choices"]["s0"] == "alpha");
}

TEST_CASE("text report lists the witness scheduler") {
    std::string text = report_text(m_coin(), sample());
    CHECK(text.find("verdict: true (witness)") != std::string::npos);
    CHECK(text.find("  s0: alpha\n") != std::string::npos);
    CHECK(text.find("state x = s0") != std::string::npos);
}
