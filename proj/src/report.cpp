#include "hyperprob/report.hpp"

#include "hyperprob/error.hpp"

#include <json.hpp>

#include <gmpxx.h>
#include <sstream>

namespace hyperprob {

std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::Enum: return "enum";
        case Engine::SmtEager: return "smt-eager";
        case Engine::SmtExternal: return "smt-external";
    }
    return "";
}

Engine parse_engine(std::string_view text) {
    if (text == "enum") return Engine::Enum;
    if (text == "smt-eager") return Engine::SmtEager;
    if (text == "smt-external") return Engine::SmtExternal;
    raise(ErrorKind::InvalidParameter,
                 "unknown engine '" + std::string(text) + "' (enum, smt-eager, smt-external)");
}

ModelStats model_stats(const Mdp& mdp, std::size_t state_vars) {
    ModelStats s;
    s.states = mdp.num_states();
    s.transitions = mdp.num_transitions();
    s.choices = mdp.num_choices();
    s.scheduler_space = SchedulerSpace(mdp).size_string();
    mpz_class composed;
    mpz_ui_pow_ui(composed.get_mpz_t(), mdp.num_states(), state_vars);
    s.composed_states = composed.get_str();
    return s;
}

namespace {

nlohmann::ordered_json scheduler_json(const Mdp& mdp, const SchedulerAssignment& sched) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) out[mdp.state_name(s)] = mdp.action_name(sched.choice[s]);
    return out;
}

}  // namespace

std::string report_json(const Mdp& mdp, const RunReport& r, bool timings) {
    using json = nlohmann::ordered_json;
    json j;
    j["schema_version"] = 1;
    j["engine"] = std::string(to_string(r.engine));
    json verdict;
    verdict["truth"] = r.verdict.truth;
    verdict["mode"] = std::string(to_string(r.verdict.mode));
    json scheds = json::array();
    for (const auto& [name, sched] : r.verdict.witness.schedulers) {
        scheds.push_back(json{{"variable", name}, {"choices", scheduler_json(mdp, sched)}});
    }
    verdict["schedulers"] = scheds;
    json states = json::array();
    for (const auto& [name, s] : r.verdict.witness.states) {
        states.push_back(json{{"variable", name}, {"state", mdp.state_name(s)}});
    }
    verdict["states"] = states;
    j["verdict"] = verdict;
    j["model"] = json{{"states", r.model.states},
                      {"transitions", r.model.transitions},
                      {"choices", r.model.choices},
                      {"scheduler_space", r.model.scheduler_space},
                      {"composed_states", r.model.composed_states}};
    j["formula"] = json{{"scheduler_quantifiers", r.quantifiers.schedulers},
                        {"state_quantifiers", r.quantifiers.states},
                        {"subformulas", r.subformulas}};
    if (r.smt_variables) {
        j["smt"] = json{{"variables", *r.smt_variables},
                        {"constraints", r.smt_constraints.value_or(0)},
                        {"composed_states_kept", r.composed_kept.value_or(0)}};
    }
    if (timings) j["timings_ms"] = json{{"encode", r.encode_ms}, {"solve", r.solve_ms}};
    if (r.notice) j["notice"] = *r.notice;
    return j.dump(2) + "\n";
}

std::string report_text(const Mdp& mdp, const RunReport& r) {
    std::ostringstream out;
    if (r.notice) out << "note: " << *r.notice << '\n';
    out << "verdict: " << (r.verdict.truth ? "true" : "false");
    if (r.verdict.mode != VerdictMode::None) out << " (" << to_string(r.verdict.mode) << ')';
    out << '\n';
    for (const auto& [name, sched] : r.verdict.witness.schedulers) {
        out << "scheduler " << name << ":\n";
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            out << "  " << mdp.state_name(s) << ": " << mdp.action_name(sched.choice[s]) << '\n';
        }
    }
    for (const auto& [name, s] : r.verdict.witness.states) out << "state " << name << " = " << mdp.state_name(s) << '\n';
    out << "engine: " << to_string(r.engine) << '\n';
    out << "model: states=" << r.model.states << " transitions=" << r.model.transitions
        << " schedulers=" << r.model.scheduler_space << " composed=" << r.model.composed_states << '\n';
    out << "formula: subformulas=" << r.subformulas << '\n';
    if (r.smt_variables) {
        out << "smt: variables=" << *r.smt_variables << " constraints=" << r.smt_constraints.value_or(0)
            << " kept=" << r.composed_kept.value_or(0) << '\n';
    }
    out.setf(std::ios::fixed);
    out.precision(1);
    out << "time: encode=" << r.encode_ms << "ms solve=" << r.solve_ms << "ms\n";
    return out.str();
}

}  // namespace hyperprob
