#include "hyperprob/casegen.hpp"
#include "hyperprob/enum_checker.hpp"
#include "hyperprob/error.hpp"
#include "hyperprob/formula.hpp"
#include "hyperprob/model.hpp"
#include "hyperprob/report.hpp"
#include "hyperprob/smt.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace hyperprob;

namespace {

struct Common {
    std::string model_path;
    std::string formula_text;
    std::string formula_file;
    bool prune = false;
    std::size_t max_sched = 3;
    std::size_t max_state = 3;
    unsigned jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("model", c.model_path, "model file (.mdpx)")->required();
    auto* inline_f = cmd->add_option("--formula", c.formula_text, "formula text");
    auto* file_f = cmd->add_option("--formula-file", c.formula_file, "formula file (.hpctl)");
    inline_f->excludes(file_f);
    cmd->add_flag("--prune", c.prune, "encode only composed states the formula can depend on");
    cmd->add_option("--max-sched-vars", c.max_sched, "scheduler quantifier cap");
    cmd->add_option("--max-state-vars", c.max_state, "state quantifier cap");
    cmd->add_option("--jobs", c.jobs, "worker threads (0 = available parallelism)");
}

bool has_formula(const Common& c) { return !c.formula_text.empty() || !c.formula_file.empty(); }

Formula load(const Common& c) {
    if (!c.formula_file.empty()) return load_formula(c.formula_file);
    if (c.formula_text.empty()) raise(ErrorKind::InvalidParameter, "a formula is required (--formula or --formula-file)");
    return parse_formula(c.formula_text);
}

Mdp load_model(const std::string& path) {
    try {
        return load_mdp(path);
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

double since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write " + path);
    out << text;
    if (!out) raise(ErrorKind::Io, "cannot write " + path);
}

int cmd_check(const Common& c, Engine engine, const std::string& solver, bool json, const std::string& emit) {
    Mdp mdp = load_model(c.model_path);
    Formula f = load(c);
    CheckOptions copts{c.max_sched, c.max_state, c.jobs};
    validate_for_model(mdp, f, copts);

    RunReport r;
    r.engine = engine;
    r.quantifiers = count_quantifiers(f);
    r.model = model_stats(mdp, r.quantifiers.states);
    r.subformulas = count_subformulas(*f.body);

    bool use_enum = engine == Engine::Enum;
    std::optional<Encoding> enc;
    if (!use_enum || !emit.empty()) {
        auto t = std::chrono::steady_clock::now();
        try {
            enc = encode_main(mdp, f, EncodeOptions{c.prune, c.max_sched, c.max_state});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MixedSchedulerBlock) throw;
            if (!use_enum) {
                r.notice = "mixed scheduler quantifier block, falling back to the enum engine";
                r.engine = Engine::Enum;
                use_enum = true;
            }
            if (!emit.empty()) throw;
        }
        r.encode_ms = since(t);
        if (enc) {
            r.smt_variables = enc->system.variables().size();
            r.smt_constraints = enc->system.constraints().size();
            r.composed_kept = enc->kept.size();
            if (!emit.empty()) write_file(emit, emit_smtlib2(*enc));
        }
    }

    auto t = std::chrono::steady_clock::now();
    if (use_enum) {
        r.verdict = check(mdp, f, copts);
    } else if (engine == Engine::SmtEager) {
        SmtVerdict v = solve_eager(mdp, *enc, EagerOptions{c.jobs, true});
        r.verdict = *v.decoded;
    } else {
        if (solver.empty()) raise(ErrorKind::InvalidParameter, "smt-external needs --solver or HYPERPROB_SOLVER");
        SmtVerdict v = solve_external(*enc, solver);
        r.verdict = *v.decoded;
    }
    r.solve_ms = since(t);

    if (json) {
        std::cout << report_json(mdp, r);
    } else {
        std::cout << report_text(mdp, r);
    }
    return r.verdict.truth ? 0 : 1;
}

int cmd_encode(const Common& c, const std::string& out_path) {
    Mdp mdp = load_model(c.model_path);
    Formula f = load(c);
    Encoding enc = encode_main(mdp, f, EncodeOptions{c.prune, c.max_sched, c.max_state});
    write_file(out_path, emit_smtlib2(enc));
    std::cout << "variables=" << enc.system.variables().size() << " constraints=" << enc.system.constraints().size()
              << " subformulas=" << enc.subformulas.size() << " composed=" << enc.kept.size() << '/'
              << enc.total_composed << " polarity=" << to_string(enc.polarity) << '\n';
    return 0;
}

int cmd_stats(const Common& c) {
    Mdp mdp = load_model(c.model_path);
    std::size_t vars = 0;
    std::optional<Formula> f;
    if (has_formula(c)) {
        f = load(c);
        validate_for_model(mdp, *f, CheckOptions{c.max_sched, c.max_state, c.jobs});
        vars = count_quantifiers(*f).states;
    }
    ModelStats s = model_stats(mdp, vars);
    std::cout << "states=" << s.states << " transitions=" << s.transitions << " choices=" << s.choices
              << " schedulers=" << s.scheduler_space << '\n';
    if (f) {
        QuantifierCounts q = count_quantifiers(*f);
        std::cout << "scheduler_quantifiers=" << q.schedulers << " state_quantifiers=" << q.states
                  << " subformulas=" << count_subformulas(*f->body) << " composed=" << s.composed_states << '\n';
        try {
            Encoding enc = encode_main(mdp, *f, EncodeOptions{c.prune, c.max_sched, c.max_state});
            std::cout << "smt_variables=" << enc.system.variables().size()
                      << " smt_constraints=" << enc.system.constraints().size() << '\n';
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MixedSchedulerBlock) throw;
            std::cout << "smt: not encodable (mixed scheduler quantifier block)\n";
        }
    }
    return 0;
}

int cmd_gen(const std::string& family, unsigned m, const std::vector<unsigned>& h, const std::string& tier,
            const std::string& out_dir) {
    CaseSpec spec = [&] {
        if (family == "ta") return gen_timing_attack(m);
        if (family == "pw") return gen_password(m);
        if (family == "ts") {
            if (h.size() != 2) raise(ErrorKind::InvalidParameter, "ts needs --h H1 H2");
            return gen_thread_sched(h[0], h[1]);
        }
        if (family == "pc") return gen_conformance(parse_tier(tier));
        raise(ErrorKind::InvalidParameter, "unknown family '" + family + "' (ta, pw, ts, pc)");
    }();
    std::filesystem::path dir(out_dir);
    if (!std::filesystem::is_directory(dir)) raise(ErrorKind::Io, "no such directory: " + out_dir);
    std::string model_path = (dir / (spec.name + ".mdpx")).string();
    std::string formula_path = (dir / (spec.name + ".hpctl")).string();
    write_file(model_path, spec.model_text);
    write_file(formula_path, spec.formula_text);
    std::cout << "wrote " << model_path << " and " << formula_path << '\n';
    std::cout << "states=" << spec.mdp.num_states();
    if (spec.reference) std::cout << " (reference: " << spec.reference->states << ')';
    std::cout << " transitions=" << spec.mdp.num_transitions();
    if (spec.reference) std::cout << " (reference: " << spec.reference->transitions << ')';
    std::cout << '\n';
    if (spec.reference) {
        std::cout << "reference " << spec.reference->states << '/' << spec.reference->transitions << ", generated "
                  << spec.mdp.num_states() << '/' << spec.mdp.num_transitions() << '\n';
    }
    std::cout << "schedulers=" << SchedulerSpace(spec.mdp).size_string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HyperPCTL model checker for MDPs under memoryless deterministic schedulers"};
    app.require_subcommand(1);

    Common common;
    std::string engine_name = "smt-eager";
    std::string solver;
    if (const char* env = std::getenv("HYPERPROB_SOLVER")) solver = env;
    bool json = false;
    std::string emit;
    unsigned long long seed = 0;

    auto* check_cmd = app.add_subcommand("check", "evaluate a formula on a model");
    add_common(check_cmd, common);
    check_cmd->add_option("--engine", engine_name, "enum | smt-eager | smt-external");
    check_cmd->add_option("--solver", solver, "SMT-LIB2 solver executable (default $HYPERPROB_SOLVER)");
    check_cmd->add_flag("--json", json, "print a JSON report");
    check_cmd->add_option("--emit", emit, "also write the SMT-LIB2 encoding to this file");
    check_cmd->add_option("--seed", seed, "reserved; no randomness on the verdict path");

    Common enc_common;
    std::string out_path;
    auto* encode_cmd = app.add_subcommand("encode", "write the SMT-LIB2 encoding");
    add_common(encode_cmd, enc_common);
    encode_cmd->add_option("-o,--out", out_path, "output .smt2 file")->required();

    Common stats_common;
    auto* stats_cmd = app.add_subcommand("stats", "model and formula statistics");
    add_common(stats_cmd, stats_common);

    std::string family;
    unsigned m = 1;
    std::vector<unsigned> h;
    std::string tier = "s0";
    std::string out_dir = ".";
    auto* gen_cmd = app.add_subcommand("gen", "generate a case-study model and formula");
    gen_cmd->set_help_flag("--help", "print this help message and exit");
    gen_cmd->add_option("family", family, "ta | pw | ts | pc")->required();
    gen_cmd->add_option("--m", m, "loop iterations (ta, pw)");
    gen_cmd->add_option("--h", h, "secret values H1 H2 (ts)")->expected(2);
    gen_cmd->add_option("--tier", tier, "plain | s0 | s01 | s012 (pc)");
    gen_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check_cmd) return cmd_check(common, parse_engine(engine_name), solver, json, emit);
        if (*encode_cmd) return cmd_encode(enc_common, out_path);
        if (*stats_cmd) return cmd_stats(stats_common);
        if (*gen_cmd) return cmd_gen(family, m, h, tier, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
