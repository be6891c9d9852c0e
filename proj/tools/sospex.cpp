// Command-line front end: predicate analysis, instance generation,
// plausibility search, closures, planted-distribution queries,
// pseudoexpectation construction and verification, orthogonalization
// traces, ground-truth oracles, and the end-to-end demonstration pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "sospex/gram_schmidt.hpp"
#include "sospex/oracle.hpp"
#include "sospex/pipeline.hpp"
#include "sospex/twise.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sospex;
using nlohmann::json;

namespace {

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text << "\n";
}

Instance load_inst(const std::string& path) {
    if (path.rfind("fixture:", 0) == 0) return build_fixture(path.substr(8));
    return load_instance(path);
}

// "f:v,f:v,f:*" -> subgraph (f:* takes the whole neighborhood); a bare "i"
// adds an isolated variable-vertex.
Subgraph parse_edges(const Instance& inst, const std::string& spec) {
    Subgraph H;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto colon = tok.find(':');
        if (colon == std::string::npos) {
            H.add_isolated(std::stoi(tok));
            continue;
        }
        int f = std::stoi(tok.substr(0, colon));
        std::string v = tok.substr(colon + 1);
        if (f < 0 || f >= inst.m()) throw std::invalid_argument("edge spec: bad constraint id");
        if (v == "*") {
            for (int var : inst.constraints[f].scope) H.add_edge(f, var);
        } else {
            H.add_edge(f, std::stoi(v));
        }
    }
    return H;
}

std::vector<int> parse_vars(const std::string& spec) {
    std::vector<int> vars;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) vars.push_back(std::stoi(tok));
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

Params params_from_flags(const std::string& params_path, int tau, const std::string& zeta,
                         long small, int D) {
    if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) throw std::runtime_error("cannot open " + params_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return params_from_json(ss.str());
    }
    Params p;
    p.tau = tau;
    p.zeta = rat_from_string(zeta);
    p.SMALL = small;
    p.D = D;
    p.beta = make_rat(1, 2);
    p.validate_basic();
    return p;
}

json subgraph_json(const Subgraph& H) {
    json edges = json::array();
    for (const auto& [f, vars] : H.edges)
        for (int v : vars) edges.push_back({f, v});
    json iso = json::array();
    for (int v : H.isolated) iso.push_back(v);
    return {{"edges", edges}, {"isolated", iso}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact sum-of-squares pseudoexpectation toolkit"};
    app.require_subcommand(1);

    int threads = 0;
    long budget = 0;
    app.add_option("--threads", threads, "worker threads (0 = default)");
    app.add_option("--budget", budget, "override search/enumeration budgets");

    std::string out_path;

    auto* gen = app.add_subcommand("gen", "generate a random instance");
    int g_n = 20, g_m = 60, g_tau = 3;
    std::uint64_t g_seed = 0;
    std::string g_pred = "kxor:3:1";
    gen->add_option("--n", g_n)->required();
    gen->add_option("--m", g_m)->required();
    gen->add_option("--pred", g_pred, "predicate spec");
    gen->add_option("--tau", g_tau);
    gen->add_option("--seed", g_seed);
    gen->add_option("--out", out_path);

    auto* par = app.add_subcommand("params", "derive construction parameters");
    long p_n = 0;
    std::string p_delta = "10", p_beta = "1/2", p_mode = "general";
    int p_K = 3, p_tau = 3;
    par->add_option("--n", p_n)->required();
    par->add_option("--delta", p_delta);
    par->add_option("--K", p_K);
    par->add_option("--tau", p_tau);
    par->add_option("--beta", p_beta);
    par->add_option("--mode", p_mode, "general | large-lambda");
    par->add_option("--out", out_path);

    auto* pred = app.add_subcommand("predicate", "t-wise uniformity analysis");
    auto* analyze = pred->add_subcommand("analyze");
    std::string a_pred;
    int a_t = 0;
    analyze->add_option("--pred", a_pred)->required();
    analyze->add_option("--t", a_t, "single t (default: full report)");
    analyze->add_option("--out", out_path);

    auto* plaus = app.add_subcommand("plausibility", "search for implausible subgraphs");
    std::string pl_inst, pl_zeta = "1/5";
    int pl_tau = 3, pl_cmax = 8;
    bool pl_heur = false;
    std::uint64_t pl_seed = 0;
    plaus->add_option("--inst", pl_inst)->required();
    plaus->add_option("--tau", pl_tau);
    plaus->add_option("--zeta", pl_zeta);
    plaus->add_option("--cmax", pl_cmax);
    plaus->add_flag("--heuristic", pl_heur, "randomized local search instead of exact");
    plaus->add_option("--seed", pl_seed);
    plaus->add_option("--out", out_path);

    auto* clo = app.add_subcommand("closure", "closure of a variable set");
    std::string c_inst, c_vars, c_zeta = "1/5";
    int c_tau = 3;
    long c_small = 10;
    clo->add_option("--inst", c_inst)->required();
    clo->add_option("--vars", c_vars)->required();
    clo->add_option("--tau", c_tau);
    clo->add_option("--small", c_small);
    clo->add_option("--zeta", c_zeta);
    clo->add_option("--out", out_path);

    auto* pl = app.add_subcommand("planted", "planted-distribution queries");
    std::string d_inst, d_edges, d_marginal, d_expect;
    pl->add_option("--inst", d_inst)->required();
    pl->add_option("--edges", d_edges, "subgraph spec f:v,f:*,...");
    pl->add_option("--marginal", d_marginal, "comma-separated variables");
    pl->add_option("--expect", d_expect, "polynomial, e.g. '1 * [0=1][3=0]'");
    pl->add_option("--out", out_path);

    auto* px = app.add_subcommand("pexp", "pseudoexpectation construction and checks");
    std::string x_mode = "verify", x_inst, x_params, x_zeta = "1/5", x_eval;
    int x_tau = 3, x_D = 1;
    long x_small = 10;
    bool x_float = false;
    double x_tol = 1e-9;
    px->add_option("mode", x_mode, "build | eval | moment | verify")->required();
    px->add_option("--inst", x_inst)->required();
    px->add_option("--params", x_params, "params json file");
    px->add_option("--tau", x_tau);
    px->add_option("--zeta", x_zeta);
    px->add_option("--small", x_small);
    px->add_option("--D", x_D);
    px->add_option("--poly", x_eval, "polynomial for eval mode");
    px->add_flag("--float", x_float, "advisory float PSD instead of exact");
    px->add_option("--tol", x_tol);
    px->add_option("--out", out_path);

    auto* gs = app.add_subcommand("gs", "orthogonalization run");
    std::string s_inst, s_params, s_zeta = "1/5";
    int s_tau = 3, s_D = 1;
    long s_small = 10;
    bool s_witnesses = false;
    gs->add_option("--inst", s_inst)->required();
    gs->add_option("--params", s_params);
    gs->add_option("--tau", s_tau);
    gs->add_option("--zeta", s_zeta);
    gs->add_option("--small", s_small);
    gs->add_option("--D", s_D);
    gs->add_flag("--witnesses", s_witnesses);
    gs->add_option("--out", out_path);

    auto* orc = app.add_subcommand("oracle", "ground-truth computations");
    std::string o_mode, o_inst, o_dist;
    int o_t = 2;
    orc->add_option("mode", o_mode, "opt | xorsat | twise")->required();
    orc->add_option("--inst", o_inst);
    orc->add_option("--dist", o_dist, "distribution json: {q,k,probs}");
    orc->add_option("--t", o_t);
    orc->add_option("--out", out_path);

    auto* run = app.add_subcommand("run", "end-to-end demonstration pipeline");
    std::string r_config, r_fixture, r_inst, r_pred = "kxor:3:1", r_zeta = "1/5";
    int r_n = 24, r_m = 12, r_tau = 3, r_D = 2, r_cmax = 8, r_retries = 3;
    long r_small = 20;
    std::uint64_t r_seed = 0;
    bool r_gs = true, r_witness = false, r_float = false;
    run->add_option("--config", r_config, "json config mirroring the flags");
    run->add_option("--fixture", r_fixture);
    run->add_option("--inst", r_inst);
    run->add_option("--n", r_n);
    run->add_option("--m", r_m);
    run->add_option("--pred", r_pred);
    run->add_option("--tau", r_tau);
    run->add_option("--zeta", r_zeta);
    run->add_option("--small", r_small);
    run->add_option("--D", r_D);
    run->add_option("--cmax", r_cmax);
    run->add_option("--seed", r_seed);
    run->add_option("--retries", r_retries);
    run->add_flag("--gs,!--no-gs", r_gs);
    run->add_flag("--witnesses", r_witness);
    run->add_flag("--float-psd", r_float);
    run->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (gen->parsed()) {
            Predicate P = parse_predicate_spec(g_pred);
            Instance inst = generate(g_n, g_m, P, g_tau, g_seed);
            write_output(out_path, instance_to_json(inst));
            return 0;
        }
        if (par->parsed()) {
            ParamMode mode = p_mode == "large-lambda" ? ParamMode::LargeLambda : ParamMode::General;
            Params p = suggest_parameters(p_n, rat_from_string(p_delta), p_K, p_tau,
                                          rat_from_string(p_beta), mode);
            write_output(out_path, params_to_json(p));
            return 0;
        }
        if (analyze->parsed()) {
            Predicate P = parse_predicate_spec(a_pred);
            if (a_t > 0) {
                DeltaResult d = delta(P, a_t);
                json j;
                j["t"] = a_t;
                j["delta"] = rat_to_string(d.value);
                json probs = json::array();
                for (const Rat& pr : d.witness.probs) probs.push_back(rat_to_string(pr));
                j["witness"] = probs;
                write_output(out_path, j.dump(2));
            } else {
                write_output(out_path, twise_report_to_json(analyze_predicate(P)));
            }
            return 0;
        }
        if (plaus->parsed()) {
            Instance inst = load_inst(pl_inst);
            FactorGraph G(inst);
            Rat zeta = rat_from_string(pl_zeta);
            SearchStats stats;
            std::optional<Subgraph> hit;
            if (pl_heur)
                hit = find_implausible_heuristic(G, pl_tau, zeta, pl_cmax, pl_seed);
            else
                hit = find_implausible_exact(G, pl_tau, zeta, pl_cmax, &stats,
                                             budget > 0 ? budget : 200000000L);
            json j;
            j["plausible"] = !hit.has_value();
            j["explored"] = stats.explored;
            if (hit) {
                j["witness"] = subgraph_json(*hit);
                Accounting a = account(*hit, pl_tau, zeta);
                j["income"] = rat_to_string(a.income);
                j["revenue"] = rat_to_string(a.revenue);
            }
            write_output(out_path, j.dump(2));
            return hit ? 2 : 0;
        }
        if (clo->parsed()) {
            Instance inst = load_inst(c_inst);
            FactorGraph G(inst);
            std::vector<int> vars = parse_vars(c_vars);
            ClosureResult r = closure(G, std::set<int>(vars.begin(), vars.end()), c_tau, c_small,
                                      rat_from_string(c_zeta), false,
                                      budget > 0 ? budget : 5000000L);
            json j;
            j["closure"] = subgraph_json(r.cl);
            j["method"] = r.method;
            j["revenue"] = rat_to_string(r.revenue);
            j["constraints"] = r.cl.cons_count();
            j["explored"] = r.explored;
            write_output(out_path, j.dump(2));
            return 0;
        }
        if (pl->parsed()) {
            Instance inst = load_inst(d_inst);
            Subgraph H = parse_edges(inst, d_edges);
            json j;
            j["subgraph"] = subgraph_json(H);
            j["consistency_probability"] = rat_to_string(consistency_probability(inst, H));
            if (!d_marginal.empty()) {
                std::vector<int> T = parse_vars(d_marginal);
                RationalDistribution m = planted_marginal(inst, H, T);
                json probs = json::array();
                for (const Rat& pr : m.probs) probs.push_back(rat_to_string(pr));
                j["marginal"] = {{"vars", T}, {"probs", probs}};
            }
            if (!d_expect.empty()) {
                Polynomial p = parse_polynomial(d_expect);
                j["expectation"] = rat_to_string(planted_expectation(inst, H, p));
            }
            write_output(out_path, j.dump(2));
            return 0;
        }
        if (px->parsed()) {
            Instance inst = load_inst(x_inst);
            Params params = params_from_flags(x_params, x_tau, x_zeta, x_small, x_D);
            PseudoExpectation pe(inst, params);
            json j;
            j["params"] = json::parse(params_to_json(params));
            int violation = 0;
            if (x_mode == "eval") {
                Polynomial p = parse_polynomial(x_eval);
                j["value"] = rat_to_string(pe.eval(p));
            } else if (x_mode == "build") {
                for (const MonomialIndex& m : moment_index_set(inst.n, inst.q, params.D))
                    pe.monomial(m);
                j["cached"] = pe.cache_size();
            } else if (x_mode == "moment") {
                MomentMatrix M = moment_matrix(pe, params.D);
                j["moment"] = json::parse(moment_matrix_to_json(M));
            } else if (x_mode == "verify") {
                IdentityReport ir = identity_check(pe, 2 * params.D);
                j["identity"] = {{"passed", ir.passed},
                                 {"first_violation", ir.first_violation},
                                 {"products_checked", ir.products_checked}};
                MomentMatrix M = moment_matrix(pe, params.D);
                j["moment_dim"] = M.index.size();
                if (x_float) {
                    PsdFloatResult fr = psd_check_float(M, x_tol);
                    j["psd_float_advisory"] = fr.psd_advisory;
                    if (!fr.psd_advisory || !ir.passed) violation = 3;
                } else {
                    PsdResult pr = psd_check_exact(M);
                    j["psd_exact"] = pr.psd;
                    if (!pr.psd || !ir.passed) violation = 3;
                }
                SatFraction sf = satisfied_fraction(pe);
                j["satisfied_fraction"] = {{"value", rat_to_string(sf.value)},
                                           {"census", sf.census},
                                           {"bound", rat_to_string(sf.bound)},
                                           {"holds", sf.inequality_holds}};
                if (!sf.inequality_holds) violation = 3;
            } else {
                throw CLI::ValidationError("pexp mode must be build|eval|moment|verify");
            }
            write_output(out_path, j.dump(2));
            return violation;
        }
        if (gs->parsed()) {
            Instance inst = load_inst(s_inst);
            Params params = params_from_flags(s_params, s_tau, s_zeta, s_small, s_D);
            PseudoExpectation pe(inst, params);
            GSOptions opts;
            opts.track_witnesses = s_witnesses;
            GSState st = gs_run(pe, params.D, opts);
            std::string viol;
            bool orth = gs_orthogonality_check(st, pe, &viol);
            json j;
            j["success"] = st.success;
            j["failure"] = st.failure;
            j["orthogonal"] = orth;
            if (!orth) j["orthogonality_violation"] = viol;
            j["substages"] = st.substages;
            j["pvz"] = st.pvz.size();
            json stages = json::array();
            for (const MonomialIndex& S : st.order) {
                json e;
                e["stage"] = S.to_string();
                e["norm2"] = rat_to_string(st.norm2.at(S));
                e["support"] = st.y.at(S).coef.size();
                e["pvz"] = st.pvz.count(S) > 0;
                if (st.witness.count(S)) {
                    e["witness"] = subgraph_json(st.witness.at(S));
                    e["witness_revenue"] =
                        rat_to_string(account(st.witness.at(S), params.tau, params.zeta).revenue);
                }
                stages.push_back(std::move(e));
            }
            j["stages"] = stages;
            j["witness_violations"] = st.witness_violations;
            write_output(out_path, j.dump(2));
            return (st.success && orth && st.witness_violations.empty()) ? 0 : 3;
        }
        if (orc->parsed()) {
            json j;
            if (o_mode == "opt") {
                Instance inst = load_inst(o_inst);
                OptResult r = brute_opt(inst, budget > 0 ? static_cast<std::uint64_t>(budget)
                                                         : (1ULL << 26));
                j["opt"] = rat_to_string(r.opt);
                j["argmax"] = r.argmax;
                j["method"] = r.method;
            } else if (o_mode == "xorsat") {
                Instance inst = load_inst(o_inst);
                j["satisfiable"] = xor_satisfiable(inst);
                j["method"] = "xor-elim";
            } else if (o_mode == "twise") {
                json dj = json::parse(o_dist);
                RationalDistribution mu;
                mu.q = dj.at("q").get<int>();
                mu.k = dj.at("k").get<int>();
                for (const auto& s : dj.at("probs")) mu.probs.push_back(rat_from_string(s));
                mu.validate();
                auto v = twise_check(mu, o_t);
                j["t"] = o_t;
                j["uniform"] = !v.has_value();
                if (v) {
                    j["violation"] = {{"coords", v->coords},
                                      {"cell", v->cell},
                                      {"mass", rat_to_string(v->mass)}};
                }
            } else {
                throw CLI::ValidationError("oracle mode must be opt|xorsat|twise");
            }
            write_output(out_path, j.dump(2));
            return 0;
        }
        if (run->parsed()) {
            PipelineConfig cfg;
            if (!r_config.empty()) {
                std::ifstream in(r_config);
                if (!in) throw std::runtime_error("cannot open " + r_config);
                json j = json::parse(in);
                cfg.fixture = j.value("fixture", "");
                cfg.instance_path = j.value("inst", "");
                cfg.n = j.value("n", cfg.n);
                cfg.m = j.value("m", cfg.m);
                cfg.predicate = j.value("pred", cfg.predicate);
                cfg.tau = j.value("tau", cfg.tau);
                cfg.seed = j.value("seed", cfg.seed);
                cfg.retries = j.value("retries", cfg.retries);
                cfg.zeta = rat_from_string(j.value("zeta", "1/5"));
                cfg.SMALL = j.value("small", cfg.SMALL);
                cfg.D = j.value("D", cfg.D);
                cfg.c_max = j.value("cmax", cfg.c_max);
                cfg.run_gs = j.value("gs", cfg.run_gs);
                cfg.gs_witnesses = j.value("witnesses", cfg.gs_witnesses);
                cfg.float_psd = j.value("float_psd", cfg.float_psd);
            } else {
                cfg.fixture = r_fixture;
                cfg.instance_path = r_inst;
                cfg.n = r_n;
                cfg.m = r_m;
                cfg.predicate = r_pred;
                cfg.tau = r_tau;
                cfg.seed = r_seed;
                cfg.retries = r_retries;
                cfg.zeta = rat_from_string(r_zeta);
                cfg.SMALL = r_small;
                cfg.D = r_D;
                cfg.c_max = r_cmax;
                cfg.run_gs = r_gs;
                cfg.gs_witnesses = r_witness;
                cfg.float_psd = r_float;
            }
            cfg.threads = threads;
            RunReport rep = run_pipeline(cfg);
            write_output(out_path, report_to_json(rep));
            return report_exit_code(rep);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
