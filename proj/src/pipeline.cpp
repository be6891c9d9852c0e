#include "sospex/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sospex {

using nlohmann::json;

namespace {

class StageTimer {
public:
    StageTimer(RunReport& rep, std::string name)
        : rep_(rep), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        auto end = std::chrono::steady_clock::now();
        rep_.wall_times_ms[name_] =
            std::chrono::duration<double, std::milli>(end - start_).count();
    }

private:
    RunReport& rep_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
    RunReport rep;
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    std::string stage = "setup";
    try {
        Params params;
        params.tau = cfg.tau;
        params.zeta = cfg.zeta;
        params.SMALL = cfg.SMALL;
        params.D = cfg.D;
        params.beta = make_rat(1, 2);
        params.validate_basic();
        rep.params_json = params_to_json(params);

        // Instance acquisition with plausibility retry.
        stage = "gen";
        Instance inst;
        std::optional<Subgraph> violation;
        {
            StageTimer t(rep, "gen+plausibility");
            int attempts = std::max(1, cfg.retries);
            for (int a = 0; a < attempts; ++a) {
                rep.attempts = a + 1;
                if (!cfg.fixture.empty()) {
                    inst = build_fixture(cfg.fixture);
                } else if (!cfg.instance_path.empty()) {
                    inst = load_instance(cfg.instance_path);
                } else {
                    Predicate P = parse_predicate_spec(cfg.predicate);
                    rep.seed_used = cfg.seed + a;
                    inst = generate(cfg.n, cfg.m, P, cfg.tau, rep.seed_used);
                }
                stage = "plausibility";
                FactorGraph G(inst);
                SearchStats stats;
                if (cfg.exact_plausibility) {
                    violation = find_implausible_exact(G, cfg.tau, cfg.zeta, cfg.c_max, &stats,
                                                       cfg.search_budget);
                } else {
                    violation = find_implausible_heuristic(G, cfg.tau, cfg.zeta, cfg.c_max,
                                                           rep.seed_used);
                }
                rep.plausibility_explored += stats.explored;
                if (!violation) break;
                rep.plausibility_witness = violation->to_string();
                if (!cfg.fixture.empty() || !cfg.instance_path.empty()) break;  // fixed input
            }
        }
        rep.instance_json = instance_to_json(inst);
        rep.plausible = !violation.has_value();

        // Ground truth is independent of the construction; always record it.
        {
            stage = "oracle";
            StageTimer t(rep, "oracle");
            try {
                rep.oracle_satisfiable = xor_satisfiable(inst);
                rep.oracle_method = "xor-elim";
                rep.oracle_ran = true;
            } catch (const std::invalid_argument&) {
                try {
                    OptResult r = brute_opt(inst, cfg.oracle_budget);
                    rep.oracle_method = r.method;
                    rep.oracle_ran = true;
                    rep.oracle_opt = r.opt;
                    rep.oracle_satisfiable = (r.opt == 1);
                } catch (const std::runtime_error&) {
                    // q^n over budget: no oracle verdict for this instance
                }
            }
        }
        if (!rep.plausible) return rep;

        stage = "pexp";
        PseudoExpectation pe(inst, params);

        {
            stage = "identity";
            StageTimer t(rep, "identity");
            IdentityReport ir = identity_check(pe, 2 * cfg.D);
            rep.identity_passed = ir.passed;
            rep.identity_violation = ir.first_violation;
        }
        {
            stage = "moment+psd";
            StageTimer t(rep, "moment+psd");
            MomentMatrix M = moment_matrix(pe, cfg.D);
            rep.moment_dim = static_cast<int>(M.index.size());
            if (cfg.float_psd) {
                rep.used_float_psd = true;
                PsdFloatResult fr = psd_check_float(M, cfg.float_tol);
                rep.psd_float_advisory = fr.psd_advisory;
            } else {
                PsdResult pr = psd_check_exact(M);
                rep.psd_exact = pr.psd;
                if (pr.psd) {
                    std::string piv;
                    for (const Rat& p : pr.pivots) piv += rat_to_string(p) + ";";
                    rep.psd_digest = "pivots-fnv1a:" + std::to_string(fnv1a(piv));
                } else {
                    rep.psd_digest = "counterexample:" + rat_to_string(pr.counterexample_value);
                }
            }
        }
        if (cfg.run_gs) {
            stage = "gs";
            StageTimer t(rep, "gs");
            GSOptions go;
            go.track_witnesses = cfg.gs_witnesses;
            GSState st = gs_run(pe, cfg.D, go);
            rep.gs_ran = true;
            rep.gs_success = st.success;
            rep.gs_failure = st.failure;
            rep.gs_pvz = static_cast<long>(st.pvz.size());
            rep.gs_witness_violations = static_cast<long>(st.witness_violations.size());
            std::string viol;
            rep.gs_orthogonal = gs_orthogonality_check(st, pe, &viol);
            if (!rep.gs_orthogonal && rep.gs_failure.empty()) rep.gs_failure = viol;
        }
        {
            stage = "satisfied_fraction";
            StageTimer t(rep, "satisfied_fraction");
            SatFraction sf = satisfied_fraction(pe);
            rep.sat_value = sf.value;
            rep.sat_census = sf.census;
            rep.sat_delta_max = sf.delta_max;
            rep.sat_bound = sf.bound;
            rep.sat_inequality = sf.inequality_holds;
        }
    } catch (const std::exception& e) {
        rep.error_stage = stage;
        rep.error_message = e.what();
    }
    return rep;
}

int report_exit_code(const RunReport& rep) {
    if (!rep.error_stage.empty()) return 1;
    if (!rep.plausible) return 2;
    bool psd_ok = rep.used_float_psd ? rep.psd_float_advisory : rep.psd_exact;
    bool gs_ok = !rep.gs_ran || (rep.gs_success && rep.gs_orthogonal && rep.gs_witness_violations == 0);
    if (!rep.identity_passed || !psd_ok || !gs_ok || !rep.sat_inequality) return 3;
    return 0;
}

std::string report_to_json(const RunReport& rep, bool include_wall_times) {
    json j;
    j["schema_version"] = rep.schema_version;
    j["instance"] = json::parse(rep.instance_json.empty() ? "null" : rep.instance_json);
    j["params"] = json::parse(rep.params_json.empty() ? "null" : rep.params_json);
    j["plausibility"] = {{"plausible", rep.plausible},
                         {"witness", rep.plausibility_witness},
                         {"explored", rep.plausibility_explored},
                         {"seed_used", rep.seed_used},
                         {"attempts", rep.attempts}};
    j["identity"] = {{"passed", rep.identity_passed}, {"first_violation", rep.identity_violation}};
    j["psd"] = {{"moment_dim", rep.moment_dim},
                {"exact", rep.psd_exact},
                {"float_advisory", rep.psd_float_advisory},
                {"used_float", rep.used_float_psd},
                {"digest", rep.psd_digest}};
    j["gs"] = {{"ran", rep.gs_ran},
               {"success", rep.gs_success},
               {"orthogonal", rep.gs_orthogonal},
               {"pvz", rep.gs_pvz},
               {"failure", rep.gs_failure},
               {"witness_violations", rep.gs_witness_violations}};
    j["satisfied_fraction"] = {{"value", rat_to_string(rep.sat_value)},
                               {"census", rep.sat_census},
                               {"delta_max", rat_to_string(rep.sat_delta_max)},
                               {"bound", rat_to_string(rep.sat_bound)},
                               {"inequality_holds", rep.sat_inequality}};
    j["oracle"] = {{"ran", rep.oracle_ran},
                   {"method", rep.oracle_method},
                   {"satisfiable", rep.oracle_satisfiable},
                   {"opt", rep.oracle_method == "brute" ? rat_to_string(rep.oracle_opt) : "n/a"}};
    j["error"] = {{"stage", rep.error_stage}, {"message", rep.error_message}};
    j["exit_code"] = report_exit_code(rep);
    if (include_wall_times) j["wall_times_ms"] = rep.wall_times_ms;
    return j.dump(2);
}

}  // namespace sospex
