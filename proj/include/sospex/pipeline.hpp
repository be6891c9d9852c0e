#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sospex/gram_schmidt.hpp"
#include "sospex/oracle.hpp"
#include "sospex/params.hpp"
#include "sospex/pexp.hpp"

namespace sospex {

// End-to-end demonstration: generate (or load) an instance, verify no small
// implausible subgraph, build the pseudoexpectation, check the constraint
// identities, the exact PSD of the moment matrix, the orthogonalization, the
// satisfied-fraction bound, and compare against the ground-truth oracle.
struct PipelineConfig {
    // Instance source: fixture name, instance path, or random generation.
    std::string fixture;
    std::string instance_path;
    int n = 20;
    int m = 60;
    std::string predicate = "kxor:3:1";
    int tau = 3;
    std::uint64_t seed = 0;
    int retries = 3;  // re-sample seeds on plausibility failure

    Rat zeta = make_rat(1, 5);
    long SMALL = 20;
    int D = 2;

    int c_max = 8;
    bool exact_plausibility = true;

    bool run_gs = true;
    bool gs_witnesses = false;
    bool float_psd = false;
    double float_tol = 1e-9;

    int threads = 0;          // 0 = library default
    std::uint64_t oracle_budget = 1ULL << 26;
    long search_budget = 200000000L;
};

struct RunReport {
    int schema_version = 1;
    std::string instance_json;
    std::string params_json;

    bool plausible = false;
    std::string plausibility_witness;  // offending subgraph when implausible
    long plausibility_explored = 0;
    std::uint64_t seed_used = 0;
    int attempts = 0;

    bool identity_passed = false;
    std::string identity_violation;

    int moment_dim = 0;
    bool psd_exact = false;
    bool psd_float_advisory = false;
    bool used_float_psd = false;
    std::string psd_digest;  // pivot digest or counterexample value

    bool gs_ran = false;
    bool gs_success = false;
    bool gs_orthogonal = false;
    long gs_pvz = 0;
    std::string gs_failure;
    long gs_witness_violations = 0;

    Rat sat_value;
    long sat_census = 0;
    Rat sat_delta_max;
    Rat sat_bound;
    bool sat_inequality = false;

    std::string oracle_method;
    bool oracle_ran = false;
    bool oracle_satisfiable = false;
    Rat oracle_opt;

    std::string error_stage;  // nonempty when a stage threw
    std::string error_message;

    std::map<std::string, double> wall_times_ms;
};

RunReport run_pipeline(const PipelineConfig& cfg);

// 0: demonstration complete; 2: plausibility failed; 3: a verification
// check (identity / PSD / GS / satisfied-fraction) was violated.
int report_exit_code(const RunReport& rep);

std::string report_to_json(const RunReport& rep, bool include_wall_times = true);

}  // namespace sospex
