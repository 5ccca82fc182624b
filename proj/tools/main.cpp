// shiftlab CLI: construct | verify | classify | shift | systems.
// Every JSON report goes through make_report, so output bytes are a pure
// function of the flags, the input files, and --seed. Exit codes: 0 when no
// check fails, 1 when some check is FailsWithWitness, 2 on parse/config
// errors (message on stderr).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftlab/shiftlab.hpp"

namespace {

using namespace shiftlab;

nlohmann::json verdict_row(const std::string& check, const Verdict& v) {
    nlohmann::json j;
    j["check"] = check;
    j["verdict"] = verdict_status_name(v.status);
    j["horizon"] = to_decimal(v.horizon);
    j["witness"] = v.witness;
    j["narrative"] = v.narrative;
    return j;
}

bool row_failed(const nlohmann::json& row) {
    for (const char* key : {"verdict", "status"})
        if (row.contains(key) && row[key] == "FailsWithWitness") return true;
    return false;
}

void write_output(const std::string& text, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + output);
    out << text;
}

int emit(const std::string& command, const nlohmann::json& config, std::uint64_t seed,
         std::vector<NamedCheck> checks, const std::string& output) {
    auto report = make_report(command, config, seed, std::move(checks));
    int code = 0;
    for (const auto& row : report["checks"])
        if (row_failed(row)) code = 1;
    write_output(report.dump(2) + "\n", output);
    return code;
}

BuildBudget budget_from_env() {
    BuildBudget b;
    if (const char* env = std::getenv("SHIFTLAB_MAX_MEMORY_MB")) {
        std::size_t pos = 0;
        unsigned long long mb = 0;
        try {
            mb = std::stoull(env, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || env[pos] != '\0' || mb == 0)
            throw ParseError("SHIFTLAB_MAX_MEMORY_MB must be a positive integer");
        b.memory_mb = static_cast<std::size_t>(mb);
    }
    return b;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

// --- construct ---------------------------------------------------------------

int run_construct(int depth, const std::string& output, std::uint64_t seed) {
    auto st = build_construction(depth, budget_from_env());
    std::vector<NamedCheck> checks;

    nlohmann::json s_values;
    for (int n = 2; n <= depth; ++n) s_values["s" + std::to_string(n)] = to_decimal(st.s(n));
    checks.push_back({"s_table",
                      {{"check", "s_table"},
                       {"values", s_values},
                       {"total_length", to_decimal(st.concatenated.total_length())}}});

    nlohmann::json blocks = nlohmann::json::array();
    for (int m = 1; m <= depth; ++m) {
        auto counts = count_block_entries(st, m);
        blocks.push_back({{"n", m},
                          {"start", to_decimal(st.block_start(m))},
                          {"end", to_decimal(st.block_end(m))},
                          {"halves", to_decimal(counts.halves)},
                          {"ones", to_decimal(counts.ones)},
                          {"twos", to_decimal(counts.twos)}});
    }
    checks.push_back({"blocks", {{"check", "blocks"}, {"rows", blocks}}});

    checks.push_back({"block_structure",
                      verdict_row("block_structure", verify_block_structure(st))});
    checks.push_back(
        {"surjectivity", verdict_row("surjectivity", is_surjective_shift(st.concatenated))});

    nlohmann::json weights_row{{"check", "weights"}};
    try {
        weights_row["sequence"] = weights_to_json(st.concatenated, 4096);
    } catch (const DepthTooLarge&) {
        weights_row["runs_omitted"] = true;
        weights_row["reason"] = "flattened run count exceeds the 4096-run export budget";
    }
    checks.push_back({"weights", std::move(weights_row)});

    return emit("construct", {{"depth", depth}}, seed, std::move(checks), output);
}

// --- verify ------------------------------------------------------------------

int run_verify(int depth, std::vector<int> ks, std::uint64_t seed,
               const std::string& output) {
    auto st = build_construction(depth, budget_from_env());
    ScanPolicy policy;
    policy.seed = seed;

    std::vector<NamedCheck> checks;
    for (int k = 1; 2 * k + 1 <= depth; ++k)
        checks.push_back({"balance_k" + std::to_string(k),
                          construction_check_json(k, "balance", verify_balance(st, k))});

    if (ks.empty())
        for (int k = 2; 2 * k + 2 <= depth; ++k) ks.push_back(k);
    for (int k : ks) {
        if (2 * k + 2 > depth)
            throw PreconditionViolation("estimates at k=" + std::to_string(k) +
                                        " need depth >= " + std::to_string(2 * k + 2));
        checks.push_back(
            {"easy_k" + std::to_string(k),
             construction_check_json(
                 k, "easy_estimate", verify_easy_estimate(st, k, std::nullopt, policy))});
        if (2 * k + 3 <= depth)
            checks.push_back(
                {"hard_k" + std::to_string(k),
                 construction_check_json(
                     k, "hard_estimate", verify_hard_estimate(st, k, std::nullopt, policy))});
    }

    checks.push_back({"block_structure",
                      verdict_row("block_structure", verify_block_structure(st))});

    if (2 * 1 + 2 <= depth) {
        auto rt = recovery_times(st, (depth - 2) / 2);
        nlohmann::json values;
        for (int k = 1; k <= rt.k_max(); ++k)
            values["n" + std::to_string(k)] = to_decimal(rt.at(k));
        checks.push_back(
            {"recovery_times", {{"check", "recovery_times"}, {"values", values}}});
    }

    nlohmann::json config{{"depth", depth}};
    nlohmann::json ks_json = nlohmann::json::array();
    for (int k : ks) ks_json.push_back(k);
    config["k"] = ks_json;
    return emit("verify", config, seed, std::move(checks), output);
}

// --- classify ----------------------------------------------------------------

int run_classify(int depth, const std::string& horizon_text, const std::string& tol_text,
                 const std::string& input, std::uint64_t seed, const std::string& output) {
    ScaledRational tol = parse_scaled(tol_text);
    nlohmann::json config{{"tol", tol_text}};
    std::vector<NamedCheck> checks;

    if (!input.empty()) {
        auto file = weights_from_json(read_json_file(input));
        config["input"] = input;
        if (const auto* g = std::get_if<GeneralWeights>(&file.seq)) {
            std::size_t horizon = g->declared_horizon() - 1;
            if (!horizon_text.empty()) {
                auto h = to_i64(parse_big(horizon_text));
                if (!h || *h < 1) throw ParseError("--horizon must be a positive integer");
                horizon = static_cast<std::size_t>(*h);
            }
            config["horizon"] = std::to_string(horizon);
            config["mode"] = "float";
            double tol_d = std::exp2(detail::log2_abs(tol));
            checks.push_back({"transitive", classifier_report_json(
                                                "transitive", check_transitive(*g, horizon))});
            checks.push_back({"mixing", classifier_report_json("mixing",
                                                               check_mixing(*g, horizon))});
            checks.push_back(
                {"hypermixing_condition",
                 classifier_report_json("hypermixing_condition",
                                        check_hypermixing_condition(*g, horizon))});
            checks.push_back({"surjectivity",
                              verdict_row("surjectivity", is_surjective_shift(*g))});
            if (is_surjective_shift(*g).status != VerdictStatus::EvidenceAgainst)
                checks.push_back(
                    {"strong_transitivity",
                     classifier_report_json(
                         "strong_transitivity",
                         strong_transitivity_evidence(*g, SparseVector::basis(0),
                                                      horizon, tol_d))});
            return emit("classify", config, seed, std::move(checks), output);
        }
        const auto& w = std::get<RunLengthWeights>(file.seq);
        BigInt horizon = horizon_text.empty() ? BigInt(w.total_length() - 1)
                                              : parse_big(horizon_text);
        config["horizon"] = to_decimal(horizon);
        config["mode"] = "exact";
        checks.push_back({"transitive", classifier_report_json(
                                            "transitive", check_transitive(w, horizon))});
        checks.push_back(
            {"mixing", classifier_report_json("mixing", check_mixing(w, horizon))});
        checks.push_back({"hypermixing_condition",
                          classifier_report_json("hypermixing_condition",
                                                 check_hypermixing_condition(w, horizon))});
        checks.push_back(
            {"surjectivity", verdict_row("surjectivity", is_surjective_shift(w))});
        checks.push_back(
            {"strong_transitivity",
             classifier_report_json("strong_transitivity",
                                    strong_transitivity_evidence(
                                        w, SparseVector::basis(0), horizon, tol))});
        return emit("classify", config, seed, std::move(checks), output);
    }

    auto st = build_construction(depth, budget_from_env());
    const auto& w = st.concatenated;
    BigInt horizon = horizon_text.empty() ? BigInt(st.s(depth - 1)) : parse_big(horizon_text);
    config["depth"] = depth;
    config["horizon"] = to_decimal(horizon);
    config["mode"] = "exact";
    checks.push_back(
        {"transitive", classifier_report_json("transitive", check_transitive(w, horizon))});
    checks.push_back({"mixing", classifier_report_json("mixing", check_mixing(w, horizon))});
    checks.push_back({"hypermixing_condition",
                      classifier_report_json("hypermixing_condition",
                                             check_hypermixing_condition(w, horizon))});
    checks.push_back({"surjectivity", verdict_row("surjectivity", is_surjective_shift(w))});
    checks.push_back(
        {"strong_transitivity",
         classifier_report_json(
             "strong_transitivity",
             strong_transitivity_evidence(w, SparseVector::basis(0), horizon, tol))});
    return emit("classify", config, seed, std::move(checks), output);
}

// --- shift -------------------------------------------------------------------

SpaceNorm parse_norm(const std::string& text) {
    if (text == "sup") return SpaceNorm::sup();
    if (!text.empty() && text[0] == 'l') return SpaceNorm::lp(parse_rational(text.substr(1)));
    throw ParseError("--norm must be sup or l<p>, e.g. l1, l2, l3/2");
}

int run_shift(int depth, const std::string& input, const std::string& norm_text,
              const std::string& format, std::uint64_t seed, const std::string& output) {
    SpaceNorm space = parse_norm(norm_text);
    auto st = build_construction(depth, budget_from_env());
    const auto& w = st.concatenated;

    SparseVector x = input.empty() ? SparseVector::basis(0)
                                   : vector_from_json(read_json_file(input));
    if (x.is_zero()) throw ParseError("input vector must be nonzero");

    int k_max = (depth - 2) / 2;
    if (k_max < 1)
        throw PreconditionViolation("shift profiles need depth >= 4 for one recovery time");
    auto times = recovery_times(st, k_max);
    auto profile = decay_profile(w, x, times, space);

    if (format == "csv") {
        write_output(decay_profile_csv(profile, space), output);
        return 0;
    }
    if (format != "json") throw ParseError("--format must be json or csv");

    std::vector<NamedCheck> checks;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& pt : profile)
        points.push_back({{"k", pt.k},
                          {"n_k", to_decimal(pt.n_k)},
                          {"value", pt.value.to_string()},
                          {"exact", pt.value.exact}});
    checks.push_back({"decay_profile",
                      {{"check", "decay_profile"},
                       {"norm", space.name()},
                       {"base_norm", norm(x, space).to_string()},
                       {"points", points}}});

    for (int k = 1; k <= times.k_max(); ++k)
        checks.push_back({"right_inverse_n" + std::to_string(k),
                          verdict_row("right_inverse",
                                      verify_right_inverse(w, x, times.at(k)))});

    nlohmann::json config{{"depth", depth}, {"norm", space.name()}};
    if (!input.empty()) config["input"] = input;
    return emit("shift", config, seed, std::move(checks), output);
}

// --- systems -----------------------------------------------------------------

int run_systems(const std::string& input, const std::string& horizon_text,
                const std::string& format, std::uint64_t seed, const std::string& output) {
    std::vector<NamedCheck> checks;
    nlohmann::json config;

    if (input.empty()) {
        if (format == "csv")
            throw ParseError("csv output needs --input with a rotation system");
        config["battery"] = "default";

        checks.push_back(
            {"tent_covering",
             verdict_row("covering_time",
                         covering_time(TentSystem{},
                                       Interval{Rational(3, 10), Rational(2, 5)}))});
        checks.push_back(
            {"doubling_covering",
             verdict_row("covering_time",
                         covering_time(DoublingSystem{},
                                       CircleBall{Rational(1, 3), Rational(1, 8)}))});
        checks.push_back({"shift_covering",
                          verdict_row("covering_time",
                                      covering_time(ShiftSystem{}, Cylinder{"010"}))});

        RotationSystem rot(Rational(305, 987));
        checks.push_back(
            {"rotation_no_consecutive_returns",
             verdict_row("no_consecutive_returns",
                         no_consecutive_returns(rot, Rational(1, 3), 900))});

        auto [region, sep] = separation_region(SystemT(rot), Rational(1, 3), 900);
        auto sep_row = verdict_row("separation", sep);
        sep_row["region"] = region_to_json(region);
        checks.push_back({"rotation_separation", std::move(sep_row)});

        std::vector<Rational> targets;
        for (int t = 0; t < 8; ++t) targets.emplace_back(t, 8);
        checks.push_back(
            {"rotation_orbit_cover",
             verdict_row("orbit_cover",
                         strong_transitivity_cover(rot, 0, Rational(1, 100), targets, 900))});

        auto d = symbol_metric(ShiftSystem{8}, "0110100110010110", "0110100110010111");
        checks.push_back({"symbol_metric",
                          {{"check", "symbol_metric"},
                           {"value", format_rational(d.value)},
                           {"tail", format_rational(d.tail)},
                           {"upper", format_rational(d.upper())}}});

        return emit("systems", config, seed, std::move(checks), output);
    }

    auto j = read_json_file(input);
    if (!j.is_object() || !j.contains("system") || !j.contains("region"))
        throw ParseError("systems input must carry \"system\" and \"region\"");
    SystemT system = system_from_json(j.at("system"));
    RegionT region = region_from_json(j.at("region"));
    config["input"] = input;

    if (const auto* rot = std::get_if<RotationSystem>(&system)) {
        std::int64_t horizon;
        if (!horizon_text.empty()) {
            auto h = to_i64(parse_big(horizon_text));
            if (!h || *h < 0) throw ParseError("--horizon must be a nonnegative integer");
            horizon = *h;
        } else {
            BigInt cap = std::min(BigInt(rot->period() - 1), BigInt(1000));
            horizon = *to_i64(cap);
        }
        config["horizon"] = std::to_string(horizon);

        auto rs = return_set(system, region, region, horizon);
        if (format == "csv") {
            write_output(return_set_csv(rs), output);
            return 0;
        }
        if (format != "json") throw ParseError("--format must be json or csv");

        nlohmann::json hits = nlohmann::json::array();
        for (std::size_t i = 0; i < rs.hits.size() && i < 64; ++i) hits.push_back(rs.hits[i]);
        checks.push_back({"return_set",
                          {{"check", "return_set"},
                           {"horizon", std::to_string(horizon)},
                           {"count", std::to_string(rs.hits.size())},
                           {"hits_sample", hits}}});

        auto [center, halfwidth] = detail_sys::as_arc(region);
        checks.push_back(
            {"no_consecutive_returns",
             verdict_row("no_consecutive_returns",
                         no_consecutive_returns(*rot, center, horizon))});
        auto [sep_region, sep] = separation_region(system, center, horizon);
        auto sep_row = verdict_row("separation", sep);
        sep_row["region"] = region_to_json(sep_region);
        checks.push_back({"separation", std::move(sep_row)});
        return emit("systems", config, seed, std::move(checks), output);
    }

    if (format == "csv") throw ParseError("csv output needs a rotation system");
    if (format != "json") throw ParseError("--format must be json or csv");
    int max_j = 64;
    if (!horizon_text.empty()) {
        auto h = to_i64(parse_big(horizon_text));
        if (!h || *h < 0 || *h > 100000)
            throw ParseError("--horizon must be a nonnegative integer up to 100000");
        max_j = static_cast<int>(*h);
    }
    config["horizon"] = std::to_string(max_j);
    checks.push_back({"covering_time",
                      verdict_row("covering_time", covering_time(system, region, max_j))});
    return emit("systems", config, seed, std::move(checks), output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted shift construction and dynamics toolkit"};
    app.require_subcommand(1);
    // Global flags (--output, --seed, --format) may follow the subcommand.
    app.fallthrough();

    std::string output;
    std::uint64_t seed = 0;
    std::string format = "json";
    app.add_option("--output", output, "write the report here instead of stdout")
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for sampled scans; reports repeat byte-for-byte")
        ->capture_default_str();
    app.add_option("--format", format, "json or csv (csv for decay and return sets)")
        ->capture_default_str();

    auto* construct = app.add_subcommand("construct", "build the weight sequence");
    construct->fallthrough();
    int c_depth = 9;
    construct->add_option("--depth", c_depth, "construction depth N")
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the construction invariants");
    verify->fallthrough();
    int v_depth = 13;
    std::vector<int> v_ks;
    verify->add_option("--depth", v_depth, "construction depth N")->capture_default_str();
    verify->add_option("--k", v_ks, "estimate indices to check (default: all feasible)");

    auto* classify = app.add_subcommand("classify", "run the dynamical classifiers");
    classify->fallthrough();
    int cl_depth = 13;
    std::string cl_horizon, cl_input;
    std::string cl_tol = "1*2^-20";
    classify->add_option("--depth", cl_depth, "construction depth N")->capture_default_str();
    classify->add_option("--horizon", cl_horizon, "classifier horizon (decimal string)");
    classify->add_option("--tol", cl_tol, "norm-decay tolerance, p/q or p/q*2^e")
        ->capture_default_str();
    classify->add_option("--input", cl_input, "weight file replacing the construction");

    auto* shift = app.add_subcommand("shift", "apply shift powers and decay profiles");
    shift->fallthrough();
    int sh_depth = 12;
    std::string sh_input;
    std::string sh_norm = "sup";
    shift->add_option("--depth", sh_depth, "construction depth N")->capture_default_str();
    shift->add_option("--input", sh_input, "vector file (default: first basis vector)");
    shift->add_option("--norm", sh_norm, "sup or l<p>, e.g. l1, l2, l3/2")
        ->capture_default_str();

    auto* systems = app.add_subcommand("systems", "metric-system checks");
    systems->fallthrough();
    std::string sy_input, sy_horizon;
    systems->add_option("--input", sy_input, "system+region file (default: fixed battery)");
    systems->add_option("--horizon", sy_horizon, "return-set horizon / covering cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(construct)) return run_construct(c_depth, output, seed);
        if (app.got_subcommand(verify)) return run_verify(v_depth, v_ks, seed, output);
        if (app.got_subcommand(classify))
            return run_classify(cl_depth, cl_horizon, cl_tol, cl_input, seed, output);
        if (app.got_subcommand(shift))
            return run_shift(sh_depth, sh_input, sh_norm, format, seed, output);
        if (app.got_subcommand(systems))
            return run_systems(sy_input, sy_horizon, format, seed, output);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
