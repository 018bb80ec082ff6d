// arw: command-line surface for the arithmetic-random-wave toolkit.
//
// Subcommands: lattice, census, moments, integrals, kacrice, simulate,
// predict, report.  JSON is the canonical output format; CSV is available
// for moments and simulate.  Every artifact embeds the full run config and
// seed.  Exit codes: 0 success, 2 config error, 3 budget exceeded (the
// artifact is still written, with the missing pieces flagged).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arw/common.hpp"
#include "arw/correlations.hpp"
#include "arw/kacrice.hpp"
#include "arw/lattice.hpp"
#include "arw/moments.hpp"
#include "arw/predict.hpp"
#include "arw/rng.hpp"
#include "arw/simulate.hpp"
#include "arw/spectral.hpp"

namespace {

using nlohmann::json;

struct Opts {
    int d = 4;
    std::int64_t m = 1;
    std::optional<std::int64_t> m_max;
    std::uint64_t seed = 12345;
    std::int64_t samples = 100;
    std::int64_t lines = 200;
    std::int64_t mc_samples = 20000;
    std::int64_t sing_samples = 10000;
    int points = 4;
    int k_max = 8;
    int boot = 400;
    std::size_t table_cap = 1u << 24;
    std::int64_t c6_budget = 200'000'000;
    std::int64_t order6_budget = 300'000'000;
    bool skip_c6 = false;
    bool strict = true;
    std::string format = "json";
    std::string out = "-";
};

json config_json(const std::string& command, const Opts& o) {
    return {{"command", command},
            {"d", o.d},
            {"m", o.m},
            {"m_max", o.m_max ? json(*o.m_max) : json()},
            {"seed", o.seed},
            {"n_samples", o.samples},
            {"n_lines", o.lines},
            {"mc_samples", o.mc_samples},
            {"singular_samples", o.sing_samples},
            {"k2_points", o.points},
            {"k_max", o.k_max},
            {"bootstrap", o.boot},
            {"table_cap", o.table_cap},
            {"c6_budget", o.c6_budget},
            {"order6_budget", o.order6_budget},
            {"skip_c6", o.skip_c6},
            {"strict", o.strict},
            {"format", o.format},
            {"out", o.out}};
}

void write_output(const std::string& path, const std::string& content) {
    std::string body = content;
    if (body.empty() || body.back() != '\n') body.push_back('\n');
    if (path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + path);
    f << body;
}

void write_json(const Opts& o, const json& j) { write_output(o.out, j.dump(2)); }

json equidistribution_json(const arw::FrequencySet& set) {
    json arr = json::array();
    for (int i = 0; i < arw::num_test_functions(); ++i) {
        arr.push_back({{"index", i},
                       {"name", arw::test_function_name(i)},
                       {"sphere_average", arw::rat_to_json(arw::spherical_average(set.d, i))},
                       {"statistic", arw::equidistribution_statistic(set, i)}});
    }
    return arr;
}

int cmd_lattice(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    json j = arw::to_json(set);
    j["equidistribution"] = equidistribution_json(set);
    j["config"] = config_json("lattice", o);
    write_json(o, j);
    return 0;
}

int cmd_census(const Opts& o) {
    arw::CensusOptions copts;
    copts.table_entry_cap = o.table_cap;
    copts.c6_work_budget = o.c6_budget;
    copts.want_c6 = !o.skip_c6;
    copts.throw_on_c6_budget = false;

    bool partial = false;
    json j;
    if (o.m_max) {
        std::vector<arw::CorrelationCensus> censuses;
        json skipped = json::array();
        json arr = json::array();
        for (std::int64_t m = o.m; m <= *o.m_max; ++m) {
            arw::FrequencySet set;
            try {
                set = arw::enumerate_frequencies(o.d, m, o.strict);
            } catch (const arw::StrictModeError&) {
                skipped.push_back(m);
                continue;
            }
            if (set.size() == 0) {
                skipped.push_back(m);
                continue;
            }
            arw::CorrelationCensus c = arw::build_census(set, copts);
            if (copts.want_c6 && !c.c6) partial = true;
            arr.push_back(arw::census_to_json(c));
            censuses.push_back(std::move(c));
        }
        j["censuses"] = arr;
        j["skipped_m"] = skipped;
        if (censuses.size() >= 5) {
            arw::AlphaFit fit = arw::check_alpha_bound(censuses, o.d);
            j["alpha_fit"] = {{"alpha", arw::rat_to_json(arw::alpha_exponent(o.d))},
                              {"slope", fit.slope},
                              {"intercept", fit.intercept},
                              {"ratios", fit.ratios},
                              {"ratio_max_min", fit.ratio_max_min}};
        } else {
            j["alpha_fit"] = nullptr;
        }
    } else {
        arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
        arw::CorrelationCensus c = arw::build_census(set, copts);
        if (copts.want_c6 && !c.c6) partial = true;
        j = arw::census_to_json(c);
    }
    j["partial"] = partial;
    j["config"] = config_json("census", o);
    write_json(o, j);
    return partial ? 3 : 0;
}

int cmd_moments(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    if (o.format == "csv") {
        std::string csv = "# config: " + config_json("moments", o).dump() + "\n";
        csv += arw::moment_table_csv(set, o.k_max);
        write_output(o.out, csv);
        return 0;
    }
    json arr = json::array();
    for (const auto& mv : arw::moment_table(set, o.k_max)) {
        arr.push_back({{"k", mv.k},
                       {"exact", arw::rat_to_json(mv.exact)},
                       {"exact_double", arw::rat_to_double(mv.exact)},
                       {"limit", mv.k % 2 == 0 ? json(mv.limit) : json()},
                       {"gap", mv.gap}});
    }
    json j = {{"d", set.d}, {"m", set.m}, {"n", set.n()}, {"moments", arr}};
    j["config"] = config_json("moments", o);
    write_json(o, j);
    return 0;
}

int cmd_integrals(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    arw::SpectralOptions sopts;
    sopts.table_entry_cap = o.table_cap;
    sopts.order6_work_budget = o.order6_budget;
    sopts.want_order6 = !o.skip_c6;
    arw::IntegralSet integrals = arw::compute_exact_integrals(set, sopts);
    arw::LAssembly assembly = arw::assemble_L_integrals(integrals);
    const bool partial = sopts.want_order6 && !integrals.order6_available;
    json j = arw::integrals_to_json(integrals, assembly);
    j["partial"] = partial;
    j["config"] = config_json("integrals", o);
    write_json(o, j);
    return partial ? 3 : 0;
}

json kacrice_body(const arw::FrequencySet& set, const Opts& o) {
    const int d = set.d;
    json j;
    arw::EtaThetaXi closed = arw::eta_theta_xi_integrals(d);
    arw::EtaThetaXi quad = arw::eta_theta_xi_quadrature(d);
    j["eta_theta_xi"] = {
        {"closed", {{"one_minus_eta", closed.one_minus_eta}, {"theta", closed.theta}, {"xi", closed.xi}}},
        {"quadrature", {{"one_minus_eta", quad.one_minus_eta}, {"theta", quad.theta}, {"xi", quad.xi}}}};
    json coeffs = json::array();
    for (const auto& a : arw::expansion_coefficients(d).a)
        coeffs.push_back(arw::rat_to_json(a));
    j["expansion_coefficients"] = coeffs;
    j["berry_coefficient"] = arw::rat_to_json(arw::berry_coefficient(d));

    json pts = json::array();
    for (int p = 0; p < o.points; ++p) {
        Eigen::VectorXd x(d);
        arw::Rng rng(arw::derive_seed(o.seed, {0x6b32u, static_cast<std::uint64_t>(p)}));
        for (int k = 0; k < d; ++k) x[k] = rng.uniform_half_open();
        arw::K2Point kp = arw::k2_pointwise(
            set, x, o.mc_samples,
            arw::derive_seed(o.seed, {0x6b326d63u, static_cast<std::uint64_t>(p)}));
        pts.push_back(arw::k2_point_to_json(kp));
    }
    j["k2_points"] = pts;

    arw::SingularMeasure sm = arw::estimate_singular_measure(
        set, o.sing_samples, arw::derive_seed(o.seed, {0x73696e67u}));
    j["singular_measure"] = {{"fraction", sm.fraction},
                             {"std_error", sm.std_error},
                             {"samples", sm.samples}};
    return j;
}

int cmd_kacrice(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    json j = kacrice_body(set, o);
    j["d"] = set.d;
    j["m"] = set.m;
    j["n"] = set.n();
    j["config"] = config_json("kacrice", o);
    write_json(o, j);
    return 0;
}

arw::BatchStats run_batch(const arw::FrequencySet& set, const Opts& o) {
    if (o.samples >= 30)
        return arw::batch_stats(set, o.samples, o.lines, o.seed, o.boot);
    // Below the batch_stats precondition: same derivation, same aggregation,
    // flagged in the artifact.
    std::vector<arw::NodalEstimate> ests(static_cast<std::size_t>(o.samples));
    for (std::int64_t i = 0; i < o.samples; ++i) {
        arw::WaveSample w = arw::sample_wave(
            set, arw::derive_seed(o.seed, {1, static_cast<std::uint64_t>(i)}));
        ests[static_cast<std::size_t>(i)] = arw::crofton_volume(
            w, o.lines, arw::derive_seed(o.seed, {2, static_cast<std::uint64_t>(i)}));
    }
    return arw::aggregate_batch(set.d, set.m, set.n(), ests, o.lines, o.seed, o.boot);
}

int cmd_simulate(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    arw::BatchStats b = run_batch(set, o);
    if (o.format == "csv") {
        std::string csv = "# config: " + config_json("simulate", o).dump() + "\n";
        csv += arw::batch_to_csv(b);
        write_output(o.out, csv);
        return 0;
    }
    json j = arw::batch_to_json(b);
    j["n_below_recommended"] = o.samples < 30;
    j["config"] = config_json("simulate", o);
    write_json(o, j);
    return 0;
}

int cmd_predict(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    arw::CensusOptions copts;
    copts.table_entry_cap = o.table_cap;
    copts.c6_work_budget = o.c6_budget;
    copts.want_c6 = !o.skip_c6;
    copts.throw_on_c6_budget = false;
    arw::CorrelationCensus c = arw::build_census(set, copts);
    const bool partial = copts.want_c6 && !c.c6;
    arw::VariancePrediction p = arw::variance_prediction(o.d, o.m, c);
    json j = arw::prediction_to_json(p);
    j["partial"] = partial;
    j["config"] = config_json("predict", o);
    write_json(o, j);
    return partial ? 3 : 0;
}

int cmd_report(const Opts& o) {
    arw::FrequencySet set = arw::enumerate_frequencies(o.d, o.m, o.strict);
    json missing = json::array();

    json j;
    j["d"] = set.d;
    j["m"] = set.m;
    j["n"] = set.n();
    json lat = arw::to_json(set);
    lat["equidistribution"] = equidistribution_json(set);
    j["lattice"] = lat;

    arw::CensusOptions copts;
    copts.table_entry_cap = o.table_cap;
    copts.c6_work_budget = o.c6_budget;
    copts.want_c6 = !o.skip_c6;
    copts.throw_on_c6_budget = false;
    arw::CorrelationCensus c = arw::build_census(set, copts);
    if (copts.want_c6 && !c.c6) missing.push_back("census.c6");
    j["census"] = arw::census_to_json(c);

    json marr = json::array();
    for (const auto& mv : arw::moment_table(set, o.k_max)) {
        marr.push_back({{"k", mv.k},
                        {"exact", arw::rat_to_json(mv.exact)},
                        {"exact_double", arw::rat_to_double(mv.exact)},
                        {"limit", mv.k % 2 == 0 ? json(mv.limit) : json()},
                        {"gap", mv.gap}});
    }
    j["moments"] = marr;

    arw::SpectralOptions sopts;
    sopts.table_entry_cap = o.table_cap;
    sopts.order6_work_budget = o.order6_budget;
    sopts.want_order6 = !o.skip_c6;
    arw::IntegralSet integrals = arw::compute_exact_integrals(set, sopts);
    arw::LAssembly assembly = arw::assemble_L_integrals(integrals);
    if (sopts.want_order6 && !integrals.order6_available)
        missing.push_back("integrals.order6");
    j["integrals"] = arw::integrals_to_json(integrals, assembly);

    j["kacrice"] = kacrice_body(set, o);
    j["simulate"] = arw::batch_to_json(run_batch(set, o));
    j["predict"] = arw::prediction_to_json(arw::variance_prediction(o.d, o.m, c));

    const bool partial = !missing.empty();
    j["missing"] = missing;
    j["partial"] = partial;
    j["config"] = config_json("report", o);
    write_json(o, j);
    return partial ? 3 : 0;
}

void add_common(CLI::App* sub, Opts& o, bool needs_m = true) {
    sub->add_option("--d", o.d, "torus dimension")->check(CLI::Range(2, 32));
    if (needs_m)
        sub->add_option("--m", o.m, "eigenvalue parameter (|mu|^2 = m)")
            ->required()
            ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "base RNG seed");
    sub->add_option("--out", o.out, "output path, - for stdout");
    sub->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--strict,!--no-strict", o.strict,
                  "reject d=4 with even m (default on)");
    sub->add_option("--table-cap", o.table_cap, "pair-sum table entry cap");
    sub->add_option("--c6-budget", o.c6_budget, "work budget for |C(6)|");
    sub->add_option("--order6-budget", o.order6_budget,
                    "work budget for order-6 integrals");
    sub->add_flag("--skip-c6", o.skip_c6,
                  "skip C(6) and order-6 integrals entirely");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nodal-volume toolkit for arithmetic random waves"};
    app.require_subcommand(1);
    Opts o;

    CLI::App* lat = app.add_subcommand("lattice", "enumerate a frequency set");
    add_common(lat, o);

    CLI::App* cen = app.add_subcommand("census", "correlation counts and alpha fit");
    add_common(cen, o);
    cen->add_option("--m-max", o.m_max, "census every m in [--m, --m-max]");

    CLI::App* mom = app.add_subcommand("moments", "exact B_k moment table");
    add_common(mom, o);
    mom->add_option("--k-max", o.k_max, "largest moment order")->check(CLI::Range(1, 8));

    CLI::App* integ = app.add_subcommand("integrals", "exact covariance-product integrals");
    add_common(integ, o);

    CLI::App* kac = app.add_subcommand("kacrice", "two-point intensity diagnostics");
    add_common(kac, o);
    kac->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples per point")
        ->check(CLI::PositiveNumber);
    kac->add_option("--points", o.points, "number of diagnostic points")
        ->check(CLI::Range(1, 1024));
    kac->add_option("--singular-samples", o.sing_samples,
                    "samples for the singular-measure estimate")
        ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40));

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo nodal volumes");
    add_common(sim, o);
    sim->add_option("--samples", o.samples, "number of wave samples")
        ->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
    sim->add_option("--lines", o.lines, "transect lines per sample")
        ->check(CLI::PositiveNumber);
    sim->add_option("--boot", o.boot, "bootstrap replicates")->check(CLI::Range(10, 100000));

    CLI::App* pre = app.add_subcommand("predict", "variance bound ladder");
    add_common(pre, o);

    CLI::App* rep = app.add_subcommand("report", "full single-(d,m) report");
    add_common(rep, o);
    rep->add_option("--samples", o.samples, "wave samples")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
    rep->add_option("--lines", o.lines, "lines per sample")->check(CLI::PositiveNumber);
    rep->add_option("--mc-samples", o.mc_samples, "MC samples per K2 point")->check(CLI::PositiveNumber);
    rep->add_option("--points", o.points, "K2 diagnostic points")->check(CLI::Range(1, 1024));
    rep->add_option("--singular-samples", o.sing_samples, "singular-measure samples")
        ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40));
    rep->add_option("--k-max", o.k_max, "largest moment order")->check(CLI::Range(1, 8));
    rep->add_option("--boot", o.boot, "bootstrap replicates")->check(CLI::Range(10, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (o.format == "csv" && cmd != "moments" && cmd != "simulate") {
        std::cerr << "error: csv output is only available for moments and simulate\n";
        return 2;
    }
    // report defaults to a light batch unless --samples was given explicitly
    if (cmd == "report" && rep->count("--samples") == 0) o.samples = 30;

    try {
        if (cmd == "lattice") return cmd_lattice(o);
        if (cmd == "census") return cmd_census(o);
        if (cmd == "moments") return cmd_moments(o);
        if (cmd == "integrals") return cmd_integrals(o);
        if (cmd == "kacrice") return cmd_kacrice(o);
        if (cmd == "simulate") return cmd_simulate(o);
        if (cmd == "predict") return cmd_predict(o);
        if (cmd == "report") return cmd_report(o);
        std::cerr << "error: unknown subcommand\n";
        return 2;
    } catch (const arw::BudgetExceeded& e) {
        std::cerr << "error: budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const arw::StrictModeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
