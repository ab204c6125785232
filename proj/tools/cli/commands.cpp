#include "commands.hpp"

#include "svg.hpp"

#include "markup/closed_forms.hpp"
#include "markup/errors.hpp"
#include "markup/guarantees.hpp"
#include "markup/io.hpp"
#include "markup/mechanisms.hpp"
#include "markup/parallel.hpp"
#include "markup/screening.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace markup::cli {
namespace {

constexpr const char* kUsage = "usage: markup <guarantee|frontier|boundary|verify|oracle|procure|sweep> [options]; see --help";

std::string d2s(double x) { return format_double(x); }

void csv(std::ostream& os, const std::vector<std::string>& fields) { write_csv_row(os, fields); }

std::vector<double> etas(const Options& o, const ScenarioConfig& c, std::vector<double> fallback) {
    if (!o.eta.empty()) {
        return o.eta;
    }
    if (!c.eta.empty()) {
        return c.eta;
    }
    return fallback;
}

double tolerance(const Options& o, const ScenarioConfig& c, double fallback) {
    return o.tol.value_or(c.tolerance.value_or(fallback));
}

std::size_t grid(const Options& o, const ScenarioConfig& c, std::size_t fallback) {
    return o.grid.value_or(c.grid.value_or(fallback));
}

FunctionalOptions functional_options(const ScenarioConfig& c) {
    FunctionalOptions f;
    f.truncation_k = c.truncation_k;
    return f;
}

std::vector<ValueDistribution> battery(const ScenarioConfig& c, double eta) {
    if (c.distributions) {
        if (c.distributions->empty()) {
            throw ConfigError("empty battery: 'distributions' lists no distribution");
        }
        return *c.distributions;
    }
    if (c.battery && c.battery->kind == "random") {
        return random_mixture_battery(c.battery->count, c.battery->seed);
    }
    return standard_battery(eta);
}

Json certificate_json(const GuaranteeCertificate& cert) {
    Json params = Json::object();
    for (const auto& [k, v] : cert.parameters) {
        params[k] = v;
    }
    return {{"claim_id", cert.claim_id},     {"parameters", params},          {"subject", cert.subject},
            {"sense", to_string(cert.sense)}, {"bound", cert.bound_value},     {"measured", cert.measured_value},
            {"slack", cert.slack},            {"tolerance", cert.tolerance},   {"pass", cert.pass}};
}

void tally(CommandResult& r, bool pass, const std::string& what) {
    ++r.checks;
    if (!pass) {
        if (r.failures == 0) {
            r.first_failure = what;
        }
        ++r.failures;
    }
}

std::string jsonl(const std::vector<Json>& rows) {
    std::string s;
    for (const auto& j : rows) {
        s += j.dump();
        s += '\n';
    }
    return s;
}

std::vector<double> geometric(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    return out;
}

}  // namespace

CommandResult cmd_guarantee(const Options& opts, const ScenarioConfig& cfg) {
    const double tol = tolerance(opts, cfg, kDefaultTolerance);
    const FunctionalOptions fopts = functional_options(cfg);
    struct Job {
        double eta;
        ValueDistribution dist;
    };
    std::vector<Job> jobs;
    for (double eta : etas(opts, cfg, {2.0})) {
        for (auto& d : battery(cfg, eta)) {
            jobs.push_back({eta, std::move(d)});
        }
    }
    struct Row {
        SurplusReport report;
        std::vector<GuaranteeCertificate> certs;
    };
    auto rows = parallel_map(jobs.size(), [&](std::size_t i) {
        const auto& job = jobs[i];
        Row row;
        row.report = full_report(job.dist, guarantee_mechanism(job.eta), IsoElasticCost(job.eta), fopts);
        const std::vector<std::pair<std::string, double>> params{{"eta", job.eta}};
        row.certs = {make_certificate("guarantee.profit_ratio", params, row.report.distribution, Sense::equal,
                                      guarantee_ratio(job.eta), row.report.pi_ratio, tol),
                     make_certificate("guarantee.consumer_share", params, row.report.distribution, Sense::equal,
                                      consumer_share(job.eta), row.report.u_ratio, tol)};
        return row;
    });

    CommandResult res;
    std::ostringstream table;
    csv(table, {"eta", "distribution", "S", "Pi", "U", "pi_ratio", "u_ratio", "pi_bound", "u_bound", "pass"});
    std::vector<Json> lines;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i].report;
        const bool pass = rows[i].certs[0].pass && rows[i].certs[1].pass;
        for (const auto& c : rows[i].certs) {
            tally(res, c.pass, c.claim_id + " " + c.subject);
        }
        csv(table, {d2s(jobs[i].eta), r.distribution, d2s(r.S), d2s(r.Pi), d2s(r.U), d2s(r.pi_ratio), d2s(r.u_ratio),
                    d2s(rows[i].certs[0].bound_value), d2s(rows[i].certs[1].bound_value), pass ? "pass" : "fail"});
        lines.push_back({{"eta", jobs[i].eta},     {"distribution", r.distribution},
                         {"S", r.S},               {"Pi", r.Pi},
                         {"U", r.U},               {"pi_ratio", r.pi_ratio},
                         {"u_ratio", r.u_ratio},   {"pi_bound", rows[i].certs[0].bound_value},
                         {"u_bound", rows[i].certs[1].bound_value}, {"pass", pass}});
    }
    res.artifacts = {{"guarantee.csv", "csv", table.str()}, {"guarantee.jsonl", "json", jsonl(lines)}};
    return res;
}

CommandResult cmd_frontier(const Options& opts, const ScenarioConfig& cfg) {
    const std::size_t n = opts.grid.value_or(cfg.points.value_or(cfg.grid.value_or(101)));
    std::ostringstream table;
    csv(table, {"eta", "alpha", "beta", "u_over_s", "branch"});
    std::vector<Json> lines;
    SvgPlot plot("Upper frontier", "Pi/S", "U/S");
    for (double eta : etas(opts, cfg, {2.0})) {
        if (!(eta > 1.0)) {
            throw ConfigError("frontier: eta must be > 1");
        }
        SvgPlot::Points pts;
        for (const auto& p : frontier_sweep(eta, n)) {
            csv(table, {d2s(eta), d2s(p.alpha), d2s(p.beta), d2s(p.u_over_s), to_string(p.branch)});
            lines.push_back({{"eta", eta}, {"alpha", p.alpha}, {"beta", p.beta}, {"u_over_s", p.u_over_s},
                             {"branch", to_string(p.branch)}});
            pts.emplace_back(p.beta, p.u_over_s);
        }
        if (pts.size() == 1) {
            plot.add_points("eta=" + d2s(eta), std::move(pts));
        } else {
            plot.add_line("eta=" + d2s(eta), std::move(pts));
        }
    }
    CommandResult res;
    res.artifacts = {{"frontier.csv", "csv", table.str()},
                     {"frontier.jsonl", "json", jsonl(lines)},
                     {"frontier.svg", "svg", plot.render()}};
    return res;
}

CommandResult cmd_boundary(const Options& opts, const ScenarioConfig& cfg) {
    constexpr std::size_t n = 50;
    const std::size_t ngrid = grid(opts, cfg, 10000);
    std::ostringstream table;
    csv(table, {"alpha", "beta", "u_over_s", "branch", "membership", "label"});
    std::vector<Json> lines;
    SvgPlot plot("Feasible (U/S, Pi/S) for quadratic cost", "U/S", "Pi/S");
    CommandResult res;

    auto emit = [&](double alpha, double beta, double u, const std::string& branch, const std::string& label) {
        const Membership m = eta2_membership(u, beta, 1e-6);
        csv(table, {d2s(alpha), d2s(beta), d2s(u), branch, to_string(m), label});
        lines.push_back({{"alpha", alpha}, {"beta", beta}, {"u_over_s", u}, {"branch", branch},
                         {"membership", to_string(m)}, {"label", label}});
        return m;
    };

    SvgPlot::Points upper;
    SvgPlot::Points lower;
    SvgPlot::Points zero;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double a_up = t < 1.0 ? 2.0 / (1.0 - t) : std::numeric_limits<double>::infinity();
        const FrontierPoint pu = eta2_boundary(a_up);
        emit(pu.alpha, pu.beta, pu.u_over_s, "upper", "pareto");
        upper.emplace_back(pu.u_over_s, pu.beta);
        const FrontierPoint pl = eta2_boundary(1.0 + t);
        emit(pl.alpha, pl.beta, pl.u_over_s, "lower", "pareto");
        lower.emplace_back(pl.u_over_s, pl.beta);
    }
    for (const auto& p : eta2_zero_cs_segment(n)) {
        emit(p.alpha, p.beta, p.u_over_s, "zero_cs", "truncated_pareto");
        zero.emplace_back(p.u_over_s, p.beta);
    }
    plot.add_line("upper branch", upper);
    plot.add_line("lower branch", lower);
    plot.add_line("zero CS", zero);

    struct Overlay {
        std::string family;
        ValueDistribution dist;
    };
    std::vector<Overlay> overlays;
    for (double hi : {1.5, 2.0, 4.0}) {
        for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            overlays.push_back({"binary", ValueDistribution::binary(1.0, hi, p)});
        }
    }
    for (double a : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        overlays.push_back({"uniform", ValueDistribution::uniform(a, 1.0)});
    }
    for (double b : {1.5, 2.0, 4.0, 8.0}) {
        overlays.push_back({"uniform", ValueDistribution::uniform(1.0, b)});
    }
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        overlays.push_back({"power", ValueDistribution::power(a)});
    }
    auto reports = parallel_map(overlays.size(), [&](std::size_t i) {
        return bayes_outcome(overlays[i].dist, 2.0, functional_options(cfg), ngrid).report;
    });
    std::map<std::string, SvgPlot::Points> family_points;
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        const auto& r = reports[i];
        const Membership m = emit(std::nan(""), r.pi_ratio, r.u_ratio, overlays[i].family, r.distribution);
        tally(res, m != Membership::exterior, "exterior overlay " + r.distribution);
        family_points[overlays[i].family].emplace_back(r.u_ratio, r.pi_ratio);
    }
    for (auto& [family, pts] : family_points) {
        plot.add_points(family, std::move(pts));
    }
    res.artifacts = {{"boundary.csv", "csv", table.str()},
                     {"boundary.jsonl", "json", jsonl(lines)},
                     {"boundary.svg", "svg", plot.render()}};
    return res;
}

CommandResult cmd_verify(const Options& opts, const ScenarioConfig& cfg) {
    const double tol = tolerance(opts, cfg, kDefaultTolerance);
    const std::size_t ngrid = grid(opts, cfg, 10000);
    const FunctionalOptions fopts = functional_options(cfg);
    std::vector<std::string> checks = cfg.checks;
    if (checks.empty()) {
        checks = {"guarantee", "holder", "lower_bound"};
    }
    auto wants = [&](const char* name) { return std::find(checks.begin(), checks.end(), name) != checks.end(); };
    const double quantity_eta = opts.eta_bar.value_or(cfg.eta_bar.value_or(-2.0));

    using Job = std::function<std::vector<GuaranteeCertificate>()>;
    std::vector<Job> jobs;
    for (double eta : etas(opts, cfg, {2.0})) {
        for (const auto& F : battery(cfg, eta)) {
            const bool bayes = wants("holder") || wants("lower_bound") || wants("combination");
            jobs.push_back([=, &wants] {
                std::vector<GuaranteeCertificate> out;
                if (wants("guarantee")) {
                    auto c = verify_guarantee_mechanism(F, eta, tol, fopts);
                    out.insert(out.end(), c.begin(), c.end());
                }
                if (bayes) {
                    const SurplusReport r = bayes_outcome(F, eta, fopts, ngrid).report;
                    if (wants("holder")) {
                        out.push_back(holder_audit(r, eta, tol));
                    }
                    if (wants("lower_bound")) {
                        out.push_back(verify_surplus_lower_bound(r, eta, tol));
                    }
                    if (wants("combination")) {
                        out.push_back(verify_lower_bound_combination(r, eta, tol));
                    }
                }
                return out;
            });
        }
    }
    const auto shared = battery(cfg, 2.0);
    if (wants("convex_cost")) {
        const GeneralConvexCost cost = cfg.cost ? *cfg.cost : GeneralConvexCost::polynomial({0.0, 0.0, 0.5, 0.0, 0.25}, 4.0);
        for (const auto& F : shared) {
            jobs.push_back([=] { return std::vector{verify_convex_cost(F, cost, tol, fopts)}; });
        }
        jobs.push_back([=] { return std::vector{compare_convex_bounds(cost.eta_bar())}; });
    }
    if (wants("quantity_separable")) {
        for (const auto& F : shared) {
            jobs.push_back([=] { return verify_quantity_separable(F, quantity_eta, tol); });
        }
    }
    if (wants("quantity_nonlinear")) {
        const NonlinearDemandModel model =
            cfg.demand ? *cfg.demand : NonlinearDemandModel::drifting_elasticity(quantity_eta);
        for (const auto& F : shared) {
            jobs.push_back([=] {
                std::vector<double> vs;
                for (int i = 1; i <= 19; ++i) {
                    const double v = F.quantile(0.05 * i);
                    if (v > 0.0 && (vs.empty() || v > vs.back())) {
                        vs.push_back(v);
                    }
                }
                return verify_quantity_nonlinear(F, model, vs, tol);
            });
        }
    }
    const ThetaGrid theta = cfg.theta.value_or(ThetaGrid{});
    const auto thetas = geometric(theta.min, theta.max, theta.n);
    if (wants("procurement_quality")) {
        for (double eta : etas(opts, cfg, {2.0})) {
            jobs.push_back([=] { return verify_procurement_quality(eta, thetas, std::min(tol, 1e-9)); });
        }
    }
    if (wants("procurement_quantity")) {
        jobs.push_back([=] { return verify_procurement_quantity(quantity_eta, thetas, std::min(tol, 1e-9)); });
    }

    auto results = parallel_map(jobs.size(), [&](std::size_t i) { return jobs[i](); });
    CommandResult res;
    std::ostringstream table;
    csv(table, {"claim_id", "subject", "sense", "bound", "measured", "slack", "tolerance", "pass", "parameters"});
    std::vector<Json> lines;
    for (const auto& certs : results) {
        for (const auto& c : certs) {
            tally(res, c.pass, c.claim_id + " " + c.subject);
            std::string params;
            for (const auto& [k, v] : c.parameters) {
                params += (params.empty() ? "" : ";") + k + "=" + d2s(v);
            }
            csv(table, {c.claim_id, c.subject, to_string(c.sense), d2s(c.bound_value), d2s(c.measured_value),
                        d2s(c.slack), d2s(c.tolerance), c.pass ? "pass" : "fail", params});
            lines.push_back(certificate_json(c));
        }
    }
    res.artifacts = {{"certificates.jsonl", "json", jsonl(lines)}, {"certificates.csv", "csv", table.str()}};
    return res;
}

CommandResult cmd_oracle(const Options& opts, const ScenarioConfig& cfg) {
    const double eta = etas(opts, cfg, {2.0}).front();
    OracleSpec spec = cfg.oracle.value_or(OracleSpec{{1.0, 2.0}, {0.5, 0.5}, {}, {}, {}, "both", 0.02});
    const double tol = opts.tol.value_or(cfg.tolerance.value_or(spec.agreement_tol));
    const IsoElasticCost cost(eta);
    const OracleMode mode = spec.mode == "exhaustive" ? OracleMode::exhaustive
                            : spec.mode == "reduced"  ? OracleMode::reduced
                                                      : OracleMode::both;
    if (spec.values.empty()) {
        throw ConfigError("oracle: 'values' is empty");
    }
    std::vector<double> qgrid = spec.quality_grid;
    if (qgrid.empty() && mode != OracleMode::reduced) {
        const double q_max = spec.q_max.value_or(1.1 * efficient_quality(spec.values.back(), cost));
        std::size_t levels = opts.grid.value_or(spec.levels.value_or(cfg.grid.value_or(0)));
        if (levels == 0) {
            levels = 64;
            while (levels > 2 && monotone_vector_count(levels, spec.values.size()) > kOracleCombinationCap) {
                --levels;
            }
        }
        if (levels < 2) {
            throw ConfigError("oracle: need at least 2 quality levels");
        }
        for (std::size_t j = 0; j < levels; ++j) {
            qgrid.push_back(q_max * static_cast<double>(j) / static_cast<double>(levels - 1));
        }
    }
    const DiscreteScreeningInstance inst{spec.values, spec.masses, cost, qgrid};
    const OracleResult r = discrete_oracle(inst, mode, spec.agreement_tol);

    const ValueDistribution D = ValueDistribution::discrete(spec.values, spec.masses);
    const DirectMechanism M = bayes_optimal_mechanism(D, cost, grid(opts, cfg, 10000));
    const double continuous = mechanism_profit(D, M, cost).value;
    const double gap = std::abs(continuous - r.profit) / std::max(std::abs(continuous), 1e-300);

    CommandResult res;
    tally(res, gap <= tol, "continuous vs oracle profit gap " + d2s(gap));
    if (mode == OracleMode::both) {
        tally(res, r.modes_agree, "exhaustive and reduced modes disagree");
    }

    std::ostringstream summary;
    csv(summary, {"metric", "value"});
    csv(summary, {"eta", d2s(eta)});
    csv(summary, {"types", std::to_string(spec.values.size())});
    csv(summary, {"quality_levels", std::to_string(qgrid.size())});
    csv(summary, {"combinations", std::to_string(r.combinations)});
    csv(summary, {"continuous_profit", d2s(continuous)});
    csv(summary, {"oracle_profit", d2s(r.profit)});
    csv(summary, {"reduced_profit", d2s(r.reduced_profit)});
    csv(summary, {"modes_relative_gap", d2s(r.relative_gap)});
    csv(summary, {"continuous_vs_oracle_gap", d2s(gap)});
    csv(summary, {"tolerance", d2s(tol)});
    csv(summary, {"pass", res.failures == 0 ? "pass" : "fail"});

    std::ostringstream types;
    csv(types, {"value", "mass", "q_continuous", "q_oracle", "t_oracle", "q_reduced", "ironed_virtual_value"});
    Json per_type = Json::array();
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double v = spec.values[i];
        csv(types, {d2s(v), d2s(spec.masses[i]), d2s(M.allocation(v)), d2s(r.allocation[i]), d2s(r.transfers[i]),
                    d2s(r.reduced_allocation[i]), d2s(r.ironed_virtual_values[i])});
        per_type.push_back({{"value", v},
                            {"mass", spec.masses[i]},
                            {"q_continuous", M.allocation(v)},
                            {"q_oracle", r.allocation[i]},
                            {"t_oracle", r.transfers[i]},
                            {"q_reduced", r.reduced_allocation[i]},
                            {"ironed_virtual_value", r.ironed_virtual_values[i]}});
    }
    const Json report{{"eta", eta},
                      {"instance", {{"values", spec.values}, {"masses", spec.masses}, {"quality_grid", qgrid}}},
                      {"mode", spec.mode},
                      {"combinations", r.combinations},
                      {"continuous_profit", continuous},
                      {"oracle_profit", r.profit},
                      {"reduced_profit", r.reduced_profit},
                      {"modes_relative_gap", r.relative_gap},
                      {"modes_agree", r.modes_agree},
                      {"continuous_vs_oracle_gap", gap},
                      {"tolerance", tol},
                      {"types", per_type},
                      {"warnings", r.warnings},
                      {"pass", res.failures == 0}};
    res.artifacts = {{"oracle.csv", "csv", summary.str()},
                     {"oracle_types.csv", "csv", types.str()},
                     {"oracle.json", "json", report.dump(2) + "\n"}};
    return res;
}

CommandResult cmd_procure(const Options& opts, const ScenarioConfig& cfg) {
    const std::string side = opts.side.value_or(cfg.side.value_or("quality"));
    if (side != "quality" && side != "quantity") {
        throw ConfigError("procure: side must be 'quality' or 'quantity'");
    }
    const bool quality = side == "quality";
    const double eta = etas(opts, cfg, {quality ? 2.0 : -2.0}).front();
    const double tol = tolerance(opts, cfg, 1e-9);
    const ThetaGrid theta = cfg.theta.value_or(ThetaGrid{});
    const auto thetas = geometric(theta.min, theta.max, theta.n);
    const auto certs = quality ? verify_procurement_quality(eta, thetas, tol) : verify_procurement_quantity(eta, thetas, tol);
    const double offer = quality ? procurement_quality(eta).unit_price : procurement_quantity(eta).markup;
    const char* offer_name = quality ? "p" : "z";

    CommandResult res;
    std::ostringstream table;
    csv(table, {"theta", offer_name, "share", "bound", "slack", "pass"});
    std::vector<Json> lines;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        const auto& c = certs[i];
        tally(res, c.pass, c.claim_id + " " + c.subject);
        csv(table, {d2s(thetas[i]), d2s(offer), d2s(c.measured_value), d2s(c.bound_value), d2s(c.slack),
                    c.pass ? "pass" : "fail"});
        lines.push_back(certificate_json(c));
    }
    res.artifacts = {{"procure_" + side + ".csv", "csv", table.str()},
                     {"procure_" + side + ".jsonl", "json", jsonl(lines)}};
    return res;
}

CommandResult cmd_sweep(const Options& opts, const ScenarioConfig& cfg) {
    SweepSpec spec = cfg.sweep.value_or(SweepSpec{});
    if (opts.grid) {
        spec.n = *opts.grid;
    }
    std::ostringstream table;
    csv(table, {"eta", "guarantee_ratio", "consumer_share", "frontier_beta_min", "convex_cost_guarantee",
                "quantity_guarantee_at_minus_eta", "procurement_quantity_share_at_minus_eta"});
    std::vector<Json> lines;
    SvgPlot::Points g;
    SvgPlot::Points u;
    SvgPlot::Points cc;
    SvgPlot::Points qg;
    for (double eta : geometric(spec.min, spec.max, spec.n)) {
        const double gr = guarantee_ratio(eta);
        const double cs = consumer_share(eta);
        const double cv = convex_cost_guarantee(eta);
        const double q = quantity_guarantee(-eta);
        const double pq = procurement_quantity(-eta).share;
        csv(table, {d2s(eta), d2s(gr), d2s(cs), d2s(frontier_beta_min(eta)), d2s(cv), d2s(q), d2s(pq)});
        lines.push_back({{"eta", eta},
                         {"guarantee_ratio", gr},
                         {"consumer_share", cs},
                         {"frontier_beta_min", frontier_beta_min(eta)},
                         {"convex_cost_guarantee", cv},
                         {"quantity_guarantee_at_minus_eta", q},
                         {"procurement_quantity_share_at_minus_eta", pq}});
        g.emplace_back(eta, gr);
        u.emplace_back(eta, cs);
        cc.emplace_back(eta, cv);
        qg.emplace_back(eta, q);
    }
    SvgPlot plot("Guarantees against elasticity", "eta", "share of efficient surplus");
    plot.add_line("profit guarantee", g);
    plot.add_line("consumer share", u);
    plot.add_line("convex-cost guarantee", cc);
    plot.add_line("quantity guarantee (-eta)", qg);

    struct LimitRow {
        const char* quantity;
        const char* point;
        LimitEvaluation eval;
        double expected;
    };
    const double e_inv = std::exp(-1.0);
    const std::vector<LimitRow> limits{
        {"guarantee_ratio", "1+", limit_at(guarantee_ratio, 1.0, 1.0, 8), e_inv},
        {"guarantee_ratio", "inf", limit_at_infinity(guarantee_ratio, 1.0, 8), 0.0},
        {"consumer_share", "1+", limit_at(consumer_share, 1.0, 1.0, 8), e_inv},
        {"consumer_share", "inf", limit_at_infinity(consumer_share, 1.0, 8), 1.0},
        {"quantity_guarantee", "-1-", limit_at(quantity_guarantee, -1.0, -1.0, 8), 0.0},
        {"quantity_guarantee", "-inf", limit_at_infinity(quantity_guarantee, -1.0, 8), e_inv},
    };
    std::ostringstream lim;
    csv(lim, {"quantity", "limit_point", "estimate", "last_step", "expected"});
    for (const auto& l : limits) {
        csv(lim, {l.quantity, l.point, d2s(l.eval.estimate), d2s(l.eval.last_step), d2s(l.expected)});
    }
    CommandResult res;
    res.artifacts = {{"sweep.csv", "csv", table.str()},
                     {"sweep_limits.csv", "csv", lim.str()},
                     {"sweep.jsonl", "json", jsonl(lines)},
                     {"sweep.svg", "svg", plot.render()}};
    return res;
}

int execute(const Options& opts, std::ostream& out, std::ostream& err) {
    try {
        ScenarioConfig cfg;
        if (opts.config_path) {
            cfg = load_config(*opts.config_path);
            if (cfg.command && *cfg.command != opts.command) {
                throw ConfigError("config is for command '" + *cfg.command + "', not '" + opts.command + "'");
            }
        }
        CommandResult res;
        if (opts.command == "guarantee") {
            res = cmd_guarantee(opts, cfg);
        } else if (opts.command == "frontier") {
            res = cmd_frontier(opts, cfg);
        } else if (opts.command == "boundary") {
            res = cmd_boundary(opts, cfg);
        } else if (opts.command == "verify") {
            res = cmd_verify(opts, cfg);
        } else if (opts.command == "oracle") {
            res = cmd_oracle(opts, cfg);
        } else if (opts.command == "procure") {
            res = cmd_procure(opts, cfg);
        } else if (opts.command == "sweep") {
            res = cmd_sweep(opts, cfg);
        } else {
            throw ConfigError("unknown command '" + opts.command + "'");
        }

        const Artifact* primary = nullptr;
        for (const auto& a : res.artifacts) {
            if (a.format == opts.format) {
                primary = &a;
                break;
            }
        }
        if (!primary) {
            throw ConfigError(opts.command + " does not produce " + opts.format + " output");
        }
        if (opts.out_dir) {
            std::filesystem::create_directories(*opts.out_dir);
            for (const auto& a : res.artifacts) {
                if (a.format != "csv" && &a != primary) {
                    continue;
                }
                const auto path = std::filesystem::path(*opts.out_dir) / a.name;
                std::ofstream f(path, std::ios::binary);
                f << a.content;
                if (!f) {
                    err << "error: cannot write " << path.string() << "\n";
                    return kExitConfigError;
                }
            }
        } else {
            out << primary->content;
        }
        if (res.failures > 0) {
            err << res.failures << " of " << res.checks << " checks failed; first failure: " << res.first_failure
                << "\n";
            return kExitCertificateFailure;
        }
        if (res.checks > 0) {
            err << res.checks << " checks passed\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n" << kUsage << "\n";
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n" << kUsage << "\n";
        return kExitConfigError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Profit and surplus guarantees for nonlinear pricing", "markup"};
    app.require_subcommand(1);
    Options opts;
    std::optional<std::string> format;
    app.add_option("--eta", opts.eta, "Cost elasticity (repeatable; negative for demand-side commands)")
        ->allow_extra_args(false);
    app.add_option("--eta-bar", opts.eta_bar, "Elasticity bound for quantity-side checks");
    app.add_option("--config", opts.config_path, "Scenario config (JSON, version 1)")->check(CLI::ExistingFile);
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_option("--tol", opts.tol, "Certificate tolerance");
    app.add_option("--grid", opts.grid, "Grid size (ironing grid, sweep points or oracle quality levels)");
    app.add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--side", opts.side, "Procurement side")->check(CLI::IsMember({"quality", "quantity"}));

    const std::vector<std::pair<const char*, const char*>> commands{
        {"guarantee", "Guarantee mechanism over a distribution battery"},
        {"frontier", "Upper surplus frontier sweep (CSV + SVG)"},
        {"boundary", "Feasible set for quadratic cost with overlay points"},
        {"verify", "Run guarantee verifiers and emit JSON-lines certificates"},
        {"oracle", "Compare the continuous solver with the discrete screening oracle"},
        {"procure", "Procurement surplus shares over a theta grid"},
        {"sweep", "Closed-form guarantees across elasticities, with limit table"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&opts, n = std::string(name)] { opts.command = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }
    return execute(opts, out, err);
}

}  // namespace markup::cli
