#include "commands.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <ostream>

#include "output.hpp"
#include "trapsim/analytics.hpp"
#include "trapsim/oracles.hpp"
#include "trapsim/quadrature.hpp"
#include "trapsim/survival.hpp"

namespace trapsim::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

RunStamp stamp_of(const ExperimentConfig& c)
{
    return RunStamp{c.seed, config_hash(c), version_string()};
}

json stamp_json(const ExperimentConfig& c)
{
    return json{{"seed", c.seed}, {"config_hash", config_hash(c)}, {"version", version_string()}};
}

fs::path prepare(const ExperimentConfig& c)
{
    const fs::path dir(c.output_dir);
    ensure_writable_dir(dir);
    return dir;
}

std::string fmt_t(double t)
{
    return format_cell(t);
}

// ---- validate ----

struct Check
{
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0; ///< allowed |value - reference|
    bool passed = false;
};

Check within(std::string name, double value, double reference, double tol)
{
    return Check{std::move(name), value, reference, tol, std::abs(value - reference) <= tol};
}

double mass(auto f, double lo, double hi)
{
    return quad::integrate(f, lo, hi);
}

std::vector<Check> validation_checks(const ExperimentConfig& c)
{
    const double t = c.t_grid.front();
    const StreamKey root(c.seed);
    std::vector<Check> checks;

    heartbeat("validate: density normalizations");
    checks.push_back(within("argmax_density_mass",
                            mass([&](double u) { return analytics::argmax_density(u, t); }, 0.0, t), 1.0, 1e-6));
    checks.push_back(within("first_passage_density_mass",
                            mass([](double u) { return analytics::first_passage_density(1.0, u); }, 0.0, kInf),
                            1.0, 1e-6));
    checks.push_back(within(
        "joint_max_argmax_density_mass",
        mass([&](double u) {
            return quad::integrate([&](double m) { return analytics::max_argmax_density(m, u, t); }, 0.0, kInf,
                                   1e-10);
        },
             0.0, t),
        1.0, 1e-6));
    checks.push_back(within(
        "conditioned_positive_transition_mass",
        mass([&](double y) { return analytics::conditioned_positive_transition(1.0, y, 0.5 * t, t); }, 0.0, kInf),
        1.0, 1e-6));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
    {
        const double u = (i + 0.5) / 20.0 * t;
        const double marginal = quad::integrate(
            [&](double m) { return analytics::max_argmax_density(m, u, t); }, 0.0, kInf);
        worst = std::max(worst, std::abs(marginal - analytics::argmax_density(u, t)));
    }
    checks.push_back(within("joint_density_marginal_max_error", worst, 0.0, 1e-8));

    heartbeat("validate: expected range");
    const Estimate range = expected_range_mc(t, 4096, c.n_paths, root.child(0), c.mode);
    const double er = analytics::expected_range(t);
    checks.push_back(within("expected_range_mc", range.value, er, 0.01 * er));

    heartbeat("validate: confinement series");
    const Estimate conf = confinement_mc(1.0, 1.0, 1024, c.n_paths, root.child(1), c.mode);
    const double cp = analytics::confinement_prob(1.0, 1.0);
    checks.push_back(within("confinement_prob_mc", conf.value, cp, 0.02 * cp));

    heartbeat("validate: direct vs annealed at t = " + fmt_t(t));
    SurvivalBudgets b;
    b.n_direct = c.n_paths;
    b.n_outer = c.n_outer;
    b.m_inner = c.m_inner;
    b.mode = c.mode;
    b.debias = c.debias;
    const SurvivalReport rep = survival_report(c.params_at(t), b, root.child(2));
    const double se = std::hypot(rep.direct.std_err, rep.annealed.estimate.std_err);
    checks.push_back(within("direct_vs_annealed", rep.direct.value, rep.annealed.estimate.value, 3.0 * se));
    const double cap = std::min(rep.direct.value + 3.0 * rep.direct.std_err,
                                rep.annealed.estimate.value + 3.0 * rep.annealed.estimate.std_err);
    checks.push_back(Check{"lower_bound_below_estimates", rep.lower_bound.value, cap, 0.0,
                           rep.lower_bound.value <= cap});
    return checks;
}

// ---- conditional rows ----

std::vector<std::string> conditional_columns()
{
    std::vector<std::string> cols{"t", "n_steps", "n_outer", "m_inner", "mode", "n_eff", "degenerate_weights",
                                  "mean_delta"};
    for (const char* kind : {"wq", "uq"})
        for (const char* q : {"10", "25", "50", "75", "90"})
            cols.push_back(std::string(kind) + q);
    for (const char* c : {"wmedian_se", "umedian_se", "median_diff", "median_diff_se", "p_a", "p_a_se", "p_a_free",
                          "p_a_free_se"})
        cols.push_back(c);
    for (const char* thr : {"0.5", "1", "2"})
        for (const char* suffix : {"", "_se", "_free", "_free_se"})
            cols.push_back(std::string("p_a_thr") + thr + suffix);
    for (const char* c : {"p_b", "p_b_se", "p_b_free", "p_b_free_se"})
        cols.push_back(c);
    return cols;
}

void push_event(std::vector<Cell>& row, const EventSummary& e)
{
    row.push_back(e.conditional.value);
    row.push_back(e.conditional.std_err);
    row.push_back(e.unconditional.value);
    row.push_back(e.unconditional.std_err);
}

std::vector<Cell> conditional_row(const ConditionalSummary& s, const ExperimentConfig& c)
{
    std::vector<Cell> row{s.t,
                          static_cast<std::uint64_t>(c.cond_n_steps),
                          static_cast<std::uint64_t>(s.n_outer),
                          static_cast<std::uint64_t>(s.m_inner),
                          std::string(to_string(c.mode)),
                          s.n_eff,
                          s.degenerate_weights,
                          s.mean_delta};
    for (double q : s.weighted_quantiles)
        row.push_back(q);
    for (double q : s.unweighted_quantiles)
        row.push_back(q);
    row.push_back(s.weighted_median_se);
    row.push_back(s.unweighted_median_se);
    row.push_back(s.median_diff);
    row.push_back(s.median_diff_se);
    push_event(row, s.event_a);
    for (const auto& e : s.event_a_threshold)
        push_event(row, e);
    push_event(row, s.event_b);
    return row;
}

json fit_json(const ExponentFit& f)
{
    return json{{"t_grid", f.t_grid},
                {"weighted_medians", f.medians},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"ci95_lo", f.ci_lo},
                {"ci95_hi", f.ci_hi},
                {"ci_halfwidth", f.ci_halfwidth},
                {"slope_below_half_at_95", f.ci_hi < 0.5},
                {"reference_window", {1.0 / 3.0, 5.0 / 11.0}},
                {"slope_in_reference_window", f.slope >= 1.0 / 3.0 && f.slope <= 5.0 / 11.0}};
}

json summary_json(const ConditionalSummary& s)
{
    auto ev = [](const EventSummary& e) {
        return json{{"conditional", e.conditional.value},
                    {"conditional_se", e.conditional.std_err},
                    {"unconditional", e.unconditional.value},
                    {"unconditional_se", e.unconditional.std_err}};
    };
    json thr = json::array();
    for (std::size_t i = 0; i < kThresholdMults.size(); ++i)
    {
        json e = ev(s.event_a_threshold[i]);
        e["c3"] = kThresholdMults[i];
        thr.push_back(e);
    }
    return json{{"t", s.t},
                {"n_outer", s.n_outer},
                {"m_inner", s.m_inner},
                {"n_eff", s.n_eff},
                {"degenerate_weights_warning", s.degenerate_weights},
                {"quantile_levels", kQuantileLevels},
                {"weighted_quantiles", s.weighted_quantiles},
                {"unweighted_quantiles", s.unweighted_quantiles},
                {"weighted_median_se", s.weighted_median_se},
                {"median_diff", s.median_diff},
                {"median_diff_se", s.median_diff_se},
                {"event_a", ev(s.event_a)},
                {"event_a_threshold", thr},
                {"event_b", ev(s.event_b)}};
}

ConditionalOptions cond_options(const ExperimentConfig& c)
{
    return ConditionalOptions{c.mode, c.n_boot, c.fit_boot};
}

// ---- analytics ----

struct Formula
{
    std::size_t arity;
    std::function<double(const std::vector<double>&)> eval;
};

const std::map<std::string, Formula>& formulas()
{
    using namespace analytics;
    using V = std::vector<double>;
    static const std::map<std::string, Formula> table{
        {"expected_range", {1, [](const V& a) { return expected_range(a[0]); }}},
        {"range_tail_asymptotic", {2, [](const V& a) { return range_tail_asymptotic(a[0], a[1]); }}},
        {"max_argmax_density", {3, [](const V& a) { return max_argmax_density(a[0], a[1], a[2]); }}},
        {"argmax_density", {2, [](const V& a) { return argmax_density(a[0], a[1]); }}},
        {"argmax_cdf", {2, [](const V& a) { return argmax_cdf(a[0], a[1]); }}},
        {"first_passage_density", {2, [](const V& a) { return first_passage_density(a[0], a[1]); }}},
        {"stay_positive_prob", {2, [](const V& a) { return stay_positive_prob(a[0], a[1]); }}},
        {"conditioned_positive_transition",
         {4, [](const V& a) { return conditioned_positive_transition(a[0], a[1], a[2], a[3]); }}},
        {"confinement_prob", {2, [](const V& a) { return confinement_prob(a[0], a[1]); }}},
        {"box_mass_max_argmax", {4, [](const V& a) { return box_mass_max_argmax(a[0], a[1], a[2], a[3]); }}},
        {"confinement_lower_bound",
         {4, [](const V& a) { return confinement_lower_bound(SimParams::make(a[0], a[1], a[2]), a[3]).value; }}},
    };
    return table;
}

} // namespace

int run_validate(const ExperimentConfig& c)
{
    const fs::path dir = prepare(c);
    const std::vector<Check> checks = validation_checks(c);
    CsvWriter csv(dir / "validate.csv", {"check", "t", "value", "reference", "tolerance", "passed"}, stamp_of(c));
    json list = json::array();
    bool all = true;
    for (const Check& k : checks)
    {
        csv.row({k.name, c.t_grid.front(), k.value, k.reference, k.tolerance, k.passed});
        list.push_back(json{{"check", k.name},
                            {"value", k.value},
                            {"reference", k.reference},
                            {"tolerance", k.tolerance},
                            {"passed", k.passed}});
        all = all && k.passed;
    }
    write_json(dir / "validate.json", json{{"run", stamp_json(c)}, {"checks", list}, {"all_passed", all}});
    return all ? kExitOk : kExitValidationFailed;
}

int run_survival(const ExperimentConfig& c)
{
    const fs::path dir = prepare(c);
    CsvWriter csv(dir / "survival.csv",
                  {"lambda", "a", "t", "n_steps", "mode", "debias", "direct", "direct_se", "n_direct", "annealed",
                   "annealed_se", "n_outer", "m_inner", "mean_delta", "mean_delta_se", "bias_diagnostic",
                   "bias_warning", "lower_bound", "r_star", "prefactor_rate", "direct_annealed_agree",
                   "bound_below_direct", "bound_below_annealed"},
                  stamp_of(c));
    SurvivalBudgets b;
    b.n_direct = c.n_paths;
    b.n_outer = c.n_outer;
    b.m_inner = c.m_inner;
    b.mode = c.mode;
    b.debias = c.debias;
    const StreamKey root(c.seed);
    json records = json::array();
    for (std::size_t j = 0; j < c.t_grid.size(); ++j)
    {
        const SimParams p = c.params_at(c.t_grid[j]);
        heartbeat("survival: t = " + fmt_t(p.t_end) + " (" + std::to_string(j + 1) + "/"
                  + std::to_string(c.t_grid.size()) + ")");
        const SurvivalReport r = survival_report(p, b, root.child(j));
        const double rate = p.lambda > 0.0 ? confinement_prefactor_rate(p, r.lower_bound) : 0.0;
        csv.row({p.lambda, p.a, p.t_end, static_cast<std::uint64_t>(p.n_steps), std::string(to_string(c.mode)),
                 c.debias, r.direct.value, r.direct.std_err, static_cast<std::uint64_t>(r.direct.n),
                 r.annealed.estimate.value, r.annealed.estimate.std_err, static_cast<std::uint64_t>(c.n_outer),
                 static_cast<std::uint64_t>(c.m_inner), r.annealed.mean_delta, r.annealed.mean_delta_se,
                 r.annealed.bias_diagnostic, r.annealed.bias_warning, r.lower_bound.value, r.r_star, rate,
                 r.direct_annealed_agree, r.bound_below_direct, r.bound_below_annealed});
        records.push_back(json{
            {"run", stamp_json(c)},
            {"params", {{"lambda", p.lambda}, {"a", p.a}, {"t", p.t_end}, {"n_steps", p.n_steps},
                        {"window_halfwidth", p.window_halfwidth}}},
            {"direct", {{"value", r.direct.value}, {"std_err", r.direct.std_err}, {"n", r.direct.n}}},
            {"annealed", {{"value", r.annealed.estimate.value}, {"std_err", r.annealed.estimate.std_err},
                          {"n_outer", c.n_outer}, {"m_inner", c.m_inner}, {"mean_delta", r.annealed.mean_delta},
                          {"bias_diagnostic", r.annealed.bias_diagnostic},
                          {"bias_warning", r.annealed.bias_warning}}},
            {"lower_bound", {{"value", r.lower_bound.value}, {"r_star", r.r_star}, {"prefactor_rate", rate}}},
            {"agreement", {{"direct_annealed", r.direct_annealed_agree},
                           {"bound_below_direct", r.bound_below_direct},
                           {"bound_below_annealed", r.bound_below_annealed}}},
            {"seconds", {{"direct", r.seconds_direct}, {"annealed", r.seconds_annealed},
                         {"lower_bound", r.seconds_bound}}}});
    }
    write_json(dir / "survival.json", records);
    return kExitOk;
}

int run_conditional(const ExperimentConfig& c)
{
    const fs::path dir = prepare(c);
    CsvWriter csv(dir / "conditional.csv", conditional_columns(), stamp_of(c));
    const StreamKey root(c.seed);
    json per_t = json::array();
    std::vector<MedianSeriesPoint> series;
    for (std::size_t j = 0; j < c.t_grid.size(); ++j)
    {
        const double t = c.t_grid[j];
        heartbeat("conditional: t = " + fmt_t(t) + " (" + std::to_string(j + 1) + "/"
                  + std::to_string(c.t_grid.size()) + ")");
        const SimParams p = SimParams::make(c.lambda, c.a, t, c.cond_n_steps, c.buffer_mult);
        const ConditionalSummary s = conditional_statistics(p, c.cond_n_outer, c.cond_m_inner, c.event_a,
                                                            c.event_b, root.child(j), cond_options(c));
        csv.row(conditional_row(s, c));
        per_t.push_back(summary_json(s));
        MedianSeriesPoint pt{t, {}, {}};
        for (const auto& smp : s.samples)
        {
            pt.values.push_back(smp.max_disp);
            pt.weights.push_back(smp.weight);
        }
        series.push_back(std::move(pt));
    }
    json record{{"run", stamp_json(c)}, {"per_t", per_t}};
    if (series.size() >= 3)
        record["median_fit"] = fit_json(exponent_fit(series, root.child(c.t_grid.size()), c.fit_boot));
    write_json(dir / "conditional.json", record);
    return kExitOk;
}

int run_trend(const ExperimentConfig& c)
{
    if (c.t_grid.size() < 3)
        throw ConfigError("trend: t_grid needs at least 3 times");
    const fs::path dir = prepare(c);
    heartbeat("trend: " + std::to_string(c.t_grid.size()) + " times");
    const TrendReport r = theorem_trend_report(c.lambda, c.a, c.t_grid, c.cond_n_steps, c.cond_n_outer,
                                               c.cond_m_inner, c.event_a, c.event_b, StreamKey(c.seed),
                                               cond_options(c));
    CsvWriter csv(dir / "trend.csv", conditional_columns(), stamp_of(c));
    json per_t = json::array();
    for (const auto& s : r.per_t)
    {
        csv.row(conditional_row(s, c));
        per_t.push_back(summary_json(s));
    }
    json taus = json::array();
    for (std::size_t i = 0; i < kThresholdMults.size(); ++i)
        taus.push_back(json{{"c3", kThresholdMults[i]}, {"kendall_tau", r.tau_a_threshold[i]}});
    write_json(dir / "trend.json", json{{"run", stamp_json(c)},
                                        {"per_t", per_t},
                                        {"trend_event_a_threshold", taus},
                                        {"trend_event_b", {{"kendall_tau", r.tau_b}}},
                                        {"median_fit", fit_json(r.median_fit)}});
    return kExitOk;
}

int run_analytics(const std::vector<std::string>& query, std::ostream& out)
{
    if (query.empty())
        throw ConfigError("analytics: missing function name");
    const auto it = formulas().find(query[0]);
    if (it == formulas().end())
        throw ConfigError("analytics: unknown function " + query[0]);
    if (query.size() - 1 != it->second.arity)
        throw ConfigError("analytics: " + query[0] + " takes " + std::to_string(it->second.arity) + " arguments");
    std::vector<double> args;
    for (std::size_t i = 1; i < query.size(); ++i)
    {
        try
        {
            std::size_t used = 0;
            args.push_back(std::stod(query[i], &used));
            if (used != query[i].size())
                throw std::invalid_argument(query[i]);
        }
        catch (const std::exception&)
        {
            throw ConfigError("analytics: not a number: " + query[i]);
        }
    }
    out << format_cell(it->second.eval(args)) << '\n';
    return kExitOk;
}

} // namespace trapsim::cli
