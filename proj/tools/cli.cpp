#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "ibrt/error.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/reduction.hpp"
#include "studies.hpp"

namespace ibrt::tools {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Common {
    std::string problem;
    std::string out_path;
    bool json_output = false;
    bool bits = false;
};

struct GridOpts {
    std::vector<double> betas;
    double beta0 = kNaN;
    double beta_end = kNaN;
    std::size_t points = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--problem,-p", c.problem, "bsc:<alpha>, decomposable, or a problem JSON file")->required();
    sub->add_option("--out,-o", c.out_path, "write the table here instead of standard output");
    sub->add_flag("--json", c.json_output, "emit JSON instead of CSV");
    sub->add_flag("--bits", c.bits, "report information in bits instead of nats");
}

void add_grid(CLI::App* sub, GridOpts& g) {
    sub->add_option("--betas", g.betas, "explicit beta values, descending")->delimiter(',');
    sub->add_option("--beta0", g.beta0, "largest beta of a uniform grid");
    sub->add_option("--beta-end", g.beta_end, "smallest beta of a uniform grid");
    sub->add_option("--points", g.points, "number of grid points");
}

std::vector<double> build_grid(const GridOpts& g) {
    if (!g.betas.empty()) return g.betas;
    if (std::isnan(g.beta0) || std::isnan(g.beta_end)) throw UsageError("give --betas or --beta0, --beta-end and --points");
    if (g.points == 0) throw UsageError("grid is empty: --points must be positive");
    if (g.beta0 < g.beta_end) throw UsageError("--beta0 must not be below --beta-end");
    return descending_grid(g.beta0, g.beta_end, g.points);
}

std::string info_unit(const Common& c) { return c.bits ? "bits" : "nats"; }
double info_value(const Common& c, double nats) { return c.bits ? to_bits(nats) : nats; }

json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json cell_json(const Cell& c) {
    if (std::holds_alternative<double>(c)) return real_json(std::get<double>(c));
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    return nullptr;
}

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_real(std::get<double>(c));
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    return "";
}

void emit(std::ostream& os, const json& manifest, const Table& t, bool as_json) {
    if (as_json) {
        json doc;
        doc["manifest"] = manifest;
        doc["columns"] = t.columns;
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            rows.push_back(std::move(row));
        }
        doc["rows"] = std::move(rows);
        os << doc.dump(1) << '\n';
        return;
    }
    os << "# manifest: " << manifest.dump() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
        os << '\n';
    }
}

json make_manifest(const std::string& command, const Common& c, json config) {
    json m;
    m["command"] = command;
    m["problem"] = c.problem;
    m["config"] = std::move(config);
    m["info_unit"] = info_unit(c);
    m["outputs"] = json::array({c.out_path.empty() ? std::string("-") : c.out_path});
    m["schema"] = kSchemaVersion;
    m["tool_version"] = kToolVersion;
    return m;
}

json grid_json(const std::vector<double>& g) {
    json a = json::array();
    for (double b : g) a.push_back(real_json(b));
    return a;
}

json tracker_json(const TrackerConfig& cfg) {
    return json{{"delta_beta", cfg.delta_beta},       {"delta1", cfg.delta1},
                {"delta2", cfg.delta2},               {"delta3", cfg.delta3},
                {"ba_stop", cfg.ba_stop},             {"ba_max_iter", cfg.ba_max_iter},
                {"corrector_steps", cfg.corrector_steps}, {"singularity_check", cfg.singularity_check}};
}

void append_root_columns(std::vector<std::string>& cols, std::size_t ny, std::size_t clusters) {
    for (std::size_t t = 0; t < clusters; ++t)
        for (std::size_t y = 0; y < ny; ++y) cols.push_back("dec_y" + std::to_string(y) + "_c" + std::to_string(t));
    for (std::size_t t = 0; t < clusters; ++t) cols.push_back("mrg_c" + std::to_string(t));
}

void append_root_cells(std::vector<Cell>& row, const DecoderRoot& r, std::size_t ny, std::size_t width) {
    for (std::size_t t = 0; t < width; ++t)
        for (std::size_t y = 0; y < ny; ++y)
            row.push_back(t < r.clusters() ? Cell(r.decoders(y, t)) : Cell(std::monostate{}));
    for (std::size_t t = 0; t < width; ++t) row.push_back(t < r.clusters() ? Cell(r.marginal[t]) : Cell(std::monostate{}));
}

struct BaSolveOpts {
    double beta = kNaN;
    std::size_t clusters = 2;
    std::string init = "uniform";
    std::uint64_t seed = 1;
    double stop = kDefaultBaStop;
    std::size_t max_iter = kDefaultBaMaxIter;
};

std::pair<json, Table> cmd_ba_solve(const Common& c, const BaSolveOpts& o) {
    const ProblemSpec spec = resolve_problem(c.problem);
    const IBProblem& prob = spec.problem;
    Encoder init;
    if (o.init == "uniform") init = uniform_encoder(o.clusters, prob.nx());
    else if (o.init == "random") init = random_encoder(o.clusters, prob.nx(), o.seed);
    else throw UsageError("--init must be uniform or random");
    const BAResult r = ba_iterate(init, prob, o.beta, o.stop, o.max_iter);
    const InfoPoint ip = mutual_informations(r.encoder, prob);

    Table t;
    const std::string u = info_unit(c);
    t.columns = {"beta", "i_x_" + u, "i_y_" + u, "iterations", "converged", "final_change", "cluster_count",
                 "effective_cardinality"};
    append_root_columns(t.columns, prob.ny(), o.clusters);
    std::vector<Cell> row{o.beta,
                          info_value(c, ip.i_x),
                          info_value(c, ip.i_y),
                          static_cast<double>(r.iterations),
                          std::string(r.converged ? "true" : "false"),
                          r.final_change,
                          static_cast<double>(r.root.clusters()),
                          static_cast<double>(effective_cardinality(r.root))};
    append_root_cells(row, r.root, prob.ny(), o.clusters);
    t.rows.push_back(std::move(row));
    json cfg{{"beta", o.beta}, {"clusters", o.clusters}, {"init", o.init}, {"seed", o.seed},
             {"stop", o.stop}, {"max_iter", o.max_iter}};
    return {make_manifest("ba-solve", c, std::move(cfg)), std::move(t)};
}

struct TrackOpts {
    double beta0 = kNaN;
    double delta_beta = kNaN;
    double beta_min = 0.0;
    std::size_t clusters = 2;
    TrackerConfig cfg;
    bool no_singularity_check = false;
};

std::pair<json, Table> cmd_track(const Common& c, TrackOpts o) {
    if (!(o.delta_beta < 0.0)) throw UsageError("--delta-beta must be negative");
    if (!(o.beta0 > 0.0)) throw UsageError("--beta0 must be positive");
    o.cfg.delta_beta = o.delta_beta;
    o.cfg.beta_min = o.beta_min;
    o.cfg.singularity_check = !o.no_singularity_check;
    const ProblemSpec spec = resolve_problem(c.problem);
    const DecoderRoot root0 = initial_root(spec, o.beta0, o.clusters, o.cfg);
    const auto recs = ibrt1(spec.problem, o.beta0, root0, o.cfg);

    const std::size_t ny = spec.problem.ny();
    std::size_t width = 0;
    for (const auto& r : recs) width = std::max(width, r.clusters());
    Table t;
    const std::string u = info_unit(c);
    t.columns = {"beta", "i_x_" + u, "i_y_" + u, "cluster_count", "event", "singular_metric", "ode_condition"};
    append_root_columns(t.columns, ny, width);
    t.columns.push_back("ba_unconverged");
    for (const auto& r : recs) {
        std::vector<Cell> row{r.beta,
                              info_value(c, r.info.i_x),
                              info_value(c, r.info.i_y),
                              static_cast<double>(r.clusters()),
                              to_string(r.event),
                              r.singular_metric,
                              r.ode_condition};
        append_root_cells(row, r.root, ny, width);
        row.push_back(std::string(r.ba_unconverged ? "true" : "false"));
        t.rows.push_back(std::move(row));
    }
    json cfg = tracker_json(o.cfg);
    cfg["beta0"] = o.beta0;
    cfg["beta_min"] = o.beta_min;
    cfg["clusters"] = o.clusters;
    return {make_manifest("track", c, std::move(cfg)), std::move(t)};
}

struct CurveOpts {
    GridOpts grid;
    std::string method = "track";
    std::size_t ix_points = 0;
    std::size_t clusters = 2;
};

std::pair<json, Table> cmd_curve(const Common& c, const CurveOpts& o) {
    const ProblemSpec spec = resolve_problem(c.problem);
    const CurveMethod method = parse_curve_method(o.method);
    std::vector<CurvePoint> pts;
    json cfg{{"method", o.method}, {"clusters", o.clusters}};
    if (o.ix_points > 0) {
        if (method != CurveMethod::oracle) throw UsageError("--ix-points needs --method oracle");
        std::vector<double> ix(o.ix_points, 0.0);
        const double top = std::log(2.0);
        for (std::size_t i = 0; i < ix.size(); ++i)
            ix[i] = ix.size() == 1 ? 0.0 : top * static_cast<double>(i) / static_cast<double>(ix.size() - 1);
        pts = oracle_curve_by_ix(spec, ix);
        cfg["ix_points"] = o.ix_points;
    } else {
        const std::vector<double> grid = build_grid(o.grid);
        pts = information_curve(spec, grid, method, o.clusters, TrackerConfig{});
        cfg["grid"] = grid_json(grid);
    }
    Table t;
    const std::string u = info_unit(c);
    t.columns = {"beta", "i_x_" + u, "i_y_" + u, "cluster_count"};
    for (const auto& p : pts)
        t.rows.push_back({p.beta, info_value(c, p.info.i_x), info_value(c, p.info.i_y),
                          p.clusters ? Cell(static_cast<double>(p.clusters)) : Cell(std::monostate{})});
    return {make_manifest("curve", c, std::move(cfg)), std::move(t)};
}

struct DerivOpts {
    GridOpts grid;
    std::size_t clusters = 2;
    double fd_step = 1e-5;
};

std::pair<json, Table> cmd_deriv_check(const Common& c, const DerivOpts& o, std::ostream& err) {
    const std::vector<double> grid = build_grid(o.grid);
    const ProblemSpec spec = resolve_problem(c.problem);
    if (!spec.bsc_alpha)
        err << "note: no exact derivative for '" << spec.id
            << "'; comparing against central differences of the converged BA path\n";
    const auto rows = deriv_check(spec, grid, o.clusters, o.fd_step);
    Table t;
    t.columns = {"beta", "linf_error", "reference", "cluster_count"};
    for (const auto& r : rows) t.rows.push_back({r.beta, r.error, r.reference, static_cast<double>(r.clusters)});
    json cfg{{"grid", grid_json(grid)}, {"clusters", o.clusters}, {"fd_step", o.fd_step}};
    return {make_manifest("deriv-check", c, std::move(cfg)), std::move(t)};
}

struct OrderOpts {
    double beta0 = 32.0;
    double beta_end = kNaN;
    double base_step = 103.0 / 32.0;
    std::size_t halvings = 7;
    std::vector<double> steps;
    std::vector<std::string> methods;
    std::size_t clusters = 2;
    std::size_t fit_points = 3;
};

std::pair<json, Table> cmd_order_study(const Common& c, const OrderOpts& o) {
    const ProblemSpec spec = resolve_problem(c.problem);
    double beta_end = o.beta_end;
    if (std::isnan(beta_end)) {
        if (!spec.bsc_alpha) throw UsageError("--beta-end is required for problems without an oracle");
        beta_end = bsc_beta_c(*spec.bsc_alpha) + 0.1;
    }
    std::vector<double> steps = o.steps;
    if (steps.empty()) {
        if (!(o.base_step > 0.0)) throw UsageError("--base-step must be positive");
        for (std::size_t k = 0; k <= o.halvings; ++k) steps.push_back(std::ldexp(o.base_step, -static_cast<int>(k)));
    }
    std::vector<OrderMethod> methods;
    const auto all = default_order_methods();
    if (o.methods.empty()) methods = all;
    for (const auto& name : o.methods) {
        auto it = std::find_if(all.begin(), all.end(), [&](const OrderMethod& m) { return m.name == name; });
        if (it == all.end()) throw UsageError("unknown method '" + name + "'");
        methods.push_back(*it);
    }
    const OrderStudy st = order_study(spec, o.beta0, beta_end, steps, methods, o.clusters, o.fit_points, thread_cap());
    Table t;
    t.columns = {"step", "method", "sup_error", "grid_points", "fitted_slope", "fit_r2"};
    for (const auto& p : st.points) {
        Cell slope, r2;
        for (const auto& f : st.fits)
            if (f.method == p.method) {
                slope = f.fit.slope;
                r2 = f.fit.r2;
            }
        t.rows.push_back({p.step, p.method, p.sup_error, static_cast<double>(p.grid_points), slope, r2});
    }
    json cfg{{"beta0", o.beta0},          {"beta_end", beta_end},    {"steps", grid_json(steps)},
             {"clusters", o.clusters},    {"fit_points", o.fit_points}, {"reference", st.reference}};
    json names = json::array();
    for (const auto& m : methods) names.push_back(m.name);
    cfg["methods"] = names;
    return {make_manifest("order-study", c, std::move(cfg)), std::move(t)};
}

struct EigOpts {
    GridOpts grid;
    std::size_t clusters = 2;
    std::string root;
};

std::pair<json, Table> cmd_eig_scan(const Common& c, const EigOpts& o) {
    if (o.clusters == 0) throw UsageError("representation size T must be positive");
    const std::vector<double> grid = build_grid(o.grid);
    const ProblemSpec spec = resolve_problem(c.problem);
    std::string source = o.root;
    if (source.empty()) source = spec.bsc_alpha && o.clusters == 2 ? "oracle" : "ba";
    const auto rows = eig_scan(spec, grid, o.clusters, parse_root_source(source));
    Table t;
    t.columns = {"beta", "sigma_min_i_minus_s", "min_abs_one_minus_eig"};
    const std::size_t n = o.clusters * (spec.problem.ny() + 1);
    for (std::size_t k = 0; k < n; ++k) {
        t.columns.push_back("eig" + std::to_string(k) + "_re");
        t.columns.push_back("eig" + std::to_string(k) + "_im");
    }
    for (const auto& r : rows) {
        std::vector<Cell> row{r.beta, r.sigma_min_i_minus_s, r.min_abs_one_minus_eig};
        for (std::size_t k = 0; k < n; ++k) {
            row.push_back(r.eig_re[k]);
            row.push_back(r.eig_im[k]);
        }
        t.rows.push_back(std::move(row));
    }
    json cfg{{"grid", grid_json(grid)}, {"clusters", o.clusters}, {"root", source}};
    return {make_manifest("eig-scan", c, std::move(cfg)), std::move(t)};
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information bottleneck root tracking", "ibrt"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Common common;
    BaSolveOpts ba;
    TrackOpts tr;
    CurveOpts cv;
    DerivOpts dv;
    OrderOpts od;
    EigOpts eg;

    auto* s_ba = app.add_subcommand("ba-solve", "run Blahut-Arimoto at one beta");
    add_common(s_ba, common);
    s_ba->add_option("--beta", ba.beta, "trade-off parameter")->required()->check(CLI::PositiveNumber);
    s_ba->add_option("--clusters,-T", ba.clusters, "number of clusters")->check(CLI::PositiveNumber);
    s_ba->add_option("--init", ba.init, "uniform or random");
    s_ba->add_option("--seed", ba.seed, "seed for --init random");
    s_ba->add_option("--stop", ba.stop, "L-infinity encoder change that ends iteration")->check(CLI::PositiveNumber);
    s_ba->add_option("--max-iter", ba.max_iter, "iteration cap")->check(CLI::PositiveNumber);

    auto* s_tr = app.add_subcommand("track", "follow a root down a beta grid");
    add_common(s_tr, common);
    s_tr->add_option("--beta0", tr.beta0, "starting beta")->required();
    s_tr->add_option("--delta-beta", tr.delta_beta, "negative step")->required();
    s_tr->add_option("--beta-min", tr.beta_min, "do not step below this beta");
    s_tr->add_option("--clusters,-T", tr.clusters, "clusters of the initial BA solve (no oracle)")
        ->check(CLI::PositiveNumber);
    s_tr->add_option("--delta1", tr.cfg.delta1, "cluster mass threshold");
    s_tr->add_option("--delta2", tr.cfg.delta2, "cluster merging threshold");
    s_tr->add_option("--delta3", tr.cfg.delta3, "singularity threshold on sigma_min(I - S)");
    s_tr->add_option("--corrector-steps", tr.cfg.corrector_steps, "BA iterations per grid point");
    s_tr->add_option("--ba-stop", tr.cfg.ba_stop, "BA stopping threshold");
    s_tr->add_flag("--no-singularity-check", tr.no_singularity_check, "skip the singularity heuristic");

    auto* s_cv = app.add_subcommand("curve", "information-plane points on a grid");
    add_common(s_cv, common);
    add_grid(s_cv, cv.grid);
    s_cv->add_option("--method", cv.method, "track, ba_anneal or oracle");
    s_cv->add_option("--ix-points", cv.ix_points, "sample the oracle curve on this many I_X values");
    s_cv->add_option("--clusters,-T", cv.clusters, "clusters of the initial BA solve (no oracle)")
        ->check(CLI::PositiveNumber);

    auto* s_dv = app.add_subcommand("deriv-check", "ODE derivative error on a grid");
    add_common(s_dv, common);
    add_grid(s_dv, dv.grid);
    s_dv->add_option("--clusters,-T", dv.clusters, "clusters of the BA solve (no oracle)")->check(CLI::PositiveNumber);
    s_dv->add_option("--fd-step", dv.fd_step, "beta step of the central differences")->check(CLI::PositiveNumber);

    auto* s_od = app.add_subcommand("order-study", "error against step size for several methods");
    add_common(s_od, common);
    s_od->add_option("--beta0", od.beta0, "starting beta");
    s_od->add_option("--beta-end", od.beta_end, "smallest beta (default: critical beta + 0.1 for bsc)");
    s_od->add_option("--base-step", od.base_step, "largest step magnitude");
    s_od->add_option("--halvings", od.halvings, "number of times the step is halved");
    s_od->add_option("--steps", od.steps, "explicit step magnitudes")->delimiter(',');
    s_od->add_option("--methods", od.methods, "euler, euler_ba1, anneal")->delimiter(',');
    s_od->add_option("--clusters,-T", od.clusters, "clusters of the initial BA solve (no oracle)")
        ->check(CLI::PositiveNumber);
    s_od->add_option("--fit-points", od.fit_points, "smallest steps used in the slope fit");

    auto* s_eg = app.add_subcommand("eig-scan", "eigenvalues of the BA Jacobian on a grid");
    add_common(s_eg, common);
    add_grid(s_eg, eg.grid);
    s_eg->add_option("--clusters,-T", eg.clusters, "representation size");
    s_eg->add_option("--root", eg.root, "oracle, trivial or ba");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        std::pair<json, Table> result;
        if (s_ba->parsed()) result = cmd_ba_solve(common, ba);
        else if (s_tr->parsed()) result = cmd_track(common, tr);
        else if (s_cv->parsed()) result = cmd_curve(common, cv);
        else if (s_dv->parsed()) result = cmd_deriv_check(common, dv, err);
        else if (s_od->parsed()) result = cmd_order_study(common, od);
        else result = cmd_eig_scan(common, eg);

        if (common.out_path.empty()) {
            emit(out, result.first, result.second, common.json_output);
        } else {
            std::ofstream f(common.out_path);
            if (!f) throw InputError("cannot open '" + common.out_path + "' for writing");
            emit(f, result.first, result.second, common.json_output);
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace ibrt::tools
