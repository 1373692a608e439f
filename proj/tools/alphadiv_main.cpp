// alphadiv: divergence toolkit for finite discrete probability measures.
//
// Subcommands:
//   div        evaluate alpha- or Renyi divergences between two measures
//   bound      moment-constrained tight lower bounds with witness pair
//   verify     numerically certify the inter-order differential/integral
//              relations and the small-t order along the mixture path
//   tightness  brute-force dominance sweeps against the lower bound, plus
//              the below-range counterexample construction
//
// Exit codes: 0 ok, 2 input/parse error, 3 order outside its domain,
// 4 certification failure, 5 no feasible point in a sweep.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphadiv/bounds.hpp"
#include "alphadiv/divergences.hpp"
#include "alphadiv/io.hpp"
#include "alphadiv/measures.hpp"
#include "alphadiv/oracle.hpp"
#include "alphadiv/relations.hpp"
#include "alphadiv/version.hpp"

namespace {

using namespace alphadiv;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;
constexpr int kExitCertification = 4;
constexpr int kExitInfeasible = 5;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_value(const ExtendedValue& v) {
    return v.is_infinite() ? "inf" : format_double(v.value());
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size()) throw Error("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

AlphaOrder parse_order(const std::string& text) {
    if (text == "inf" || text == "infinity") return AlphaOrder::infinity();
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw Error("cannot parse order '" + text + "'");
    return AlphaOrder(v);
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Head object of every JSON output: identical manifest + seed reproduce
/// identical bytes.
json make_manifest(const std::string& command,
                   const std::map<std::string, std::string>& params,
                   std::uint64_t seed, const std::string& timestamp) {
    json p = json::object();
    for (const auto& [k, v] : params) p[k] = v;
    return json{{"command", command},
                {"parameters", p},
                {"tool_version", ALPHADIV_VERSION},
                {"seed", seed},
                {"timestamp", timestamp.empty() ? utc_now() : timestamp}};
}

struct MeasureArgs {
    std::string points, weights, file;

    void add_options(CLI::App* cmd, const std::string& prefix) {
        cmd->add_option("--" + prefix + "-points", points,
                        "comma-separated support points");
        cmd->add_option("--" + prefix + "-weights", weights,
                        "comma-separated probability weights");
        cmd->add_option("--" + prefix + "-file", file,
                        "JSON file {\"points\":[...],\"weights\":[...]}");
    }

    DiscreteMeasure load(const std::string& name) const {
        if (!points.empty() || !weights.empty()) {
            if (points.empty() || weights.empty())
                throw Error(name + ": need both points and weights inline");
            return make_measure(parse_double_list(points),
                                parse_double_list(weights));
        }
        if (file.empty()) throw Error(name + ": no measure given");
        std::ifstream in(file);
        if (!in) throw Error(name + ": cannot open '" + file + "'");
        return measure_from_json(json::parse(in));
    }
};

int thread_cap(int requested) {
    int effective = requested;
    if (const char* env = std::getenv("ALPHADIV_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) effective = effective == 0 ? cap : std::min(effective, cap);
    }
    return effective;
}

// ---------------------------------------------------------------------------
// div
// ---------------------------------------------------------------------------

struct DivArgs {
    MeasureArgs p, q;
    std::string alpha;
    std::string kind = "alpha";
    bool as_json = false, as_csv = false;
    std::uint64_t seed = 0;
    std::string timestamp;
};

int run_div(const DivArgs& args) {
    MeasurePair pair = make_pair(args.p.load("p"), args.q.load("q"));
    AlphaOrder order = parse_order(args.alpha);
    ExtendedValue v;
    if (args.kind == "renyi") {
        v = renyi_divergence(pair, order);
    } else {
        if (order.is_infinity())
            throw InvalidOrder("alpha-divergence takes finite orders only");
        v = alpha_divergence(pair, order.value());
    }
    if (args.as_json) {
        json out{{"manifest",
                  make_manifest("div",
                                {{"alpha", args.alpha}, {"kind", args.kind}},
                                args.seed, args.timestamp)},
                 {"result", to_json(v)}};
        std::cout << out.dump(2) << "\n";
    } else if (args.as_csv) {
        std::cout << "kind,alpha,value\n"
                  << args.kind << "," << args.alpha << "," << format_value(v)
                  << "\n";
    } else {
        std::cout << format_value(v) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

struct BoundArgs {
    double mean_p = 0, sigma_p = 0, mean_q = 0, sigma_q = 0;
    std::string alpha;
    std::string kind = "alpha";
    bool as_json = false, as_csv = false;
    std::uint64_t seed = 0;
    std::string timestamp;
};

int run_bound(const BoundArgs& args) {
    MomentSpec spec{args.mean_p, args.sigma_p, args.mean_q, args.sigma_q};
    AlphaOrder order = parse_order(args.alpha);
    BoundReport rep;
    if (args.kind == "renyi") {
        rep = renyi_lower_bound(spec, order);
    } else {
        if (order.is_infinity())
            throw InvalidOrder("alpha-divergence bound takes finite orders only");
        rep = alpha_lower_bound(spec, order.value());
    }
    if (args.as_csv) {
        std::cout << "kind,alpha,bound,tight_guaranteed,equal_means\n"
                  << args.kind << "," << args.alpha << ","
                  << format_value(rep.bound) << ","
                  << (rep.tight_guaranteed ? 1 : 0) << ","
                  << (rep.equal_means ? 1 : 0) << "\n";
    } else {
        json out{{"manifest",
                  make_manifest("bound",
                                {{"mean_p", format_double(args.mean_p)},
                                 {"sigma_p", format_double(args.sigma_p)},
                                 {"mean_q", format_double(args.mean_q)},
                                 {"sigma_q", format_double(args.sigma_q)},
                                 {"alpha", args.alpha},
                                 {"kind", args.kind}},
                                args.seed, args.timestamp)},
                 {"result", to_json(rep)}};
        std::cout << out.dump(2) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string relation;
    MeasureArgs p, q;
    std::string pair_file;
    std::string alphas;
    std::string ts = "0.5";
    double h = 0.0;
    bool richardson = false;
    double tol = -1.0;  // default depends on the relation kind
    double slope_tol = 0.05;
    double constant_tol = 0.01;
    bool as_json = false, as_csv = false;
    std::uint64_t seed = 0;
    std::string timestamp;
};

MeasurePair load_pair(const VerifyArgs& args) {
    if (!args.pair_file.empty()) {
        std::ifstream in(args.pair_file);
        if (!in) throw Error("cannot open '" + args.pair_file + "'");
        return pair_from_json(json::parse(in));
    }
    return make_pair(args.p.load("p"), args.q.load("q"));
}

int run_verify(const VerifyArgs& args) {
    MeasurePair pair = load_pair(args);
    std::vector<double> alphas = parse_double_list(args.alphas);
    std::vector<double> ts = parse_double_list(args.ts);
    if (alphas.empty() || ts.empty()) throw Error("empty alpha or t list");

    bool differential = args.relation == "diff-fwd" || args.relation == "diff-bwd";
    double tol = args.tol > 0 ? args.tol : (differential ? 1e-6 : 1e-8);

    json rows = json::array();
    std::ostringstream csv;
    csv << "alpha,t,lhs,rhs,abs_residual,rel_residual,method_detail\n";
    bool certified = true;

    auto emit = [&](double alpha, double t, const RelationResidual& r,
                    bool pass) {
        certified = certified && pass;
        csv << format_double(alpha) << "," << format_double(t) << ","
            << format_double(r.lhs) << "," << format_double(r.rhs) << ","
            << format_double(r.abs_residual) << ","
            << format_double(r.rel_residual) << "," << r.method_detail << "\n";
        json row = to_json(r);
        row["alpha"] = alpha;
        row["t"] = t;
        row["pass"] = pass;
        rows.push_back(row);
    };

    for (double alpha : alphas) {
        if (args.relation == "order") {
            SmallTOrder fit = small_t_order(pair, alpha);
            RelationResidual slope_row;
            slope_row.lhs = fit.slope;
            slope_row.rhs = alpha + 1.0;
            slope_row.abs_residual = std::fabs(fit.slope - (alpha + 1.0));
            slope_row.rel_residual =
                slope_row.abs_residual / std::max(std::fabs(alpha + 1.0), 1e-300);
            slope_row.method_detail = "order-slope loglog t in [1e-4,1e-2]";
            emit(alpha, 0.0, slope_row, slope_row.abs_residual <= args.slope_tol);

            RelationResidual const_row;
            const_row.lhs = fit.limit_ratio;
            const_row.rhs = 1.0;
            const_row.abs_residual = std::fabs(fit.limit_ratio - 1.0);
            const_row.rel_residual = const_row.abs_residual;
            const_row.method_detail = "order-constant D/t^2 at t=1e-4";
            emit(alpha, 0.0, const_row,
                 const_row.abs_residual <= args.constant_tol);
            continue;
        }
        for (double t : ts) {
            RelationResidual r;
            if (args.relation == "diff-fwd")
                r = check_diff_relation_fwd(pair, alpha, t, args.h, args.richardson);
            else if (args.relation == "diff-bwd")
                r = check_diff_relation_bwd(pair, alpha, t, args.h, args.richardson);
            else if (args.relation == "int-fwd")
                r = check_integral_relation(pair, alpha, t);
            else if (args.relation == "int-bwd")
                r = check_integral_relation_bwd(pair, alpha, t);
            else
                throw Error("unknown relation '" + args.relation + "'");
            emit(alpha, t, r, r.rel_residual <= tol);
        }
    }

    if (args.as_json) {
        json out{{"manifest",
                  make_manifest("verify",
                                {{"relation", args.relation},
                                 {"alphas", args.alphas},
                                 {"ts", args.ts},
                                 {"tol", format_double(tol)}},
                                args.seed, args.timestamp)},
                 {"result", rows}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << csv.str();
    }
    return certified ? kExitOk : kExitCertification;
}

// ---------------------------------------------------------------------------
// tightness
// ---------------------------------------------------------------------------

struct TightnessArgs {
    double mean_p = 0, sigma_p = 0, mean_q = 0, sigma_q = 0;
    std::string alphas;
    SearchConfig cfg;
    bool counterexample = false;
    double delta = 0.4;
    double u3 = 1e3;
    bool as_json = false, as_csv = false;
    std::string timestamp;
};

int run_tightness(const TightnessArgs& args) {
    std::vector<double> alphas = parse_double_list(args.alphas);
    if (alphas.empty()) throw Error("empty alpha list");
    MomentSpec spec{args.mean_p, args.sigma_p, args.mean_q, args.sigma_q};
    SearchConfig cfg = args.cfg;
    cfg.threads = thread_cap(cfg.threads);

    json rows = json::array();
    std::ostringstream csv;
    csv << "alpha,mean_p,sigma_p,mean_q,sigma_q,best_value,bound,gap,"
           "evaluations,feasibility_ratio\n";
    bool certified = true;

    for (double alpha : alphas) {
        double sq = spec.sigma_q;
        ExtendedValue best, bound;
        double gap = 0.0;
        long evals = 0;
        double feas = 0.0;
        json extra;
        if (args.counterexample && alpha < -1.0) {
            CounterexampleReport rep = counterexample_alpha_lt_minus1(
                spec.mean_p, spec.sigma_p, spec.mean_q, alpha, args.delta,
                args.u3);
            sq = rep.sigma_q;
            best = rep.divergence;
            bound = rep.bound;
            gap = -rep.gap;  // construction undercuts the bound
            evals = 1;
            feas = 1.0;
            extra = json{{"construction", to_json(rep.pair)},
                         {"limit_value", rep.limit_value},
                         {"tail_term", rep.tail_term}};
        } else {
            SearchResult r = min_search(spec, alpha, cfg);
            best = r.best_value;
            bound = r.bound_value;
            gap = r.gap;
            evals = r.evaluations;
            feas = r.feasibility_ratio;
            if (alpha >= -1.0 && alpha <= 2.0 && gap < -1e-9) certified = false;
        }
        csv << format_double(alpha) << "," << format_double(spec.mean_p) << ","
            << format_double(spec.sigma_p) << "," << format_double(spec.mean_q)
            << "," << format_double(sq) << "," << format_value(best) << ","
            << format_value(bound) << "," << format_double(gap) << "," << evals
            << "," << format_double(feas) << "\n";
        json row{{"alpha", alpha},          {"sigma_q", sq},
                 {"best_value", to_json(best)}, {"bound", to_json(bound)},
                 {"gap", gap},              {"evaluations", evals},
                 {"feasibility_ratio", feas}};
        if (!extra.is_null()) row["counterexample"] = extra;
        rows.push_back(row);
    }

    if (args.as_json) {
        json out{{"manifest",
                  make_manifest(
                      "tightness",
                      {{"alphas", args.alphas},
                       {"mean_p", format_double(spec.mean_p)},
                       {"sigma_p", format_double(spec.sigma_p)},
                       {"mean_q", format_double(spec.mean_q)},
                       {"sigma_q", format_double(spec.sigma_q)},
                       {"radius", format_double(cfg.support_radius)},
                       {"grid_points", std::to_string(cfg.grid_points_per_axis)},
                       {"restarts", std::to_string(cfg.random_restarts)},
                       {"support_size", std::to_string(cfg.support_size)},
                       {"counterexample", args.counterexample ? "true" : "false"}},
                      cfg.seed, args.timestamp)},
                 {"result", rows}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << csv.str();
    }
    return certified ? kExitOk : kExitCertification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha- and Renyi-divergence toolkit for finite discrete measures"};
    app.require_subcommand(1);

    DivArgs div_args;
    CLI::App* div_cmd = app.add_subcommand("div", "evaluate a divergence");
    div_args.p.add_options(div_cmd, "p");
    div_args.q.add_options(div_cmd, "q");
    div_cmd->add_option("--alpha", div_args.alpha, "order (number or 'inf')")
        ->required();
    div_cmd->add_option("--kind", div_args.kind, "alpha|renyi")
        ->check(CLI::IsMember({"alpha", "renyi"}));
    div_cmd->add_flag("--json", div_args.as_json);
    div_cmd->add_flag("--csv", div_args.as_csv);
    div_cmd->add_option("--seed", div_args.seed);
    div_cmd->add_option("--timestamp", div_args.timestamp);

    BoundArgs bound_args;
    CLI::App* bound_cmd =
        app.add_subcommand("bound", "moment-constrained lower bound");
    bound_cmd->add_option("--mean-p", bound_args.mean_p)->required();
    bound_cmd->add_option("--sigma-p", bound_args.sigma_p)->required();
    bound_cmd->add_option("--mean-q", bound_args.mean_q)->required();
    bound_cmd->add_option("--sigma-q", bound_args.sigma_q)->required();
    bound_cmd->add_option("--alpha", bound_args.alpha)->required();
    bound_cmd->add_option("--kind", bound_args.kind, "alpha|renyi")
        ->check(CLI::IsMember({"alpha", "renyi"}));
    bound_cmd->add_flag("--json", bound_args.as_json);
    bound_cmd->add_flag("--csv", bound_args.as_csv);
    bound_cmd->add_option("--seed", bound_args.seed);
    bound_cmd->add_option("--timestamp", bound_args.timestamp);

    VerifyArgs verify_args;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "certify inter-order relations");
    verify_cmd
        ->add_option("--relation", verify_args.relation,
                     "diff-fwd|diff-bwd|int-fwd|int-bwd|order")
        ->required()
        ->check(CLI::IsMember({"diff-fwd", "diff-bwd", "int-fwd", "int-bwd",
                               "order"}));
    verify_args.p.add_options(verify_cmd, "p");
    verify_args.q.add_options(verify_cmd, "q");
    verify_cmd->add_option("--pair-file", verify_args.pair_file,
                           "JSON file {\"p\":{...},\"q\":{...}}");
    verify_cmd->add_option("--alphas", verify_args.alphas)->required();
    verify_cmd->add_option("--ts", verify_args.ts, "path parameters in (0,1]");
    verify_cmd->add_option("--step", verify_args.h, "finite-difference step");
    verify_cmd->add_flag("--richardson", verify_args.richardson);
    verify_cmd->add_option("--tol", verify_args.tol,
                           "residual gate (default 1e-6 diff, 1e-8 int)");
    verify_cmd->add_option("--slope-tol", verify_args.slope_tol);
    verify_cmd->add_option("--constant-tol", verify_args.constant_tol);
    verify_cmd->add_flag("--json", verify_args.as_json);
    verify_cmd->add_flag("--csv", verify_args.as_csv);
    verify_cmd->add_option("--seed", verify_args.seed);
    verify_cmd->add_option("--timestamp", verify_args.timestamp);

    TightnessArgs tight_args;
    CLI::App* tight_cmd =
        app.add_subcommand("tightness", "dominance sweep against the bound");
    tight_cmd->add_option("--mean-p", tight_args.mean_p)->required();
    tight_cmd->add_option("--sigma-p", tight_args.sigma_p)->required();
    tight_cmd->add_option("--mean-q", tight_args.mean_q)->required();
    tight_cmd->add_option("--sigma-q", tight_args.sigma_q)->required();
    tight_cmd->add_option("--alphas", tight_args.alphas)->required();
    tight_cmd->add_option("--radius", tight_args.cfg.support_radius);
    tight_cmd->add_option("--grid-points", tight_args.cfg.grid_points_per_axis);
    tight_cmd->add_option("--restarts", tight_args.cfg.random_restarts);
    tight_cmd->add_option("--support-size", tight_args.cfg.support_size);
    tight_cmd->add_option("--seed", tight_args.cfg.seed);
    tight_cmd->add_option("--threads", tight_args.cfg.threads,
                          "0 = auto; env ALPHADIV_THREADS caps");
    tight_cmd->add_flag("--counterexample", tight_args.counterexample,
                        "emit the alpha < -1 undercutting construction");
    tight_cmd->add_option("--delta", tight_args.delta);
    tight_cmd->add_option("--u3", tight_args.u3);
    tight_cmd->add_flag("--json", tight_args.as_json);
    tight_cmd->add_flag("--csv", tight_args.as_csv);
    tight_cmd->add_option("--timestamp", tight_args.timestamp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (div_cmd->parsed()) return run_div(div_args);
        if (bound_cmd->parsed()) return run_bound(bound_args);
        if (verify_cmd->parsed()) return run_verify(verify_args);
        if (tight_cmd->parsed()) return run_tightness(tight_args);
        return kExitInput;
    } catch (const InvalidOrder& e) {
        std::cerr << "invalid order: " << e.what() << "\n";
        return kExitDomain;
    } catch (const NoFeasiblePoint& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ScanFailed& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return kExitCertification;
    } catch (const InternalConsistency& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
