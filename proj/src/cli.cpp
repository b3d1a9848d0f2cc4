#include "cxorder/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cxorder/counterexamples.hpp"
#include "cxorder/couplings.hpp"
#include "cxorder/families.hpp"
#include "cxorder/json_io.hpp"
#include "cxorder/majorization.hpp"
#include "cxorder/muirhead.hpp"
#include "cxorder/orders.hpp"
#include "cxorder/sweep.hpp"

namespace cxorder {

namespace {

struct Globals {
    std::string tol = "1e-9";
    double tail_eps = 1e-12;
    int cells = 4000;
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot read '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("malformed JSON in " + origin + ": " + e.what());
    }
}

/// Family specs share one discretization window; `@file.json` arguments are read as measures.
std::vector<FiniteMeasure> load_measures(const std::vector<std::string>& args, const Globals& g) {
    std::vector<FamilySpec> specs;
    std::vector<std::size_t> spec_slots;
    std::vector<std::optional<FiniteMeasure>> out(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] == '@') {
            const auto path = args[i].substr(1);
            out[i] = measure_from_json(parse_json_text(read_file(path), path));
        } else {
            specs.push_back(FamilySpec::parse(args[i]));
            spec_slots.push_back(i);
        }
    }
    if (!specs.empty()) {
        auto built = build_measures(specs, {g.tail_eps, g.cells});
        for (std::size_t k = 0; k < built.size(); ++k) {
            out[spec_slots[k]] = std::move(built[k]);
        }
    }
    std::vector<FiniteMeasure> result;
    for (auto& m : out) {
        result.push_back(std::move(*m));
    }
    return result;
}

Scalar parse_tolerance(const Globals& g) {
    Scalar tol = Scalar::parse(g.tol);
    if (tol.sign() < 0) {
        throw InvalidArgument("--tol must be non-negative");
    }
    return tol;
}

/// Writes the primary output to --out when given, else to `out`.
class Sink {
  public:
    Sink(const Globals& g, std::ostream& out) : out_(out) {
        if (!g.out.empty()) {
            file_.open(g.out);
            if (!file_) {
                throw InvalidArgument("cannot write '" + g.out + "'");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : out_; }
    [[nodiscard]] bool redirected() const { return file_.is_open(); }

  private:
    std::ostream& out_;
    std::ofstream file_;
};

void require_format(const Globals& g, std::initializer_list<std::string_view> allowed) {
    if (g.format.empty()) {
        return;
    }
    for (auto f : allowed) {
        if (g.format == f) {
            return;
        }
    }
    throw InvalidArgument("--format " + g.format + " is not supported by this command");
}

int order_command(bool convex, const std::vector<std::string>& specs, const Globals& g, std::ostream& out) {
    require_format(g, {"json"});
    if (specs.size() != 2) {
        throw InvalidArgument("expected exactly two measures");
    }
    const auto ms = load_measures(specs, g);
    const Scalar tol = parse_tolerance(g);
    const auto v = convex ? check_cx(ms[0], ms[1], tol) : check_st(ms[0], ms[1], tol);
    Sink sink(g, out);
    sink.stream() << verdict_to_json(v).dump(2) << "\n";
    return v.holds ? kHolds : kFails;
}

struct SweepArgs {
    std::string family;
    std::string grid;
    std::string grid2;
    int n = 1;
    std::string variance = "1";
    int battery = 9;
    std::string scale;
    std::string domain;
    bool force_float = false;
    bool skip_violations = false;
};

int sweep_command(const SweepArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    require_format(g, {"csv", "json"});
    SweepSpec spec;
    spec.family = parse_sweep_family(a.family);
    spec.grid = parse_grid(a.grid);
    if (!a.grid2.empty()) {
        spec.grid2 = parse_grid(a.grid2);
    }
    spec.n = a.n;
    spec.variance = Scalar::parse(a.variance);
    spec.battery = a.battery;
    if (!a.scale.empty()) {
        spec.scale = Scalar::parse(a.scale);
    }
    if (!a.domain.empty()) {
        const auto bounds = parse_grid(a.domain);
        if (bounds.size() != 2 || !(bounds[0] < bounds[1])) {
            throw InvalidArgument("--domain must be lo,hi with lo < hi");
        }
        spec.domain = std::pair{bounds[0], bounds[1]};
    }
    spec.tol = parse_tolerance(g);
    spec.tail_eps = g.tail_eps;
    spec.cells = g.cells;
    spec.force_float = a.force_float;
    spec.skip_violations = a.skip_violations;

    const auto result = run_sweep(spec);
    for (const auto& w : result.warnings) {
        err << "warning: " << w << "\n";
    }
    Sink sink(g, out);
    if (g.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : result.rows) {
            rows.push_back({{"family", r.family},
                            {"params", r.params},
                            {"phi", r.test_function.to_string()},
                            {"scale", scalar_to_json(r.scale)},
                            {"gap", scalar_to_json(r.gap)},
                            {"regime", std::string(to_string(r.regime))}});
        }
        sink.stream() << nlohmann::json{{"rows", rows}, {"summary", result.summary()}}.dump(2) << "\n";
    } else {
        sink.stream() << gap_csv_header() << "\n";
        for (const auto& r : result.rows) {
            sink.stream() << gap_csv_row(r) << "\n";
        }
        (sink.redirected() ? out : err) << result.summary().dump(2) << "\n";
    }
    return result.passed() ? kHolds : kFails;
}

int muirhead_command(const std::vector<std::string>& specs, const std::string& p, const std::string& q,
                     bool unconditional, const Globals& g, std::ostream& out, std::ostream& err) {
    require_format(g, {"json"});
    const auto pt = ExponentTuple::parse(p);
    const auto qt = ExponentTuple::parse(q);
    if (pt.size() != qt.size() || !leq(pt, qt)) {
        throw InvalidArgument(pt.to_string() + " is not majorized by " + qt.to_string() +
                              " (need equal totals and prefix sums of p at most those of q)");
    }
    const auto ms = load_measures(specs, g);
    const auto report = verify_muirhead(ms, pt, qt, {parse_tolerance(g), unconditional});
    Sink sink(g, out);
    sink.stream() << report.to_json().dump(2) << "\n";
    if (report.hypothesis_failed()) {
        err << "hypothesis failure: measures are not pairwise comparable in the usual stochastic order; "
               "rerun with --unconditional to check anyway\n";
        return kHypothesisFailure;
    }
    if (!report.consistent) {
        err << "internal-consistency error: chain steps and endpoint verdict disagree\n";
        return kFails;
    }
    return report.endpoint->holds ? kHolds : kFails;
}

int chain_command(const std::string& p, const std::string& q, const Globals& g, std::ostream& out) {
    require_format(g, {"json"});
    const auto pt = ExponentTuple::parse(p);
    const auto qt = ExponentTuple::parse(q);
    const auto chain = transfer_chain(pt, qt);
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto s = satisfies_S(chain[i - 1], chain[i]);
        steps.push_back({{"from", chain[i - 1].to_string()},
                         {"to", chain[i].to_string()},
                         {"l1", s ? nlohmann::json(s->first) : nlohmann::json(nullptr)},
                         {"l2", s ? nlohmann::json(s->second) : nlohmann::json(nullptr)}});
    }
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : chain) {
        tuples.push_back(t.to_string());
    }
    Sink sink(g, out);
    sink.stream() << nlohmann::json{{"chain", tuples}, {"steps", steps}, {"potential", potential(pt, qt)}}.dump(2)
                  << "\n";
    return kHolds;
}

int example_command(const std::string& name, const Globals& g, std::ostream& out) {
    require_format(g, {"json"});
    const auto report = reproduce_example(name);
    Sink sink(g, out);
    sink.stream() << report.to_json().dump(2) << "\n";
    return report.passed() ? kHolds : kFails;
}

int couple_command(const std::string& kind, const std::vector<double>& params, std::uint64_t n, const Globals& g,
                   std::ostream& out) {
    require_format(g, {"csv", "json"});
    const auto sampler = CouplingSampler::from_args(kind, params);
    if (n == 0) {
        throw InvalidArgument("--n must be positive");
    }
    Sink sink(g, out);
    if (g.format == "csv") {
        Rng rng(g.seed);
        std::uint64_t violations = 0;
        sink.stream() << "x,y\n";
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto [x, y] = sampler.sample(rng);
            violations += !(x <= y);
            sink.stream() << Scalar(x).to_string() << "," << Scalar(y).to_string() << "\n";
        }
        return violations == 0 ? kHolds : kFails;
    }
    const auto report = audit(sampler, n, g.seed);
    const double ks_limit = 1.95 / std::sqrt(static_cast<double>(n)) * 3.0;
    auto j = report.to_json();
    j["ks_limit"] = ks_limit;
    sink.stream() << j.dump(2) << "\n";
    const bool ok = report.dominance_violations == 0 && report.ks_distance_x < ks_limit &&
                    report.ks_distance_y < ks_limit;
    return ok ? kHolds : kFails;
}

int eval_op_command(const std::string& kind, const std::string& order, const std::string& x,
                    const std::string& phi, const Globals& g, std::ostream& out) {
    require_format(g, {"json"});
    const auto f = ConvexTestFunction::parse(phi);
    const Scalar value = eval_operator(parse_operator_kind(kind), Scalar::parse(order), f, Scalar::parse(x), g.tail_eps);
    Sink sink(g, out);
    sink.stream() << nlohmann::json{{"operator", kind},
                                    {"order", order},
                                    {"x", x},
                                    {"phi", f.to_string()},
                                    {"value", scalar_to_json(value)}}
                         .dump(2)
                  << "\n";
    return kHolds;
}

int eval_poly_command(const std::string& poly, const std::vector<std::string>& specs, const Globals& g,
                      std::ostream& out) {
    require_format(g, {"json"});
    const std::string text = !poly.empty() && poly[0] == '@' ? read_file(poly.substr(1)) : poly;
    const auto p = DistributionPolynomial::from_json(parse_json_text(text, "polynomial"));
    const auto ms = load_measures(specs, g);
    Sink sink(g, out);
    sink.stream() << measure_to_json(eval_poly(p, ms)).dump(2) << "\n";
    return kHolds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic and convex order verification toolkit", "cxorder"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tol", g.tol, "Absolute tolerance for float-regime margins")->capture_default_str();
    app.add_option("--tail-eps", g.tail_eps, "Tail mass left out when truncating infinite supports")
        ->capture_default_str();
    app.add_option("--cells", g.cells, "Cells used to discretize continuous laws")->capture_default_str();
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "Write the primary output to this file");
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();

    std::vector<std::string> pair_specs;
    auto* st = app.add_subcommand("check-st", "Decide A <=st B");
    st->add_option("measures", pair_specs, "Two family specs or @measure.json files")->required();
    auto* cx = app.add_subcommand("check-cx", "Decide A <=cx B");
    cx->add_option("measures", pair_specs, "Two family specs or @measure.json files")->required();

    SweepArgs sweep;
    auto* rs = app.add_subcommand("rasa-sweep", "Gap sweep over a parameter grid");
    rs->add_option("family", sweep.family, "binomial, poisson, nb, gamma, beta or normal")->required();
    rs->add_option("--grid", sweep.grid, "start:stop:count or a comma list")->required();
    rs->add_option("--grid2", sweep.grid2, "Second parameter grid for nb, gamma and beta");
    rs->add_option("--n", sweep.n, "n for the binomial and Poisson scales")->capture_default_str();
    rs->add_option("--variance", sweep.variance, "Common variance of the normal laws")->capture_default_str();
    rs->add_option("--battery", sweep.battery, "Number of stop-loss kinks")->capture_default_str();
    rs->add_option("--scale", sweep.scale, "Pushforward scale");
    rs->add_option("--domain", sweep.domain, "lo,hi range of the stop-loss kinks");
    rs->add_flag("--float", sweep.force_float, "Evaluate binomial sweeps in floating point");
    rs->add_flag("--skip-violations", sweep.skip_violations, "Skip pairs outside the comparability hypothesis");

    std::vector<std::string> mh_specs;
    std::string p_text;
    std::string q_text;
    bool unconditional = false;
    auto* mh = app.add_subcommand("muirhead", "Check the symmetrized convex-order inequality");
    mh->add_option("measures", mh_specs, "k family specs or @measure.json files")->required();
    mh->add_option("--p", p_text, "Smaller exponent tuple, e.g. 1,1,1")->required();
    mh->add_option("--q", q_text, "Larger exponent tuple, e.g. 2,1,0")->required();
    mh->add_flag("--unconditional", unconditional, "Run even when measures are st-incomparable");

    auto* ch = app.add_subcommand("chain", "Transfer chain between two exponent tuples");
    ch->add_option("--p", p_text)->required();
    ch->add_option("--q", q_text)->required();

    std::string example;
    auto* ce = app.add_subcommand("counterexample", "Replay a named counterexample");
    ce->add_option("name", example, "ex2.4 or ex3.9")->required();

    std::string coupling;
    std::vector<double> coupling_params;
    std::uint64_t samples = 100000;
    auto* cp = app.add_subcommand("couple", "Audit a monotone coupling");
    cp->add_option("kind", coupling, "poisson, nb, gamma, beta or normal")->required();
    cp->add_option("params", coupling_params, "Parameters of the two laws")->required();
    cp->add_option("--n", samples, "Number of draws")->capture_default_str();

    std::string op_kind;
    std::string op_order;
    std::string op_x;
    std::string op_phi = "square";
    auto* eo = app.add_subcommand("eval-op", "Evaluate an operator T(phi)(x)");
    eo->add_option("operator", op_kind, "bernstein, szasz, baskakov or beta")->required();
    eo->add_option("--order", op_order, "n, or t for the beta operator")->required();
    eo->add_option("--x", op_x, "Evaluation point")->required();
    eo->add_option("--phi", op_phi, "Test function")->capture_default_str();

    std::string poly;
    std::vector<std::string> poly_specs;
    auto* ep = app.add_subcommand("eval-poly", "Substitute measures into a distribution polynomial");
    ep->add_option("polynomial", poly, "Polynomial JSON or @file.json")->required();
    ep->add_option("measures", poly_specs, "One measure per variable")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (st->parsed()) {
            return order_command(false, pair_specs, g, out);
        }
        if (cx->parsed()) {
            return order_command(true, pair_specs, g, out);
        }
        if (rs->parsed()) {
            return sweep_command(sweep, g, out, err);
        }
        if (mh->parsed()) {
            return muirhead_command(mh_specs, p_text, q_text, unconditional, g, out, err);
        }
        if (ch->parsed()) {
            return chain_command(p_text, q_text, g, out);
        }
        if (ce->parsed()) {
            return example_command(example, g, out);
        }
        if (cp->parsed()) {
            return couple_command(coupling, coupling_params, samples, g, out);
        }
        if (eo->parsed()) {
            return eval_op_command(op_kind, op_order, op_x, op_phi, g, out);
        }
        if (ep->parsed()) {
            return eval_poly_command(poly, poly_specs, g, out);
        }
    } catch (const HypothesisViolation& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace cxorder
