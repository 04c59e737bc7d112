#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cadlagqv/calculus.hpp"
#include "cadlagqv/convergence.hpp"
#include "cadlagqv/csv.hpp"
#include "cadlagqv/errors.hpp"
#include "cadlagqv/mc.hpp"
#include "cadlagqv/multidim.hpp"
#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"
#include "cadlagqv/qv.hpp"
#include "cadlagqv/skorokhod.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::json;
using cadlag::CadlagPath;
using cadlag::domain_error;
using cadlag::PartitionScheme;

enum class Command { none, qv_compute, qv_limit, qv_matrix, dist, ito, mc_run };

struct Options {
    Command cmd = Command::none;
    std::string path_file, x_file, y_file;
    std::string scheme_spec = "dyadic";
    std::string levels_spec;
    std::string mode = "q";
    std::string f_spec, model_spec, metric = "j1";
    std::string out_file, plot_file, config_file;
    double t = std::nan("");
    double horizon = std::nan("");
    double tol = 1e-3, eps = 0.1, delta = 0.05, atol = -1.0;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    bool strict = false, oracle = false;
};

struct LevelRange {
    int lo = 0, hi = 0;
};

LevelRange parse_levels(const std::string& spec) {
    if (spec.empty()) throw domain_error("--levels a..b is required");
    const std::size_t dots = spec.find("..");
    if (dots == std::string::npos)
        throw domain_error("bad level range '" + spec + "', expected a..b");
    LevelRange r;
    try {
        std::size_t used = 0;
        r.lo = std::stoi(spec.substr(0, dots), &used);
        if (used != dots) throw std::invalid_argument("");
        const std::string tail = spec.substr(dots + 2);
        r.hi = std::stoi(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw domain_error("bad level range '" + spec + "', expected a..b");
    }
    if (r.lo > r.hi)
        throw domain_error("empty level range '" + spec + "'");
    return r;
}

PartitionScheme make_scheme(const std::string& spec, double horizon) {
    if (spec == "dyadic") return PartitionScheme::dyadic(horizon);
    if (spec == "uniform") return PartitionScheme::uniform(horizon);
    if (spec.rfind("file:", 0) == 0)
        return cadlag::read_scheme_csv(
            cadlag::read_text_file(spec.substr(5)));
    throw domain_error("bad scheme '" + spec +
                       "', expected dyadic, uniform, or file:<path>");
}

// Model spec: name or name:key=value,key=value. Keys by kind:
//   brownian        sigma, horizon, resolution
//   poisson         lambda, jump, horizon
//   jump_diffusion  sigma, lambda, jump (constant size), horizon, resolution
//   white_noise     amplitude, horizon, resolution
cadlag::ProcessModel parse_model(const std::string& spec) {
    std::string name = spec;
    std::string args;
    const std::size_t colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        args = spec.substr(colon + 1);
    }
    double sigma = 1.0, lambda = 1.0, jump = 1.0, amplitude = 1.0;
    double horizon = 1.0;
    std::size_t resolution = 0;  // 0: use the factory default
    std::string rest = args;
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string kv = rest.substr(0, comma);
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw domain_error("bad model parameter '" + kv +
                               "', expected key=value");
        const std::string key = kv.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw domain_error("bad model parameter value in '" + kv + "'");
        }
        if (key == "sigma") sigma = value;
        else if (key == "lambda") lambda = value;
        else if (key == "jump") jump = value;
        else if (key == "amplitude") amplitude = value;
        else if (key == "horizon") horizon = value;
        else if (key == "resolution") resolution = static_cast<std::size_t>(value);
        else throw domain_error("unknown model parameter '" + key + "'");
    }
    using PM = cadlag::ProcessModel;
    if (name == "brownian")
        return PM::brownian(sigma, horizon,
                            resolution ? resolution : std::size_t{1} << 16);
    if (name == "poisson") return PM::poisson(lambda, jump, horizon);
    if (name == "jump_diffusion")
        return PM::jump_diffusion(
            sigma, lambda, [jump](std::mt19937_64&) { return jump; }, horizon,
            resolution ? resolution : std::size_t{1} << 16);
    if (name == "white_noise")
        return PM::white_noise(amplitude, horizon,
                               resolution ? resolution : std::size_t{1} << 10);
    throw domain_error("unknown model '" + name + "'");
}

void emit_report(const Options& o, const json& report) {
    const std::string text = report.dump(2) + "\n";
    if (o.out_file.empty())
        std::cout << text;
    else
        cadlag::write_text_file(o.out_file, text);
}

std::string command_name(Command c) {
    switch (c) {
        case Command::qv_compute: return "qv compute";
        case Command::qv_limit: return "qv limit";
        case Command::qv_matrix: return "qv matrix";
        case Command::dist: return "dist";
        case Command::ito: return "ito";
        case Command::mc_run: return "mc run";
        case Command::none: break;
    }
    return "";
}

json decomposition_json(const cadlag::QVDecomposition& d) {
    json jumps = json::array();
    for (const auto& [time, mass] : d.jump_part)
        jumps.push_back({{"time", time}, {"mass", mass}});
    return {{"jump_part", jumps},
            {"continuous_part", cadlag::write_path_csv(d.continuous_part.path())}};
}

void write_plot(const Options& o, const cadlag::ConvergenceReport& rep,
                const CadlagPath& x, const PartitionScheme& scheme, double t) {
    std::string csv = "level,j1_distance,uniform_distance,value_at_t\n";
    char buf[160];
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const double value = cadlag::q_n(x, scheme.generate(rep.levels[i]))(t);
        if (i == 0)
            std::snprintf(buf, sizeof buf, "%d,nan,nan,%.17g\n", rep.levels[i],
                          value);
        else
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n",
                          rep.levels[i], rep.distances[i - 1],
                          rep.uniform_distances[i - 1], value);
        csv += buf;
    }
    cadlag::write_text_file(o.plot_file, csv);
}

int run_qv_compute(const Options& o) {
    const CadlagPath x = cadlag::read_path_csv(cadlag::read_text_file(o.path_file));
    const PartitionScheme scheme = make_scheme(o.scheme_spec, x.horizon());
    const LevelRange range = parse_levels(o.levels_spec);
    const double t = std::isnan(o.t) ? x.horizon() : o.t;
    if (o.mode != "q" && o.mode != "s" && o.mode != "p")
        throw domain_error("bad --mode '" + o.mode + "', expected q, s, or p");

    json levels = json::array(), values = json::array();
    for (int level = range.lo; level <= range.hi; ++level) {
        const cadlag::Partition p = scheme.generate(level);
        double v = 0.0;
        if (o.mode == "q") v = cadlag::q_n(x, p)(t);
        else if (o.mode == "p") v = cadlag::p_n(x, p)(t);
        else v = cadlag::s_n(x, p, t);
        levels.push_back(level);
        values.push_back(v);
    }
    emit_report(o, {{"schema", 1},
                    {"command", "qv compute"},
                    {"mode", o.mode},
                    {"t", t},
                    {"levels", levels},
                    {"values", values}});
    return 0;
}

int run_qv_limit(const Options& o) {
    const CadlagPath x = cadlag::read_path_csv(cadlag::read_text_file(o.path_file));
    const PartitionScheme scheme = make_scheme(o.scheme_spec, x.horizon());
    const LevelRange range = parse_levels(o.levels_spec);
    const cadlag::QVLimitResult res =
        cadlag::qv_limit(x, scheme, range.lo, range.hi, o.tol, o.atol);

    json report = {{"schema", 1},
                   {"command", "qv limit"},
                   {"levels", res.report.levels},
                   {"distances", res.report.distances},
                   {"uniform_distances", res.report.uniform_distances},
                   {"mode", cadlag::mode_name(res.report.mode)},
                   {"tol", o.tol},
                   {"limit", cadlag::write_path_csv(res.finest.path())}};
    report["decomposition"] = res.decomposition
                                  ? decomposition_json(*res.decomposition)
                                  : json(nullptr);
    emit_report(o, report);
    if (!o.plot_file.empty())
        write_plot(o, res.report, x, scheme,
                   std::isnan(o.t) ? x.horizon() : o.t);
    return o.strict && !res.report.converged() ? 1 : 0;
}

int run_qv_matrix(const Options& o) {
    const cadlag::VectorCadlagPath x =
        cadlag::read_vector_path_csv(cadlag::read_text_file(o.path_file));
    const PartitionScheme scheme = make_scheme(o.scheme_spec, x.horizon());
    const LevelRange range = parse_levels(o.levels_spec);
    const cadlag::MatrixQVLimitResult res =
        cadlag::matrix_qv_limit(x, scheme, range.lo, range.hi, o.tol, o.atol);

    const std::size_t m = res.limit.dimension();
    const double t = std::isnan(o.t) ? x.horizon() : o.t;
    json entries = json::array();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const cadlag::ConvergenceReport& rep = res.entry_reports[i * m + j];
            entries.push_back({{"i", i},
                               {"j", j},
                               {"mode", cadlag::mode_name(rep.mode)},
                               {"distances", rep.distances},
                               {"uniform_distances", rep.uniform_distances},
                               {"value_at_t", res.limit.value(i, j, t)}});
        }
    emit_report(o, {{"schema", 1},
                    {"command", "qv matrix"},
                    {"dimension", m},
                    {"levels", res.entry_reports.front().levels},
                    {"t", t},
                    {"all_converged", res.all_converged()},
                    {"entries", entries}});
    return o.strict && !res.all_converged() ? 1 : 0;
}

int run_dist(const Options& o) {
    const CadlagPath x = cadlag::read_path_csv(cadlag::read_text_file(o.x_file));
    const CadlagPath y = cadlag::read_path_csv(cadlag::read_text_file(o.y_file));
    if (std::isnan(o.horizon)) throw domain_error("--horizon is required");
    const cadlag::J1Result res = cadlag::j1_distance_compact(x, y, o.horizon);

    json anchors = json::array();
    for (const auto& [time, mapped] : res.lambda.anchors())
        anchors.push_back({time, mapped});
    json report = {{"schema", 1},
                   {"command", "dist"},
                   {"horizon", o.horizon},
                   {"distance", res.distance},
                   {"lambda_anchors", anchors}};
    if (o.oracle)
        report["oracle_distance"] = cadlag::j1_distance_oracle(x, y, o.horizon);
    emit_report(o, report);
    return 0;
}

std::vector<double> parse_poly(const std::string& spec) {
    if (spec.rfind("poly:", 0) != 0)
        throw domain_error("bad --f '" + spec + "', expected poly:c0,c1,...");
    std::vector<double> coeffs;
    std::string rest = spec.substr(5);
    if (rest.empty()) throw domain_error("--f poly: needs coefficients");
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string tok = rest.substr(0, comma);
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        try {
            std::size_t used = 0;
            coeffs.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw domain_error("bad polynomial coefficient '" + tok + "'");
        }
    }
    return coeffs;
}

int run_ito(const Options& o) {
    const CadlagPath x = cadlag::read_path_csv(cadlag::read_text_file(o.path_file));
    const PartitionScheme scheme = make_scheme(o.scheme_spec, x.horizon());
    const LevelRange range = parse_levels(o.levels_spec);
    const cadlag::SmoothFunction f =
        cadlag::SmoothFunction::polynomial(parse_poly(o.f_spec));
    const double t = std::isnan(o.t) ? x.horizon() : o.t;

    json levels = json::array(), residuals = json::array(),
         integrals = json::array();
    for (int level = range.lo; level <= range.hi; ++level) {
        levels.push_back(level);
        residuals.push_back(cadlag::ito_residual(f, x, scheme, level, t));
        integrals.push_back(cadlag::follmer_integral(
            [&f](double v) { return f.d1(v); }, x, scheme.generate(level), t));
    }
    emit_report(o, {{"schema", 1},
                    {"command", "ito"},
                    {"f", o.f_spec},
                    {"t", t},
                    {"value_change", f(x.evaluate(t)) - f(x.evaluate(0.0))},
                    {"levels", levels},
                    {"residuals", residuals},
                    {"follmer_integrals", integrals}});
    return 0;
}

int run_mc(const Options& o) {
    if (o.model_spec.empty()) throw domain_error("--model is required");
    if (o.paths == 0) throw domain_error("--paths must be at least 1");
    const cadlag::ProcessModel model = parse_model(o.model_spec);
    const PartitionScheme scheme = make_scheme(o.scheme_spec, model.horizon);
    const LevelRange range = parse_levels(o.levels_spec);
    cadlag::FractionMetric metric = cadlag::FractionMetric::j1;
    if (o.metric == "uniform") metric = cadlag::FractionMetric::uniform;
    else if (o.metric != "j1")
        throw domain_error("bad --metric '" + o.metric +
                           "', expected j1 or uniform");

    const cadlag::Ensemble e{model, o.paths, o.seed};
    const cadlag::CauchyReport rep = cadlag::cauchy_in_probability(
        e, scheme, range.lo, range.hi, o.eps, o.delta, metric);
    emit_report(o, {{"schema", 1},
                    {"command", "mc run"},
                    {"model", o.model_spec},
                    {"paths", o.paths},
                    {"seed", o.seed},
                    {"metric", o.metric},
                    {"eps", rep.eps},
                    {"delta", rep.delta},
                    {"pair_levels", rep.pair_levels},
                    {"fractions", rep.fractions},
                    {"pass", rep.pass}});
    return o.strict && !rep.pass ? 1 : 0;
}

// One entry per flag a JSON config file may supply; CLI flags win.
struct ConfigKey {
    const char* key;
    std::function<void(const json&, Options&)> apply;
};

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"path", [](const json& v, Options& o) { o.path_file = v.get<std::string>(); }},
        {"x", [](const json& v, Options& o) { o.x_file = v.get<std::string>(); }},
        {"y", [](const json& v, Options& o) { o.y_file = v.get<std::string>(); }},
        {"scheme", [](const json& v, Options& o) { o.scheme_spec = v.get<std::string>(); }},
        {"levels", [](const json& v, Options& o) { o.levels_spec = v.get<std::string>(); }},
        {"mode", [](const json& v, Options& o) { o.mode = v.get<std::string>(); }},
        {"f", [](const json& v, Options& o) { o.f_spec = v.get<std::string>(); }},
        {"model", [](const json& v, Options& o) { o.model_spec = v.get<std::string>(); }},
        {"metric", [](const json& v, Options& o) { o.metric = v.get<std::string>(); }},
        {"out", [](const json& v, Options& o) { o.out_file = v.get<std::string>(); }},
        {"plot", [](const json& v, Options& o) { o.plot_file = v.get<std::string>(); }},
        {"t", [](const json& v, Options& o) { o.t = v.get<double>(); }},
        {"horizon", [](const json& v, Options& o) { o.horizon = v.get<double>(); }},
        {"tol", [](const json& v, Options& o) { o.tol = v.get<double>(); }},
        {"eps", [](const json& v, Options& o) { o.eps = v.get<double>(); }},
        {"delta", [](const json& v, Options& o) { o.delta = v.get<double>(); }},
        {"atol", [](const json& v, Options& o) { o.atol = v.get<double>(); }},
        {"seed", [](const json& v, Options& o) { o.seed = v.get<std::uint64_t>(); }},
        {"paths", [](const json& v, Options& o) { o.paths = v.get<std::size_t>(); }},
        {"strict", [](const json& v, Options& o) { o.strict = v.get<bool>(); }},
        {"oracle", [](const json& v, Options& o) { o.oracle = v.get<bool>(); }},
    };
    return keys;
}

void apply_config(CLI::App* leaf, Options& o, bool& seed_from_config) {
    const std::string text = cadlag::read_text_file(o.config_file);
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::exception& e) {
        throw cadlag::format_error(std::string("config is not valid JSON: ") +
                                   e.what());
    }
    if (!cfg.is_object()) throw domain_error("config must be a JSON object");
    for (const ConfigKey& k : config_keys()) {
        if (!cfg.contains(k.key)) continue;
        const CLI::Option* opt = leaf->get_option_no_throw("--" + std::string(k.key));
        if (opt && opt->count() > 0) continue;  // flag overrides file
        try {
            k.apply(cfg.at(k.key), o);
        } catch (const json::exception&) {
            throw domain_error(std::string("config key '") + k.key +
                               "' has the wrong type");
        }
        if (std::string(k.key) == "seed") seed_from_config = true;
    }
    for (const auto& item : cfg.items()) {
        bool known = false;
        for (const ConfigKey& k : config_keys())
            if (item.key() == k.key) known = true;
        if (!known)
            throw domain_error("unknown config key '" + item.key() + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"pathwise quadratic variation along partition sequences"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* leaf) {
        leaf->add_option("--config", o.config_file,
                         "JSON config file; explicit flags override it");
        leaf->add_option("--out", o.out_file, "write the JSON report here");
        leaf->add_flag("--strict", o.strict,
                       "exit 1 on a non-convergence verdict");
    };
    const auto add_scheme_levels = [&](CLI::App* leaf) {
        leaf->add_option("--scheme", o.scheme_spec,
                         "dyadic, uniform, or file:<path>");
        leaf->add_option("--levels", o.levels_spec, "level range a..b");
    };

    CLI::App* qv = app.add_subcommand("qv", "quadratic variation sums");
    qv->require_subcommand(1);

    CLI::App* compute = qv->add_subcommand(
        "compute", "per-level q/s/p sums of one path at a time");
    compute->add_option("--path", o.path_file, "path CSV");
    add_scheme_levels(compute);
    compute->add_option("--t", o.t, "evaluation time (default: horizon)");
    compute->add_option("--mode", o.mode, "q, s, or p (default q)");
    add_common(compute);
    compute->callback([&] { o.cmd = Command::qv_compute; });

    CLI::App* limit = qv->add_subcommand(
        "limit", "limit estimation with convergence classification");
    limit->add_option("--path", o.path_file, "path CSV");
    add_scheme_levels(limit);
    limit->add_option("--t", o.t, "plot evaluation time (default: horizon)");
    limit->add_option("--tol", o.tol, "stopping tolerance");
    limit->add_option("--atol", o.atol,
                      "decomposition atom tolerance (default: automatic)");
    limit->add_option("--plot", o.plot_file,
                      "write per-level plot CSV here");
    add_common(limit);
    limit->callback([&] { o.cmd = Command::qv_limit; });

    CLI::App* matrix = qv->add_subcommand(
        "matrix", "entrywise limits for a vector path");
    matrix->add_option("--path", o.path_file, "vector path CSV");
    add_scheme_levels(matrix);
    matrix->add_option("--t", o.t, "entry evaluation time (default: horizon)");
    matrix->add_option("--tol", o.tol, "stopping tolerance");
    matrix->add_option("--atol", o.atol,
                       "decomposition atom tolerance (default: automatic)");
    add_common(matrix);
    matrix->callback([&] { o.cmd = Command::qv_matrix; });

    CLI::App* dist = app.add_subcommand("dist", "Skorokhod J1 distance");
    dist->add_option("--x", o.x_file, "first path CSV");
    dist->add_option("--y", o.y_file, "second path CSV");
    dist->add_option("--horizon", o.horizon, "compact horizon T");
    dist->add_flag("--oracle", o.oracle,
                   "also run the brute-force grid oracle");
    add_common(dist);
    dist->callback([&] { o.cmd = Command::dist; });

    CLI::App* ito = app.add_subcommand(
        "ito", "change-of-variable residual per level");
    ito->add_option("--path", o.path_file, "path CSV");
    ito->add_option("--f", o.f_spec, "function, e.g. poly:0,0,1 for v^2");
    ito->add_option("--t", o.t, "evaluation time (default: horizon)");
    add_scheme_levels(ito);
    add_common(ito);
    ito->callback([&] { o.cmd = Command::ito; });

    CLI::App* mc = app.add_subcommand("mc", "sampled ensembles");
    mc->require_subcommand(1);
    CLI::App* run = mc->add_subcommand(
        "run", "consecutive-level exceedance fractions");
    run->add_option("--model", o.model_spec,
                    "e.g. brownian:sigma=1 or poisson:lambda=2,jump=1");
    run->add_option("--paths", o.paths, "ensemble size");
    CLI::Option* seed_opt =
        run->add_option("--seed", o.seed, "base seed (required)");
    add_scheme_levels(run);
    run->add_option("--eps", o.eps, "exceedance threshold");
    run->add_option("--delta", o.delta, "final-fraction acceptance bound");
    run->add_option("--metric", o.metric, "j1 or uniform");
    add_common(run);
    run->callback([&] { o.cmd = Command::mc_run; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* leaf = nullptr;
        switch (o.cmd) {
            case Command::qv_compute: leaf = compute; break;
            case Command::qv_limit: leaf = limit; break;
            case Command::qv_matrix: leaf = matrix; break;
            case Command::dist: leaf = dist; break;
            case Command::ito: leaf = ito; break;
            case Command::mc_run: leaf = run; break;
            case Command::none: return 2;
        }
        bool seed_from_config = false;
        if (!o.config_file.empty())
            apply_config(leaf, o, seed_from_config);
        if (o.cmd == Command::mc_run && seed_opt->count() == 0 &&
            !seed_from_config)
            throw domain_error("--seed is required for mc commands");

        switch (o.cmd) {
            case Command::qv_compute: return run_qv_compute(o);
            case Command::qv_limit: return run_qv_limit(o);
            case Command::qv_matrix: return run_qv_matrix(o);
            case Command::dist: return run_dist(o);
            case Command::ito: return run_ito(o);
            case Command::mc_run: return run_mc(o);
            case Command::none: break;
        }
        return 2;
    } catch (const cadlag::format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cadlag::condition_l_error& e) {
        emit_report(o, {{"schema", 1},
                        {"command", command_name(o.cmd)},
                        {"condition_l_violation",
                         {{"time", e.time()},
                          {"mass", e.mass()},
                          {"expected", e.expected()},
                          {"message", e.what()}}}});
        return o.strict ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
