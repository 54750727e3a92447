#pragma once

// lacuna command-line driver. run() is the whole program; main() only
// forwards argv so tests can drive it in-process.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lacuna/lacuna.hpp"

namespace lacuna::cli {

enum ExitCode : int { ok = 0, check_failed = 1, usage = 2, evaluation = 3 };

using Json = report::Json;

/// Effective settings; flags override the --config file, which overrides defaults.
struct RunConfig {
    std::string seq;
    std::string theta;
    std::string modulus = "identity()";
    double eps = 1e-6;
    double tol = 1e-3;
    std::int64_t n_max = 12;
    std::int64_t M = 0; ///< 0 means k_R
    std::int64_t T = 0; ///< 0 means k_R
    std::int64_t window = 0; ///< 0 means ceil(R / 2)
    std::string out_dir;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::int64_t draws = 20;
    std::vector<std::string> suite{"all"};
    std::int64_t n = 1;
    std::string what = "residuals";
    std::string expr;
};

class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class T>
void take(const Json& j, const char* key, T& into)
{
    if (!j.contains(key))
        return;
    try {
        into = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config field '") + key + "': " + e.what());
    }
}

inline void load_config(const std::string& path, RunConfig& c)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw UsageError("config file must hold a JSON object");
    static const std::vector<std::string> known{"seq",    "theta",  "modulus", "eps",  "tol",   "n_max",
                                                "M",      "T",      "window",  "out_dir", "format", "seed",
                                                "draws",  "suite",  "n",       "what", "expr"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw UsageError("config file: unknown field '" + key + "'");
    take(j, "seq", c.seq);
    take(j, "theta", c.theta);
    take(j, "modulus", c.modulus);
    take(j, "eps", c.eps);
    take(j, "tol", c.tol);
    take(j, "n_max", c.n_max);
    take(j, "M", c.M);
    take(j, "T", c.T);
    take(j, "window", c.window);
    take(j, "out_dir", c.out_dir);
    take(j, "format", c.format);
    take(j, "seed", c.seed);
    take(j, "draws", c.draws);
    if (j.contains("suite") && j.at("suite").is_string())
        c.suite = {j.at("suite").get<std::string>()};
    else
        take(j, "suite", c.suite);
    take(j, "n", c.n);
    take(j, "what", c.what);
    take(j, "expr", c.expr);
}

/// Splits comma-separated suite lists so "--suite a,b" and "--suite a --suite b" agree.
inline std::vector<std::string> split_suites(const std::vector<std::string>& in)
{
    std::vector<std::string> out;
    for (const auto& s : in) {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                out.push_back(item);
    }
    return out;
}

inline void require(const std::string& value, const char* flag)
{
    if (value.empty())
        throw UsageError(std::string(flag) + " is required");
}

inline std::filesystem::path output_dir(const RunConfig& c)
{
    std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write '" + path.string() + "'");
    f << text;
}

inline std::string csv_text(std::span<const double> values, std::int64_t first = 1)
{
    std::ostringstream s;
    report::write_csv(s, values, first);
    return s.str();
}

inline ClassifyConfig classify_config(const RunConfig& c)
{
    if (c.n_max < 1 || c.M < 0 || c.T < 0 || c.window < 0)
        throw UsageError("n_max must be >= 1 and M, T, window must be positive");
    ClassifyConfig cc;
    cc.eps = c.eps;
    cc.tol = c.tol;
    cc.n_max = c.n_max;
    cc.horizon_m = c.M;
    cc.horizon_t = c.T;
    cc.window = static_cast<std::size_t>(c.window);
    return cc;
}

inline int analyze(const RunConfig& c, std::ostream& out)
{
    require(c.seq, "--seq");
    require(c.theta, "--theta");
    if (c.format != "json" && c.format != "csv" && c.format != "both")
        throw UsageError("--format must be json, csv or both");
    if (c.format != "json" && c.out_dir.empty())
        throw UsageError("--format " + c.format + " needs --out-dir");

    const Sequence x = dsl::sequence(c.seq);
    const LacunaryPartition theta = dsl::partition(c.theta);
    const Modulus f = dsl::modulus(c.modulus);
    const ClassifyConfig cc = resolve(classify_config(c), theta);
    const ConvergenceReport rep = classify(x, theta, f, cc);

    Json config{{"seq", c.seq}, {"theta", c.theta}, {"modulus", c.modulus}};
    config.update(report::to_json(cc));
    config["format"] = c.format;
    config["out_dir"] = c.out_dir.empty() ? Json(nullptr) : Json(c.out_dir);

    Json results = report::to_json(rep);
    if (c.format != "json") {
        const auto dir = output_dir(c);
        const std::pair<const char*, std::span<const double>> series[] = {
            {"tau.csv", rep.tau.tau},
            {"sigma.csv", rep.sigma.sigma},
            {"sigma_block_max.csv", rep.sigma_block_max},
            {"tau_f.csv", rep.tau_f.tau},
        };
        Json files = Json::array();
        for (const auto& [name, values] : series) {
            write_file(dir / name, csv_text(values));
            files.push_back(name);
        }
        results["csv"] = std::move(files);
    }
    const std::string text = report::envelope(std::move(config), std::move(results)).dump(2) + "\n";
    if (c.format != "csv")
        out << text;
    if (!c.out_dir.empty() && c.format != "csv")
        write_file(output_dir(c) / "report.json", text);
    return ok;
}

inline int theorems_cmd(const RunConfig& c, std::ostream& out)
{
    if (c.draws < 0)
        throw UsageError("--draws must be >= 0");
    theorems::SuiteOptions opt;
    opt.theta = dsl::partition(c.theta.empty() ? "geometric(1, 2, 8)" : c.theta);
    opt.seed = c.seed;
    opt.draws = static_cast<std::size_t>(c.draws);
    opt.suites = split_suites(c.suite);
    if (opt.suites.empty())
        throw UsageError("--suite is empty");
    for (const auto& s : opt.suites)
        if (s != "all" && std::find(theorems::suite_names().begin(), theorems::suite_names().end(), s) ==
                              theorems::suite_names().end())
            throw UsageError("unknown suite '" + s + "'");

    const auto checks = theorems::run_suite(opt);
    Json results = Json::array();
    bool failed = false;
    for (const auto& r : checks) {
        results.push_back(report::to_json(r));
        failed = failed || r.status == theorems::Status::fail;
    }
    Json config{{"theta", c.theta.empty() ? "geometric(1, 2, 8)" : c.theta},
                {"seed", c.seed},
                {"draws", c.draws},
                {"suite", opt.suites},
                {"out_dir", c.out_dir.empty() ? Json(nullptr) : Json(c.out_dir)}};
    const std::string text = report::envelope(std::move(config), std::move(results)).dump(2) + "\n";
    out << text;
    if (!c.out_dir.empty())
        write_file(output_dir(c) / "theorems.json", text);
    return failed ? check_failed : ok;
}

inline int parse_cmd(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const auto res = dsl::parse(c.expr);
    if (!res) {
        const auto& e = res.error();
        err << "parse error at offset " << e.position << ": " << e.message;
        if (!e.expected.empty()) {
            err << " (expected ";
            for (std::size_t i = 0; i < e.expected.size(); ++i)
                err << (i ? ", " : "") << e.expected[i];
            err << ")";
        }
        err << "\n  " << c.expr << "\n  " << std::string(e.position, ' ') << "^\n";
        return usage;
    }
    out << dsl::pretty(res.ast());
    return ok;
}

inline int export_cmd(const RunConfig& c, std::ostream& out)
{
    require(c.seq, "--seq");
    require(c.theta, "--theta");
    const Sequence x = dsl::sequence(c.seq);
    const LacunaryPartition theta = dsl::partition(c.theta);
    const Modulus f = dsl::modulus(c.modulus);
    const ClassifyConfig cc = resolve(classify_config(c), theta);
    if (c.n < 1)
        throw UsageError("--n must be >= 1");

    const auto res = residuals(x, c.n, std::max(cc.horizon_m, cc.horizon_t));
    std::string text;
    if (c.what == "residuals")
        text = csv_text(res.values);
    else if (c.what == "tau")
        text = csv_text(block_means(res, theta).tau);
    else if (c.what == "sigma")
        text = csv_text(cesaro_means(res, cc.horizon_t).sigma);
    else if (c.what == "sigma_block_max")
        text = csv_text(block_maxima(cesaro_means(res, cc.horizon_t), theta));
    else if (c.what == "tau_f")
        text = csv_text(modulus_block_means(res, theta, f).tau);
    else
        throw UsageError("--what must be residuals, tau, sigma, sigma_block_max or tau_f");

    if (c.out_dir.empty())
        out << text;
    else
        write_file(output_dir(c) / (c.what + ".csv"), text);
    return ok;
}

} // namespace detail

/// Runs one invocation; args excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Arithmetic and lacunary convergence diagnostics", "lacuna"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    RunConfig flags;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with RunConfig fields");

    std::vector<CLI::Option*> given;
    auto common = [&](CLI::App* sub, bool classify_flags) {
        given.push_back(sub->add_option("--seq", flags.seq, "sequence expression"));
        given.push_back(sub->add_option("--theta", flags.theta, "partition expression"));
        given.push_back(sub->add_option("--out-dir", flags.out_dir, "directory for written files"));
        if (!classify_flags)
            return;
        given.push_back(sub->add_option("--modulus", flags.modulus, "modulus expression"));
        given.push_back(sub->add_option("--eps", flags.eps, "AC threshold"));
        given.push_back(sub->add_option("--tol", flags.tol, "verdict threshold"));
        given.push_back(sub->add_option("--n-max", flags.n_max, "witness scan range"));
        given.push_back(sub->add_option("--M", flags.M, "AC horizon"));
        given.push_back(sub->add_option("--T", flags.T, "Cesaro horizon"));
        given.push_back(sub->add_option("--window", flags.window, "tail window in blocks"));
    };

    auto* analyze = app.add_subcommand("analyze", "classify a sequence");
    common(analyze, true);
    given.push_back(analyze->add_option("--format", flags.format, "json, csv or both"));

    auto* theorems = app.add_subcommand("theorems", "run theorem-check suites");
    common(theorems, false);
    given.push_back(theorems->add_option("--suite", flags.suite, "suite names or all"));
    given.push_back(theorems->add_option("--seed", flags.seed, "generator seed"));
    given.push_back(theorems->add_option("--draws", flags.draws, "random draws per suite"));

    auto* parse = app.add_subcommand("parse", "parse an expression and print its tree");
    given.push_back(parse->add_option("--expr", flags.expr, "expression")->required());

    auto* exporter = app.add_subcommand("export", "write residuals or means as CSV");
    common(exporter, true);
    given.push_back(exporter->add_option("--what", flags.what, "residuals, tau, sigma, sigma_block_max or tau_f"));
    given.push_back(exporter->add_option("--n", flags.n, "witness n"));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return usage;
    }

    try {
        RunConfig c;
        if (!config_path.empty())
            detail::load_config(config_path, c);
        // Copy only flags the user actually gave.
        auto overlay = [&](const char* name, auto member) {
            for (auto* o : given)
                if (o->get_name() == name && o->count() > 0)
                    c.*member = flags.*member;
        };
        overlay("--seq", &RunConfig::seq);
        overlay("--theta", &RunConfig::theta);
        overlay("--out-dir", &RunConfig::out_dir);
        overlay("--modulus", &RunConfig::modulus);
        overlay("--eps", &RunConfig::eps);
        overlay("--tol", &RunConfig::tol);
        overlay("--n-max", &RunConfig::n_max);
        overlay("--M", &RunConfig::M);
        overlay("--T", &RunConfig::T);
        overlay("--window", &RunConfig::window);
        overlay("--format", &RunConfig::format);
        overlay("--suite", &RunConfig::suite);
        overlay("--seed", &RunConfig::seed);
        overlay("--draws", &RunConfig::draws);
        overlay("--expr", &RunConfig::expr);
        overlay("--what", &RunConfig::what);
        overlay("--n", &RunConfig::n);

        if (analyze->parsed())
            return detail::analyze(c, out);
        if (theorems->parsed())
            return detail::theorems_cmd(c, out);
        if (parse->parsed())
            return detail::parse_cmd(c, out, err);
        return detail::export_cmd(c, out);
    } catch (const EvalError& e) {
        err << "evaluation error: " << e.what() << "\n";
        return evaluation;
    } catch (const LowerError& e) {
        err << "error at offset " << e.span().begin << ": " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
}

} // namespace lacuna::cli
