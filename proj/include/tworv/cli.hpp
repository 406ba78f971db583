#ifndef TWORV_CLI_HPP
#define TWORV_CLI_HPP

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tworv/approx.hpp"
#include "tworv/bivariate.hpp"
#include "tworv/compound.hpp"
#include "tworv/error.hpp"
#include "tworv/fit.hpp"
#include "tworv/rmm.hpp"

namespace tworv::cli {

using nlohmann::json;

/// Command-line request contract error (exit code 2).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CommandRequest {
    std::string subcommand;
    std::optional<std::string> params_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // applied after the file
    std::optional<std::string> output_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
};

struct RunReport {
    int exit_code = 0;  // 0 ok, 2 usage, 3 numerical, 4 infeasible fit
    json payload;
    std::vector<std::string> diagnostics;
};

inline const char* usage_text() {
    return "usage: tworv <pdf|moments|fit|sample|map|compound|verify>\n"
           "             [--params FILE] [--out FILE] [--format json|csv] [--seed N]\n"
           "             [--<field> VALUE ...] [field=value ...]\n"
           "fields are the parameter names of the subcommand's record, e.g.\n"
           "  tworv pdf --preset exponential --z 1\n"
           "  tworv fit --mean 1 --var 1\n"
           "  tworv sample --params biv.json --n 1000 --seed 7 --out w.csv --format csv\n"
           "  tworv map --family weibull b=1 c=2\n"
           "  tworv compound --p 0.5 --rate 1 --convention from-one --n 100000\n";
}

namespace detail {

// flag spelling -> override key
inline const std::map<std::string, std::string>& flag_aliases() {
    static const std::map<std::string, std::string> m = {
        {"--preset", "preset"},   {"--z", "z"},           {"--w", "w"},
        {"--alpha", "alpha"},
        {"--lambda", "lambda"},   {"--L", "L"},           {"--kappa", "kappa"},
        {"--max-k", "max_k"},     {"--mean", "mean"},     {"--var", "variance"},
        {"--variance", "variance"},
        {"--mode-density", "mode_density"},
        {"--std-mean", "standardized_mean"},
        {"--M1", "M1"},           {"--sigma1", "sigma1"}, {"--sigma2", "sigma2"},
        {"--n", "n"},             {"--family", "family"}, {"--b", "b"},
        {"--c", "c"},             {"--a", "a"},           {"--k", "k"},
        {"--m", "m"},             {"--mu", "mu"},         {"--sigma", "sigma"},
        {"--p", "p"},             {"--rate", "rate"},     {"--convention", "convention"},
        {"--tol", "tol"},
    };
    return m;
}

} // namespace detail

/// Parse an argument vector (without the program name).
inline CommandRequest parse_request(const std::vector<std::string>& args) {
    static const std::vector<std::string> subcommands = {"pdf",    "moments",  "fit",
                                                         "sample", "map",      "compound",
                                                         "verify"};
    if (args.empty()) throw UsageError("missing subcommand");
    CommandRequest req;
    req.subcommand = args[0];
    bool known = false;
    for (const auto& s : subcommands) known = known || s == req.subcommand;
    if (!known) throw UsageError("unknown subcommand '" + args[0] + "'");

    auto need_value = [&](std::size_t i) -> const std::string& {
        if (i + 1 >= args.size())
            throw UsageError("flag '" + args[i] + "' expects a value");
        return args[i + 1];
    };

    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& tok = args[i];
        if (tok == "--params") { req.params_path = need_value(i); ++i; continue; }
        if (tok == "--out") { req.output_path = need_value(i); ++i; continue; }
        if (tok == "--format") {
            req.format = need_value(i); ++i;
            if (req.format != "json" && req.format != "csv")
                throw UsageError("unknown format '" + req.format + "'");
            continue;
        }
        if (tok == "--seed") {
            try { req.seed = std::stoull(need_value(i)); }
            catch (const std::exception&) { throw UsageError("bad seed '" + args[i + 1] + "'"); }
            ++i; continue;
        }
        if (tok.rfind("--", 0) == 0) {
            auto it = detail::flag_aliases().find(tok);
            if (it == detail::flag_aliases().end())
                throw UsageError("unknown flag '" + tok + "'");
            req.overrides.emplace_back(it->second, need_value(i));
            ++i; continue;
        }
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("expected flag or key=value, got '" + tok + "'");
        req.overrides.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return req;
}

/// Read a parameter file into a JSON object; diagnostics carry line/column.
inline json load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open params file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw UsageError("params file '" + path + "' must hold an object");
        return j;
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t b = 0; b + 1 < e.byte && b < text.size(); ++b) {
            if (text[b] == '\n') { ++line; col = 1; } else ++col;
        }
        throw UsageError("malformed params file '" + path + "' at line " +
                         std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what());
    }
}

namespace detail {

// merged value bag: file contents overlaid by inline overrides
inline json value_bag(const CommandRequest& req) {
    json bag = json::object();
    if (req.params_path) bag = load_params(*req.params_path);
    for (const auto& [key, raw] : req.overrides) {
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used == raw.size()) { bag[key] = v; continue; }
        } catch (const std::exception&) {}
        bag[key] = raw;  // non-numeric values stay strings (preset names etc.)
    }
    return bag;
}

inline double require_number(const json& bag, const std::string& key) {
    if (!bag.contains(key)) throw UsageError("missing required field \"" + key + "\"");
    if (!bag[key].is_number())
        throw UsageError("field \"" + key + "\" must be numeric");
    return bag[key].get<double>();
}

inline double number_or(const json& bag, const std::string& key, double fallback) {
    return bag.contains(key) ? require_number(bag, key) : fallback;
}

inline std::string require_string(const json& bag, const std::string& key) {
    if (!bag.contains(key)) throw UsageError("missing required field \"" + key + "\"");
    if (!bag[key].is_string()) throw UsageError("field \"" + key + "\" must be a string");
    return bag[key].get<std::string>();
}

inline rmm::RmmParams rmm_params_from(const json& bag) {
    if (bag.contains("preset")) {
        const std::string name = require_string(bag, "preset");
        std::optional<double> alpha;
        if (bag.contains("alpha")) alpha = require_number(bag, "alpha");
        if (name == "exponential") return rmm::preset(rmm::Preset::Exponential);
        if (name == "normal") return rmm::preset(rmm::Preset::Normal);
        if (name == "pareto") return rmm::preset(rmm::Preset::Pareto, alpha);
        if (name == "power") return rmm::preset(rmm::Preset::PowerFunction, alpha);
        if (name == "uniform") return rmm::preset(rmm::Preset::Uniform);
        throw UsageError("unknown preset '" + name + "'");
    }
    const double alpha = require_number(bag, "alpha");
    const double lambda = require_number(bag, "lambda");
    const double L = require_number(bag, "L");
    if (bag.contains("kappa"))
        return {alpha, lambda, L, require_number(bag, "kappa")};
    return rmm::make_params(alpha, lambda, L);
}

inline json rmm_params_json(const rmm::RmmParams& p) {
    return {{"alpha", p.alpha}, {"lambda", p.lambda}, {"L", p.L}, {"kappa", p.kappa}};
}

inline bivariate::BivariateParams bivariate_params_from(const json& bag) {
    return bivariate::make_params(require_number(bag, "lambda"), require_number(bag, "M1"),
                                  require_number(bag, "sigma1"), require_number(bag, "sigma2"));
}

inline json run_pdf(const json& bag) {
    if (bag.contains("w")) {  // marginal density of the product model
        const auto p = bivariate_params_from(bag);
        const double w = require_number(bag, "w");
        const double tol = number_or(bag, "tol", 1e-9);
        json out;
        out["params"] = {{"lambda", p.lambda},   {"M1", p.M1},
                         {"sigma1", p.sigma1},   {"sigma2", p.sigma2},
                         {"kappa1", p.kappa1},   {"kappa2", p.kappa2}};
        out["w"] = w;
        out["pdf"] = bivariate::marginal_pdf_w(w, p, tol);
        return out;
    }
    const auto p = rmm_params_from(bag);
    const double z = require_number(bag, "z");
    json out;
    out["params"] = rmm_params_json(p);
    out["z"] = z;
    out["pdf"] = rmm::rmm_pdf(z, p);
    if (p.alpha == 0.0 || p.lambda >= rmm::kLogLimit) out["mode_density"] = rmm::mode_density(p);
    return out;
}

inline json run_moments(const json& bag) {
    const double alpha = require_number(bag, "alpha");
    const double lambda = require_number(bag, "lambda");
    const double L = require_number(bag, "L");
    const int max_k = int(number_or(bag, "max_k", 2));
    json out;
    out["kappa"] = rmm::normalizer(alpha, lambda, L);
    json moments = json::array();
    for (int k = 0; k <= max_k; ++k)
        moments.push_back({{"k", k}, {"value", rmm::raw_moment(k, alpha, lambda, L)}});
    out["moments"] = moments;
    return out;
}

inline json run_fit(const json& bag) {
    if (bag.contains("mode_density")) {
        fit::ModeMeanTarget t{require_number(bag, "mode_density"),
                              require_number(bag, "standardized_mean")};
        const auto r = fit::fit_mode_mean(t);
        return {{"method", "mode_mean"},
                {"alpha", r.alpha},
                {"lambda", r.lambda},
                {"kappa", r.kappa},
                {"residual", r.residual}};
    }
    fit::MomentTarget t{require_number(bag, "mean"), require_number(bag, "variance")};
    const auto r = fit::fit_two_component(t);
    return {{"method", "two_component"},
            {"lambda", r.lambda},
            {"M1", r.M1},
            {"sigma2", r.sigma2},
            {"sigma1", r.sigma1},
            {"residual", r.residual},
            {"status", fit::to_string(r.status)}};
}

inline json run_sample(const json& bag, std::uint64_t seed) {
    const auto p = bivariate_params_from(bag);
    const double n_raw = require_number(bag, "n");
    if (!(n_raw >= 1.0)) throw UsageError("field \"n\" must be >= 1");
    const auto samples = bivariate::sample_w(p, std::size_t(n_raw), seed);
    json out;
    out["params"] = {{"lambda", p.lambda},   {"M1", p.M1},
                     {"sigma1", p.sigma1},   {"sigma2", p.sigma2},
                     {"kappa1", p.kappa1},   {"kappa2", p.kappa2}};
    out["n"] = samples.size();
    out["seed"] = seed;
    out["model_mean"] = bivariate::model_mean(p);
    out["model_var"] = bivariate::model_var(p);
    out["samples"] = samples;
    return out;
}

inline approx::MappedDistribution mapped_from(const json& bag, std::string& family) {
    family = require_string(bag, "family");
    if (family == "weibull")
        return approx::map_weibull(require_number(bag, "b"), require_number(bag, "c"));
    if (family == "generalized_gamma")
        return approx::map_generalized_gamma(number_or(bag, "a", 0.0), require_number(bag, "b"),
                                             require_number(bag, "c"), require_number(bag, "k"));
    if (family == "gamma")
        return approx::map_gamma(require_number(bag, "b"), require_number(bag, "c"));
    if (family == "exponential") return approx::map_exponential(require_number(bag, "b"));
    if (family == "chi_squared") return approx::map_chi_squared(require_number(bag, "n"));
    if (family == "f") return approx::map_f(require_number(bag, "m"), require_number(bag, "n"));
    if (family == "lognormal")
        return approx::map_lognormal(number_or(bag, "mu", 0.0), require_number(bag, "sigma"));
    if (family == "student_t") return approx::map_student_t(require_number(bag, "m"));
    if (family == "cauchy")
        return approx::map_cauchy(number_or(bag, "a", 0.0), require_number(bag, "b"));
    throw UsageError("unknown family '" + family + "'");
}

inline std::function<double(double)> reference_for(const std::string& family, const json& bag) {
    using namespace approx::references;
    if (family == "weibull") return weibull_logpdf(require_number(bag, "b"), require_number(bag, "c"));
    if (family == "generalized_gamma")
        return generalized_gamma_logpdf(number_or(bag, "a", 0.0), require_number(bag, "b"),
                                        require_number(bag, "c"), require_number(bag, "k"));
    if (family == "gamma")
        return generalized_gamma_logpdf(0.0, require_number(bag, "b"), require_number(bag, "c"), 1.0);
    if (family == "exponential")
        return generalized_gamma_logpdf(0.0, require_number(bag, "b"), 1.0, 1.0);
    if (family == "chi_squared")
        return generalized_gamma_logpdf(0.0, 2.0, require_number(bag, "n") / 2.0, 1.0);
    if (family == "f") return f_logpdf(require_number(bag, "m"), require_number(bag, "n"));
    if (family == "lognormal")
        return lognormal_logpdf(number_or(bag, "mu", 0.0), require_number(bag, "sigma"));
    if (family == "student_t") return student_t_logpdf(require_number(bag, "m"));
    if (family == "cauchy")
        return cauchy_logpdf(number_or(bag, "a", 0.0), require_number(bag, "b"));
    throw UsageError("unknown family '" + family + "'");
}

inline json run_map(const json& bag) {
    std::string family;
    const auto mapped = mapped_from(bag, family);
    const auto ref = reference_for(family, bag);
    const double lo = std::max(mapped.support_lo + 0.01, 0.01);
    const double grid_hi = number_or(bag, "grid_hi", lo + 8.0);
    const double dev =
        approx::verify_mapping(mapped, ref, approx::uniform_grid(lo, grid_hi, 200));
    const auto& p = mapped.params;
    return {{"family", family},
            {"params",
             {{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"alpha1", p.alpha1},
              {"alpha2", p.alpha2},   {"beta0", p.beta0},     {"beta1", p.beta1}}},
            {"weight_sum", approx::weight_sum(p)},
            {"verify_deviation", dev},
            {"pass", dev <= 1e-9}};
}

inline json run_compound(const json& bag, std::uint64_t seed, std::vector<std::string>& notes) {
    compound::RandomSumSpec spec;
    spec.p = require_number(bag, "p");
    spec.rate = number_or(bag, "rate", 1.0);
    std::string conv = "from-one";
    if (bag.contains("convention")) conv = require_string(bag, "convention");
    if (conv == "from-zero") spec.support = compound::Support::FromZero;
    else if (conv == "from-one") spec.support = compound::Support::FromOne;
    else throw UsageError("unknown convention '" + conv + "' (use from-zero or from-one)");
    const double n_raw = number_or(bag, "n", 100000.0);
    if (!(n_raw >= 1.0)) throw UsageError("field \"n\" must be >= 1");

    const auto [mean_cf, var_cf] = compound::geometric_exponential_moments(spec);
    const auto [sim, samples] = compound::simulate_random_sum(spec, std::size_t(n_raw), seed);
    json out;
    out["spec"] = {{"p", spec.p}, {"rate", spec.rate}, {"convention", conv}};
    out["seed"] = seed;
    out["closed_form"] = {{"mean", mean_cf}, {"variance", var_cf}};
    out["sim"] = {{"n", sim.n},
                  {"mean", sim.mean},
                  {"variance", sim.variance},
                  {"zero_fraction", sim.zero_fraction},
                  {"ks_stat", sim.ks_stat}};
    out["ks_critical_1pct"] = compound::ks_critical(sim.n, 0.01);
    if (spec.support == compound::Support::FromZero) {
        std::ostringstream note;
        note << "from-zero convention: closed-form sd " << std::sqrt(var_cf)
             << " differs from mean " << mean_cf << ", and the sum carries an atom at zero "
             << "(empirical fraction " << sim.zero_fraction
             << "), so it cannot be exponential; the mean-equals-sd identity holds under "
             << "from-one, where the sum is exponential with rate p*rate for every p";
        notes.push_back(note.str());
        out["discrepancy"] = notes.back();
    }
    return out;
}

inline json run_verify() {
    json table = json::array();
    bool all = true;
    for (const auto& entry : approx::mapping_gallery()) {
        const double dev = approx::verify_mapping(
            entry.mapped, entry.reference, approx::uniform_grid(entry.grid_lo, entry.grid_hi, 200));
        const bool pass = dev <= 1e-9;
        all = all && pass;
        table.push_back({{"family", entry.mapped.name},
                         {"weight_sum", approx::weight_sum(entry.mapped.params)},
                         {"deviation", dev},
                         {"pass", pass}});
    }
    return {{"mappings", table}, {"all_pass", all}};
}

} // namespace detail

/// Route a validated request to the implementing module.
inline RunReport execute(const CommandRequest& req) {
    RunReport report;
    const std::uint64_t seed = req.seed.value_or(42);
    if (!req.seed && (req.subcommand == "sample" || req.subcommand == "compound"))
        report.diagnostics.push_back("seed not supplied; using default 42");
    try {
        const json bag = detail::value_bag(req);
        if (req.subcommand == "pdf") report.payload = detail::run_pdf(bag);
        else if (req.subcommand == "moments") report.payload = detail::run_moments(bag);
        else if (req.subcommand == "fit") report.payload = detail::run_fit(bag);
        else if (req.subcommand == "sample") report.payload = detail::run_sample(bag, seed);
        else if (req.subcommand == "map") report.payload = detail::run_map(bag);
        else if (req.subcommand == "compound")
            report.payload = detail::run_compound(bag, seed, report.diagnostics);
        else if (req.subcommand == "verify") {
            report.payload = detail::run_verify();
            if (!report.payload["all_pass"].get<bool>()) {
                report.exit_code = 3;
                report.diagnostics.push_back("one or more mappings failed verification");
            }
        }
    } catch (const UsageError& e) {
        report.exit_code = 2;
        report.diagnostics.push_back(e.what());
    } catch (const ParameterError& e) {
        report.exit_code = 2;
        report.diagnostics.push_back(e.what());
    } catch (const FitError& e) {
        report.exit_code = 4;
        report.diagnostics.push_back(e.what());
    } catch (const DomainError& e) {
        report.exit_code = 3;
        report.diagnostics.push_back(e.what());
    } catch (const NumericalError& e) {
        report.exit_code = 3;
        report.diagnostics.push_back(e.what());
    }
    return report;
}

/// Serialize a report. CSV applies to sample batches ("index,w" rows); JSON is
/// pretty-printed with lossless numeric round-trip.
inline std::string render(const RunReport& report, const std::string& format) {
    if (format == "csv") {
        if (!report.payload.contains("samples"))
            throw UsageError("csv format applies to commands producing sample batches");
        std::string out = "index,w\n";
        std::size_t i = 0;
        char buf[64];
        for (const auto& v : report.payload["samples"]) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i++, v.get<double>());
            out += buf;
        }
        return out;
    }
    return report.payload.dump(2) + "\n";
}

inline void write_output(const RunReport& report, const std::optional<std::string>& path,
                         const std::string& format, std::ostream& fallback = std::cout) {
    const std::string text = render(report, format);
    if (path) {
        std::ofstream out(*path, std::ios::binary);
        if (!out) throw UsageError("cannot open output file '" + *path + "'");
        out << text;
    } else {
        fallback << text;
    }
}

/// Full command entry point used by the binary; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CommandRequest req;
    try {
        req = parse_request(args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << usage_text();
        return 2;
    }
    RunReport report = execute(req);
    for (const auto& d : report.diagnostics) err << "note: " << d << "\n";
    if (report.exit_code != 0) {
        err << "error (exit " << report.exit_code << ")\n";
        return report.exit_code;
    }
    try {
        write_output(report, req.output_path, req.format, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace tworv::cli

#endif
