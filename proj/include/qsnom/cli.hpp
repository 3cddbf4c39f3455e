#pragma once

// qsnom command-line harness: simulate | sweep | invert | oracle-check.
//
// Exit codes: 0 success, 2 config/validation, 3 model/runtime, 4 I/O.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qsnom/closed_forms.hpp"
#include "qsnom/config.hpp"
#include "qsnom/csv.hpp"
#include "qsnom/error.hpp"
#include "qsnom/metrology.hpp"

namespace qsnom::cli {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { Success = 0, ConfigError = 2, ModelError = 3, IoError = 4 };

enum class LogLevel { Quiet, Info, Debug };

inline LogLevel log_level_from_env()
{
    const char* v = std::getenv("QSNOM_LOG");
    if (!v)
        return LogLevel::Info;
    const std::string s = v;
    if (s == "quiet")
        return LogLevel::Quiet;
    if (s == "debug")
        return LogLevel::Debug;
    return LogLevel::Info;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    LogLevel level = LogLevel::Info;

    void info(const std::string& msg) const
    {
        if (level != LogLevel::Quiet)
            err << "[info] " << msg << '\n';
    }
    void debug(const std::string& msg) const
    {
        if (level == LogLevel::Debug)
            err << "[debug] " << msg << '\n';
    }
    void error(const std::string& msg) const { err << "error: " << msg << '\n'; }
};

struct Invocation {
    std::string command;
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> out_path;
};

// ---------------------------------------------------------------------------
// Config -> typed parameters. Each check names the config key it rejects.
// ---------------------------------------------------------------------------

namespace detail {

inline void require(bool ok, const std::string& key, const std::string& rule, double got)
{
    if (!ok)
        throw Error(ErrorKind::Config, key + ": must be " + rule + " (got " + csv::format_number(got) + ")");
}

inline ShiftModel parse_shift_model(const config::KeyValues& kv)
{
    const auto& s = kv.at("shift_model");
    if (s == "paper")
        return ShiftModel::Paper;
    if (s == "oracle")
        return ShiftModel::Oracle;
    throw Error(ErrorKind::Config, "shift_model: must be 'paper' or 'oracle' (got '" + s + "')");
}

inline ForwardParams forward_params(const config::KeyValues& kv)
{
    ForwardParams fp;
    fp.epsilon_d = config::get_double(kv, "epsilon_d");
    require(fp.epsilon_d >= 1.0 && std::isfinite(fp.epsilon_d), "epsilon_d", "a finite value >= 1", fp.epsilon_d);
    fp.R = config::get_double(kv, "R_nm");
    require(fp.R > 0.0 && std::isfinite(fp.R), "R_nm", "> 0", fp.R);
    fp.omega = config::get_double(kv, "omega_eV");
    require(fp.omega > 0.0 && std::isfinite(fp.omega), "omega_eV", "> 0", fp.omega);
    fp.kappa = config::get_double(kv, "kappa");
    require(fp.kappa > 0.0 && std::isfinite(fp.kappa), "kappa", "> 0", fp.kappa);
    const auto n_max = config::get_uint(kv, "n_max");
    require(n_max >= 1, "n_max", ">= 1", static_cast<double>(n_max));
    fp.n_max = n_max;
    fp.photon_energy = config::get_optional_double(kv, "photon_energy_eV");
    if (fp.photon_energy)
        require(*fp.photon_energy > 0.0, "photon_energy_eV", "> 0", *fp.photon_energy);
    fp.near_field_factor = config::get_double(kv, "near_field_factor");
    require(fp.near_field_factor > 0.0, "near_field_factor", "> 0", fp.near_field_factor);
    fp.model = parse_shift_model(kv);
    const double tol_deg = config::get_double(kv, "tol_deg");
    require(tol_deg >= 0.0, "tol_deg", ">= 0", tol_deg);
    config::get_uint(kv, "seed");
    return fp;
}

inline std::string warnings_field(const std::vector<std::string>& w) { return csv::join(w, "; "); }

inline int write_file(const Context& ctx, const std::string& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        ctx.error("cannot open output path '" + path + "' for writing");
        return IoError;
    }
    os << content;
    os.flush();
    if (!os) {
        ctx.error("failed writing '" + path + "'");
        return IoError;
    }
    return Success;
}

inline std::string meta_path(const std::string& out)
{
    return std::filesystem::path(out).replace_extension(".meta").string();
}

inline std::string meta_text(const Invocation& inv, const config::KeyValues& kv, const std::vector<std::string>& notes)
{
    std::ostringstream os;
    os << "artifact=qsnom\n";
    os << "version=" << version << '\n';
    os << "command=" << inv.command << '\n';
    for (const auto& [k, v] : kv)
        os << "config." << k << '=' << v << '\n';
    for (std::size_t i = 0; i < notes.size(); ++i)
        os << "note." << i << '=' << notes[i] << '\n';
    return os.str();
}

// Writes `content` to --out and its .meta sidecar, if --out was given.
inline int emit(const Context& ctx, const Invocation& inv, const config::KeyValues& kv, const std::string& content,
                const std::vector<std::string>& notes)
{
    if (!inv.out_path)
        return Success;
    if (int rc = write_file(ctx, *inv.out_path, content); rc != Success)
        return rc;
    if (int rc = write_file(ctx, meta_path(*inv.out_path), meta_text(inv, kv, notes)); rc != Success)
        return rc;
    ctx.info("wrote " + *inv.out_path);
    return Success;
}

inline int model_failure(const Context& ctx, const Error& e)
{
    ctx.error(e.what());
    return is_validation_error(e.kind()) ? ConfigError : ModelError;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int cmd_simulate(const Context& ctx, const Invocation& inv, const config::KeyValues& kv)
{
    const auto fp = detail::forward_params(kv);
    ForwardResult r;
    try {
        r = forward(fp);
    } catch (const Error& e) {
        return detail::model_failure(ctx, e);
    }
    using csv::format_number;
    std::ostringstream os;
    os << "epsilon_d=" << format_number(fp.epsilon_d) << '\n';
    os << "alpha=" << format_number(r.alpha) << '\n';
    os << "g_eV=" << format_number(r.g) << '\n';
    os << "shift_model=" << to_string(fp.model) << '\n';
    os << "delta_e_eV=" << format_number(r.delta_e) << '\n';
    os << "delta_e_paper_eV=" << format_number(r.delta_e_paper) << '\n';
    os << "delta_e_oracle_eV=" << format_number(r.delta_e_oracle) << '\n';
    os << "omega_s=" << format_number(r.omega_s) << '\n';
    os << "beta=";
    for (std::size_t j = 0; j < 4; ++j)
        os << (j ? "," : "") << format_number(r.beta.beta[j]);
    os << '\n';
    os << "amplitude=" << format_number(r.amplitude) << '\n';
    os << "probability_weight=" << format_number(r.amplitude * r.amplitude) << '\n';
    os << "near_field_ratio=" << format_number(r.near_field.ratio) << '\n';
    os << "near_field=" << (r.near_field.pass ? "pass" : "fail") << '\n';
    os << "warnings=" << (r.warnings.empty() ? "none" : detail::warnings_field(r.warnings)) << '\n';
    const auto report = os.str();
    ctx.out << report;
    for (const auto& w : r.warnings)
        ctx.info("warning: " + w);
    return detail::emit(ctx, inv, kv, report, r.warnings);
}

inline SweepSpec sweep_spec(const config::KeyValues& kv)
{
    SweepSpec s;
    s.fixed = detail::forward_params(kv);
    const auto axis = parse_axis(kv.at("sweep.axis"));
    if (!axis)
        throw Error(ErrorKind::Config, "sweep.axis: must be one of epsilon_d, R_nm, omega_eV, kappa (got '" +
                                           kv.at("sweep.axis") + "')");
    s.axis = *axis;

    if (!config::trim(kv.at("sweep.values")).empty()) {
        s.values = config::get_number_list(kv, "sweep.values");
    } else {
        const auto start = config::get_optional_double(kv, "sweep.start");
        const auto stop = config::get_optional_double(kv, "sweep.stop");
        if (!start || !stop || config::trim(kv.at("sweep.count")).empty())
            throw Error(ErrorKind::Config, "sweep.values: give a list or sweep.start/sweep.stop/sweep.count");
        const auto count = config::get_uint(kv, "sweep.count");
        detail::require(count >= 2, "sweep.count", ">= 2", static_cast<double>(count));
        const auto& scale = kv.at("sweep.scale");
        if (scale == "linear")
            s.values = linspace(*start, *stop, count);
        else if (scale == "log") {
            detail::require(*start > 0.0 && *stop > 0.0, "sweep.start", "> 0 with sweep.stop > 0 for log scale",
                            *start);
            s.values = logspace(*start, *stop, count);
        } else
            throw Error(ErrorKind::Config, "sweep.scale: must be 'linear' or 'log' (got '" + scale + "')");
    }

    // "all" selects every column; an explicitly empty selection fails validation.
    if (config::trim(kv.at("sweep.outputs")) != "all")
        s.outputs = config::get_list(kv, "sweep.outputs");
    try {
        validate(s);
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("sweep: ") + e.what());
    }
    return s;
}

inline std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    using csv::format_number;
    std::ostringstream os;
    std::vector<std::string> header{std::string(axis_name(spec.axis))};
    header.insert(header.end(), spec.outputs.begin(), spec.outputs.end());
    csv::write_row(os, header);
    for (const auto& row : rows) {
        std::vector<std::string> f{format_number(row.axis_value)};
        for (const auto& col : spec.outputs) {
            if (col == "error") {
                f.push_back(row.error);
                continue;
            }
            if (!row.result) {
                f.emplace_back();
                continue;
            }
            const auto& r = *row.result;
            if (col == "alpha") f.push_back(format_number(r.alpha));
            else if (col == "g_eV") f.push_back(format_number(r.g));
            else if (col == "delta_e_paper_eV") f.push_back(format_number(r.delta_e_paper));
            else if (col == "delta_e_oracle_eV") f.push_back(format_number(r.delta_e_oracle));
            else if (col == "omega_s") f.push_back(format_number(r.omega_s));
            else if (col == "amplitude") f.push_back(format_number(r.amplitude));
            else if (col == "near_field_ratio") f.push_back(format_number(r.near_field.ratio));
            else if (col == "warnings") f.push_back(detail::warnings_field(r.warnings));
        }
        csv::write_row(os, f);
    }
    return os.str();
}

inline int cmd_sweep(const Context& ctx, const Invocation& inv, const config::KeyValues& kv)
{
    if (!inv.out_path) {
        ctx.error("--out: required for sweep");
        return ConfigError;
    }
    const auto spec = sweep_spec(kv);
    const auto rows = run_sweep(spec);
    std::size_t failed = 0;
    for (const auto& r : rows)
        failed += r.result ? 0 : 1;
    ctx.out << "sweep " << axis_name(spec.axis) << ": " << rows.size() << " rows, " << failed << " with errors\n";
    return detail::emit(ctx, inv, kv, sweep_csv(spec, rows), {});
}

inline InversionProblem inversion_problem(const config::KeyValues& kv)
{
    const auto fp = detail::forward_params(kv);
    InversionProblem p;
    const auto observed = config::get_optional_double(kv, "observed_omega_s");
    if (!observed)
        throw Error(ErrorKind::Config, "observed_omega_s: required for invert");
    p.observed_omega_s = *observed;
    p.R = fp.R;
    p.omega = fp.omega;
    p.kappa = fp.kappa;
    p.model = fp.model;
    p.eps_lo = config::get_double(kv, "bracket_lo");
    detail::require(p.eps_lo > 1.0, "bracket_lo", "> 1", p.eps_lo);
    p.eps_hi = config::get_double(kv, "bracket_hi");
    detail::require(p.eps_hi > p.eps_lo && std::isfinite(p.eps_hi), "bracket_hi", "finite and > bracket_lo", p.eps_hi);
    p.tol_rel = config::get_double(kv, "tol_rel");
    detail::require(p.tol_rel > 0.0, "tol_rel", "> 0", p.tol_rel);
    p.max_iter = config::get_uint(kv, "max_iter");
    detail::require(p.max_iter >= 1, "max_iter", ">= 1", static_cast<double>(p.max_iter));
    return p;
}

inline int cmd_invert(const Context& ctx, const Invocation& inv, const config::KeyValues& kv)
{
    const auto p = inversion_problem(kv);
    InversionResult r;
    try {
        r = invert_permittivity(p);
    } catch (const Error& e) {
        return detail::model_failure(ctx, e);
    }
    using csv::format_number;
    std::ostringstream os;
    os << "observed_omega_s=" << format_number(p.observed_omega_s) << '\n';
    os << "shift_model=" << to_string(p.model) << '\n';
    os << "epsilon_d=" << format_number(r.epsilon_d) << '\n';
    os << "alpha=" << format_number(image_alpha({r.epsilon_d})) << '\n';
    os << "iterations=" << r.iterations << '\n';
    os << "residual=" << format_number(r.residual) << '\n';
    const auto report = os.str();
    ctx.out << report;
    return detail::emit(ctx, inv, kv, report, {});
}

inline ConsistencyConfig consistency_config(const config::KeyValues& kv)
{
    const auto fp = detail::forward_params(kv);
    ConsistencyConfig c;
    c.omega = fp.omega;
    c.kappa = fp.kappa;
    c.n_max = fp.n_max;
    c.photon_energy = fp.photon_energy;
    c.engine.tol_deg = config::get_double(kv, "tol_deg");
    c.alphas = config::get_number_list(kv, "oracle.alpha_values");
    c.radii = config::get_number_list(kv, "oracle.R_values");
    if (c.alphas.empty())
        throw Error(ErrorKind::Config, "oracle.alpha_values: empty");
    if (c.radii.empty())
        throw Error(ErrorKind::Config, "oracle.R_values: empty");
    for (double a : c.alphas)
        detail::require(a >= 0.0 && a < 1.0, "oracle.alpha_values", "in [0, 1)", a);
    for (double r : c.radii)
        detail::require(r > 0.0, "oracle.R_values", "> 0", r);
    return c;
}

inline const std::vector<std::string>& oracle_columns()
{
    static const std::vector<std::string> cols{
        "alpha",         "R_nm",          "g_eV",          "delta_e_paper_eV",
        "e2_oracle_eV",  "shift_exact_eV", "diff_paper_oracle_eV", "rel_diff_paper_oracle",
        "diff_oracle_exact_eV", "beta1_paper", "beta1_oracle", "beta2_paper",
        "beta2_oracle",  "paper_R_exponent", "oracle_R_exponent", "exact_R_exponent",
        "warnings",      "error"};
    return cols;
}

inline std::string oracle_csv(const ConsistencyReport& report)
{
    using csv::format_number;
    std::ostringstream os;
    csv::write_row(os, oracle_columns());
    for (const auto& r : report.rows) {
        std::vector<std::string> f{format_number(r.alpha), format_number(r.R)};
        if (r.error) {
            f.resize(oracle_columns().size() - 2);
        } else {
            for (double v : {r.g, r.delta_e_paper, r.e2_oracle, r.shift_exact, r.diff_paper_oracle,
                             r.rel_diff_paper_oracle, r.diff_oracle_exact, r.beta1_paper, r.beta1_oracle,
                             r.beta2_paper, r.beta2_oracle, r.paper_exponent, r.oracle_exponent, r.exact_exponent})
                f.push_back(format_number(v));
        }
        f.push_back(detail::warnings_field(r.warnings));
        f.push_back(r.error.value_or(""));
        csv::write_row(os, f);
    }
    return os.str();
}

inline int cmd_oracle_check(const Context& ctx, const Invocation& inv, const config::KeyValues& kv)
{
    if (!inv.out_path) {
        ctx.error("--out: required for oracle-check");
        return ConfigError;
    }
    const auto cfg = consistency_config(kv);
    const auto report = consistency_report(cfg);

    std::vector<std::string> failed_alphas;
    for (const auto& r : report.rows)
        if (r.error) {
            failed_alphas.push_back(csv::format_number(r.alpha));
            ctx.info("row alpha=" + csv::format_number(r.alpha) + " R=" + csv::format_number(r.R) + ": " + *r.error);
        }
    ctx.out << "oracle-check: " << report.rows.size() << " rows, " << failed_alphas.size() << " with errors\n";
    for (const auto& flag : report.flags)
        ctx.out << "flag: " << flag << '\n';

    if (int rc = detail::emit(ctx, inv, kv, oracle_csv(report), report.flags); rc != Success)
        return rc;
    if (!report.rows.empty() && failed_alphas.size() == report.rows.size()) {
        ctx.error("perturbation engine failed on every row; offending alpha: " + csv::join(failed_alphas, ", "));
        return ModelError;
    }
    return Success;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int dispatch(const Context& ctx, const Invocation& inv)
{
    try {
        const auto kv = config::resolve(inv.config_path, inv.overrides);
        for (const auto& [k, v] : kv)
            ctx.debug("config " + k + "=" + v);
        if (inv.command == "simulate")
            return cmd_simulate(ctx, inv, kv);
        if (inv.command == "sweep")
            return cmd_sweep(ctx, inv, kv);
        if (inv.command == "invert")
            return cmd_invert(ctx, inv, kv);
        if (inv.command == "oracle-check")
            return cmd_oracle_check(ctx, inv, kv);
        ctx.error("unknown command '" + inv.command + "'");
        return ConfigError;
    } catch (const Error& e) {
        ctx.error(e.what());
        if (e.kind() == ErrorKind::Io)
            return IoError;
        return is_validation_error(e.kind()) ? ConfigError : ModelError;
    } catch (const std::exception& e) {
        ctx.error(e.what());
        return ModelError;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantum s-SNOM tip/image-dipole simulator", "qsnom"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    Invocation inv;
    const std::pair<const char*, const char*> commands[]{
        {"simulate", "shift, scattered frequency and amplitude at one operating point"},
        {"sweep", "scan one parameter and write a CSV"},
        {"invert", "recover the sample permittivity from an observed scattered frequency"},
        {"oracle-check", "compare the closed form against perturbation theory and exact diagonalization"},
    };
    for (const auto& [name, description] : commands) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", inv.config_path, "key=value config file");
        sub->add_option("--set", inv.overrides, "override a config key (key=value), repeatable");
        sub->add_option("--out", inv.out_path, "output path; a .meta sidecar is written next to it");
        sub->callback([&inv, name] { inv.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return ConfigError;
    }
    return dispatch(Context{out, err, log_level_from_env()}, inv);
}

} // namespace qsnom::cli
