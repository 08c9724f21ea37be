#include "collage/cli.hpp"

#include "collage/errors.hpp"
#include "collage/forward.hpp"
#include "collage/stability.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace collage::cli {

using nlohmann::json;

namespace {

double parse_decimal(std::string_view text)
{
    const std::string s(text);
    if (s.empty()) {
        throw ConfigError("empty number");
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("not a finite number: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::string current;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    parts.push_back(current);
    return parts;
}

std::vector<double> parse_real_list(const std::vector<std::string>& items)
{
    std::vector<double> out;
    for (const auto& item : items) {
        for (const auto& piece : split(item, ',')) {
            out.push_back(parse_real(piece));
        }
    }
    return out;
}

int parse_positive_int(std::string_view text, const char* what)
{
    const double v = parse_decimal(text);
    if (v != std::floor(v) || v < 1.0 || v > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string(what) + " must be a positive integer, got '" + std::string(text) + "'");
    }
    return static_cast<int>(v);
}

std::string fmt_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", v);
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string_view to_string(Command c)
{
    switch (c) {
    case Command::forward:
        return "forward";
    case Command::diagnose:
        return "diagnose";
    case Command::inverse:
        return "inverse";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

json coeffs_json(const FormCoefficients& c) { return {{"C1", c.c1}, {"C2", c.c2}, {"C3", c.c3}}; }

json config_json(const RunConfig& c)
{
    json j;
    j["command"] = to_string(c.command);
    switch (c.command) {
    case Command::forward:
        j["m"] = c.m_list;
        j["delta"] = c.delta_text;
        j["deltaValue"] = c.delta;
        j["npoints"] = c.npoints;
        j["format"] = to_string(c.format);
        break;
    case Command::diagnose:
        j["m"] = c.m_list;
        j["coefficients"] = coeffs_json(c.coeffs);
        j["familyC1"] = c.family_c1;
        j["familyC2"] = c.family_c2;
        j["familyC3"] = c.family_c3;
        break;
    case Command::inverse: {
        const InverseConfig& inv = c.inverse;
        j["noise"] = c.noise_levels;
        j["trials"] = c.trials;
        j["seed"] = c.seed;
        j["delta"] = c.delta_text;
        j["deltaValue"] = inv.delta;
        j["grid"] = inv.grid_n;
        j["testGrid"] = inv.test_grid_n;
        j["wMode"] = to_string(inv.w_mode);
        j["interpolation"] = to_string(inv.interpolation);
        j["fdOrder"] = to_string(inv.fd_stencil);
        j["noiseDistribution"] = to_string(inv.noise);
        j["norm"] = to_string(inv.norm);
        if (inv.box) {
            j["box"] = {{"lower", coeffs_json(inv.box->lower)}, {"upper", coeffs_json(inv.box->upper)}};
        } else {
            j["box"] = nullptr;
        }
        j["format"] = to_string(c.format);
        break;
    }
    }
    return j;
}

std::string csv_header(const RunConfig& c)
{
    return fmt::format("# collage {}\n# config: {}\n", to_string(c.command), config_json(c).dump());
}

std::string render_forward(const RunConfig& c)
{
    const ManufacturedProblem problem = ManufacturedProblem::reference(c.delta);
    std::vector<ErrorReport> rows;
    std::vector<double> residuals;
    for (int m : c.m_list) {
        SaddleSystem system = assemble_forms(m, FormCoefficients::direct(c.delta));
        LoadVectors loads = assemble_loads(m, problem.f, c.npoints);
        system.load_x = std::move(loads.x);
        system.load_y = std::move(loads.y);
        const MixedSolution sol = solve_forward(system);
        rows.push_back(error_norms(sol, problem.psi0, problem.w0, {1, c.npoints}));
        residuals.push_back(sol.residual);
    }
    if (c.format == OutputFormat::json) {
        json j;
        j["config"] = config_json(c);
        j["rows"] = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const ErrorReport& r = rows[i];
            j["rows"].push_back({{"m", r.m},
                                 {"psiL2", r.psi_l2},
                                 {"psiH10", r.psi_h10},
                                 {"wL2", r.w_l2},
                                 {"wH10", r.w_h10},
                                 {"blockResidual", residuals[i]}});
        }
        return j.dump(2) + "\n";
    }
    std::string out = csv_header(c);
    out += "m,psiL2,psiH10,wL2,wH10\n";
    for (const ErrorReport& r : rows) {
        out += fmt::format("{},{},{},{},{}\n", r.m, fmt_real(r.psi_l2), fmt_real(r.psi_h10), fmt_real(r.w_l2),
                           fmt_real(r.w_h10));
    }
    return out;
}

json report_json(const StabilityReport& r)
{
    return {{"alpha", real_or_null(r.alpha)},
            {"beta", real_or_null(r.beta)},
            {"normA", real_or_null(r.norm_a)},
            {"normC", real_or_null(r.norm_c)},
            {"rho", real_or_null(r.rho)},
            {"conditionOK", r.condition_ok},
            {"collageFactor", real_or_null(r.collage_factor)},
            {"kernelDim", r.kernel_dim}};
}

std::vector<FormCoefficients> family_grid(const RunConfig& c)
{
    const auto axis = [](const std::vector<double>& v, double fallback) {
        return v.empty() ? std::vector<double>{fallback} : v;
    };
    std::vector<FormCoefficients> family;
    for (double a : axis(c.family_c1, c.coeffs.c1)) {
        for (double b : axis(c.family_c2, c.coeffs.c2)) {
            for (double d : axis(c.family_c3, c.coeffs.c3)) {
                family.push_back({a, b, d});
            }
        }
    }
    return family;
}

std::string render_diagnose(const RunConfig& c)
{
    json j;
    j["config"] = config_json(c);
    const bool with_family = !c.family_c1.empty() || !c.family_c2.empty() || !c.family_c3.empty();
    j["reports"] = json::array();
    for (int m : c.m_list) {
        const TensorGrams grams = tensor_grams(m);
        const StabilityReport r = compute_constants(assemble_forms(grams, c.coeffs), grams.stiff, grams.stiff);
        json entry = report_json(r);
        entry["m"] = m;
        if (with_family) {
            const std::vector<FormCoefficients> grid = family_grid(c);
            const FamilyReport f = family_constants(m, grid);
            entry["family"] = {{"members", f.members},
                               {"alpha", real_or_null(f.alpha)},
                               {"beta", real_or_null(f.beta)},
                               {"supNormA", real_or_null(f.sup_norm_a)},
                               {"infNormC", real_or_null(f.inf_norm_c)},
                               {"supNormC", real_or_null(f.sup_norm_c)},
                               {"rho", real_or_null(f.rho)},
                               {"conditionOK", f.condition_ok}};
        }
        j["reports"].push_back(entry);
    }
    // The single-m case also exposes the report fields at top level.
    if (c.m_list.size() == 1) {
        for (const auto& [k, v] : j["reports"][0].items()) {
            j[k] = v;
        }
    }
    return j.dump(2) + "\n";
}

json estimate_json(const CollageEstimate& e)
{
    return {{"C1", e.coeffs.c1},
            {"C2", e.coeffs.c2},
            {"C3", e.coeffs.c3},
            {"collageDistance", e.collage_distance},
            {"residualSplit", {e.residual_split.first, e.residual_split.second}},
            {"clipped", e.clipped}};
}

json sweep_json(const RunConfig& c, const std::vector<SweepRow>& rows)
{
    json j;
    j["config"] = config_json(c);
    j["rows"] = json::array();
    for (const SweepRow& r : rows) {
        json row{{"noise", r.noise_level},
                 {"trials", r.trials},
                 {"mean", coeffs_json(r.mean)},
                 {"stddev", coeffs_json(r.stddev)},
                 {"meanCollageDistance", r.mean_distance},
                 {"stddevCollageDistance", r.stddev_distance}};
        row["estimates"] = json::array();
        for (const CollageEstimate& e : r.estimates) {
            row["estimates"].push_back(estimate_json(e));
        }
        j["rows"].push_back(row);
    }
    return j;
}

std::vector<SweepRow> compute_sweep(const RunConfig& c)
{
    return noise_sweep(c.noise_levels, c.trials, c.seed, c.inverse);
}

std::string render_inverse(const RunConfig& c, const std::vector<SweepRow>& rows)
{
    if (c.format == OutputFormat::json) {
        return sweep_json(c, rows).dump(2) + "\n";
    }
    std::string out = csv_header(c);
    out += "noise,C1,C2,C3,collageDistance,C1_std,C2_std,C3_std,collageDistance_std,trials\n";
    for (const SweepRow& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", fmt_real(r.noise_level), fmt_real(r.mean.c1),
                           fmt_real(r.mean.c2), fmt_real(r.mean.c3), fmt_real(r.mean_distance),
                           fmt_real(r.stddev.c1), fmt_real(r.stddev.c2), fmt_real(r.stddev.c3),
                           fmt_real(r.stddev_distance), r.trials);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open output file '" + path + "'");
    }
    f << content;
    if (!f) {
        throw ConfigError("failed writing output file '" + path + "'");
    }
}

void validate(const RunConfig& c)
{
    if (c.m_list.empty()) {
        throw ConfigError("--m needs at least one dimension");
    }
    for (int m : c.m_list) {
        if (m < 1) {
            throw ConfigError("--m values must be positive");
        }
    }
    if (c.npoints < 1 || c.npoints > 32) {
        throw ConfigError("--npoints must lie in [1, 32]");
    }
    if (c.command == Command::inverse) {
        if (c.noise_levels.empty()) {
            throw ConfigError("--noise needs at least one level");
        }
        for (double l : c.noise_levels) {
            if (l < 0.0) {
                throw ConfigError("--noise levels must be nonnegative");
            }
        }
        if (c.trials < 1) {
            throw ConfigError("--trials must be at least 1");
        }
        if (c.inverse.grid_n < 2 || c.inverse.test_grid_n < 2) {
            throw ConfigError("--grid and --test-grid must be at least 2");
        }
        if (c.inverse.w_mode == WMode::finite_difference && c.inverse.fd_stencil == FdStencil::fourth_order &&
            c.inverse.grid_n < 5) {
            throw ConfigError("--fd-order 4 needs --grid >= 5");
        }
    }
}

} // namespace

double parse_real(std::string_view text)
{
    std::string s(text);
    std::erase_if(s, [](char ch) { return ch == ' '; });
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        return parse_decimal(s);
    }
    const double num = parse_decimal(std::string_view(s).substr(0, slash));
    const double den = parse_decimal(std::string_view(s).substr(slash + 1));
    if (den == 0.0) {
        throw ConfigError("zero denominator in '" + s + "'");
    }
    return num / den;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out)
{
    CLI::App app{"Perturbed mixed variational problems: forward solver, stability diagnostics, collage inverse solver"};
    app.require_subcommand(1);

    std::vector<std::string> m_items;
    std::string delta_text;
    std::string format_text = "csv";
    std::string output;
    std::string npoints_text = "6";

    auto* forward = app.add_subcommand("forward", "convergence table of the Galerkin solver");
    forward->add_option("--m", m_items, "comma-separated basis dimensions")->delimiter(',');
    forward->add_option("--delta", delta_text, "perturbation δ, decimal or fraction (default 1/15)");
    forward->add_option("--npoints", npoints_text, "Gauss points per panel (default 6)");
    forward->add_option("--format", format_text, "csv | json");
    forward->add_option("--output,-o", output, "output file (default: stdout)");

    std::string c1 = "1";
    std::string c2 = "1";
    std::string c3 = "1/4";
    std::vector<std::string> fam1;
    std::vector<std::string> fam2;
    std::vector<std::string> fam3;
    std::string diag_output;
    std::vector<std::string> diag_m;
    auto* diagnose = app.add_subcommand("diagnose", "discrete stability constants as JSON");
    diagnose->add_option("--m", diag_m, "comma-separated basis dimensions")->delimiter(',');
    diagnose->add_option("--c1", c1, "coefficient C1");
    diagnose->add_option("--c2", c2, "coefficient C2");
    diagnose->add_option("--c3", c3, "coefficient C3");
    diagnose->add_option("--family-c1", fam1, "C1 values of a parameter grid")->delimiter(',');
    diagnose->add_option("--family-c2", fam2, "C2 values of a parameter grid")->delimiter(',');
    diagnose->add_option("--family-c3", fam3, "C3 values of a parameter grid")->delimiter(',');
    diagnose->add_option("--output,-o", diag_output, "output file (default: stdout)");

    std::vector<std::string> noise_items;
    std::string trials_text = "1";
    std::string seed_text = "0";
    std::string w_mode = "fd";
    std::string inv_delta = "1/4";
    std::string grid_text = "9";
    std::string test_grid_text = "9";
    std::string interp = "lagrange";
    std::string fd_order = "4";
    std::string noise_dist = "uniform";
    std::string norm = "riesz";
    std::vector<std::string> box_items;
    std::string inv_format = "csv";
    std::string inv_output;
    std::string trials_json;
    auto* inverse = app.add_subcommand("inverse", "collage-distance parameter estimation over noise levels");
    inverse->add_option("--noise", noise_items, "comma-separated relative noise levels")->delimiter(',');
    inverse->add_option("--trials", trials_text, "noise realisations per level");
    inverse->add_option("--seed", seed_text, "base seed");
    inverse->add_option("--w-mode", w_mode, "analytic | fd");
    inverse->add_option("--delta", inv_delta, "true C3 used to build the load (default 1/4)");
    inverse->add_option("--grid", grid_text, "interior sample points per axis (default 9)");
    inverse->add_option("--test-grid", test_grid_text, "interior test-hat nodes per axis (default 9)");
    inverse->add_option("--interp", interp, "lagrange | bilinear");
    inverse->add_option("--fd-order", fd_order, "2 | 4");
    inverse->add_option("--noise-dist", noise_dist, "uniform | gaussian");
    inverse->add_option("--norm", norm, "riesz | euclidean");
    inverse->add_option("--box", box_items, "C1lo,C1hi,C2lo,C2hi,C3lo,C3hi")->delimiter(',');
    inverse->add_option("--format", inv_format, "csv | json");
    inverse->add_option("--output,-o", inv_output, "output file (default: stdout)");
    inverse->add_option("--trials-json", trials_json, "also write per-trial estimates as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    const auto parse_format = [](const std::string& s) {
        if (s == "csv") {
            return OutputFormat::csv;
        }
        if (s == "json") {
            return OutputFormat::json;
        }
        throw ConfigError("--format must be csv or json");
    };

    RunConfig c;
    if (forward->parsed()) {
        c.command = Command::forward;
        if (!m_items.empty()) {
            c.m_list.clear();
            for (const auto& s : m_items) {
                c.m_list.push_back(parse_positive_int(s, "--m"));
            }
        }
        if (!delta_text.empty()) {
            c.delta_text = delta_text;
            c.delta = parse_real(delta_text);
        }
        c.npoints = parse_positive_int(npoints_text, "--npoints");
        c.format = parse_format(format_text);
        c.output = output;
    } else if (diagnose->parsed()) {
        c.command = Command::diagnose;
        c.m_list = {25};
        if (!diag_m.empty()) {
            c.m_list.clear();
            for (const auto& s : diag_m) {
                c.m_list.push_back(parse_positive_int(s, "--m"));
            }
        }
        c.coeffs = {parse_real(c1), parse_real(c2), parse_real(c3)};
        c.family_c1 = parse_real_list(fam1);
        c.family_c2 = parse_real_list(fam2);
        c.family_c3 = parse_real_list(fam3);
        c.format = OutputFormat::json;
        c.output = diag_output;
    } else {
        c.command = Command::inverse;
        if (!noise_items.empty()) {
            c.noise_levels = parse_real_list(noise_items);
        }
        c.trials = parse_positive_int(trials_text, "--trials");
        {
            const double s = parse_decimal(seed_text);
            if (s < 0 || s != std::floor(s) || s > 1.8e19) {
                throw ConfigError("--seed must be a nonnegative integer");
            }
            c.seed = std::stoull(seed_text);
        }
        InverseConfig& inv = c.inverse;
        if (w_mode == "analytic") {
            inv.w_mode = WMode::analytic;
        } else if (w_mode == "fd" || w_mode == "finite-difference") {
            inv.w_mode = WMode::finite_difference;
        } else {
            throw ConfigError("--w-mode must be analytic or fd");
        }
        c.delta_text = inv_delta;
        inv.delta = parse_real(inv_delta);
        c.delta = inv.delta;
        inv.grid_n = parse_positive_int(grid_text, "--grid");
        inv.test_grid_n = parse_positive_int(test_grid_text, "--test-grid");
        if (interp == "lagrange") {
            inv.interpolation = InterpolationKind::lagrange;
        } else if (interp == "bilinear") {
            inv.interpolation = InterpolationKind::bilinear;
        } else {
            throw ConfigError("--interp must be lagrange or bilinear");
        }
        if (fd_order == "2") {
            inv.fd_stencil = FdStencil::second_order;
        } else if (fd_order == "4") {
            inv.fd_stencil = FdStencil::fourth_order;
        } else {
            throw ConfigError("--fd-order must be 2 or 4");
        }
        if (noise_dist == "uniform") {
            inv.noise = NoiseDistribution::uniform;
        } else if (noise_dist == "gaussian") {
            inv.noise = NoiseDistribution::gaussian;
        } else {
            throw ConfigError("--noise-dist must be uniform or gaussian");
        }
        if (norm == "riesz") {
            inv.norm = DualNormKind::riesz;
        } else if (norm == "euclidean") {
            inv.norm = DualNormKind::euclidean;
        } else {
            throw ConfigError("--norm must be riesz or euclidean");
        }
        if (!box_items.empty()) {
            const std::vector<double> b = parse_real_list(box_items);
            if (b.size() != 6) {
                throw ConfigError("--box needs six values");
            }
            if (b[0] > b[1] || b[2] > b[3] || b[4] > b[5]) {
                throw ConfigError("--box lower bounds must not exceed upper bounds");
            }
            inv.box = ParameterBox{{b[0], b[2], b[4]}, {b[1], b[3], b[5]}};
        }
        c.format = parse_format(inv_format);
        c.output = inv_output;
        c.trials_json = trials_json;
    }
    validate(c);
    return c;
}

std::string render(const RunConfig& c)
{
    switch (c.command) {
    case Command::forward:
        return render_forward(c);
    case Command::diagnose:
        return render_diagnose(c);
    case Command::inverse:
        return render_inverse(c, compute_sweep(c));
    }
    return {};
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        validate(c);
        std::string content;
        if (c.command == Command::inverse) {
            const std::vector<SweepRow> rows = compute_sweep(c);
            content = render_inverse(c, rows);
            if (!c.trials_json.empty()) {
                write_file(c.trials_json, sweep_json(c, rows).dump(2) + "\n");
            }
        } else {
            content = render(c);
        }
        if (c.output.empty()) {
            out << content;
        } else {
            write_file(c.output, content);
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::optional<RunConfig> config;
    try {
        config = parse_args(argc, argv, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    }
    if (!config) {
        return 0;
    }
    return run(*config, out, err);
}

} // namespace collage::cli
