// Batch front door: subcommands wiring the library modules together, with
// byte-stable CSV/JSON emission. Exit codes: 0 ok, 2 configuration or
// validation error, 3 scale guard, 4 comparison threshold breached.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ultradiff/embedding.hpp"
#include "ultradiff/kolmogorov.hpp"
#include "ultradiff/measure_tree.hpp"
#include "ultradiff/oracle.hpp"
#include "ultradiff/piecewise.hpp"
#include "ultradiff/rate_kernel.hpp"
#include "ultradiff/spectral.hpp"

namespace {

using nlohmann::json;
using namespace ultradiff;

constexpr double kCompareTolerance = 1e-8;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(data));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
    if (path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << data;
}

struct CommonOpts {
    std::string config_path;
    std::string out = "-";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
    std::optional<std::vector<double>> times;
    std::optional<std::string> sign;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
    auto* cfg = cmd->add_option("--config", opts.config_path, "run configuration (JSON)");
    if (needs_config) cfg->required();
    cmd->add_option("--out", opts.out, "output path, '-' for standard output");
    cmd->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opts.seed, "random seed override");
    cmd->add_option("--paths", opts.paths, "path count override");
    cmd->add_option("--times", opts.times, "time points override")->delimiter(',');
    cmd->add_option("--sign", opts.sign, "root sign for k: + or -")
        ->check(CLI::IsMember({"+", "-"}));
}

struct RunConfig {
    MeasureTree tree;
    RateProfile kernel;
    std::vector<double> times;
    std::uint64_t seed;
    std::int64_t paths;
    KSign sign;
    json effective;  // post-override config, the input of the output hash
    std::string hash;
};

MeasureTree load_measure(const json& spec) {
    if (spec.contains("file")) {
        return MeasureTree::from_json(json::parse(read_file(spec.at("file").get<std::string>())));
    }
    if (spec.contains("generator")) {
        const std::string kind = spec.at("generator").get<std::string>();
        if (kind == "uniform_ball") {
            Base base(spec.at("p").get<std::uint32_t>());
            Window window(spec.at("gamma_min").get<int>(), spec.at("gamma_max").get<int>());
            const Rational density =
                spec.contains("density") ? parse_rational(spec.at("density").get<std::string>())
                                         : Rational(1);
            return MeasureTree::uniform(base, window, density);
        }
        if (kind == "indicator_of_embedding") {
            const json report = json::parse(read_file(spec.at("report").get<std::string>()));
            Base base(report.at("p").get<std::uint32_t>());
            const int top = report.at("window").at("gamma_max").get<int>();
            Window window(spec.value("gamma_min", 0), spec.value("gamma_max", top));
            if (window.gamma_max < top || window.gamma_min > 0) {
                throw std::invalid_argument("window must contain the embedding image");
            }
            const Rational density =
                spec.contains("density") ? parse_rational(spec.at("density").get<std::string>())
                                         : Rational(1);
            std::map<std::string, Rational> leaves;
            for (const auto& [label, path] : report.at("assignment").items()) {
                std::string leaf_path = path.get<std::string>();
                // Embedded leaves live at level 0; re-address them in the
                // requested window (prepend/append zeros as needed).
                leaf_path = std::string(static_cast<std::size_t>(window.gamma_max - top), '0') +
                            leaf_path +
                            std::string(static_cast<std::size_t>(-window.gamma_min), '0');
                leaves[leaf_path] = density;
            }
            return MeasureTree::from_leaf_table(base, window, leaves);
        }
        throw std::invalid_argument("unknown measure generator '" + kind + "'");
    }
    return MeasureTree::from_json(spec);
}

RunConfig load_config(const CommonOpts& opts) {
    json raw = json::parse(read_file(opts.config_path));
    json effective = raw;
    if (opts.seed) effective["seed"] = *opts.seed;
    if (opts.paths) effective["paths"] = *opts.paths;
    if (opts.times) effective["times"] = *opts.times;
    if (opts.sign) effective["sign"] = *opts.sign;

    MeasureTree tree = load_measure(effective.at("measure"));
    RateProfile kernel = RateProfile::from_json(tree.base(), tree.window(),
                                                effective.at("kernel"));
    std::vector<double> times = effective.value("times", std::vector<double>{1.0});
    const std::string sign_text = effective.value("sign", "+");
    RunConfig cfg{std::move(tree),
                  std::move(kernel),
                  std::move(times),
                  effective.value("seed", std::uint64_t{1}),
                  effective.value("paths", std::int64_t{100000}),
                  sign_text == "-" ? KSign::Minus : KSign::Plus,
                  effective,
                  {}};
    cfg.hash = hash_hex(effective.dump());
    return cfg;
}

PiecewiseFunction parse_piecewise(const MeasureTree& tree, const json& spec) {
    const Base base = tree.base();
    const Window window = tree.window();
    const std::string type = spec.at("type").get<std::string>();
    if (type == "constant") {
        return PiecewiseFunction::constant(base, window, spec.at("value").get<double>());
    }
    if (type == "indicator") {
        const double scale = spec.value("scale", 1.0);
        return scale * PiecewiseFunction::indicator(
                           ball_from_path(base, window, spec.at("path").get<std::string>()));
    }
    if (type == "point") {
        const BallAddress leaf =
            ball_from_path(base, window, spec.at("path").get<std::string>());
        const std::int64_t idx = leaf_index(leaf);
        const Rational mass = tree.leaf_measure(idx);
        if (mass == 0) throw std::invalid_argument("point mass on a zero-measure leaf");
        PiecewiseFunction f(base, window);
        f[idx] = to_double(1 / mass);
        return f;
    }
    if (type == "table") {
        PiecewiseFunction f(base, window);
        for (const auto& [path, value] : spec.at("values").items()) {
            f[leaf_index(ball_from_path(base, window, path))] = value.get<double>();
        }
        return f;
    }
    throw std::invalid_argument("unknown function type '" + type + "'");
}

std::string header_comment(const RunConfig& cfg) {
    return "# config " + cfg.hash + " seed " + std::to_string(cfg.seed) + "\n";
}

json meta(const RunConfig& cfg) {
    return json{{"config_hash", cfg.hash}, {"seed", cfg.seed}};
}

// --- embed ---------------------------------------------------------------

int cmd_embed(const std::string& input, std::uint32_t p, const std::string& out,
              const std::string& measure_out, int gamma_min, std::optional<int> gamma_max,
              const std::string& density) {
    const std::string text = read_file(input);
    const bool dendrogram = text.find('(') != std::string::npos;
    FiniteUltrametricSpace space =
        dendrogram ? parse_dendrogram(text) : parse_distance_csv(text);

    const auto violations = validate_ultrametric(space);
    if (!violations.empty()) {
        for (const auto& v : violations) {
            std::cerr << "violation [" << v.kind << "] " << v.message << "\n";
        }
        return 2;
    }
    EmbeddingResult result = embed(space, Base(p));

    const json input_digest = {{"p", p}, {"input", text}};
    const std::string hash = hash_hex(input_digest.dump());

    json report = embedding_report_json(result);
    report["meta"] = json{{"config_hash", hash}};
    write_output(out, report.dump(2) + "\n");

    const Window window(gamma_min, gamma_max.value_or(result.window.gamma_max));
    MeasureTree tree = to_measure_tree(result, window, parse_rational(density));
    write_output(measure_out, tree.to_json().dump(2) + "\n");
    return 0;
}

// --- spectrum ------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, const CommonOpts& opts) {
    const auto indexes = enumerate_indexes(cfg.tree);
    std::vector<Eigenpair> pairs;
    pairs.reserve(indexes.size());
    for (const auto& index : indexes) {
        pairs.push_back(
            {index, eigenvalue(cfg.tree, cfg.kernel, index.gamma(), index.parent)});
    }
    if (opts.format == "json") {
        json rows = json::array();
        for (const auto& [index, lambda] : pairs) {
            rows.push_back({{"gamma", index.gamma()},
                            {"parent", index.parent.path_string()},
                            {"a", index.a},
                            {"lambda", lambda}});
        }
        write_output(opts.out, json{{"meta", meta(cfg)}, {"eigenpairs", rows}}.dump(2) + "\n");
    } else {
        std::string csv = header_comment(cfg) + "gamma,parent,a,lambda\n";
        for (const auto& [index, lambda] : pairs) {
            csv += std::to_string(index.gamma()) + "," + index.parent.path_string() + "," +
                   std::to_string(index.a) + "," + fmt17(lambda) + "\n";
        }
        write_output(opts.out, csv);
    }
    return 0;
}

// --- basis_check ---------------------------------------------------------

int cmd_basis_check(const RunConfig& cfg, const CommonOpts& opts) {
    SpectralSolver solver(cfg.tree, cfg.kernel, cfg.sign);
    const auto& basis = solver.basis();
    double max_residual = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = i; j < basis.size(); ++j) {
            const double g = inner_product_m(cfg.tree, basis[i].function, basis[j].function);
            const double expected = (i == j) ? 1.0 : 0.0;
            max_residual = std::max(max_residual, std::abs(g - expected));
        }
    }
    const auto support = cfg.tree.support_leaves();
    const auto& lambdas = solver.eigenvalues();
    const auto row_of = [&](std::size_t j) {
        const auto& el = basis[j];
        json row{{"gamma", el.is_constant ? cfg.tree.window().gamma_max : el.index.gamma()},
                 {"parent", el.index.parent.path_string()},
                 {"b", el.is_constant ? json("const") : json(el.index.a)},
                 {"k", el.k},
                 {"lambda", lambdas[j]}};
        json vals = json::array();
        for (double v : el.function.values) vals.push_back(v);
        row["values"] = vals;
        return row;
    };
    if (opts.format == "json") {
        json rows = json::array();
        for (std::size_t j = 0; j < basis.size(); ++j) rows.push_back(row_of(j));
        json report{{"meta", meta(cfg)},
                    {"elements", basis.size()},
                    {"support_leaves", support.size()},
                    {"max_gram_residual", max_residual},
                    {"basis", rows}};
        write_output(opts.out, report.dump(2) + "\n");
    } else {
        std::string csv = header_comment(cfg);
        csv += "# elements " + std::to_string(basis.size()) + " support_leaves " +
               std::to_string(support.size()) + "\n";
        csv += "# max_gram_residual " + fmt17(max_residual) + "\n";
        csv += "gamma,parent,b,k,lambda";
        for (std::int64_t i = 0; i < cfg.tree.leaf_count(); ++i) {
            csv += "," + cfg.tree.leaf_address(i).path_string();
        }
        csv += "\n";
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const auto& el = basis[j];
            csv += std::to_string(el.is_constant ? cfg.tree.window().gamma_max
                                                 : el.index.gamma()) +
                   "," + el.index.parent.path_string() + "," +
                   (el.is_constant ? std::string("const") : std::to_string(el.index.a)) + "," +
                   fmt17(el.k) + "," + fmt17(lambdas[j]);
            for (double v : el.function.values) csv += "," + fmt17(v);
            csv += "\n";
        }
        write_output(opts.out, csv);
    }
    return 0;
}

// --- solve ---------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const CommonOpts& opts) {
    const PiecewiseFunction f0 = parse_piecewise(cfg.tree, cfg.effective.at("f0"));
    SpectralSolver solver(cfg.tree, cfg.kernel, cfg.sign);
    const auto solutions = solver.solve_cauchy(f0, cfg.times);

    if (opts.format == "json") {
        json rows = json::array();
        for (std::int64_t i = 0; i < cfg.tree.leaf_count(); ++i) {
            json row{{"path", cfg.tree.leaf_address(i).path_string()}};
            json vals = json::array();
            for (const auto& sol : solutions) vals.push_back(sol[i]);
            row["values"] = vals;
            rows.push_back(row);
        }
        write_output(opts.out,
                     json{{"meta", meta(cfg)}, {"times", cfg.times}, {"solution", rows}}.dump(2) +
                         "\n");
    } else {
        std::string csv = header_comment(cfg) + "path";
        for (double t : cfg.times) csv += ",t=" + fmt17(t);
        csv += "\n";
        for (std::int64_t i = 0; i < cfg.tree.leaf_count(); ++i) {
            csv += cfg.tree.leaf_address(i).path_string();
            for (const auto& sol : solutions) csv += "," + fmt17(sol[i]);
            csv += "\n";
        }
        write_output(opts.out, csv);
    }
    return 0;
}

// --- simulate ------------------------------------------------------------

JumpProcessConfig jump_config(const RunConfig& cfg) {
    const std::string path = cfg.effective.at("initial_leaf").get<std::string>();
    JumpProcessConfig jp;
    jp.initial_leaf = leaf_index(ball_from_path(cfg.tree.base(), cfg.tree.window(), path));
    jp.horizon = cfg.effective.contains("horizon") ? cfg.effective.at("horizon").get<double>()
                                                   : cfg.times.back();
    jp.paths = cfg.paths;
    jp.seed = cfg.seed;
    return jp;
}

int cmd_simulate(const RunConfig& cfg, const CommonOpts& opts) {
    const JumpProcessConfig jp = jump_config(cfg);
    const SimulationResult result = simulate(jp, cfg.tree, cfg.kernel);

    if (opts.format == "json") {
        json rows = json::array();
        for (std::int64_t i : cfg.tree.support_leaves()) {
            rows.push_back({{"path", cfg.tree.leaf_address(i).path_string()},
                            {"probability", result.probability[static_cast<std::size_t>(i)]},
                            {"std_error", result.std_error[static_cast<std::size_t>(i)]}});
        }
        json report{{"meta", meta(cfg)},
                    {"horizon", jp.horizon},
                    {"paths", result.paths},
                    {"absorbing_state_hit", result.absorbing_state_hit},
                    {"histogram", rows}};
        write_output(opts.out, report.dump(2) + "\n");
    } else {
        std::string csv = header_comment(cfg);
        csv += "# horizon " + fmt17(jp.horizon) + " paths " + std::to_string(result.paths) +
               " absorbing " + (result.absorbing_state_hit ? std::string("1") : std::string("0")) +
               "\n";
        csv += "path,probability,std_error\n";
        for (std::int64_t i : cfg.tree.support_leaves()) {
            csv += cfg.tree.leaf_address(i).path_string() + "," +
                   fmt17(result.probability[static_cast<std::size_t>(i)]) + "," +
                   fmt17(result.std_error[static_cast<std::size_t>(i)]) + "\n";
        }
        write_output(opts.out, csv);
    }
    return 0;
}

// --- compare -------------------------------------------------------------

int cmd_compare(const RunConfig& cfg, const CommonOpts& opts) {
    const JumpProcessConfig jp = jump_config(cfg);
    PiecewiseFunction f0(cfg.tree.base(), cfg.tree.window());
    f0[jp.initial_leaf] = to_double(1 / cfg.tree.leaf_measure(jp.initial_leaf));

    // the oracle's scale guard fires before the quadratic spectral setup
    const DenseGenerator gen = build_generator(cfg.tree, cfg.kernel);
    SpectralSolver solver(cfg.tree, cfg.kernel, cfg.sign);
    const auto spectral = solver.solve_cauchy(f0, cfg.times);
    const auto oracle = expm_apply(gen, f0, cfg.times);

    double max_dev = 0.0;
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        max_dev = std::max(max_dev, sup_diff(spectral[ti], oracle[ti]));
    }

    const SimulationResult mc = simulate(jp, cfg.tree, cfg.kernel);
    const auto support = cfg.tree.support_leaves();
    std::vector<double> exact_prob, mc_prob;
    for (std::int64_t i : support) {
        exact_prob.push_back(oracle.back()[i] * to_double(cfg.tree.leaf_measure(i)));
        mc_prob.push_back(mc.probability[static_cast<std::size_t>(i)]);
    }
    const double tv = tv_distance(exact_prob, mc_prob);
    const double bound = tv_error_bound(exact_prob, mc.paths);
    const bool breach = max_dev > kCompareTolerance || tv > 3.0 * bound;

    if (opts.format == "json") {
        json rows = json::array();
        for (std::size_t si = 0; si < support.size(); ++si) {
            const std::int64_t i = support[si];
            rows.push_back({{"path", cfg.tree.leaf_address(i).path_string()},
                            {"spectral", spectral.back()[i]},
                            {"oracle", oracle.back()[i]},
                            {"mc_probability", mc_prob[si]},
                            {"oracle_probability", exact_prob[si]},
                            {"std_error", mc.std_error[static_cast<std::size_t>(i)]}});
        }
        json report{{"meta", meta(cfg)},
                    {"max_deviation", max_dev},
                    {"tv_distance", tv},
                    {"tv_bound", bound},
                    {"threshold", kCompareTolerance},
                    {"breach", breach},
                    {"rows", rows}};
        write_output(opts.out, report.dump(2) + "\n");
    } else {
        std::string csv = header_comment(cfg);
        csv += "# max_deviation " + fmt17(max_dev) + " threshold " + fmt17(kCompareTolerance) +
               "\n";
        csv += "# tv_distance " + fmt17(tv) + " bound " + fmt17(bound) + "\n";
        csv += "path,spectral,oracle,mc_probability,oracle_probability,std_error\n";
        for (std::size_t si = 0; si < support.size(); ++si) {
            const std::int64_t i = support[si];
            csv += cfg.tree.leaf_address(i).path_string() + "," + fmt17(spectral.back()[i]) +
                   "," + fmt17(oracle.back()[i]) + "," + fmt17(mc_prob[si]) + "," +
                   fmt17(exact_prob[si]) + "," +
                   fmt17(mc.std_error[static_cast<std::size_t>(i)]) + "\n";
        }
        write_output(opts.out, csv);
    }
    if (breach) {
        std::cerr << "comparison threshold breached: max_deviation=" << fmt17(max_dev)
                  << " tv=" << fmt17(tv) << " bound=" << fmt17(bound) << "\n";
        return 4;
    }
    return 0;
}

// --- potential -----------------------------------------------------------

int cmd_potential(const RunConfig& cfg, const CommonOpts& opts) {
    const PiecewiseFunction U = parse_piecewise(cfg.tree, cfg.effective.at("U"));
    const PotentialReduction red = reduce_potential(cfg.tree, cfg.kernel, U);
    const double residual = potential_generator_residual(cfg.tree, cfg.kernel, U);

    if (opts.format == "json") {
        json rows = json::array();
        for (std::int64_t i = 0; i < cfg.tree.leaf_count(); ++i) {
            rows.push_back({{"path", cfg.tree.leaf_address(i).path_string()},
                            {"U", U[i]},
                            {"weighted_density",
                             rational_to_string(red.weighted_measure.density(i))},
                            {"reaction", red.reaction[i]}});
        }
        json report{{"meta", meta(cfg)},
                    {"generator_identity_residual", residual},
                    {"rows", rows}};
        write_output(opts.out, report.dump(2) + "\n");
    } else {
        std::string csv = header_comment(cfg);
        csv += "# generator_identity_residual " + fmt17(residual) + "\n";
        csv += "path,U,weighted_density,reaction\n";
        for (std::int64_t i = 0; i < cfg.tree.leaf_count(); ++i) {
            csv += cfg.tree.leaf_address(i).path_string() + "," + fmt17(U[i]) + "," +
                   rational_to_string(red.weighted_measure.density(i)) + "," +
                   fmt17(red.reaction[i]) + "\n";
        }
        write_output(opts.out, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectra and Cauchy solutions of measure-weighted ultrametric diffusion"};
    app.require_subcommand(1);

    // embed has its own surface; the rest share the config-driven options.
    std::string embed_input, embed_out = "embedding.json", embed_measure_out, embed_density = "1";
    std::uint32_t embed_p = 2;
    int embed_gamma_min = 0;
    std::optional<int> embed_gamma_max;
    auto* embed_cmd =
        app.add_subcommand("embed", "embed a finite ultrametric space and derive its measure");
    embed_cmd->add_option("--input", embed_input, "distance-matrix CSV or dendrogram file")
        ->required();
    embed_cmd->add_option("--p", embed_p, "expansion base")->required();
    embed_cmd->add_option("--out", embed_out, "embedding report (JSON)");
    embed_cmd->add_option("--measure-out", embed_measure_out,
                          "derived measure file (default: <out>.measure.json)");
    embed_cmd->add_option("--gamma-min", embed_gamma_min, "leaf level of the derived measure");
    embed_cmd->add_option("--gamma-max", embed_gamma_max,
                          "root level of the derived measure (default: embedding top)");
    embed_cmd->add_option("--density", embed_density, "leaf density of the derived measure");

    CommonOpts spectrum_opts, basis_opts, solve_opts, simulate_opts, compare_opts,
        potential_opts;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalue table");
    add_common(spectrum_cmd, spectrum_opts);
    auto* basis_cmd = app.add_subcommand("basis_check", "orthonormality report");
    add_common(basis_cmd, basis_opts);
    auto* solve_cmd = app.add_subcommand("solve", "spectral Cauchy solution");
    add_common(solve_cmd, solve_opts);
    auto* simulate_cmd = app.add_subcommand("simulate", "jump-process histogram");
    add_common(simulate_cmd, simulate_opts);
    auto* compare_cmd =
        app.add_subcommand("compare", "spectral vs matrix-exponential vs Monte Carlo");
    add_common(compare_cmd, compare_opts);
    auto* potential_cmd = app.add_subcommand("potential", "potential-equation reduction");
    add_common(potential_cmd, potential_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (embed_cmd->parsed()) {
            if (embed_measure_out.empty()) embed_measure_out = embed_out + ".measure.json";
            return cmd_embed(embed_input, embed_p, embed_out, embed_measure_out,
                             embed_gamma_min, embed_gamma_max, embed_density);
        }
        if (spectrum_cmd->parsed()) return cmd_spectrum(load_config(spectrum_opts), spectrum_opts);
        if (basis_cmd->parsed()) return cmd_basis_check(load_config(basis_opts), basis_opts);
        if (solve_cmd->parsed()) return cmd_solve(load_config(solve_opts), solve_opts);
        if (simulate_cmd->parsed()) return cmd_simulate(load_config(simulate_opts), simulate_opts);
        if (compare_cmd->parsed()) return cmd_compare(load_config(compare_opts), compare_opts);
        if (potential_cmd->parsed())
            return cmd_potential(load_config(potential_opts), potential_opts);
    } catch (const ScaleGuardExceeded& e) {
        std::cerr << "scale guard: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
