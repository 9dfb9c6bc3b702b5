// papm: command-line toolkit for point annotation probability maps.
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "papm/papm.hpp"

namespace fs = std::filesystem;
using namespace papm;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CostFamily parse_family(const std::string& name) {
    if (name == "ggd-l2") return CostFamily::ggd_l2_combination;
    if (name == "sq-euclid") return CostFamily::squared_euclidean;
    if (name == "power") return CostFamily::power_ratio;
    throw usage_error("unknown --family '" + name + "' (expected ggd-l2, sq-euclid, power)");
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw usage_error("--grid expects HxW, got '" + text + "'");
    try {
        const int h = std::stoi(text.substr(0, x));
        const int w = std::stoi(text.substr(x + 1));
        if (h < 1 || w < 1) throw usage_error("--grid dimensions must be positive");
        return {h, w};
    } catch (const usage_error&) {
        throw;
    } catch (const std::exception&) {
        throw usage_error("--grid expects HxW, got '" + text + "'");
    }
}

// "1..5" (inclusive) or "1,4,9"
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto range = text.find("..");
    if (range != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, range));
        const std::uint64_t hi = std::stoull(text.substr(range + 2));
        if (hi < lo) throw usage_error("--seeds range must be ascending");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) throw usage_error("--seeds is empty");
    return seeds;
}

std::vector<double> parse_doubles(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw usage_error(std::string(flag) + " is empty");
    return out;
}

MapFormat parse_format(const std::string& name) {
    if (name == "text") return MapFormat::text;
    if (name == "binary") return MapFormat::binary;
    throw usage_error("unknown --format '" + name + "' (expected text, binary)");
}

// Shared option bags -------------------------------------------------------

struct CostFlags {
    std::string family = "ggd-l2";
    double sigma = 16.0;
    double shape = 2.0;
    double scale = 16.0;
    double power = 4.0;
    double cap = 1e12;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family, "Cost family: ggd-l2, sq-euclid, power");
        cmd->add_option("--sigma", sigma, "GGD bandwidth (pixels)");
        cmd->add_option("--shape", shape, "GGD shape parameter");
        cmd->add_option("--scale", scale, "power family scale (pixels)");
        cmd->add_option("--power", power, "power family exponent");
        cmd->add_option("--cap", cap, "cost saturation cap");
    }
    CostSpec spec() const {
        CostSpec s;
        s.family = parse_family(family);
        s.params = {sigma, shape};
        s.power_scale = scale;
        s.power_exponent = power;
        s.cost_cap = cap;
        return s;
    }
};

struct SolverFlags {
    double eps = 0.0; // absolute; 0 means relative default
    double eps_rel = 0.01;
    int max_iters = 500;
    double tol = 1e-6;
    double decay = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps", eps, "entropic epsilon, absolute cost units (0 = relative)");
        cmd->add_option("--eps-rel", eps_rel, "entropic epsilon relative to median cost");
        cmd->add_option("--max-iters", max_iters, "Sinkhorn iteration budget");
        cmd->add_option("--tol", tol, "L1 marginal tolerance");
        cmd->add_option("--eps-decay", decay, "epsilon schedule factor in (0,1]; 1 disables");
    }
    SinkhornConfig config() const {
        SinkhornConfig cfg;
        if (eps > 0.0) {
            cfg.epsilon = eps;
            cfg.epsilon_is_absolute = true;
        } else {
            cfg.epsilon = eps_rel;
            cfg.epsilon_is_absolute = false;
        }
        cfg.max_iters = max_iters;
        cfg.marginal_tol = tol;
        cfg.epsilon_decay = decay;
        return cfg;
    }
};

// Subcommand runners ---------------------------------------------------------

int run_gen_papm(const std::string& points_path, double sigma, double shape,
                 const std::string& norm, double tau, int stride, const std::string& out,
                 const std::string& format) {
    const PointSet ps = read_points_file(points_path);
    KernelSpec spec;
    spec.params = {sigma, shape};
    spec.truncation_tau = tau;
    spec.stride = stride;
    if (norm == "discrete")
        spec.normalization = KernelNorm::discrete_renormalized;
    else if (norm == "analytic")
        spec.normalization = KernelNorm::analytic;
    else
        throw usage_error("unknown --norm '" + norm + "' (expected discrete, analytic)");
    const GridMap map = generate_hd_papm(ps, spec);
    write_map_file(map, out, parse_format(format));
    std::printf("RESULT rows=%d cols=%d n=%zu total_mass=%.12g out=%s\n", map.rows, map.cols,
                ps.count(), map.total_mass(), out.c_str());
    return 0;
}

int run_cost_matrix(const std::string& points_path, const std::string& grid,
                    const CostFlags& cost_flags, const std::string& out) {
    const PointSet ps = read_points_file(points_path);
    int rows = ps.height, cols = ps.width;
    if (!grid.empty()) std::tie(rows, cols) = parse_grid(grid);
    const CostMatrix C = build_cost_matrix(ps, rows, cols, cost_flags.spec());
    std::ofstream f(out);
    if (!f) throw io_error("cannot open output file: " + out);
    f.precision(12);
    for (std::size_t i = 0; i < C.rows; ++i) {
        for (std::size_t j = 0; j < C.cols; ++j) {
            if (j) f << ',';
            f << C.at(i, j);
        }
        f << '\n';
    }
    if (!f) throw io_error("failed writing " + out);
    std::printf("RESULT rows=%zu cols=%zu clamped=%zu max=%.12g out=%s\n", C.rows, C.cols,
                C.clamped, C.max_entry, out.c_str());
    return 0;
}

int run_ot_loss(const std::string& points_path, const std::string& pred_path,
                const CostFlags& cost_flags, const SolverFlags& solver_flags, double lambda,
                const std::string& grad_out, const std::string& format) {
    const PointSet ps = read_points_file(points_path);
    const GridMap pred = read_map_file(pred_path);
    const LossBreakdown l = al_papm_loss(ps, pred, cost_flags.spec(), solver_flags.config(), lambda);
    if (l.diagnostics.degenerate)
        std::printf("note: degenerate measure (n=%zu, mass=%.6g); OT term skipped\n", ps.count(),
                    pred.total_mass());
    if (!grad_out.empty()) write_map_file(l.grad, grad_out, parse_format(format));
    std::printf("ot_term        %.12g\n", l.ot_term);
    std::printf("similarity     %.12g\n", l.similarity_term);
    std::printf("total          %.12g\n", l.total);
    std::printf(
        "RESULT ot=%.12g sim=%.12g total=%.12g lambda=%g iterations=%d violation=%.3e "
        "converged=%d eps=%.6g clamped=%zu degenerate=%d\n",
        l.ot_term, l.similarity_term, l.total, l.lambda, l.diagnostics.iterations,
        l.diagnostics.marginal_violation, l.diagnostics.converged ? 1 : 0, l.diagnostics.epsilon,
        l.diagnostics.clamped_costs, l.diagnostics.degenerate ? 1 : 0);
    return 0;
}

int run_oracle_ot(const std::string& points_path, const std::string& pred_path,
                  const CostFlags& cost_flags) {
    const PointSet ps = read_points_file(points_path);
    const GridMap pred = read_map_file(pred_path);
    const CostMatrix C = build_cost_matrix(ps, pred.rows, pred.cols, cost_flags.spec());
    auto [source, target] = normalize_measures(ps, pred);
    const ExactSolution sol = exact_ot(C, source, target);
    std::printf("RESULT value=%.12g n=%zu m=%zu\n", sol.value, sol.rows, sol.cols);
    return 0;
}

int run_localize(const std::string& points_path, const std::string& pred_path, double peak,
                 double radius) {
    const PointSet ps = read_points_file(points_path);
    const GridMap pred = read_map_file(pred_path);
    const MatchResult res = localize_and_match(pred, ps, peak, radius);
    std::printf("RESULT predicted=%zu matches=%zu precision=%.6g recall=%.6g f1=%.6g\n",
                res.predicted.size(), res.matches.size(), res.precision, res.recall, res.f1);
    return 0;
}

int run_perturb(const std::string& points_path, double radius, std::uint64_t seed,
                const std::string& mode, const std::string& out) {
    const PointSet ps = read_points_file(points_path);
    PerturbSpec spec;
    spec.magnitude = radius;
    spec.seed = seed;
    if (mode == "exact")
        spec.mode = PerturbMode::exact_radius;
    else if (mode == "disk")
        spec.mode = PerturbMode::uniform_disk;
    else
        throw usage_error("unknown --mode '" + mode + "' (expected exact, disk)");
    const PerturbedPoints res = perturb(ps, spec);
    write_points_file(res.points, out);
    std::printf("RESULT n=%zu clamped=%zu out=%s\n", res.points.count(), res.clamped, out.c_str());
    return 0;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir, int game_level,
             bool localize, double radius, double peak, const std::string& csv) {
    if (!fs::is_directory(gt_dir)) throw io_error("not a directory: " + gt_dir);
    if (!fs::is_directory(pred_dir)) throw io_error("not a directory: " + pred_dir);

    std::map<std::string, fs::path> preds;
    for (const auto& entry : fs::directory_iterator(pred_dir))
        if (entry.is_regular_file()) preds[entry.path().stem().string()] = entry.path();

    std::vector<std::string> stems;
    std::vector<EvalRecord> records;
    std::vector<double> games;
    double game_sum = 0.0;
    std::size_t match_count = 0, pred_count = 0, gt_count = 0;

    std::vector<fs::path> gt_files;
    for (const auto& entry : fs::directory_iterator(gt_dir))
        if (entry.is_regular_file()) gt_files.push_back(entry.path());
    std::sort(gt_files.begin(), gt_files.end());

    for (const fs::path& gt_path : gt_files) {
        const auto it = preds.find(gt_path.stem().string());
        if (it == preds.end()) continue;
        const PointSet ps = read_points_file(gt_path.string());
        const GridMap map = read_map_file(it->second.string());
        stems.push_back(gt_path.stem().string());
        records.push_back({map.total_mass(), static_cast<double>(ps.count())});
        if (game_level >= 0) {
            games.push_back(game(map, ps, game_level));
            game_sum += games.back();
        }
        if (localize) {
            const MatchResult res = localize_and_match(map, ps, peak, radius);
            match_count += res.matches.size();
            pred_count += res.predicted.size();
            gt_count += ps.count();
        }
    }
    if (records.empty()) throw io_error("no paired prediction/ground-truth files found");

    auto [mae, mse] = mae_mse(records);
    std::printf("%-24s %12s %12s%s\n", "image", "estimated", "gt",
                game_level >= 0 ? "         game" : "");
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::printf("%-24s %12.4f %12.0f", stems[i].c_str(), records[i].estimated,
                    records[i].ground_truth);
        if (game_level >= 0) std::printf(" %12.4f", games[i]);
        std::printf("\n");
    }

    if (!csv.empty()) {
        std::ofstream f(csv);
        if (!f) throw io_error("cannot open output file: " + csv);
        f << "image,estimated,gt";
        if (game_level >= 0) f << ",game" << game_level;
        f << '\n';
        f.precision(12);
        for (std::size_t i = 0; i < records.size(); ++i) {
            f << stems[i] << ',' << records[i].estimated << ',' << records[i].ground_truth;
            if (game_level >= 0) f << ',' << games[i];
            f << '\n';
        }
    }

    std::string extra;
    if (game_level >= 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " game%d=%.6g", game_level,
                      game_sum / static_cast<double>(records.size()));
        extra += buf;
    }
    if (localize) {
        const double precision =
            pred_count ? static_cast<double>(match_count) / static_cast<double>(pred_count) : 0.0;
        const double recall =
            gt_count ? static_cast<double>(match_count) / static_cast<double>(gt_count) : 0.0;
        const double f1 =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        char buf[96];
        std::snprintf(buf, sizeof(buf), " precision=%.6g recall=%.6g f1=%.6g", precision, recall,
                      f1);
        extra += buf;
    }
    std::printf("RESULT images=%zu mae=%.6g mse=%.6g%s\n", records.size(), mae, mse,
                extra.c_str());
    return 0;
}

struct FitFlags {
    std::string loss = "al-papm";
    int steps = 2000;
    double step_size = 0.005;
    std::string init = "uniform";
    std::uint64_t seed = 0;
    double clip = 5.0;
    double lambda = 0.1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--loss", loss, "Objective: al-papm or hd-l2");
        cmd->add_option("--steps", steps, "gradient steps");
        cmd->add_option("--step-size", step_size, "gradient step size");
        cmd->add_option("--init", init, "initial map: uniform or random");
        cmd->add_option("--seed", seed, "RNG seed (required with --init random)");
        cmd->add_option("--clip", clip, "per-pixel gradient clip (0 disables)");
        cmd->add_option("--lambda", lambda, "OT term weight");
    }

    FitConfig config(const CostFlags& cost_flags, const SolverFlags& solver_flags,
                     bool have_seed) const {
        FitConfig cfg;
        if (loss == "al-papm")
            cfg.loss = FitLoss::al_papm;
        else if (loss == "hd-l2")
            cfg.loss = FitLoss::hd_l2;
        else
            throw usage_error("unknown --loss '" + loss + "' (expected al-papm, hd-l2)");
        if (init == "uniform")
            cfg.init = FitInit::uniform_mass_n;
        else if (init == "random")
            cfg.init = FitInit::seeded_random;
        else
            throw usage_error("unknown --init '" + init + "' (expected uniform, random)");
        if (cfg.init == FitInit::seeded_random && !have_seed)
            throw usage_error("--init random requires an explicit --seed");
        cfg.steps = steps;
        cfg.step_size = step_size;
        cfg.seed = seed;
        cfg.grad_clip = clip;
        cfg.lambda = lambda;
        cfg.kernel.params = {cost_flags.sigma, cost_flags.shape};
        cfg.cost = cost_flags.spec();
        cfg.solver = solver_flags.config();
        return cfg;
    }
};

int run_fit(const std::string& points_path, const std::string& grid, const FitFlags& fit_flags,
            const CostFlags& cost_flags, const SolverFlags& solver_flags, bool have_seed,
            const std::string& out, const std::string& trace_path, const std::string& format) {
    const PointSet ps = read_points_file(points_path);
    int rows = ps.height, cols = ps.width;
    if (!grid.empty()) std::tie(rows, cols) = parse_grid(grid);
    const FitConfig cfg = fit_flags.config(cost_flags, solver_flags, have_seed);
    const FitResult res = fit_map(ps, rows, cols, cfg);

    if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        if (!f) throw io_error("cannot open output file: " + trace_path);
        f << "step,loss\n";
        f.precision(12);
        for (std::size_t t = 0; t < res.trace.size(); ++t) f << t << ',' << res.trace[t] << '\n';
    }
    if (!out.empty()) write_map_file(res.map, out, parse_format(format));
    std::printf("RESULT steps=%zu final_loss=%.12g total_mass=%.12g diverged=%d out=%s\n",
                res.trace.empty() ? 0 : res.trace.size() - 1,
                res.trace.empty() ? 0.0 : res.trace.back(), res.map.total_mass(),
                res.diverged ? 1 : 0, out.c_str());
    if (res.diverged) throw numeric_error("fit diverged; partial trace written");
    return 0;
}

int run_sweep(const std::string& points_path, const std::string& radii_text,
              const std::string& seeds_text, int game_level, const FitFlags& fit_flags,
              const CostFlags& cost_flags, const SolverFlags& solver_flags,
              const std::string& out) {
    const PointSet ps = read_points_file(points_path);
    const std::vector<double> radii = parse_doubles(radii_text, "--radii");
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
    const FitConfig cfg = fit_flags.config(cost_flags, solver_flags, true);

    const FitProcedure fitter = [&](const PointSet& noisy) {
        const FitResult res = fit_map(noisy, noisy.height, noisy.width, cfg);
        if (res.diverged) throw numeric_error("fit diverged");
        return res.map;
    };
    const auto table = robustness_sweep(ps, fitter, radii, seeds, game_level);

    std::printf("%10s %12s %12s %10s\n", "magnitude", "mae", "mse", "failures");
    for (const SweepRow& row : table)
        std::printf("%10g %12.6f %12.6f %10zu\n", row.magnitude, row.mae, row.mse, row.failures);

    std::size_t failures = 0;
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw io_error("cannot open output file: " + out);
        f << "magnitude,mae,mse,failures\n";
        f.precision(12);
        for (const SweepRow& row : table) {
            f << row.magnitude << ',' << row.mae << ',' << row.mse << ',' << row.failures << '\n';
            failures += row.failures;
        }
    } else {
        for (const SweepRow& row : table) failures += row.failures;
    }
    std::printf("RESULT rows=%zu failures=%zu out=%s\n", table.size(), failures, out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Point annotation probability maps: generation, OT losses, metrics"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file merged beneath explicit flags");

    // gen-papm
    auto* gen = app.add_subcommand("gen-papm", "Generate the HD-PAPM learning target");
    std::string gen_points, gen_out, gen_norm = "discrete", gen_format = "text";
    double gen_sigma = 4.0, gen_shape = 8.0, gen_tau = 1e-6;
    int gen_stride = 1;
    gen->add_option("--points", gen_points, "point annotation JSON")->required();
    gen->add_option("--sigma", gen_sigma, "kernel bandwidth (pixels)");
    gen->add_option("--shape", gen_shape, "kernel shape parameter");
    gen->add_option("--norm", gen_norm, "normalization: discrete or analytic");
    gen->add_option("--tau", gen_tau, "relative truncation threshold");
    gen->add_option("--stride", gen_stride, "output grid stride");
    gen->add_option("--out", gen_out, "output map file")->required();
    gen->add_option("--format", gen_format, "map format: text or binary");

    // cost-matrix
    auto* cm = app.add_subcommand("cost-matrix", "Write the point-to-pixel cost matrix as CSV");
    std::string cm_points, cm_grid, cm_out;
    CostFlags cm_cost;
    cm->add_option("--points", cm_points, "point annotation JSON")->required();
    cm->add_option("--grid", cm_grid, "grid HxW (default: the annotation extent)");
    cm_cost.attach(cm);
    cm->add_option("--out", cm_out, "output CSV, one row per point")->required();

    // ot-loss
    auto* ot = app.add_subcommand("ot-loss", "Evaluate the AL-PAPM loss and gradient");
    std::string ot_points, ot_pred, ot_grad_out, ot_format = "text";
    CostFlags ot_cost;
    SolverFlags ot_solver;
    double ot_lambda = 0.1;
    ot->add_option("--points", ot_points, "point annotation JSON")->required();
    ot->add_option("--pred", ot_pred, "predicted map file")->required();
    ot_cost.attach(ot);
    ot_solver.attach(ot);
    ot->add_option("--lambda", ot_lambda, "OT term weight");
    ot->add_option("--grad-out", ot_grad_out, "write the gradient field to this map file");
    ot->add_option("--format", ot_format, "gradient map format: text or binary");

    // oracle-ot
    auto* oracle = app.add_subcommand("oracle-ot", "Exact small-instance OT value");
    std::string or_points, or_pred;
    CostFlags or_cost;
    oracle->add_option("--points", or_points, "point annotation JSON")->required();
    oracle->add_option("--pred", or_pred, "predicted map file (n + pixels <= 16)")->required();
    or_cost.attach(oracle);

    // eval
    auto* ev = app.add_subcommand("eval", "Counting metrics over paired directories");
    std::string ev_pred_dir, ev_gt_dir, ev_csv;
    int ev_game = -1;
    bool ev_localize = false;
    double ev_radius = 8.0, ev_peak = 0.5;
    ev->add_option("--pred-dir", ev_pred_dir, "directory of predicted map files")->required();
    ev->add_option("--gt-dir", ev_gt_dir, "directory of point JSON files")->required();
    ev->add_option("--game", ev_game, "also report GAME at this level");
    ev->add_flag("--localize", ev_localize, "also report localization precision/recall/F1");
    ev->add_option("--radius", ev_radius, "localization match radius (pixels)");
    ev->add_option("--peak", ev_peak, "localization peak threshold in (0,1)");
    ev->add_option("--csv", ev_csv, "write per-image rows to this CSV");

    // localize
    auto* loc = app.add_subcommand("localize", "Peak localization against annotations");
    std::string loc_points, loc_pred;
    double loc_radius = 4.0, loc_peak = 0.5;
    loc->add_option("--points", loc_points, "point annotation JSON")->required();
    loc->add_option("--pred", loc_pred, "predicted map file")->required();
    loc->add_option("--radius", loc_radius, "match radius (pixels)");
    loc->add_option("--peak", loc_peak, "peak threshold in (0,1)");

    // perturb
    auto* pb = app.add_subcommand("perturb", "Displace annotations by a fixed radius");
    std::string pb_points, pb_out, pb_mode = "exact";
    double pb_radius = 0.0;
    std::uint64_t pb_seed = 0;
    pb->add_option("--points", pb_points, "point annotation JSON")->required();
    pb->add_option("--radius", pb_radius, "displacement magnitude (pixels)")->required();
    pb->add_option("--seed", pb_seed, "RNG seed")->required();
    pb->add_option("--mode", pb_mode, "exact (fixed radius) or disk (uniform)");
    pb->add_option("--out", pb_out, "output point JSON")->required();

    // sweep
    auto* sw = app.add_subcommand("sweep", "Annotation-noise robustness sweep");
    std::string sw_points, sw_radii = "4,8,16,32", sw_seeds, sw_out;
    int sw_game = 3;
    FitFlags sw_fit;
    CostFlags sw_cost;
    SolverFlags sw_solver;
    sw->add_option("--points", sw_points, "point annotation JSON")->required();
    sw->add_option("--radii", sw_radii, "comma-separated displacement magnitudes");
    sw->add_option("--seeds", sw_seeds, "seeds: a..b or comma list")->required();
    sw->add_option("--game", sw_game, "GAME level for the count error (0 = |mass-n|)");
    sw_fit.attach(sw);
    sw_cost.attach(sw);
    sw_solver.attach(sw);
    sw->add_option("--out", sw_out, "output CSV");

    // fit
    auto* ft = app.add_subcommand("fit", "Gradient-descent fit of a free map");
    std::string ft_points, ft_grid, ft_out, ft_trace, ft_format = "text";
    FitFlags ft_fit;
    CostFlags ft_cost;
    SolverFlags ft_solver;
    ft->add_option("--points", ft_points, "point annotation JSON")->required();
    ft->add_option("--grid", ft_grid, "grid HxW (must match the annotation extent)");
    ft_fit.attach(ft);
    ft_cost.attach(ft);
    ft_solver.attach(ft);
    ft->add_option("--out", ft_out, "output map file");
    ft->add_option("--trace", ft_trace, "write the per-step loss trace CSV");
    ft->add_option("--format", ft_format, "map format: text or binary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (*gen)
            return run_gen_papm(gen_points, gen_sigma, gen_shape, gen_norm, gen_tau, gen_stride,
                                gen_out, gen_format);
        if (*cm) return run_cost_matrix(cm_points, cm_grid, cm_cost, cm_out);
        if (*ot)
            return run_ot_loss(ot_points, ot_pred, ot_cost, ot_solver, ot_lambda, ot_grad_out,
                               ot_format);
        if (*oracle) return run_oracle_ot(or_points, or_pred, or_cost);
        if (*ev)
            return run_eval(ev_pred_dir, ev_gt_dir, ev_game, ev_localize, ev_radius, ev_peak,
                            ev_csv);
        if (*loc) return run_localize(loc_points, loc_pred, loc_peak, loc_radius);
        if (*pb) return run_perturb(pb_points, pb_radius, pb_seed, pb_mode, pb_out);
        if (*sw)
            return run_sweep(sw_points, sw_radii, sw_seeds, sw_game, sw_fit, sw_cost, sw_solver,
                             sw_out);
        if (*ft)
            return run_fit(ft_points, ft_grid, ft_fit, ft_cost, ft_solver,
                           ft->count("--seed") > 0, ft_out, ft_trace, ft_format);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
