#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <stdexcept>
#include <string>

#include "papm/papm.hpp"

namespace py = pybind11;

namespace {

papm::PointSet make_point_set(const py::array_t<double>& points, int width, int height) {
    papm::PointSet ps;
    ps.width = width;
    ps.height = height;
    if (points.size() > 0) {
        if (points.ndim() != 2 || points.shape(1) != 2)
            throw std::invalid_argument("points must be an (n, 2) array of [x, y]");
        auto a = points.unchecked<2>();
        ps.points.reserve(static_cast<std::size_t>(a.shape(0)));
        for (py::ssize_t i = 0; i < a.shape(0); ++i) ps.points.push_back({a(i, 0), a(i, 1)});
    }
    papm::validate(ps);
    return ps;
}

papm::GridMap make_grid_map(const py::array_t<double>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("map must be a 2-D array");
    auto a = arr.unchecked<2>();
    papm::GridMap map(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    for (py::ssize_t r = 0; r < a.shape(0); ++r)
        for (py::ssize_t c = 0; c < a.shape(1); ++c)
            map.at(static_cast<int>(r), static_cast<int>(c)) = a(r, c);
    return map;
}

py::array_t<double> to_array(const papm::GridMap& map) {
    py::array_t<double> out({map.rows, map.cols});
    std::memcpy(out.mutable_data(), map.values.data(), map.values.size() * sizeof(double));
    return out;
}

py::array_t<double> points_array(const papm::PointSet& ps) {
    py::array_t<double> out({static_cast<py::ssize_t>(ps.count()), py::ssize_t(2)});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < ps.count(); ++i) {
        a(i, 0) = ps.points[i].x;
        a(i, 1) = ps.points[i].y;
    }
    return out;
}

papm::CostSpec make_cost_spec(const std::string& family, double sigma, double shape,
                              double scale, double power) {
    papm::CostSpec spec;
    if (family == "ggd-l2")
        spec.family = papm::CostFamily::ggd_l2_combination;
    else if (family == "sq-euclid")
        spec.family = papm::CostFamily::squared_euclidean;
    else if (family == "power")
        spec.family = papm::CostFamily::power_ratio;
    else
        throw std::invalid_argument("unknown cost family: " + family +
                                    " (expected ggd-l2, sq-euclid, or power)");
    spec.params = {sigma, shape};
    spec.power_scale = scale;
    spec.power_exponent = power;
    return spec;
}

papm::CostMatrix make_cost_matrix(const py::array_t<double>& C) {
    if (C.ndim() != 2) throw std::invalid_argument("cost matrix must be a 2-D array");
    auto a = C.unchecked<2>();
    papm::CostMatrix cm;
    cm.rows = static_cast<std::size_t>(a.shape(0));
    cm.cols = static_cast<std::size_t>(a.shape(1));
    cm.entries.resize(cm.rows * cm.cols);
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            cm.entries[static_cast<std::size_t>(i) * cm.cols + j] = a(i, j);
    return cm;
}

papm::SinkhornConfig make_solver_config(double eps, bool eps_absolute, int max_iters,
                                        double tol, double decay) {
    papm::SinkhornConfig cfg;
    cfg.epsilon = eps;
    cfg.epsilon_is_absolute = eps_absolute;
    cfg.max_iters = max_iters;
    cfg.marginal_tol = tol;
    cfg.epsilon_decay = decay;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_papm, m) {
    m.doc() = "Point annotation probability maps and OT counting losses";
    m.attr("__version__") = "0.1.0";

    m.def(
        "ggd_kernel",
        [](double d, double sigma, double shape) {
            return papm::kernel_value(d, {sigma, shape});
        },
        py::arg("d"), py::arg("sigma") = 4.0, py::arg("shape") = 8.0,
        "Unnormalized GGD kernel exp(-(d^2/2sigma^2)^(s/2)).");

    m.def(
        "gen_papm",
        [](const py::array_t<double>& points, int width, int height, double sigma, double shape,
           const std::string& norm, double tau, int stride) {
            papm::KernelSpec spec;
            spec.params = {sigma, shape};
            spec.truncation_tau = tau;
            spec.stride = stride;
            if (norm == "discrete")
                spec.normalization = papm::KernelNorm::discrete_renormalized;
            else if (norm == "analytic")
                spec.normalization = papm::KernelNorm::analytic;
            else
                throw std::invalid_argument("norm must be 'discrete' or 'analytic'");
            return to_array(papm::generate_hd_papm(make_point_set(points, width, height), spec));
        },
        py::arg("points"), py::arg("width"), py::arg("height"), py::arg("sigma") = 4.0,
        py::arg("shape") = 8.0, py::arg("norm") = "discrete", py::arg("tau") = 1e-6,
        py::arg("stride") = 1,
        "Generate the HD-PAPM learning target from annotation points.");

    m.def(
        "l2_loss",
        [](const py::array_t<double>& pred, const py::array_t<double>& target) {
            auto l = papm::l2_loss(make_grid_map(pred), make_grid_map(target));
            return py::make_tuple(l.value, to_array(l.grad));
        },
        py::arg("pred"), py::arg("target"),
        "Per-pixel L2 loss: (1/2 sum (target-pred)^2, grad w.r.t. pred).");

    m.def(
        "transport_cost",
        [](double d, const std::string& family, double sigma, double shape, double scale,
           double power) { return papm::cost(d, make_cost_spec(family, sigma, shape, scale, power)); },
        py::arg("d"), py::arg("family") = "ggd-l2", py::arg("sigma") = 16.0, py::arg("shape") = 2.0,
        py::arg("scale") = 16.0, py::arg("power") = 4.0);

    m.def(
        "build_cost_matrix",
        [](const py::array_t<double>& points, int width, int height, const std::string& family,
           double sigma, double shape, double scale, double power) {
            const auto cm = papm::build_cost_matrix(make_point_set(points, width, height), height,
                                                    width, make_cost_spec(family, sigma, shape, scale, power));
            py::array_t<double> out({static_cast<py::ssize_t>(cm.rows),
                                     static_cast<py::ssize_t>(cm.cols)});
            std::memcpy(out.mutable_data(), cm.entries.data(), cm.entries.size() * sizeof(double));
            return out;
        },
        py::arg("points"), py::arg("width"), py::arg("height"), py::arg("family") = "ggd-l2",
        py::arg("sigma") = 16.0, py::arg("shape") = 2.0, py::arg("scale") = 16.0,
        py::arg("power") = 4.0,
        "Point-to-pixel transport costs; one row per point, pixels row-major.");

    m.def(
        "sinkhorn",
        [](const py::array_t<double>& C, const std::vector<double>& source,
           const std::vector<double>& target, double eps, bool eps_absolute, int max_iters,
           double tol, double decay) {
            const auto sol = papm::sinkhorn(make_cost_matrix(C), source, target,
                                            make_solver_config(eps, eps_absolute, max_iters, tol, decay));
            py::array_t<double> plan({static_cast<py::ssize_t>(sol.rows),
                                      static_cast<py::ssize_t>(sol.cols)});
            std::memcpy(plan.mutable_data(), sol.plan.data(), sol.plan.size() * sizeof(double));
            py::dict out;
            out["plan"] = plan;
            out["value"] = sol.value;
            out["value_regularized"] = sol.value_regularized;
            out["dual_source"] = sol.dual_source;
            out["dual_target"] = sol.dual_target;
            out["iterations"] = sol.iterations_used;
            out["marginal_violation"] = sol.marginal_violation;
            out["converged"] = sol.converged;
            out["epsilon"] = sol.epsilon_used;
            return out;
        },
        py::arg("C"), py::arg("source"), py::arg("target"), py::arg("eps") = 0.01,
        py::arg("eps_absolute") = false, py::arg("max_iters") = 500, py::arg("tol") = 1e-6,
        py::arg("decay") = 1.0,
        "Log-domain Sinkhorn for balanced entropic OT between two simplex vectors.");

    m.def(
        "exact_ot",
        [](const py::array_t<double>& C, const std::vector<double>& source,
           const std::vector<double>& target) {
            const auto sol = papm::exact_ot(make_cost_matrix(C), source, target);
            py::array_t<double> plan({static_cast<py::ssize_t>(sol.rows),
                                      static_cast<py::ssize_t>(sol.cols)});
            std::memcpy(plan.mutable_data(), sol.plan.data(), sol.plan.size() * sizeof(double));
            return py::make_tuple(sol.value, plan);
        },
        py::arg("C"), py::arg("source"), py::arg("target"),
        "Exact transportation optimum; small instances only (n + m <= 16).");

    m.def(
        "ot_gradient",
        [](const std::vector<double>& dual_target, const py::array_t<double>& pred) {
            papm::TransportSolution sol;
            sol.cols = dual_target.size();
            sol.dual_target = dual_target;
            return to_array(papm::ot_gradient(sol, make_grid_map(pred)));
        },
        py::arg("dual_target"), py::arg("pred"),
        "Envelope gradient of the OT value w.r.t. unnormalized pixel values.");

    m.def(
        "similarity_count_loss",
        [](const py::array_t<double>& points, int width, int height,
           const py::array_t<double>& pred) {
            auto l = papm::similarity_count_loss(make_point_set(points, width, height),
                                                 make_grid_map(pred));
            return py::make_tuple(l.value, to_array(l.grad));
        },
        py::arg("points"), py::arg("width"), py::arg("height"), py::arg("pred"));

    m.def(
        "al_papm_loss",
        [](const py::array_t<double>& points, const py::array_t<double>& pred,
           const std::string& family, double sigma, double shape, double scale, double power,
           double lambda, double eps, bool eps_absolute, int max_iters, double tol, double decay) {
            const auto pm = make_grid_map(pred);
            const auto ps = make_point_set(points, pm.cols, pm.rows);
            const auto l = papm::al_papm_loss(
                ps, pm, make_cost_spec(family, sigma, shape, scale, power),
                make_solver_config(eps, eps_absolute, max_iters, tol, decay), lambda);
            py::dict out;
            out["ot_term"] = l.ot_term;
            out["similarity_term"] = l.similarity_term;
            out["total"] = l.total;
            out["lambda"] = l.lambda;
            out["grad"] = to_array(l.grad);
            out["iterations"] = l.diagnostics.iterations;
            out["marginal_violation"] = l.diagnostics.marginal_violation;
            out["converged"] = l.diagnostics.converged;
            out["epsilon"] = l.diagnostics.epsilon;
            out["clamped_costs"] = l.diagnostics.clamped_costs;
            out["degenerate"] = l.diagnostics.degenerate;
            return out;
        },
        py::arg("points"), py::arg("pred"), py::arg("family") = "ggd-l2", py::arg("sigma") = 16.0,
        py::arg("shape") = 2.0, py::arg("scale") = 16.0, py::arg("power") = 4.0,
        py::arg("lam") = 0.1, py::arg("eps") = 0.01, py::arg("eps_absolute") = false,
        py::arg("max_iters") = 500, py::arg("tol") = 1e-6, py::arg("decay") = 1.0,
        "Combined loss lambda * l_C + l_S with gradient w.r.t. the predicted map.");

    m.def(
        "mae_mse",
        [](const std::vector<double>& estimated, const std::vector<double>& ground_truth) {
            if (estimated.size() != ground_truth.size())
                throw std::invalid_argument("estimated and ground_truth lengths differ");
            std::vector<papm::EvalRecord> records(estimated.size());
            for (std::size_t i = 0; i < records.size(); ++i)
                records[i] = {estimated[i], ground_truth[i]};
            auto [mae, mse] = papm::mae_mse(records);
            return py::make_tuple(mae, mse);
        },
        py::arg("estimated"), py::arg("ground_truth"));

    m.def(
        "game",
        [](const py::array_t<double>& pred, const py::array_t<double>& points, int level) {
            const auto pm = make_grid_map(pred);
            return papm::game(pm, make_point_set(points, pm.cols, pm.rows), level);
        },
        py::arg("pred"), py::arg("points"), py::arg("level"),
        "Grid average count error over a 2^L x 2^L tiling.");

    m.def(
        "localize_and_match",
        [](const py::array_t<double>& pred, const py::array_t<double>& points,
           double peak_threshold, double match_radius) {
            const auto pm = make_grid_map(pred);
            const auto res = papm::localize_and_match(
                pm, make_point_set(points, pm.cols, pm.rows), peak_threshold, match_radius);
            py::dict out;
            out["precision"] = res.precision;
            out["recall"] = res.recall;
            out["f1"] = res.f1;
            out["predicted"] = points_array({0, 0, res.predicted});
            out["matches"] = res.matches;
            return out;
        },
        py::arg("pred"), py::arg("points"), py::arg("peak_threshold") = 0.5,
        py::arg("match_radius") = 4.0);

    m.def(
        "perturb",
        [](const py::array_t<double>& points, int width, int height, double magnitude,
           const std::string& mode, std::uint64_t seed) {
            papm::PerturbSpec spec;
            spec.magnitude = magnitude;
            spec.seed = seed;
            if (mode == "exact")
                spec.mode = papm::PerturbMode::exact_radius;
            else if (mode == "disk")
                spec.mode = papm::PerturbMode::uniform_disk;
            else
                throw std::invalid_argument("mode must be 'exact' or 'disk'");
            const auto out = papm::perturb(make_point_set(points, width, height), spec);
            return py::make_tuple(points_array(out.points), out.clamped);
        },
        py::arg("points"), py::arg("width"), py::arg("height"), py::arg("magnitude"),
        py::arg("mode") = "exact", py::arg("seed") = 0,
        "Displace every point independently; deterministic per (seed, index).");

    m.def(
        "fit_map",
        [](const py::array_t<double>& points, int width, int height, const std::string& loss,
           int steps, double step_size, const std::string& init, std::uint64_t seed,
           double grad_clip, double sigma, double shape, const std::string& family, double lambda,
           double eps, bool eps_absolute, int max_iters, double tol, double decay) {
            papm::FitConfig cfg;
            if (loss == "hd-l2")
                cfg.loss = papm::FitLoss::hd_l2;
            else if (loss == "al-papm")
                cfg.loss = papm::FitLoss::al_papm;
            else
                throw std::invalid_argument("loss must be 'hd-l2' or 'al-papm'");
            cfg.steps = steps;
            cfg.step_size = step_size;
            if (init == "uniform")
                cfg.init = papm::FitInit::uniform_mass_n;
            else if (init == "random")
                cfg.init = papm::FitInit::seeded_random;
            else
                throw std::invalid_argument("init must be 'uniform' or 'random'");
            cfg.seed = seed;
            cfg.grad_clip = grad_clip;
            cfg.kernel.params = {sigma, shape};
            cfg.cost = make_cost_spec(family, sigma, shape, 16.0, 4.0);
            cfg.lambda = lambda;
            cfg.solver = make_solver_config(eps, eps_absolute, max_iters, tol, decay);
            const auto ps = make_point_set(points, width, height);
            const auto res = papm::fit_map(ps, height, width, cfg);
            py::dict out;
            out["map"] = to_array(res.map);
            out["trace"] = res.trace;
            out["diverged"] = res.diverged;
            return out;
        },
        py::arg("points"), py::arg("width"), py::arg("height"), py::arg("loss") = "al-papm",
        py::arg("steps") = 2000, py::arg("step_size") = 0.05, py::arg("init") = "uniform",
        py::arg("seed") = 0, py::arg("grad_clip") = 5.0, py::arg("sigma") = 16.0,
        py::arg("shape") = 2.0, py::arg("family") = "ggd-l2", py::arg("lam") = 0.1,
        py::arg("eps") = 0.01, py::arg("eps_absolute") = false, py::arg("max_iters") = 200,
        py::arg("tol") = 1e-6, py::arg("decay") = 1.0,
        "Gradient-descent fit of a free nonnegative map under hd-l2 or al-papm.");

    m.def("read_points", [](const std::string& path) {
        const auto ps = papm::read_points_file(path);
        return py::make_tuple(points_array(ps), ps.width, ps.height);
    });
    m.def("write_points",
          [](const std::string& path, const py::array_t<double>& points, int width, int height) {
              papm::write_points_file(make_point_set(points, width, height), path);
          });
    m.def("read_map", [](const std::string& path) { return to_array(papm::read_map_file(path)); });
    m.def(
        "write_map",
        [](const std::string& path, const py::array_t<double>& map, const std::string& format) {
            papm::write_map_file(make_grid_map(map), path,
                                 format == "binary" ? papm::MapFormat::binary
                                                    : papm::MapFormat::text);
        },
        py::arg("path"), py::arg("map"), py::arg("format") = "text");
}
