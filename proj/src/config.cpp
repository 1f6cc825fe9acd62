#include "mimfrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mimfrac/errors.hpp"
#include "mimfrac/fd_solver.hpp"

namespace mimfrac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config: " + path + ": " + what);
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) fail(join(path, key), "unknown field");
    }
}

const json& require_object(const json& parent, const std::string& parent_path, const char* key) {
    const auto it = parent.find(key);
    if (it == parent.end()) fail(join(parent_path, key), "required field missing");
    if (!it->is_object()) fail(join(parent_path, key), "expected an object");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

double required_number(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "required field missing");
    return number(*it, join(path, key));
}

template <typename T>
void optional_number(const json& obj, const std::string& path, const char* key, T& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    const double d = number(*it, join(path, key));
    if constexpr (std::is_integral_v<T>) {
        if (d != std::floor(d) || d < 0 || d > 1e15) fail(join(path, key), "expected a non-negative integer");
    }
    out = static_cast<T>(d);
}

Orders pair_of(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [alpha, gamma]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

template <typename F>
void rethrow_as(const std::string& path, F&& check) {
    try {
        check();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
}

}  // namespace

ModelParams ExperimentSpec::model_with_orders() const {
    if (!exact) throw ValidationError("config: model.alpha/model.gamma are required for this command");
    return model.with_orders(exact->alpha, exact->gamma);
}

ExperimentSpec parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, json_text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (json_text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError("config: JSON syntax error at line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) fail("<root>", "expected a JSON object");
    reject_unknown(root, "", {"model", "grid", "x0", "noise_levels", "replicates", "seed", "inversion",
                              "reference", "output_dir"});

    ExperimentSpec spec;

    const json& model = require_object(root, "", "model");
    reject_unknown(model, "model", {"P", "R1", "R2", "beta", "omega", "lambda", "mu", "alpha", "gamma"});
    ModelParams& p = spec.model;
    p.P = required_number(model, "model", "P");
    p.R1 = required_number(model, "model", "R1");
    p.R2 = required_number(model, "model", "R2");
    p.beta = required_number(model, "model", "beta");
    p.omega = required_number(model, "model", "omega");
    p.lambda = required_number(model, "model", "lambda");
    p.mu = required_number(model, "model", "mu");
    rethrow_as("model", [&] { validate_physical(p); });
    const bool has_alpha = model.contains("alpha");
    const bool has_gamma = model.contains("gamma");
    if (has_alpha != has_gamma) fail("model", "alpha and gamma must be given together");
    if (has_alpha) {
        spec.exact = Orders{required_number(model, "model", "alpha"), required_number(model, "model", "gamma")};
        p.alpha = spec.exact->alpha;
        p.gamma = spec.exact->gamma;
        rethrow_as("model", [&] { validate_params(p); });
    }

    if (root.contains("grid")) {
        const json& grid = require_object(root, "", "grid");
        reject_unknown(grid, "grid", {"m", "n", "T"});
        std::size_t m = spec.grid.m();
        std::size_t n = spec.grid.n();
        double T = spec.grid.T();
        optional_number(grid, "grid", "m", m);
        optional_number(grid, "grid", "n", n);
        optional_number(grid, "grid", "T", T);
        rethrow_as("grid", [&] { spec.grid = GridSpec(m, n, T); });
    }

    optional_number(root, "", "x0", spec.x0);
    rethrow_as("x0", [&] { node_index(spec.grid, spec.x0); });

    if (const auto it = root.find("noise_levels"); it != root.end()) {
        if (!it->is_array()) fail("noise_levels", "expected an array of numbers");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "noise_levels[" + std::to_string(i) + "]";
            const double d = number((*it)[i], path);
            if (d < 0.0) fail(path, "noise level must be >= 0");
            spec.noise_levels.push_back(d);
        }
    }
    optional_number(root, "", "replicates", spec.replicates);
    if (spec.replicates < 1) fail("replicates", "must be >= 1");
    optional_number(root, "", "seed", spec.seed);

    if (root.contains("inversion")) {
        const json& inv = require_object(root, "", "inversion");
        reject_unknown(inv, "inversion", {"z0", "j0", "sigma", "max_iter", "step_tol", "jacobian_step",
                                          "clamp_margin", "stagnation_window", "stagnation_kappa"});
        InversionConfig& c = spec.inversion;
        if (inv.contains("z0")) c.z0 = pair_of(inv["z0"], "inversion.z0");
        optional_number(inv, "inversion", "j0", c.j0);
        optional_number(inv, "inversion", "sigma", c.sigma);
        optional_number(inv, "inversion", "max_iter", c.max_iter);
        optional_number(inv, "inversion", "step_tol", c.step_tol);
        optional_number(inv, "inversion", "jacobian_step", c.jacobian_step);
        optional_number(inv, "inversion", "clamp_margin", c.clamp_margin);
        optional_number(inv, "inversion", "stagnation_window", c.stagnation_window);
        optional_number(inv, "inversion", "stagnation_kappa", c.stagnation_kappa);
        rethrow_as("inversion", [&] { validate(c); });
    }

    if (root.contains("reference")) {
        const json& ref = require_object(root, "", "reference");
        reject_unknown(ref, "reference", {"points", "nodes", "tolerance", "scale_floor"});
        if (const auto it = ref.find("points"); it != ref.end()) {
            if (!it->is_array()) fail("reference.points", "expected an array of [x, t] pairs");
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string path = "reference.points[" + std::to_string(i) + "]";
                const json& pt = (*it)[i];
                if (!pt.is_array() || pt.size() != 2) fail(path, "expected [x, t]");
                const double x = number(pt[0], path + "[0]");
                const double t = number(pt[1], path + "[1]");
                if (x < 0.0 || x > 1.0) fail(path, "x must lie in [0,1]");
                if (t <= 0.0) fail(path, "t must be > 0");
                spec.reference.points.emplace_back(x, t);
            }
        }
        ContourQuadrature& q = spec.reference.quadrature;
        optional_number(ref, "reference", "nodes", q.nodes);
        optional_number(ref, "reference", "tolerance", q.tolerance);
        optional_number(ref, "reference", "scale_floor", q.scale_floor);
        rethrow_as("reference", [&] { validate(q); });
    }

    if (const auto it = root.find("output_dir"); it != root.end()) {
        if (!it->is_string()) fail("output_dir", "expected a string");
        spec.output_dir = it->get<std::string>();
    }
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentSpec preset(std::string_view id) {
    ExperimentSpec spec;
    spec.noise_levels = {0.05, 0.01, 0.001, 0.0001, 0.0};
    spec.replicates = 10;
    if (id == "ex51") {
        spec.model = {5.0, 2.0, 2.0, 0.5, 1.5, 0.05, 0.1, 0.8, 0.25};
        spec.inversion.z0 = {0.0, 0.0};
    } else if (id == "ex52") {
        spec.model = {1.0, 2.0, 2.0, 0.5, 1.5, 0.05, 0.1, 0.75, 0.75};
        spec.inversion.z0 = {0.0, 0.0};
    } else if (id == "ex53") {
        spec.model = {1.0, 2.0, 2.0, 0.5, 0.5, 0.05, 0.5, 0.3, 0.8};
        spec.inversion.z0 = {1.0, 1.0};
    } else {
        std::string ids;
        for (auto valid : kPresetIds) ids += (ids.empty() ? "" : ", ") + std::string(valid);
        throw ValidationError("unknown experiment id '" + std::string(id) + "'; valid ids: " + ids);
    }
    spec.exact = Orders{spec.model.alpha, spec.model.gamma};
    return spec;
}

}  // namespace mimfrac
