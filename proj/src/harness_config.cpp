#include <cmath>
#include <set>

#include "randop/errors.hpp"
#include "randop/harness.hpp"

namespace randop::harness {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    require(obj.is_object(), where + " must be an object");
    for (const auto& [key, _] : obj.items())
        require(allowed.contains(key), "unknown key '" + key + "' in " + where);
}

double get_real(const json& v, const std::string& key) {
    require(v.is_number(), "'" + key + "' must be a number");
    const double x = v.get<double>();
    require(std::isfinite(x), "'" + key + "' must be finite");
    return x;
}

std::int64_t get_int(const json& v, const std::string& key) {
    require(v.is_number_integer(), "'" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

Window get_window(const json& v, const std::string& key) {
    require(v.is_array() && v.size() == 2, "'" + key + "' must be a [lo, hi] pair");
    return Window(get_real(v[0], key), get_real(v[1], key));
}

std::vector<double> get_reals(const json& v, const std::string& key) {
    require(v.is_array(), "'" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(get_real(x, key));
    return out;
}

ProcessSpec parse_process(const json& v) {
    require(v.is_object() && v.contains("kind") && v["kind"].is_string(), "'process' needs a string 'kind'");
    const auto kind = v["kind"].get<std::string>();
    if (kind == "poisson") {
        require_keys(v, {"kind", "intensity"}, "process");
        pointproc::Poisson p;
        if (v.contains("intensity")) p.intensity = get_real(v["intensity"], "intensity");
        return p;
    }
    if (kind == "renewal") {
        require_keys(v, {"kind", "shape", "mean"}, "process");
        pointproc::GammaRenewal r;
        if (v.contains("shape")) r.shape = get_real(v["shape"], "shape");
        if (v.contains("mean")) r.mean = get_real(v["mean"], "mean");
        return r;
    }
    if (kind == "lattice") {
        require_keys(v, {"kind", "spacing", "shift"}, "process");
        pointproc::ShiftedLattice l;
        if (v.contains("spacing")) l.spacing = get_real(v["spacing"], "spacing");
        if (v.contains("shift")) l.shift = get_real(v["shift"], "shift");
        return l;
    }
    throw InvalidArgument("unknown process kind '" + kind + "'");
}

gaussians::Atom parse_atom(const json& v) {
    require(v.is_object() && v.contains("type") && v["type"].is_string(), "target atoms need a string 'type'");
    const auto type = v["type"].get<std::string>();
    if (type == "gaussian") {
        require_keys(v, {"type", "center", "variance", "coefficient"}, "gaussian atom");
        gaussians::GaussianBump b;
        if (v.contains("center")) b.center = get_real(v["center"], "center");
        if (v.contains("variance")) b.variance = get_real(v["variance"], "variance");
        if (v.contains("coefficient")) b.coefficient = get_real(v["coefficient"], "coefficient");
        return b;
    }
    if (type == "indicator") {
        require_keys(v, {"type", "lo", "hi", "coefficient"}, "indicator atom");
        gaussians::IndicatorAtom a;
        if (v.contains("lo")) a.lo = get_real(v["lo"], "lo");
        if (v.contains("hi")) a.hi = get_real(v["hi"], "hi");
        if (v.contains("coefficient")) a.coefficient = get_real(v["coefficient"], "coefficient");
        return a;
    }
    throw InvalidArgument("unknown atom type '" + type + "'");
}

json process_to_json(const ProcessSpec& spec) {
    if (const auto* p = std::get_if<pointproc::Poisson>(&spec)) return {{"kind", "poisson"}, {"intensity", p->intensity}};
    if (const auto* r = std::get_if<pointproc::GammaRenewal>(&spec))
        return {{"kind", "renewal"}, {"shape", r->shape}, {"mean", r->mean}};
    const auto& l = std::get<pointproc::ShiftedLattice>(spec);
    json out{{"kind", "lattice"}, {"spacing", l.spacing}};
    if (l.shift) out["shift"] = *l.shift;
    return out;
}

json atom_to_json(const gaussians::Atom& a) {
    if (const auto* b = std::get_if<gaussians::GaussianBump>(&a))
        return {{"type", "gaussian"}, {"center", b->center}, {"variance", b->variance}, {"coefficient", b->coefficient}};
    const auto& i = std::get<gaussians::IndicatorAtom>(a);
    return {{"type", "indicator"}, {"lo", i.lo}, {"hi", i.hi}, {"coefficient", i.coefficient}};
}

bool is_operator_experiment(const std::string& e) {
    return e == "nuclear" || e == "widths" || e == "muntz" || e == "spectrum";
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment) {
    const auto& names = experiment_names();
    require(std::find(names.begin(), names.end(), experiment) != names.end(),
            "unknown experiment '" + experiment + "'");
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "campbell") {
        c.process = pointproc::Poisson{2.0};
        c.window = Window(-30.0, 30.0);
        c.replications = 2000;
        c.probes = {0.0};
    } else if (experiment == "frame-bound") {
        c.window = Window(-30.0, 30.0);
        c.replications = 2000;
        c.target = {gaussians::IndicatorAtom{0.0, 1.0, 1.0}};
    } else if (experiment == "nuclear") {
        c.interval = Window(0.0, 1.0);
        c.window = Window(-12.0, 13.0);
        c.replications = 1000;
    } else if (experiment == "widths") {
        c.variance = 2.0;
        c.interval = Window(-3.0, 3.0);
        c.window = Window(-12.0, 12.0);
        c.replications = 50;
        c.x_grid = {3, 4, 5, 6, 7, 8, 9, 10};
    } else if (experiment == "norm-growth") {
        c.n_grid = {4, 16, 64, 256};
        c.window = Window(-268.0, 268.0);
        c.replications = 50;
    } else if (experiment == "divergence") {
        c.window = Window(0.0, 1001.0);
        c.replications = 500;
        c.x_grid = {10, 100, 1000};
    } else if (experiment == "muntz") {
        c.process = pointproc::Poisson{2.0};
        c.interval = Window(-5.0, 5.0);
        c.window = Window(-8.0, 8.0);
        c.replications = 50;
        c.target = {gaussians::GaussianBump{0.3, 0.7, 1.0}};
    } else if (experiment == "sample") {
        c.window = Window(0.0, 100.0);
    } else if (experiment == "spectrum") {
        c.interval = Window(-3.0, 3.0);
        c.window = Window(-16.0, 16.0);
    }
    return c;
}

ExperimentConfig parse_config(const json& doc, const std::string& experiment) {
    require_keys(doc,
                 {"experiment", "process", "variance", "interval", "window", "replications", "master_seed",
                  "tail_tol", "probes", "x_grid", "n_grid", "target", "ordering", "muntz_tolerance"},
                 "config");
    if (doc.contains("experiment")) {
        require(doc["experiment"].is_string(), "'experiment' must be a string");
        require(doc["experiment"].get<std::string>() == experiment,
                "config is for experiment '" + doc["experiment"].get<std::string>() + "', not '" + experiment + "'");
    }
    ExperimentConfig c = default_config(experiment);
    if (doc.contains("process")) c.process = parse_process(doc["process"]);
    if (doc.contains("variance")) c.variance = get_real(doc["variance"], "variance");
    if (doc.contains("interval")) c.interval = get_window(doc["interval"], "interval");
    if (doc.contains("window")) c.window = get_window(doc["window"], "window");
    if (doc.contains("replications")) c.replications = get_int(doc["replications"], "replications");
    if (doc.contains("master_seed")) {
        const auto& s = doc["master_seed"];
        require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0),
                "'master_seed' must be a nonnegative integer");
        c.master_seed = s.get<std::uint64_t>();
    }
    if (doc.contains("tail_tol")) c.tail_tol = get_real(doc["tail_tol"], "tail_tol");
    if (doc.contains("probes")) c.probes = get_reals(doc["probes"], "probes");
    if (doc.contains("x_grid")) c.x_grid = get_reals(doc["x_grid"], "x_grid");
    if (doc.contains("n_grid")) {
        require(doc["n_grid"].is_array(), "'n_grid' must be an array");
        c.n_grid.clear();
        for (const auto& n : doc["n_grid"]) c.n_grid.push_back(get_int(n, "n_grid"));
    }
    if (doc.contains("target")) {
        require(doc["target"].is_array(), "'target' must be an array of atoms");
        c.target.atoms.clear();
        for (const auto& a : doc["target"]) c.target.atoms.push_back(parse_atom(a));
    }
    if (doc.contains("ordering")) {
        require(doc["ordering"].is_string(), "'ordering' must be a string");
        const auto o = doc["ordering"].get<std::string>();
        if (o == "by-distance-to-interval-center") c.ordering = muntz::Ordering::ByDistanceToCenter;
        else if (o == "by-index") c.ordering = muntz::Ordering::ByIndex;
        else throw InvalidArgument("unknown ordering '" + o + "'");
    }
    if (doc.contains("muntz_tolerance")) c.muntz_tolerance = get_real(doc["muntz_tolerance"], "muntz_tolerance");
    validate(c);
    return c;
}

void validate(const ExperimentConfig& c) {
    const auto& e = c.experiment;
    pointproc::validate(c.process);
    require(std::isfinite(c.variance) && c.variance > 0.0, "variance must be positive");
    require(c.replications >= 1, "replications must be >= 1");
    require(c.tail_tol > 0.0 && c.tail_tol < 1.0, "tail_tol must lie in (0, 1)");
    gaussians::validate(c.target);
    if (is_operator_experiment(e)) require(c.window.covers(c.interval), "window must contain the interval");
    if (e == "campbell") require(!c.probes.empty(), "campbell needs at least one probe");
    if (e == "frame-bound") require(gaussians::norm_sq(c.target, std::nullopt) > 0.0, "frame-bound needs ||f|| > 0");
    if (e == "muntz") require(gaussians::norm_sq(c.target, c.interval) > 0.0, "muntz needs ||f|| > 0 on the interval");
    if (e == "muntz") require(c.muntz_tolerance > 0.0, "muntz_tolerance must be positive");
    if (e == "widths") {
        require(!c.x_grid.empty(), "widths needs a nonempty x_grid");
        for (const double x : c.x_grid) require(x > 0.0, "x_grid entries must be positive");
    }
    if (e == "divergence") {
        require(!c.x_grid.empty(), "divergence needs a nonempty x_grid");
        for (std::size_t i = 0; i < c.x_grid.size(); ++i) {
            require(c.x_grid[i] >= 1.0, "divergence x_grid entries must be >= 1");
            require(i == 0 || c.x_grid[i - 1] < c.x_grid[i], "x_grid must be increasing");
        }
        require(c.window.lo <= 1.0 && c.x_grid.back() <= c.window.hi, "window must cover [1, max x]");
    }
    if (e == "norm-growth") {
        require(!c.n_grid.empty(), "norm-growth needs a nonempty n_grid");
        for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
            require(c.n_grid[i] >= 3, "n_grid entries must be >= 3");
            require(i == 0 || c.n_grid[i - 1] < c.n_grid[i], "n_grid must be increasing");
        }
        const double pad = 12.0 * std::sqrt(c.variance);
        const auto nmax = static_cast<double>(c.n_grid.back());
        require(c.window.lo <= -nmax - pad && nmax + pad <= c.window.hi,
                "window smaller than the largest n plus 12 sqrt(variance) padding");
    }
}

json to_json(const ExperimentConfig& c) {
    json out{{"experiment", c.experiment},
             {"process", process_to_json(c.process)},
             {"variance", c.variance},
             {"interval", {c.interval.lo, c.interval.hi}},
             {"window", {c.window.lo, c.window.hi}},
             {"replications", c.replications},
             {"master_seed", c.master_seed},
             {"tail_tol", c.tail_tol},
             {"probes", c.probes},
             {"x_grid", c.x_grid},
             {"n_grid", c.n_grid},
             {"ordering", c.ordering == muntz::Ordering::ByIndex ? "by-index" : "by-distance-to-interval-center"},
             {"muntz_tolerance", c.muntz_tolerance}};
    out["target"] = json::array();
    for (const auto& a : c.target.atoms) out["target"].push_back(atom_to_json(a));
    return out;
}

}  // namespace randop::harness
