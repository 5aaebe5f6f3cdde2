#include "srbf/config.hpp"

#include "srbf/reference.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace srbf {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"problem", {"name", "boundary_mode", "eikonal_eps", "reference_intervals"}},
        {"collocation", {"kind", "n_per_dim", "k1", "k2", "seed", "lambda"}},
        {"solver",
         {"alpha", "alpha_ladder", "m_candidates", "eta", "metropolis_T0", "linesearch_h", "lm_eps",
          "stop_eps", "max_outer", "sigma_min", "sigma_max", "s_exp"}},
        {"test", {"n_per_dim"}},
        {"burgers",
         {"dt", "nu", "scaled", "t_end", "slices", "test_nt", "test_nx", "abort_on_nonconvergence"}},
        {"sweep", {"alpha", "lambda", "n_per_dim"}},
        {"run", {"seed", "out"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw UsageError("config key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != static_cast<double>(static_cast<long long>(v)))
        throw UsageError("config key '" + key + "': expected an integer, got '" + text + "'");
    return static_cast<long long>(v);
}

std::size_t to_count(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < 0) throw UsageError("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw UsageError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double("list", item));
    }
    return out;
}

RunConfig parse_run_config(const std::string& text, const std::string& name) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }

    RunConfig cfg;
    cfg.name = name;
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : tree) {
        const auto sec = known_keys().find(section);
        if (sec == known_keys().end()) throw UsageError("unknown config section [" + section + "]");
        if (body.empty()) throw UsageError("config key '" + section + "' must live in a section");
        for (const auto& [key, value] : body) {
            if (!sec->second.count(key))
                throw UsageError("unknown config key '" + section + "." + key + "'");
            flat[section + "." + key] = trim(value.get_value<std::string>());
        }
    }

    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = flat.find(key);
        return it == flat.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("problem.name")) cfg.problem = *v;
    if (cfg.problem.empty()) throw UsageError("config is missing problem.name");
    if (const auto* v = get("problem.boundary_mode"))
        cfg.problem_options.boundary_mode = parse_boundary_mode(*v);
    if (const auto* v = get("problem.eikonal_eps")) cfg.problem_options.eikonal_eps = to_double("problem.eikonal_eps", *v);
    if (const auto* v = get("problem.reference_intervals"))
        cfg.reference_intervals = static_cast<int>(to_integer("problem.reference_intervals", *v));

    if (const auto* v = get("run.seed")) cfg.seed = to_count("run.seed", *v);
    if (const auto* v = get("run.out")) cfg.out_dir = *v;

    auto& col = cfg.collocation;
    col.seed = cfg.seed;
    if (const auto* v = get("collocation.kind")) col.kind = *v;
    if (const auto* v = get("collocation.n_per_dim")) col.n_per_dim = static_cast<int>(to_integer("collocation.n_per_dim", *v));
    if (const auto* v = get("collocation.k1")) col.k1 = to_count("collocation.k1", *v);
    if (const auto* v = get("collocation.k2")) col.k2 = to_count("collocation.k2", *v);
    if (const auto* v = get("collocation.seed")) col.seed = to_count("collocation.seed", *v);
    if (const auto* v = get("collocation.lambda")) col.lambda = to_double("collocation.lambda", *v);

    auto& s = cfg.solver;
    s.seed = cfg.seed;
    if (const auto* v = get("solver.alpha")) s.alpha = to_double("solver.alpha", *v);
    if (const auto* v = get("solver.alpha_ladder")) s.alpha_ladder = parse_double_list(*v);
    if (const auto* v = get("solver.m_candidates")) s.m_candidates = to_count("solver.m_candidates", *v);
    if (const auto* v = get("solver.eta")) s.eta = to_double("solver.eta", *v);
    if (const auto* v = get("solver.metropolis_T0")) s.metropolis_T0 = to_double("solver.metropolis_T0", *v);
    if (const auto* v = get("solver.linesearch_h")) s.linesearch_h = to_double("solver.linesearch_h", *v);
    if (const auto* v = get("solver.lm_eps")) s.lm_eps = to_double("solver.lm_eps", *v);
    if (const auto* v = get("solver.stop_eps")) s.stop_eps = to_double("solver.stop_eps", *v);
    if (const auto* v = get("solver.max_outer")) s.max_outer = to_count("solver.max_outer", *v);
    if (const auto* v = get("solver.sigma_min")) s.sigma_bounds.min = to_double("solver.sigma_min", *v);
    if (const auto* v = get("solver.sigma_max")) s.sigma_bounds.max = to_double("solver.sigma_max", *v);
    if (const auto* v = get("solver.s_exp")) s.s_exp = to_double("solver.s_exp", *v);

    if (const auto* v = get("test.n_per_dim")) cfg.test_n_per_dim = static_cast<int>(to_integer("test.n_per_dim", *v));

    auto& b = cfg.problem_options.burgers;
    if (const auto* v = get("burgers.dt")) b.dt = to_double("burgers.dt", *v);
    if (const auto* v = get("burgers.nu")) b.nu = to_double("burgers.nu", *v);
    if (const auto* v = get("burgers.scaled")) b.scaled = to_bool("burgers.scaled", *v);
    auto& m = cfg.march;
    if (const auto* v = get("burgers.t_end")) m.t_end = to_double("burgers.t_end", *v);
    if (const auto* v = get("burgers.slices")) m.slices = parse_double_list(*v);
    if (const auto* v = get("burgers.test_nt")) m.test_nt = static_cast<int>(to_integer("burgers.test_nt", *v));
    if (const auto* v = get("burgers.test_nx")) m.test_nx = static_cast<int>(to_integer("burgers.test_nx", *v));
    if (const auto* v = get("burgers.abort_on_nonconvergence"))
        m.abort_on_nonconvergence = to_bool("burgers.abort_on_nonconvergence", *v);

    if (const auto* v = get("sweep.alpha")) cfg.sweep.alphas = parse_double_list(*v);
    if (const auto* v = get("sweep.lambda")) cfg.sweep.lambdas = parse_double_list(*v);
    if (const auto* v = get("sweep.n_per_dim"))
        for (double n : parse_double_list(*v)) cfg.sweep.n_per_dim.push_back(static_cast<int>(n));

    flat.erase("run.out");
    flat["run.seed"] = std::to_string(cfg.seed);
    std::ostringstream canon;
    for (const auto& [k, v] : flat) canon << k << '=' << v << '\n';
    cfg.canonical = canon.str();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.stem().string());
}

void override_seed(RunConfig& cfg, std::uint64_t seed) {
    const std::string old_line = "run.seed=" + std::to_string(cfg.seed) + "\n";
    if (cfg.collocation.seed == cfg.seed) cfg.collocation.seed = seed;
    cfg.seed = seed;
    cfg.solver.seed = seed;
    const auto pos = cfg.canonical.find(old_line);
    if (pos != std::string::npos)
        cfg.canonical.replace(pos, old_line.size(), "run.seed=" + std::to_string(seed) + "\n");
}

void RunConfig::validate() const {
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        throw UsageError("unknown problem '" + problem + "'");
    solver.validate();
    if (collocation.kind != "grid" && collocation.kind != "random")
        throw UsageError("collocation.kind must be 'grid' or 'random'");
    if (collocation.kind == "grid" && collocation.n_per_dim < 3)
        throw UsageError("collocation.n_per_dim must be at least 3");
    if (collocation.kind == "random" && (collocation.k1 == 0 || collocation.k2 == 0))
        throw UsageError("random collocation needs k1 >= 1 and k2 >= 1");
    if (collocation.lambda < 0.0) throw UsageError("collocation.lambda must be non-negative");
    if (test_n_per_dim != 0 && test_n_per_dim < 3) throw UsageError("test.n_per_dim must be at least 3");
    if (!(problem_options.eikonal_eps > 0.0)) throw UsageError("problem.eikonal_eps must be positive");
    if (reference_intervals < 4) throw UsageError("problem.reference_intervals must be at least 4");
    if (!(problem_options.burgers.dt > 0.0)) throw UsageError("burgers.dt must be positive");
    if (!(problem_options.burgers.nu > 0.0)) throw UsageError("burgers.nu must be positive");
    if (march.t_end < 0.0) throw UsageError("burgers.t_end must be non-negative");
    if (march.test_nt < 2 || march.test_nx < 2) throw UsageError("burgers test grid needs at least 2 points per axis");
    for (int n : sweep.n_per_dim)
        if (n < 3) throw UsageError("sweep.n_per_dim entries must be at least 3");
    for (double a : sweep.alphas)
        if (!(a > 0.0)) throw UsageError("sweep.alpha entries must be positive");
    // Surfaces unsupported boundary treatments before any compute.
    build_problem(*this).validate();
}

PdeProblem build_problem(const RunConfig& cfg) {
    PdeProblem p = make_problem(cfg.problem, cfg.problem_options);
    if (!p.supports(cfg.problem_options.boundary_mode))
        throw UnsupportedConfiguration("problem '" + cfg.problem + "' does not support boundary mode '" +
                                       to_string(cfg.problem_options.boundary_mode) + "'");
    return p;
}

CollocationSet build_collocation(const RunConfig& cfg, const Box& domain) {
    const auto& c = cfg.collocation;
    if (c.kind == "random") return make_random(c.k1, c.k2, domain, c.lambda, c.seed);
    return make_grid(c.n_per_dim, domain, c.lambda);
}

CollocationSet build_test_grid(const RunConfig& cfg, const Box& domain) {
    const int n = cfg.test_n_per_dim > 0 ? cfg.test_n_per_dim : default_test_points(domain.dim());
    return make_grid(n, domain, cfg.collocation.lambda);
}

ScalarField build_reference(const RunConfig& cfg, const PdeProblem& prob) {
    if (prob.exact) return [exact = prob.exact](const Point& x) { return exact(x).value; };
    if (cfg.problem == "eikonal") {
        auto ref = std::make_shared<const EikonalReference>(cfg.problem_options.eikonal_eps,
                                                            cfg.reference_intervals);
        return [ref](const Point& x) { return (*ref)(x); };
    }
    return {};
}

}  // namespace srbf
