#include "knninfo/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "knninfo/errors.hpp"

namespace knninfo {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

struct ConfigText {
    std::map<std::string, Section> sections;
    std::string origin;

    [[noreturn]] void fail(const std::string& msg, int line = 0) const {
        std::string where = origin;
        if (line > 0) where += ":" + std::to_string(line);
        throw DataError(where + ": " + msg);
    }

    Section& section(const std::string& name) {
        auto it = sections.find(name);
        if (it == sections.end()) fail("missing required section [" + name + "]");
        return it->second;
    }

    const Entry* find(Section& sec, const std::string& key) {
        auto it = sec.find(key);
        if (it == sec.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::string require(Section& sec, const std::string& sec_name, const std::string& key) {
        const Entry* e = find(sec, key);
        if (!e) fail("missing required field '" + key + "' in [" + sec_name + "]");
        return e->value;
    }

    double to_double(const std::string& key, const Entry& e) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            fail("field '" + key + "': expected a number, got '" + e.value + "'", e.line);
        }
    }

    std::int64_t to_int(const std::string& key, const Entry& e) const {
        std::int64_t v = 0;
        const char* begin = e.value.data();
        const char* end = begin + e.value.size();
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{} || res.ptr != end) {
            fail("field '" + key + "': expected an integer, got '" + e.value + "'", e.line);
        }
        return v;
    }
};

ConfigText read_sections(const std::string& text, const std::string& origin) {
    ConfigText cfg;
    cfg.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') cfg.fail("unterminated section header", line_no);
            current = trim(stripped.substr(1, stripped.size() - 2));
            if (current.empty()) cfg.fail("empty section name", line_no);
            cfg.sections[current];
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) cfg.fail("expected 'key = value'", line_no);
        if (current.empty()) cfg.fail("key outside of any section", line_no);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) cfg.fail("empty key", line_no);
        auto [it, inserted] = cfg.sections[current].emplace(key, Entry{value, line_no, false});
        if (!inserted) cfg.fail("duplicate key '" + key + "'", line_no);
    }
    return cfg;
}

std::vector<std::int64_t> parse_grid(ConfigText& cfg, const std::string& key, const Entry& e) {
    std::vector<std::int64_t> grid;
    std::string item;
    std::istringstream in(e.value);
    std::string cleaned = e.value;
    for (auto& ch : cleaned) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream items(cleaned);
    while (items >> item) {
        grid.push_back(cfg.to_int(key, Entry{item, e.line, true}));
    }
    if (grid.empty()) cfg.fail("field '" + key + "': expected a list of sample sizes", e.line);
    return grid;
}

DistributionSpec parse_distribution(ConfigText& cfg) {
    Section& sec = cfg.section("distribution");
    const std::string family = cfg.require(sec, "distribution", "family");

    auto opt_int = [&](const std::string& key, std::int64_t fallback) {
        const Entry* e = cfg.find(sec, key);
        return e ? cfg.to_int(key, *e) : fallback;
    };
    auto opt_double = [&](const std::string& key, double fallback) {
        const Entry* e = cfg.find(sec, key);
        return e ? cfg.to_double(key, *e) : fallback;
    };

    try {
        if (family == "gaussian_std") {
            return DistributionSpec::gaussian_std(static_cast<int>(opt_int("d", 1)));
        }
        if (family == "joint_gaussian_equicorr") {
            return DistributionSpec::joint_gaussian_equicorr(static_cast<int>(opt_int("dx", 1)),
                                                             static_cast<int>(opt_int("dy", 1)),
                                                             opt_double("rho", 0.0));
        }
        if (family == "uniform01") {
            return DistributionSpec::uniform01(static_cast<int>(opt_int("d", 1)));
        }
        if (family == "exponential") {
            return DistributionSpec::exponential(opt_double("rate", 1.0));
        }
        if (family == "cauchy") {
            return DistributionSpec::cauchy();
        }
        if (family == "pathological_mixture_lite") {
            MixtureParams params;
            params.n_components = static_cast<int>(opt_int("n_components", params.n_components));
            params.shift_cap = opt_double("shift_cap", params.shift_cap);
            return DistributionSpec::pathological_mixture_lite(params);
        }
    } catch (const std::invalid_argument& e) {
        cfg.fail(std::string("[distribution] ") + e.what());
    }
    cfg.fail("unknown distribution family '" + family + "'");
}

}  // namespace

ExperimentSpec parse_experiment_config_text(const std::string& text, const std::string& origin) {
    ConfigText cfg = read_sections(text, origin);
    ExperimentSpec spec;
    spec.distribution = parse_distribution(cfg);

    Section& sec = cfg.section("experiment");
    try {
        spec.estimator = estimator_kind_from_string(cfg.require(sec, "experiment", "estimator"));
    } catch (const std::invalid_argument& e) {
        cfg.fail(std::string("field 'estimator': ") + e.what());
    }

    if (const Entry* e = cfg.find(sec, "k")) spec.k = static_cast<int>(cfg.to_int("k", *e));
    if (const Entry* e = cfg.find(sec, "seed")) {
        spec.seed = static_cast<std::uint64_t>(cfg.to_int("seed", *e));
    }
    {
        const Entry* e = cfg.find(sec, "n_grid");
        if (!e) cfg.fail("missing required field 'n_grid' in [experiment]");
        spec.n_grid = parse_grid(cfg, "n_grid", *e);
    }
    if (const Entry* e = cfg.find(sec, "uncertainty_target")) {
        spec.uncertainty_target = cfg.to_double("uncertainty_target", *e);
    }
    if (const Entry* e = cfg.find(sec, "ci_level")) spec.ci_level = cfg.to_double("ci_level", *e);
    if (const Entry* e = cfg.find(sec, "min_trials")) {
        spec.min_trials = cfg.to_int("min_trials", *e);
    }
    if (const Entry* e = cfg.find(sec, "max_trials")) {
        spec.max_trials = cfg.to_int("max_trials", *e);
    }
    if (const Entry* e = cfg.find(sec, "bias_fit_min_n")) {
        spec.bias_fit_min_n = cfg.to_int("bias_fit_min_n", *e);
    }
    if (const Entry* e = cfg.find(sec, "metric")) {
        if (e->value == "l2") {
            spec.metric = Metric::euclidean();
        } else if (e->value == "linf") {
            spec.metric = Metric::chebyshev();
        } else {
            cfg.fail("field 'metric': expected l2 or linf, got '" + e->value + "'", e->line);
        }
    }
    {
        const Entry* a = cfg.find(sec, "A");
        const Entry* beta = cfg.find(sec, "beta");
        if (a || beta) {
            Truncation t;
            if (a) t.A = cfg.to_double("A", *a);
            if (beta) t.beta = cfg.to_double("beta", *beta);
            spec.truncation = t;
        }
    }
    if (const Entry* e = cfg.find(sec, "tau")) spec.tau = cfg.to_double("tau", *e);
    if (const Entry* e = cfg.find(sec, "alpha")) spec.alpha = cfg.to_double("alpha", *e);

    for (const auto& [name, section] : cfg.sections) {
        for (const auto& [key, entry] : section) {
            if (!entry.used) {
                cfg.fail("unknown field '" + key + "' in [" + name + "]", entry.line);
            }
        }
    }

    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        cfg.fail(e.what());
    }
    return spec;
}

ExperimentSpec parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config_text(buf.str(), path);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string experiment_config_text(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "estimator = " << to_string(spec.estimator) << "\n";
    out << "k = " << spec.k << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "n_grid =";
    for (const auto n : spec.n_grid) out << " " << n;
    out << "\n";
    out << "uncertainty_target = " << format_double(spec.uncertainty_target) << "\n";
    out << "ci_level = " << format_double(spec.ci_level) << "\n";
    out << "min_trials = " << spec.min_trials << "\n";
    out << "max_trials = " << spec.max_trials << "\n";
    if (spec.bias_fit_min_n) out << "bias_fit_min_n = " << *spec.bias_fit_min_n << "\n";
    if (spec.metric) {
        out << "metric = " << (spec.metric->kind == Metric::Kind::Euclidean ? "l2" : "linf") << "\n";
    }
    if (spec.truncation) {
        out << "A = " << format_double(spec.truncation->A) << "\n";
        if (spec.truncation->beta) out << "beta = " << format_double(*spec.truncation->beta) << "\n";
    }
    if (spec.tau) out << "tau = " << format_double(*spec.tau) << "\n";
    if (spec.alpha) out << "alpha = " << format_double(*spec.alpha) << "\n";

    out << "\n[distribution]\n";
    const DistributionSpec& dist = spec.distribution;
    switch (dist.family()) {
        case Family::GaussianStd:
            out << "family = gaussian_std\n";
            out << "d = " << dist.dim() << "\n";
            break;
        case Family::JointGaussianEquicorr:
            out << "family = joint_gaussian_equicorr\n";
            out << "dx = " << dist.dx() << "\n";
            out << "dy = " << dist.dy() << "\n";
            out << "rho = " << format_double(dist.rho()) << "\n";
            break;
        case Family::Uniform01:
            out << "family = uniform01\n";
            out << "d = " << dist.dim() << "\n";
            break;
        case Family::Exponential:
            out << "family = exponential\n";
            out << "rate = " << format_double(dist.rate()) << "\n";
            break;
        case Family::Cauchy:
            out << "family = cauchy\n";
            break;
        case Family::PathologicalMixtureLite:
            out << "family = pathological_mixture_lite\n";
            out << "n_components = " << dist.mixture().n_components << "\n";
            out << "shift_cap = " << format_double(dist.mixture().shift_cap) << "\n";
            break;
    }
    return out.str();
}

}  // namespace knninfo
