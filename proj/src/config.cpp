#include "ksd/config.hpp"

#include "ksd/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ksd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has a malformed number: " + v);
    }
}

std::string parse_string(const std::string& v, const std::string& key) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        throw ConfigError("config: key '" + key + "' expects a quoted string");
    return v.substr(1, v.size() - 2);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config: key '" + key + "' expects true or false");
}

std::vector<int> parse_int_array(const std::string& v, const std::string& key) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("config: key '" + key + "' expects an array [..]");
    std::vector<int> out;
    std::string inner = v.substr(1, v.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_number(item, key)));
    }
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model.params" && section != "payoff.params")
                throw ConfigError("config: unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));

        if (section == "model.params") {
            c.model_params[key] = parse_number(val, "model.params." + key);
            c.keys_set.insert("model.params." + key);
            continue;
        }
        if (section == "payoff.params") {
            c.payoff_params[key] = parse_number(val, "payoff.params." + key);
            c.keys_set.insert("payoff.params." + key);
            continue;
        }

        if (key == "model") c.model = parse_string(val, key);
        else if (key == "payoff") c.payoff = parse_string(val, key);
        else if (key == "L") c.L = parse_number(val, key);
        else if (key == "x0") c.x0 = parse_number(val, key);
        else if (key == "T") c.T = parse_number(val, key);
        else if (key == "n") c.n = static_cast<int>(parse_number(val, key));
        else if (key == "paths") c.paths = static_cast<std::uint64_t>(parse_number(val, key));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_number(val, key));
        else if (key == "estimator") c.estimator = parse_string(val, key);
        else if (key == "engine") c.engine = static_cast<int>(parse_number(val, key));
        else if (key == "backend") c.backend = parse_string(val, key);
        else if (key == "oracle") c.oracle = parse_string(val, key);
        else if (key == "survival") c.survival = parse_string(val, key);
        else if (key == "fd_h") c.fd_h = parse_number(val, key);
        else if (key == "threads") c.threads = static_cast<unsigned>(parse_number(val, key));
        else if (key == "strict") c.strict = parse_bool(val, key);
        else if (key == "out_dir") c.out_dir = parse_string(val, key);
        else if (key == "sweep_n") c.sweep_n = parse_int_array(val, key);
        else if (key == "pde_nx") c.pde_nx = static_cast<int>(parse_number(val, key));
        else if (key == "pde_nt") c.pde_nt = static_cast<int>(parse_number(val, key));
        else throw ConfigError("config: unknown key '" + key + "'");
        c.keys_set.insert(key);
    }
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "model = \"" << c.model << "\"\n";
    out << "payoff = \"" << c.payoff << "\"\n";
    out << "L = " << c.L << "\n";
    out << "x0 = " << c.x0 << "\n";
    out << "T = " << c.T << "\n";
    out << "n = " << c.n << "\n";
    out << "paths = " << c.paths << "\n";
    out << "seed = " << c.seed << "\n";
    out << "estimator = \"" << c.estimator << "\"\n";
    out << "engine = " << c.engine << "\n";
    out << "backend = \"" << c.backend << "\"\n";
    out << "oracle = \"" << c.oracle << "\"\n";
    out << "survival = \"" << c.survival << "\"\n";
    out << "fd_h = " << c.fd_h << "\n";
    out << "threads = " << c.threads << "\n";
    out << "strict = " << (c.strict ? "true" : "false") << "\n";
    out << "out_dir = \"" << c.out_dir << "\"\n";
    out << "sweep_n = [";
    for (std::size_t i = 0; i < c.sweep_n.size(); ++i)
        out << (i ? ", " : "") << c.sweep_n[i];
    out << "]\n";
    out << "pde_nx = " << c.pde_nx << "\n";
    out << "pde_nt = " << c.pde_nt << "\n";
    if (!c.model_params.empty()) {
        out << "\n[model.params]\n";
        for (const auto& [k, v] : c.model_params) out << k << " = " << v << "\n";
    }
    if (!c.payoff_params.empty()) {
        out << "\n[payoff.params]\n";
        for (const auto& [k, v] : c.payoff_params) out << k << " = " << v << "\n";
    }
    return out.str();
}

void validate_config(const RunConfig& c) {
    const auto models = model_names();
    if (std::find(models.begin(), models.end(), c.model) == models.end())
        throw ConfigError("config: unknown model id '" + c.model + "'");
    const auto payoffs = payoff_names();
    if (std::find(payoffs.begin(), payoffs.end(), c.payoff) == payoffs.end())
        throw ConfigError("config: unknown payoff id '" + c.payoff + "'");
    if (c.x0 < c.L)
        throw ConfigError("config: x0 must satisfy x0 >= L (domain constraint)");
    if (c.n < 1) throw ConfigError("config: n must be >= 1");
    if (c.T <= 0.0) throw ConfigError("config: T must be positive");
    if (c.T / c.n > 1.0) throw ConfigError("config: step size T/n must be <= 1");
    if (c.paths < 1) throw ConfigError("config: paths must be >= 1");
    const std::set<std::string> estimators{"value", "reflected", "mixed", "bel", "fd", "all"};
    if (!estimators.count(c.estimator))
        throw ConfigError("config: unknown estimator '" + c.estimator + "'");
    if (c.engine < 0 || c.engine > 2)
        throw ConfigError("config: engine must be 0 (default), 1 or 2");
    if (c.estimator == "mixed" && c.engine == 2)
        throw ConfigError("config: the mixed estimator runs on engine 1 only");
    if (c.backend != "direct" && c.backend != "importance")
        throw ConfigError("config: backend must be direct or importance");
    if (c.oracle != "analytic" && c.oracle != "pde" && c.oracle != "none")
        throw ConfigError("config: oracle must be analytic, pde or none");
    if (c.oracle == "analytic" && c.model != "constant")
        throw ConfigError("config: the analytic oracle needs the constant model; use oracle = \"pde\"");
    if (c.survival != "bernoulli" && c.survival != "conditional" && c.survival != "discrete")
        throw ConfigError("config: survival must be bernoulli, conditional or discrete");
    for (std::size_t i = 1; i < c.sweep_n.size(); ++i)
        if (c.sweep_n[i] <= c.sweep_n[i - 1])
            throw ConfigError("config: sweep_n must be strictly increasing");
    if (c.pde_nx < 16 || c.pde_nt < 4) throw ConfigError("config: pde grid too coarse");

    // instantiating the registries surfaces parameter errors as config errors
    try {
        const CoefficientModel m = CoefficientModel::make(c.model, c.model_params, c.L);
        (void)TestFunction::make(c.payoff, c.payoff_params, c.L);
        (void)m;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ksd
