#pragma once

// Experiment configuration: a small human-editable text format with
// [section] headers and key = value lines, parsed with line-level
// diagnostics, cross-field validation (estimator prerequisites, sample
// budget guard), a canonical serialization, and a stable 64-bit hash that
// changes whenever any field changes.
//
// Format sketch (('#' or ';' start comments):
//
//   [experiment]
//   kind = gaussian_quadratic     # or: cto, custom
//   output = results/quadratic    # output stem for <stem>.csv / <stem>.json
//
//   [model]
//   d = 3
//   z1star = 2, 3, 4, 5           # tail levels (gaussian_quadratic, custom)
//   # gamma = 1.63, 1.73          # cap factors (cto)
//   # correlation = negative      # cto: positive | negative
//
//   [estimators]
//   kinds = scalar_tilt, exp_coordinate, crude    # or: all
//
//   [run]
//   n = 1000000
//   batches = 32
//   seed = 12345
//   # theta = 0.5                 # scalar-tilt override, in (0, 2)
//   # lambda = 3.0                # 1-D intensity override
//   max_total_draws = 1000000000  # budget guard over all cells
//
//   [discovery]                   # adaptive dominating-set search
//   samples_per_iteration = 100
//   ...
//
//   [set]                         # custom experiments only
//   type = poly                   # halfspace | quadratic | poly | two_lobe | two_sided
//   term = 1.0 : 2 0              # boundary monomial: coeff : trailing exponents
//
//   [cost]
//   term = 1.0 : 2 0 0            # cost monomial: coeff : exponents (all d coords)

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dominating.hpp"
#include "oracles.hpp"
#include "sets.hpp"

namespace gctail {

// Malformed or inconsistent configuration; the CLI maps this to its
// configuration-error exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { gaussian_quadratic, cto, custom };

inline std::string experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::gaussian_quadratic: return "gaussian_quadratic";
        case ExperimentKind::cto: return "cto";
        case ExperimentKind::custom: return "custom";
    }
    return "unknown";
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::gaussian_quadratic;
    std::string output = "results";

    int d = 3;
    std::vector<double> z1star_list;  // tail levels (gaussian_quadratic, custom)
    std::vector<double> gamma_list;   // cap factors (cto)
    bool positive_correlation = false;

    std::vector<EstimatorKind> estimators;

    std::int64_t n = 1000000;
    int batches = 32;
    std::uint64_t seed = 1;
    std::optional<double> theta;
    std::optional<double> lambda;
    std::int64_t max_total_draws = 1000000000;

    DiscoveryParams discovery;

    // custom-set description
    std::string set_type;                 // empty unless experiment = custom
    std::vector<PolyTerm> boundary_terms; // poly boundary over the d-1 trailing coords
    std::vector<PolyTerm> cost_terms;     // optional cost over all d coords
};

namespace detail {

inline std::string cfg_trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] inline void cfg_fail(const std::string& name, int line, const std::string& what) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
}

inline double cfg_double(const std::string& name, int line, const std::string& key,
                         const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        cfg_fail(name, line, "field '" + key + "': '" + v + "' is not a number");
    }
}

inline std::int64_t cfg_int(const std::string& name, int line, const std::string& key,
                            const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        cfg_fail(name, line, "field '" + key + "': '" + v + "' is not an integer");
    }
}

inline std::uint64_t cfg_uint(const std::string& name, int line, const std::string& key,
                              const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size() || (!v.empty() && v[0] == '-')) {
            throw std::invalid_argument("trailing characters");
        }
        return x;
    } catch (const std::exception&) {
        cfg_fail(name, line, "field '" + key + "': '" + v + "' is not a nonnegative integer");
    }
}

inline std::vector<std::string> cfg_tokens(const std::string& v) {
    std::string s = v;
    for (auto& c : s) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::vector<double> cfg_double_list(const std::string& name, int line,
                                           const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& t : cfg_tokens(v)) out.push_back(cfg_double(name, line, key, t));
    if (out.empty()) cfg_fail(name, line, "field '" + key + "': empty list");
    return out;
}

inline EstimatorKind cfg_estimator(const std::string& name, int line, const std::string& v) {
    static const std::pair<const char*, EstimatorKind> table[] = {
        {"crude", EstimatorKind::crude},
        {"mean_shift", EstimatorKind::mean_shift},
        {"scalar_tilt", EstimatorKind::scalar_tilt},
        {"exp_coordinate", EstimatorKind::exp_coordinate},
        {"laplace_coordinate", EstimatorKind::laplace_coordinate},
        {"laplace_mixture", EstimatorKind::laplace_mixture},
    };
    for (const auto& [n, k] : table) {
        if (v == n) return k;
    }
    cfg_fail(name, line, "unknown estimator '" + v +
                             "' (expected crude, mean_shift, scalar_tilt, exp_coordinate, "
                             "laplace_coordinate, laplace_mixture, or all)");
}

// "coeff : e1 e2 ..." -> one monomial
inline PolyTerm cfg_term(const std::string& name, int line, const std::string& v) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) {
        cfg_fail(name, line, "field 'term': expected 'coeff : exponents', got '" + v + "'");
    }
    PolyTerm t;
    t.coeff = cfg_double(name, line, "term", cfg_trim(v.substr(0, colon)));
    for (const auto& tok : cfg_tokens(v.substr(colon + 1))) {
        const std::int64_t e = cfg_int(name, line, "term", tok);
        if (e < 0) cfg_fail(name, line, "field 'term': negative exponent");
        t.expo.push_back(static_cast<int>(e));
    }
    if (t.expo.empty()) cfg_fail(name, line, "field 'term': needs at least one exponent");
    return t;
}

inline std::string fmt_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

// Cross-field validation; throws ConfigError naming the offending fields.
inline void validate_experiment_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };

    if (cfg.output.empty()) fail("field 'output' must not be empty");
    if (cfg.estimators.empty()) fail("field 'kinds': at least one estimator is required");
    if (cfg.n < 1) fail("field 'n' must be at least 1");
    if (cfg.batches < 2) fail("field 'batches' must be at least 2");
    if (cfg.batches > cfg.n) fail("field 'batches' must not exceed 'n'");
    if (cfg.batches >= (1 << 20)) fail("field 'batches' must be below 2^20");
    if (cfg.max_total_draws < 1) fail("field 'max_total_draws' must be positive");
    if (cfg.theta && !(*cfg.theta > 0.0 && *cfg.theta < 2.0)) {
        fail("field 'theta' must lie strictly between 0 and 2");
    }
    if (cfg.lambda && !(*cfg.lambda > 0.0)) fail("field 'lambda' must be positive");

    const auto& dp = cfg.discovery;
    if (dp.max_candidates < 1 || dp.max_clusters < 1 || dp.samples_per_iteration < 1 ||
        dp.max_iterations < 1 || !(dp.merge_distance > 0.0) || !(dp.stall_tolerance > 0.0)) {
        fail("section [discovery]: all fields must be positive");
    }

    std::size_t levels = 1;
    switch (cfg.experiment) {
        case ExperimentKind::gaussian_quadratic: {
            if (cfg.d < 2) fail("field 'd' must be at least 2 for the quadratic set");
            if (cfg.z1star_list.empty()) fail("field 'z1star': at least one level is required");
            for (double z : cfg.z1star_list) {
                if (!(z > 0.0)) fail("field 'z1star': levels must be positive");
            }
            if (!cfg.gamma_list.empty()) fail("field 'gamma' applies only to the cto experiment");
            if (!cfg.set_type.empty()) fail("section [set] applies only to custom experiments");
            levels = cfg.z1star_list.size();
            break;
        }
        case ExperimentKind::cto: {
            if (cfg.d != 3) fail("field 'd' must be 3 for the cto experiment");
            if (cfg.gamma_list.empty()) fail("field 'gamma': at least one cap factor is required");
            for (double g : cfg.gamma_list) {
                if (!(g > 0.0)) fail("field 'gamma': cap factors must be positive");
                // triangular(3, 8, 16) demand: a cap at or above the upper
                // support endpoint empties the set
                if (g * 9.0 >= 16.0) {
                    fail("field 'gamma': " + detail::fmt_full(g) +
                         " puts the product-3 cap at or above the triangular upper bound 16");
                }
            }
            if (!cfg.z1star_list.empty()) {
                fail("field 'z1star' applies only to gaussian_quadratic and custom experiments");
            }
            if (!cfg.set_type.empty()) fail("section [set] applies only to custom experiments");
            if (cfg.theta || cfg.lambda) {
                fail("fields 'theta'/'lambda' apply only to the one-dimensional tilts, "
                     "which the cto experiment does not use");
            }
            for (EstimatorKind k : cfg.estimators) {
                if (k != EstimatorKind::crude && k != EstimatorKind::laplace_mixture) {
                    fail("estimator '" + estimator_kind_name(k) +
                         "' is not applicable to the cto experiment (the pulled-back set has "
                         "no tail parameter or structural constants); use crude or "
                         "laplace_mixture");
                }
            }
            levels = cfg.gamma_list.size();
            break;
        }
        case ExperimentKind::custom: {
            const std::string& t = cfg.set_type;
            if (t.empty()) fail("section [set]: field 'type' is required for custom experiments");
            const bool known = t == "halfspace" || t == "quadratic" || t == "poly" ||
                               t == "two_lobe" || t == "two_sided";
            if (!known) {
                fail("section [set]: unknown type '" + t +
                     "' (expected halfspace, quadratic, poly, two_lobe, two_sided)");
            }
            if (!cfg.gamma_list.empty()) fail("field 'gamma' applies only to the cto experiment");
            if (t == "halfspace" && cfg.d < 1) fail("field 'd' must be at least 1");
            if ((t == "quadratic" || t == "poly") && cfg.d < 2) {
                fail("field 'd' must be at least 2 for a curved boundary");
            }
            if ((t == "two_lobe" || t == "two_sided") && cfg.d != 2) {
                fail("field 'd' must be 2 for the " + t + " set");
            }
            if (t == "two_sided") {
                if (!cfg.z1star_list.empty()) {
                    fail("field 'z1star': the two_sided demo set is fixed and takes no levels");
                }
            } else {
                if (cfg.z1star_list.empty()) {
                    fail("field 'z1star': at least one level is required");
                }
                for (double z : cfg.z1star_list) {
                    if (!(z > 0.0)) fail("field 'z1star': levels must be positive");
                }
                levels = cfg.z1star_list.size();
            }
            if (t == "poly") {
                if (cfg.boundary_terms.empty()) {
                    fail("section [set]: type poly needs at least one 'term'");
                }
                for (const auto& term : cfg.boundary_terms) {
                    if (static_cast<int>(term.expo.size()) != cfg.d - 1) {
                        fail("section [set]: boundary terms take d-1 = " +
                             std::to_string(cfg.d - 1) + " exponents");
                    }
                    if (!(term.coeff >= 0.0)) {
                        fail("section [set]: boundary coefficients must be nonnegative");
                    }
                    bool constant = true;
                    for (int e : term.expo) {
                        if (e != 0) constant = false;
                    }
                    if (constant && term.coeff > 0.0) {
                        fail("section [set]: a positive constant boundary term would detach "
                             "the boundary from its vertex");
                    }
                }
            } else if (!cfg.boundary_terms.empty()) {
                fail("section [set]: 'term' lines apply only to type poly");
            }
            const bool supports_tilts = t == "halfspace" || t == "quadratic" || t == "poly";
            if (!supports_tilts) {
                for (EstimatorKind k : cfg.estimators) {
                    if (k == EstimatorKind::scalar_tilt || k == EstimatorKind::exp_coordinate) {
                        fail("estimator '" + estimator_kind_name(k) + "' needs a set with a "
                             "single dominating halfspace; '" + t + "' has none");
                    }
                }
            }
            break;
        }
    }

    for (const auto& term : cfg.cost_terms) {
        if (static_cast<int>(term.expo.size()) != cfg.d) {
            fail("section [cost]: terms take d = " + std::to_string(cfg.d) + " exponents");
        }
    }
    if (!cfg.cost_terms.empty() && cfg.experiment == ExperimentKind::cto) {
        fail("section [cost] applies only to gaussian_quadratic and custom experiments "
             "(the cto experiment has its own lost-sales cost)");
    }

    const std::int64_t cells = static_cast<std::int64_t>(levels) *
                               static_cast<std::int64_t>(cfg.estimators.size());
    if (cells > 0 && cfg.n > cfg.max_total_draws / cells) {
        fail("budget guard: n * levels * estimators = " + std::to_string(cfg.n) + " * " +
             std::to_string(levels) + " * " + std::to_string(cfg.estimators.size()) +
             " exceeds max_total_draws = " + std::to_string(cfg.max_total_draws));
    }
}

// Parses and validates a configuration from text. `name` labels diagnostics
// (usually the file path).
inline ExperimentConfig parse_experiment_config(const std::string& text,
                                                const std::string& name = "config") {
    ExperimentConfig cfg;
    cfg.estimators.clear();

    bool want_all_estimators = false;
    bool seen_kind = false;
    std::string section;
    std::vector<std::string> seen_keys;  // "section/key" duplicates check
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto cut = raw.find_first_of("#;");
        if (cut != std::string::npos) raw.erase(cut);
        const std::string s = detail::cfg_trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') detail::cfg_fail(name, line, "unterminated section header");
            section = detail::cfg_trim(s.substr(1, s.size() - 2));
            const bool known = section == "experiment" || section == "model" ||
                               section == "estimators" || section == "run" ||
                               section == "discovery" || section == "set" || section == "cost";
            if (!known) detail::cfg_fail(name, line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            detail::cfg_fail(name, line, "expected 'key = value', got '" + s + "'");
        }
        const std::string key = detail::cfg_trim(s.substr(0, eq));
        const std::string value = detail::cfg_trim(s.substr(eq + 1));
        if (section.empty()) {
            detail::cfg_fail(name, line, "key '" + key + "' appears outside any section");
        }
        if (key.empty()) detail::cfg_fail(name, line, "empty key");
        if (value.empty()) detail::cfg_fail(name, line, "field '" + key + "': empty value");

        const bool repeatable = key == "term" && (section == "set" || section == "cost");
        if (!repeatable) {
            const std::string id = section + "/" + key;
            for (const auto& k : seen_keys) {
                if (k == id) {
                    detail::cfg_fail(name, line,
                                     "duplicate key '" + key + "' in section [" + section + "]");
                }
            }
            seen_keys.push_back(id);
        }

        if (section == "experiment") {
            if (key == "kind") {
                seen_kind = true;
                if (value == "gaussian_quadratic") {
                    cfg.experiment = ExperimentKind::gaussian_quadratic;
                } else if (value == "cto") {
                    cfg.experiment = ExperimentKind::cto;
                } else if (value == "custom") {
                    cfg.experiment = ExperimentKind::custom;
                } else {
                    detail::cfg_fail(name, line, "field 'kind': unknown experiment '" + value +
                                                     "' (expected gaussian_quadratic, cto, "
                                                     "custom)");
                }
            } else if (key == "output") {
                cfg.output = value;
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [experiment]");
            }
        } else if (section == "model") {
            if (key == "d") {
                cfg.d = static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "z1star") {
                cfg.z1star_list = detail::cfg_double_list(name, line, key, value);
            } else if (key == "gamma") {
                cfg.gamma_list = detail::cfg_double_list(name, line, key, value);
            } else if (key == "correlation") {
                if (value == "positive") {
                    cfg.positive_correlation = true;
                } else if (value == "negative") {
                    cfg.positive_correlation = false;
                } else {
                    detail::cfg_fail(name, line,
                                     "field 'correlation': expected positive or negative");
                }
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [model]");
            }
        } else if (section == "estimators") {
            if (key == "kinds") {
                for (const auto& tok : detail::cfg_tokens(value)) {
                    if (tok == "all") {
                        want_all_estimators = true;
                    } else {
                        cfg.estimators.push_back(detail::cfg_estimator(name, line, tok));
                    }
                }
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [estimators]");
            }
        } else if (section == "run") {
            if (key == "n") {
                cfg.n = detail::cfg_int(name, line, key, value);
            } else if (key == "batches") {
                cfg.batches = static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "seed") {
                cfg.seed = detail::cfg_uint(name, line, key, value);
            } else if (key == "theta") {
                cfg.theta = detail::cfg_double(name, line, key, value);
            } else if (key == "lambda") {
                cfg.lambda = detail::cfg_double(name, line, key, value);
            } else if (key == "max_total_draws") {
                cfg.max_total_draws = detail::cfg_int(name, line, key, value);
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [run]");
            }
        } else if (section == "discovery") {
            if (key == "max_candidates") {
                cfg.discovery.max_candidates =
                    static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "max_clusters") {
                cfg.discovery.max_clusters =
                    static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "merge_distance") {
                cfg.discovery.merge_distance = detail::cfg_double(name, line, key, value);
            } else if (key == "samples_per_iteration") {
                cfg.discovery.samples_per_iteration =
                    static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "max_iterations") {
                cfg.discovery.max_iterations =
                    static_cast<int>(detail::cfg_int(name, line, key, value));
            } else if (key == "stall_tolerance") {
                cfg.discovery.stall_tolerance = detail::cfg_double(name, line, key, value);
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [discovery]");
            }
        } else if (section == "set") {
            if (key == "type") {
                cfg.set_type = value;
            } else if (key == "term") {
                cfg.boundary_terms.push_back(detail::cfg_term(name, line, value));
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [set]");
            }
        } else {  // cost
            if (key == "term") {
                cfg.cost_terms.push_back(detail::cfg_term(name, line, value));
            } else {
                detail::cfg_fail(name, line, "unknown key '" + key + "' in [cost]");
            }
        }
    }
    if (!seen_kind) {
        throw ConfigError(name + ": missing required field 'kind' in section [experiment]");
    }
    if (want_all_estimators) {
        cfg.estimators.clear();
        if (cfg.experiment == ExperimentKind::cto) {
            cfg.estimators = {EstimatorKind::crude, EstimatorKind::laplace_mixture};
        } else {
            cfg.estimators = {EstimatorKind::crude,           EstimatorKind::mean_shift,
                              EstimatorKind::scalar_tilt,     EstimatorKind::exp_coordinate,
                              EstimatorKind::laplace_coordinate, EstimatorKind::laplace_mixture};
        }
    }
    validate_experiment_config(cfg);
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), path);
}

// Deterministic full-precision dump of every field in a fixed order. Two
// configurations serialize identically iff they are semantically identical,
// independent of source formatting.
inline std::string canonical_serialization(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto join = [](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ',';
            s += detail::fmt_full(xs[i]);
        }
        return s;
    };
    auto join_terms = [](const std::vector<PolyTerm>& ts) {
        std::string s;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i) s += '|';
            s += detail::fmt_full(ts[i].coeff);
            s += ':';
            for (std::size_t j = 0; j < ts[i].expo.size(); ++j) {
                if (j) s += ' ';
                s += std::to_string(ts[i].expo[j]);
            }
        }
        return s;
    };
    out << "experiment=" << experiment_kind_name(cfg.experiment) << '\n'
        << "output=" << cfg.output << '\n'
        << "d=" << cfg.d << '\n'
        << "z1star=" << join(cfg.z1star_list) << '\n'
        << "gamma=" << join(cfg.gamma_list) << '\n'
        << "correlation=" << (cfg.positive_correlation ? "positive" : "negative") << '\n';
    out << "estimators=";
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
        if (i) out << ',';
        out << estimator_kind_name(cfg.estimators[i]);
    }
    out << '\n'
        << "n=" << cfg.n << '\n'
        << "batches=" << cfg.batches << '\n'
        << "seed=" << cfg.seed << '\n'
        << "theta=" << (cfg.theta ? detail::fmt_full(*cfg.theta) : "") << '\n'
        << "lambda=" << (cfg.lambda ? detail::fmt_full(*cfg.lambda) : "") << '\n'
        << "max_total_draws=" << cfg.max_total_draws << '\n'
        << "discovery.max_candidates=" << cfg.discovery.max_candidates << '\n'
        << "discovery.max_clusters=" << cfg.discovery.max_clusters << '\n'
        << "discovery.merge_distance=" << detail::fmt_full(cfg.discovery.merge_distance) << '\n'
        << "discovery.samples_per_iteration=" << cfg.discovery.samples_per_iteration << '\n'
        << "discovery.max_iterations=" << cfg.discovery.max_iterations << '\n'
        << "discovery.stall_tolerance=" << detail::fmt_full(cfg.discovery.stall_tolerance)
        << '\n'
        << "set.type=" << cfg.set_type << '\n'
        << "set.terms=" << join_terms(cfg.boundary_terms) << '\n'
        << "cost.terms=" << join_terms(cfg.cost_terms) << '\n';
    return out.str();
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return detail::fnv1a64(canonical_serialization(cfg));
}

inline std::string config_hash_hex(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

}  // namespace gctail
