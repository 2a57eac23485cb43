#pragma once

// Batch experiment runner and result emitter. Turns a validated
// ExperimentConfig into a table of estimator results (one row per
// level x estimator x target), attaches theoretical-rate columns where the
// structural machinery applies, and writes CSV (6 significant digits) and
// JSON (full precision, round-trippable) with the seed and the config hash
// embedded. Everything downstream of (config, seed) is deterministic, so
// reruns produce byte-identical files.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "dominating.hpp"
#include "estimators.hpp"
#include "norta.hpp"
#include "oracles.hpp"
#include "structural.hpp"

namespace gctail {

struct ResultRow {
    std::string estimator;
    std::string set;
    double level = 0.0;  // z1* for Gaussian sets, cap factor for configure-to-order
    std::int64_t n = 0;
    double mean = 0.0;
    double std_err = 0.0;
    double re = 0.0;      // relative root-MSE against alpha (plug-in mean when no oracle)
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double second_moment_ratio = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();  // oracle value if available
    double rate_exponent = std::numeric_limits<double>::quiet_NaN();
    double rate_constant = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    bool flagged = false;
    std::string note;
};

struct LevelDominatingSet {
    double level = 0.0;
    DominatingSet set;
};

struct ExperimentResult {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<ResultRow> rows;
    std::vector<LevelDominatingSet> dominating_sets;
    std::vector<std::string> warnings;
};

namespace detail {

// Stream-id layout: estimation cells use row ids 0, 1, 2, ... in table
// order; service streams (structural constants, per-level discovery) use
// rows from kServiceRow up, far above any realistic cell count.
constexpr std::uint64_t kServiceRow = 1ull << 19;

inline ResultRow make_result_row(const RunResult& r, const std::string& set_name, double level,
                                 double alpha_oracle) {
    ResultRow row;
    row.estimator = estimator_kind_name(r.kind);
    row.set = set_name;
    row.level = level;
    row.n = r.stats.n;
    row.mean = r.stats.mean;
    row.std_err = r.stats.std_err;
    row.ci_lo = r.stats.ci_lo;
    row.ci_hi = r.stats.ci_hi;
    row.seed = r.seed;
    if (std::isfinite(alpha_oracle) && alpha_oracle != 0.0) {
        row.alpha = alpha_oracle;
        const double bias = r.stats.mean - alpha_oracle;
        row.re = std::sqrt(bias * bias + r.stats.std_err * r.stats.std_err) /
                 std::fabs(alpha_oracle);
        row.second_moment_ratio = r.stats.second_moment / (alpha_oracle * alpha_oracle);
    } else {
        row.re = r.stats.relative_error;
        if (r.stats.mean != 0.0) {
            row.second_moment_ratio = r.stats.second_moment / (r.stats.mean * r.stats.mean);
        }
        row.note = "plug-in normalization (no oracle value)";
    }
    return row;
}

inline std::vector<int> doubled(std::vector<int> e) {
    for (int& x : e) x *= 2;
    return e;
}

}  // namespace detail

// Constraint set described by a configuration, at one tail level.
inline ConstraintSet build_configured_set(const ExperimentConfig& cfg, double level) {
    switch (cfg.experiment) {
        case ExperimentKind::gaussian_quadratic:
            return make_quadratic(cfg.d, level);
        case ExperimentKind::custom: {
            if (cfg.set_type == "halfspace") return make_halfspace(cfg.d, level);
            if (cfg.set_type == "quadratic") return make_quadratic(cfg.d, level);
            if (cfg.set_type == "poly") {
                BoundaryDescriptor g;
                g.terms = cfg.boundary_terms;
                return make_poly_boundary(cfg.d, level, g);
            }
            if (cfg.set_type == "two_lobe") return make_two_lobe(level);
            if (cfg.set_type == "two_sided") return make_two_sided_demo();
            throw ConfigError("config: unknown set type '" + cfg.set_type + "'");
        }
        case ExperimentKind::cto:
            break;
    }
    throw ConfigError("config: the cto experiment has no Gaussian constraint set");
}

inline PolynomialCost build_configured_cost(const ExperimentConfig& cfg) {
    if (cfg.cost_terms.empty()) return PolynomialCost::one(cfg.d);
    PolynomialCost h;
    h.dim = cfg.d;
    h.terms = cfg.cost_terms;
    return h;
}

// Oracle value of alpha = E[h(Z) 1{Z in S}] where one is available:
// the dimension recursion for the plain quadratic-set probability, adaptive
// quadrature for polynomial-boundary sets in dimension <= 3, the Gaussian
// tail for halfspaces; NaN otherwise.
inline double configured_alpha_oracle(const ExperimentConfig& cfg, const ConstraintSet& S,
                                      const PolynomialCost& cost, double level) {
    const bool unit_cost = cfg.cost_terms.empty();
    try {
        if (cfg.set_type == "halfspace" && unit_cost) return norm_sf(level);
        if ((cfg.experiment == ExperimentKind::gaussian_quadratic ||
             cfg.set_type == "quadratic") &&
            unit_cost) {
            return quadratic_alpha_exact(cfg.d, level);
        }
        if (S.boundary.has_value() && cfg.d <= 3) return quadrature_alpha(S, cost).value;
    } catch (const std::exception&) {
        // fall through: report no oracle rather than fail the run
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// The level grid an experiment sweeps: tail levels for Gaussian sets, cap
// factors for configure-to-order, and the fixed demo level otherwise.
inline std::vector<double> config_levels(const ExperimentConfig& cfg) {
    if (cfg.experiment == ExperimentKind::cto) return cfg.gamma_list;
    if (!cfg.z1star_list.empty()) return cfg.z1star_list;
    return {build_configured_set(cfg, 1.0).z1star};
}

// Dominating-set discovery for one configured level: builds the level's
// constraint set (pulled back through the copula for configure-to-order),
// picks the deterministic starting point, and searches on a dedicated
// substream so estimation streams stay untouched.
inline DominatingSet discover_configured(const ExperimentConfig& cfg, std::size_t level_index,
                                         double level) {
    RngStream rng(cfg.seed, stream_id_for(detail::kServiceRow + 1 + level_index, 0));
    if (cfg.experiment == ExperimentKind::cto) {
        const NortaModel model = make_cto_model(cfg.positive_correlation);
        const ConstraintSet sz = pullback_set(model, make_cto_set(level, cto_means()));
        Vec x0 = cto_nearest_x(level);
        x0[1] += 1e-2;  // nudge off the cap boundaries into the interior
        x0[2] += 1e-2;
        return discover_dominating_set(sz, cfg.discovery, norta_inverse(model, x0), rng);
    }
    const ConstraintSet S = build_configured_set(cfg, level);
    Vec z0;
    if (S.analytic_nearest) {
        z0 = *S.analytic_nearest;
    } else {
        z0.assign(S.dim, 0.0);
        z0[0] = S.z1star;
    }
    return discover_dominating_set(S, cfg.discovery, z0, rng);
}

// Gaussian-measure experiments (the quadratic-set sweep and custom sets):
// one row per (level, estimator), rates attached where the structural
// constants exist, dominating sets discovered per level when the mixture
// estimator is requested.
inline ExperimentResult run_gaussian_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == ExperimentKind::cto) {
        throw ConfigError("config: run_gaussian_experiment needs a Gaussian-measure experiment");
    }
    validate_experiment_config(cfg);

    ExperimentResult result;
    result.experiment = experiment_kind_name(cfg.experiment);
    result.seed = cfg.seed;
    result.config_hash = config_hash_hex(cfg);

    const PolynomialCost cost = build_configured_cost(cfg);
    const bool unit_cost = cfg.cost_terms.empty();
    std::function<double(const Vec&)> cost_fn;
    if (!unit_cost) cost_fn = [cost](const Vec& z) { return cost.eval(z); };

    const std::vector<double> levels = config_levels(cfg);

    // Structural constants are level-independent for translating sets; compute
    // them once from the first level's set when a polynomial boundary exists.
    bool wants_rates = false;
    for (EstimatorKind k : cfg.estimators) {
        if (k == EstimatorKind::mean_shift || k == EstimatorKind::scalar_tilt ||
            k == EstimatorKind::exp_coordinate || k == EstimatorKind::laplace_coordinate) {
            wants_rates = true;
        }
    }
    std::optional<StructuralConstants> kc, k2c;
    RateInputs rate_inputs;
    {
        const ConstraintSet s0 = build_configured_set(cfg, levels.front());
        if (wants_rates && s0.boundary.has_value()) {
            std::vector<int> cexpo(static_cast<std::size_t>(cfg.d) - 1, 0);
            if (!unit_cost) {
                const auto& e = cfg.cost_terms.front().expo;
                cexpo.assign(e.begin() + 1, e.end());
                if (cfg.cost_terms.size() > 1) {
                    result.warnings.push_back(
                        "rate columns use the first cost monomial's exponents");
                }
            }
            try {
                RngStream rng_c(cfg.seed, stream_id_for(detail::kServiceRow, 0));
                kc = compute_structural_constants(s0, cexpo, rng_c);
                RngStream rng_2c(cfg.seed, stream_id_for(detail::kServiceRow, 1));
                k2c = compute_structural_constants(s0, detail::doubled(cexpo), rng_2c);
                rate_inputs.s_c = kc->s;
                rate_inputs.s_2c = k2c->s;
                rate_inputs.eta_c = kc->eta;
                rate_inputs.eta_2c = k2c->eta;
                rate_inputs.d = cfg.d;
            } catch (const std::exception& e) {
                result.warnings.push_back(std::string("structural constants unavailable: ") +
                                          e.what());
                kc.reset();
                k2c.reset();
            }
        } else if (wants_rates) {
            result.warnings.push_back(
                "no polynomial boundary: rate columns left empty");
        }
    }

    bool wants_mixture = false;
    for (EstimatorKind k : cfg.estimators) {
        if (k == EstimatorKind::laplace_mixture) wants_mixture = true;
    }

    std::uint64_t rr = 0;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double z = levels[li];
        const ConstraintSet S = build_configured_set(cfg, z);
        const double alpha = configured_alpha_oracle(cfg, S, cost, z);

        std::optional<DominatingSet> dom;
        std::string discovery_note;
        if (wants_mixture) {
            Vec z0 = S.analytic_nearest.value_or([&] {
                Vec v(S.dim, 0.0);
                v[0] = S.z1star;
                return v;
            }());
            try {
                RngStream rng(cfg.seed,
                              stream_id_for(detail::kServiceRow + 1 + li, 0));
                dom = discover_dominating_set(S, cfg.discovery, z0, rng);
                result.dominating_sets.push_back({z, *dom});
            } catch (const std::exception& e) {
                discovery_note = std::string("discovery failed: ") + e.what();
                result.warnings.push_back("level " + detail::fmt_full(z) + ": " +
                                          discovery_note);
            }
        }

        for (EstimatorKind kind : cfg.estimators) {
            if (kind == EstimatorKind::laplace_mixture && !dom) {
                ResultRow row;
                row.estimator = estimator_kind_name(kind);
                row.set = S.name;
                row.level = z;
                row.n = 0;
                row.seed = cfg.seed;
                row.flagged = true;
                row.note = discovery_note;
                result.rows.push_back(row);
                ++rr;
                continue;
            }
            EstimatorConfig ec;
            ec.kind = kind;
            ec.set = S;
            ec.cost = cost_fn;
            ec.theta = cfg.theta.value_or(0.0);
            // the intensity override is meant for the 1-D coordinate samplers;
            // routing it to the scalar tilt would silently override theta
            if (kind == EstimatorKind::exp_coordinate ||
                kind == EstimatorKind::laplace_coordinate) {
                ec.lambda_override = cfg.lambda;
            }
            if (kind == EstimatorKind::scalar_tilt) {
                if (!kc) {
                    throw ConfigError(
                        "config: the scalar tilt needs structural constants, which this set "
                        "does not provide");
                }
                ec.constants = kc;
                ec.cost_leading_power = cost.leading_power();
            }
            if (kind == EstimatorKind::laplace_mixture) ec.dominating = dom;

            const RunResult r = run_estimator(ec, cfg.n, cfg.batches, cfg.seed, rr);
            ResultRow row = detail::make_result_row(r, S.name, z, alpha);
            if (kc && k2c && kind != EstimatorKind::crude &&
                kind != EstimatorKind::laplace_mixture) {
                RateInputs in = rate_inputs;
                in.theta = cfg.theta.value_or(optimal_tilt(kc->s));
                const RateReport rate = theoretical_rates(kind, in, S.regime);
                row.rate_exponent = rate.exponent;
                row.rate_constant = rate.constant;
            }
            result.rows.push_back(row);
            ++rr;
        }
    }
    return result;
}

// Configure-to-order experiment: pull the unmet-demand set back through the
// Gaussian copula, discover its dominating set starting from the transform
// of the x-space nearest point, and estimate both the probability p and the
// lost-sales cost alpha with every requested estimator. A discovery failure
// flags the mixture rows but leaves the plain acceptance-rejection rows in
// the table.
inline ExperimentResult run_cto_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::cto) {
        throw ConfigError("config: run_cto_experiment needs experiment = cto");
    }
    validate_experiment_config(cfg);

    ExperimentResult result;
    result.experiment = experiment_kind_name(cfg.experiment);
    result.seed = cfg.seed;
    result.config_hash = config_hash_hex(cfg);

    const NortaModel model = make_cto_model(cfg.positive_correlation);
    const Vec means = cto_means();
    const std::string set_base =
        cfg.positive_correlation ? "cto-positive" : "cto-negative";

    bool wants_mixture = false;
    for (EstimatorKind k : cfg.estimators) {
        if (k == EstimatorKind::laplace_mixture) wants_mixture = true;
    }

    std::uint64_t rr = 0;
    for (std::size_t gi = 0; gi < cfg.gamma_list.size(); ++gi) {
        const double gamma = cfg.gamma_list[gi];
        const ConstraintSet sx = make_cto_set(gamma, means);
        const ConstraintSet sz = pullback_set(model, sx);
        const double u2 = gamma * means[1];
        const double u3 = gamma * means[2];
        const auto cost_x = [u2, u3](const Vec& x) { return cto_cost(x, u2, u3); };
        const std::function<double(const Vec&)> cost_z = pullback_cost(model, cost_x);

        std::optional<DominatingSet> dom;
        std::string discovery_note;
        if (wants_mixture) {
            try {
                Vec x0 = cto_nearest_x(gamma);
                x0[1] += 1e-2;  // nudge off the cap boundaries into the interior
                x0[2] += 1e-2;
                const Vec z0 = norta_inverse(model, x0);
                RngStream rng(cfg.seed,
                              stream_id_for(detail::kServiceRow + 1 + gi, 0));
                dom = discover_dominating_set(sz, cfg.discovery, z0, rng);
                result.dominating_sets.push_back({gamma, *dom});
            } catch (const std::exception& e) {
                discovery_note = std::string("discovery failed: ") + e.what();
                result.warnings.push_back("gamma " + detail::fmt_full(gamma) + ": " +
                                          discovery_note);
            }
        }

        for (const char* target : {"p", "alpha"}) {
            const bool is_alpha = std::string(target) == "alpha";
            const std::string set_name = set_base + "-" + target;
            for (EstimatorKind kind : cfg.estimators) {
                if (kind == EstimatorKind::laplace_mixture && !dom) {
                    ResultRow row;
                    row.estimator = estimator_kind_name(kind);
                    row.set = set_name;
                    row.level = gamma;
                    row.n = 0;
                    row.seed = cfg.seed;
                    row.flagged = true;
                    row.note = discovery_note;
                    result.rows.push_back(row);
                    ++rr;
                    continue;
                }
                EstimatorConfig ec;
                ec.kind = kind;
                ec.set = sz;
                if (is_alpha) ec.cost = cost_z;
                if (kind == EstimatorKind::laplace_mixture) ec.dominating = dom;
                const RunResult r = run_estimator(ec, cfg.n, cfg.batches, cfg.seed, rr);
                result.rows.push_back(detail::make_result_row(
                    r, set_name, gamma, std::numeric_limits<double>::quiet_NaN()));
                ++rr;
            }
        }
    }
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    return cfg.experiment == ExperimentKind::cto ? run_cto_experiment(cfg)
                                                 : run_gaussian_experiment(cfg);
}

// ------------------------------------------------------------- emitters ----

namespace detail {

inline std::string fmt_csv(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline nlohmann::ordered_json json_num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

inline double json_get_num(const nlohmann::ordered_json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

inline std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + path);
    return out;
}

}  // namespace detail

inline nlohmann::ordered_json dominating_to_json(const DominatingSet& d) {
    nlohmann::ordered_json j;
    j["dim"] = d.dim;
    j["points"] = d.points;
    j["weights"] = d.weights;
    j["radii"] = d.radii;
    return j;
}

// Rebuilds the derived members (radii, rotations) from the stored points so
// a cached set can be reused across runs.
inline DominatingSet dominating_from_json(const nlohmann::ordered_json& j) {
    DominatingSet d;
    d.dim = j.at("dim").get<int>();
    d.points = j.at("points").get<std::vector<Vec>>();
    d.weights = j.at("weights").get<Vec>();
    if (d.points.size() != d.weights.size()) {
        throw std::runtime_error("dominating set: points/weights size mismatch");
    }
    for (const Vec& p : d.points) {
        if (static_cast<int>(p.size()) != d.dim) {
            throw std::runtime_error("dominating set: point dimension mismatch");
        }
        d.radii.push_back(norm(p));
        d.rotations.push_back(make_rotation(p));
    }
    return d;
}

inline nlohmann::ordered_json results_to_json(const ExperimentResult& res) {
    nlohmann::ordered_json j;
    j["experiment"] = res.experiment;
    j["seed"] = res.seed;
    j["config_hash"] = res.config_hash;
    j["rows"] = nlohmann::ordered_json::array();
    for (const ResultRow& r : res.rows) {
        nlohmann::ordered_json row;
        row["estimator"] = r.estimator;
        row["set"] = r.set;
        row["level"] = r.level;
        row["n"] = r.n;
        row["mean"] = detail::json_num(r.mean);
        row["std_err"] = detail::json_num(r.std_err);
        row["re"] = detail::json_num(r.re);
        row["ci_lo"] = detail::json_num(r.ci_lo);
        row["ci_hi"] = detail::json_num(r.ci_hi);
        row["second_moment_ratio"] = detail::json_num(r.second_moment_ratio);
        row["alpha"] = detail::json_num(r.alpha);
        row["rate_exponent"] = detail::json_num(r.rate_exponent);
        row["rate_constant"] = detail::json_num(r.rate_constant);
        row["seed"] = r.seed;
        row["flagged"] = r.flagged;
        row["note"] = r.note;
        j["rows"].push_back(std::move(row));
    }
    j["dominating_sets"] = nlohmann::ordered_json::array();
    for (const LevelDominatingSet& d : res.dominating_sets) {
        nlohmann::ordered_json e;
        e["level"] = d.level;
        e["set"] = dominating_to_json(d.set);
        j["dominating_sets"].push_back(std::move(e));
    }
    j["warnings"] = res.warnings;
    return j;
}

inline ExperimentResult results_from_json(const nlohmann::ordered_json& j) {
    ExperimentResult res;
    res.experiment = j.at("experiment").get<std::string>();
    res.seed = j.at("seed").get<std::uint64_t>();
    res.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& row : j.at("rows")) {
        ResultRow r;
        r.estimator = row.at("estimator").get<std::string>();
        r.set = row.at("set").get<std::string>();
        r.level = row.at("level").get<double>();
        r.n = row.at("n").get<std::int64_t>();
        r.mean = detail::json_get_num(row.at("mean"));
        r.std_err = detail::json_get_num(row.at("std_err"));
        r.re = detail::json_get_num(row.at("re"));
        r.ci_lo = detail::json_get_num(row.at("ci_lo"));
        r.ci_hi = detail::json_get_num(row.at("ci_hi"));
        r.second_moment_ratio = detail::json_get_num(row.at("second_moment_ratio"));
        r.alpha = detail::json_get_num(row.at("alpha"));
        r.rate_exponent = detail::json_get_num(row.at("rate_exponent"));
        r.rate_constant = detail::json_get_num(row.at("rate_constant"));
        r.seed = row.at("seed").get<std::uint64_t>();
        r.flagged = row.at("flagged").get<bool>();
        r.note = row.at("note").get<std::string>();
        res.rows.push_back(std::move(r));
    }
    for (const auto& e : j.at("dominating_sets")) {
        res.dominating_sets.push_back(
            {e.at("level").get<double>(), dominating_from_json(e.at("set"))});
    }
    res.warnings = j.at("warnings").get<std::vector<std::string>>();
    return res;
}

inline void emit_json(const ExperimentResult& res, const std::string& path) {
    if (res.rows.empty()) throw std::invalid_argument("emit: no result rows");
    auto out = detail::open_output(path);
    out << results_to_json(res).dump(2) << '\n';
    if (!out) throw std::runtime_error("emit: write failed for " + path);
}

inline ExperimentResult read_results_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("emit: cannot read " + path);
    nlohmann::ordered_json j;
    in >> j;
    return results_from_json(j);
}

inline void emit_csv(const ExperimentResult& res, const std::string& path) {
    if (res.rows.empty()) throw std::invalid_argument("emit: no result rows");
    auto out = detail::open_output(path);
    out << "# config_hash = " << res.config_hash << '\n';
    out << "# seed = " << res.seed << '\n';
    out << "estimator,set,level,n,mean,std_err,re,ci_lo,ci_hi,second_moment_ratio,alpha,"
           "rate_exponent,rate_constant,flagged,note\n";
    for (const ResultRow& r : res.rows) {
        out << r.estimator << ',' << r.set << ',' << detail::fmt_csv(r.level) << ',' << r.n
            << ',' << detail::fmt_csv(r.mean) << ',' << detail::fmt_csv(r.std_err) << ','
            << detail::fmt_csv(r.re) << ',' << detail::fmt_csv(r.ci_lo) << ','
            << detail::fmt_csv(r.ci_hi) << ',' << detail::fmt_csv(r.second_moment_ratio) << ','
            << detail::fmt_csv(r.alpha) << ',' << detail::fmt_csv(r.rate_exponent) << ','
            << detail::fmt_csv(r.rate_constant) << ',' << (r.flagged ? 1 : 0) << ','
            << detail::csv_quote(r.note) << '\n';
    }
    if (!out) throw std::runtime_error("emit: write failed for " + path);
}

// Plot-ready companion table: log level against the log ratio of the
// mean-shift and exponential-coordinate second-moment ratios, one row per
// level where both estimators ran. Returns false when fewer than two such
// levels exist (nothing worth plotting).
inline bool emit_plot_csv(const ExperimentResult& res, const std::string& path) {
    struct PlotRow {
        double level;
        double smr_shift = std::numeric_limits<double>::quiet_NaN();
        double smr_exp = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<PlotRow> rows;
    auto slot = [&rows](double level) -> PlotRow& {
        for (auto& r : rows) {
            if (r.level == level) return r;
        }
        rows.push_back({level});
        return rows.back();
    };
    for (const ResultRow& r : res.rows) {
        if (r.flagged) continue;
        if (r.estimator == estimator_kind_name(EstimatorKind::mean_shift)) {
            slot(r.level).smr_shift = r.second_moment_ratio;
        } else if (r.estimator == estimator_kind_name(EstimatorKind::exp_coordinate)) {
            slot(r.level).smr_exp = r.second_moment_ratio;
        }
    }
    std::vector<PlotRow> usable;
    for (const auto& r : rows) {
        if (std::isfinite(r.smr_shift) && std::isfinite(r.smr_exp) && r.smr_exp > 0.0 &&
            r.smr_shift > 0.0 && r.level > 0.0) {
            usable.push_back(r);
        }
    }
    if (usable.size() < 2) return false;
    auto out = detail::open_output(path);
    out << "# config_hash = " << res.config_hash << '\n';
    out << "# seed = " << res.seed << '\n';
    out << "level,log_level,smr_mean_shift,smr_exp_coordinate,ratio,log_ratio\n";
    for (const auto& r : usable) {
        const double ratio = r.smr_shift / r.smr_exp;
        out << detail::fmt_csv(r.level) << ',' << detail::fmt_csv(std::log(r.level)) << ','
            << detail::fmt_csv(r.smr_shift) << ',' << detail::fmt_csv(r.smr_exp) << ','
            << detail::fmt_csv(ratio) << ',' << detail::fmt_csv(std::log(ratio)) << '\n';
    }
    if (!out) throw std::runtime_error("emit: write failed for " + path);
    return true;
}

// Theoretical-only rate table (no sampling): one row per estimator with its
// predicted RE^2 growth exponent and constant.
inline ExperimentResult rates_table(const ExperimentConfig& cfg) {
    if (cfg.experiment == ExperimentKind::cto) {
        throw ConfigError(
            "config: the rate table needs a Gaussian experiment with a polynomial boundary");
    }
    validate_experiment_config(cfg);
    const double level0 = cfg.z1star_list.empty() ? 1.0 : cfg.z1star_list.front();
    const ConstraintSet s0 = build_configured_set(cfg, level0);
    if (!s0.boundary.has_value()) {
        throw ConfigError("config: the rate table needs a set with a polynomial boundary");
    }
    const PolynomialCost cost = build_configured_cost(cfg);
    std::vector<int> cexpo(static_cast<std::size_t>(cfg.d) - 1, 0);
    if (!cfg.cost_terms.empty()) {
        const auto& e = cfg.cost_terms.front().expo;
        cexpo.assign(e.begin() + 1, e.end());
    }
    RngStream rng_c(cfg.seed, stream_id_for(detail::kServiceRow, 0));
    const StructuralConstants kc = compute_structural_constants(s0, cexpo, rng_c);
    RngStream rng_2c(cfg.seed, stream_id_for(detail::kServiceRow, 1));
    const StructuralConstants k2c =
        compute_structural_constants(s0, detail::doubled(cexpo), rng_2c);

    RateInputs in;
    in.s_c = kc.s;
    in.s_2c = k2c.s;
    in.eta_c = kc.eta;
    in.eta_2c = k2c.eta;
    in.d = cfg.d;
    in.theta = cfg.theta.value_or(optimal_tilt(kc.s));

    ExperimentResult result;
    result.experiment = experiment_kind_name(cfg.experiment);
    result.seed = cfg.seed;
    result.config_hash = config_hash_hex(cfg);
    for (EstimatorKind kind : cfg.estimators) {
        ResultRow row;
        row.estimator = estimator_kind_name(kind);
        row.set = s0.name;
        row.level = level0;
        row.seed = cfg.seed;
        if (kind == EstimatorKind::crude || kind == EstimatorKind::laplace_mixture) {
            row.note = "no polynomial growth statement applies";
        } else {
            const RateReport rate = theoretical_rates(kind, in, s0.regime);
            row.rate_exponent = rate.exponent;
            row.rate_constant = rate.constant;
        }
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace gctail
