#pragma once

// Dominating-point data for mixture importance sampling: a set of feasible
// boundary points, mixture weights, and the alignment rotations that map the
// first coordinate axis onto each point's direction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "philox.hpp"
#include "sets.hpp"

namespace gctail {

struct DominatingSet {
    int dim = 0;
    std::vector<Vec> points;          // z*_k in the original coordinates
    Vec weights;                      // mixture probabilities nu_k, sum to 1
    std::vector<double> radii;        // ||z*_k||
    std::vector<Rotation> rotations;  // rotations[k].apply((r_k, 0...)) = z*_k

    std::size_t size() const { return points.size(); }

    // Smallest point norm: the decay scale of the whole rare-event set.
    double min_radius() const {
        if (radii.empty()) throw std::logic_error("dominating set: empty");
        return *std::min_element(radii.begin(), radii.end());
    }
};

// Builds the derived fields from the raw points. Weights default to uniform;
// explicit weights must be positive and are normalized to sum to one.
inline DominatingSet make_dominating_set(const std::vector<Vec>& points, Vec weights = {}) {
    if (points.empty()) {
        throw std::invalid_argument("dominating set: needs at least one point");
    }
    DominatingSet d;
    d.dim = static_cast<int>(points[0].size());
    if (weights.empty()) weights.assign(points.size(), 1.0 / points.size());
    if (weights.size() != points.size()) {
        throw std::invalid_argument("dominating set: one weight per point required");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("dominating set: weights must be positive");
        wsum += w;
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Vec& p = points[k];
        if (static_cast<int>(p.size()) != d.dim) {
            throw std::invalid_argument("dominating set: point dimension mismatch");
        }
        const double r = norm(p);
        if (!(r > 0.0)) {
            throw std::invalid_argument("dominating set: point " + std::to_string(k) +
                                        " is at the origin");
        }
        d.points.push_back(p);
        d.radii.push_back(r);
        d.weights.push_back(weights[k] / wsum);
        d.rotations.push_back(make_rotation(p));

        // alignment invariant: the rotation really sends (r, 0, ..) to z*_k
        Vec e(d.dim, 0.0);
        e[0] = r;
        const Vec back = d.rotations.back().apply(e);
        double err = 0.0;
        for (int j = 0; j < d.dim; ++j) err = std::max(err, std::fabs(back[j] - p[j]));
        if (err > 1e-10 * std::max(1.0, r)) {
            throw std::logic_error("dominating set: alignment rotation failed for point " +
                                   std::to_string(k));
        }
    }
    return d;
}

// Largest distance from any point of one set to the nearest point of the
// other, in both directions: the usual metric for "how much did the point
// set move".
inline double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff_distance: empty point set");
    }
    auto one_sided = [](const std::vector<Vec>& from, const std::vector<Vec>& to) {
        double worst = 0.0;
        for (const Vec& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& q : to) {
                double d2 = 0.0;
                for (std::size_t j = 0; j < p.size(); ++j) d2 += (p[j] - q[j]) * (p[j] - q[j]);
                best = std::min(best, d2);
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

// ------------------------------------------------------- nearest point --

namespace detail {

// Sum of squared constraint violations; zero exactly on the feasible set,
// and continuously differentiable because each term is min(0, g)^2.
inline double violation(const ConstraintSet& S, const Vec& z) {
    double v = 0.0;
    for (const auto& g : S.constraints) {
        const double gi = g(z);
        if (gi < 0.0) v += gi * gi;
    }
    return v;
}

// Gradient-descent pass with backtracking line search on
// F(z) = |z|^2 + rho * violation(z), using central finite differences.
inline void penalty_descent(const ConstraintSet& S, Vec& z, double rho, int max_iters) {
    const int d = S.dim;
    auto F = [&](const Vec& p) { return norm2(p) + rho * violation(S, p); };
    double fz = F(z);
    Vec grad(d), trial(d);
    for (int it = 0; it < max_iters; ++it) {
        double gmax = 0.0;
        for (int j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, std::fabs(z[j]));
            Vec zp = z, zm = z;
            zp[j] += h;
            zm[j] -= h;
            grad[j] = (F(zp) - F(zm)) / (2.0 * h);
            gmax = std::max(gmax, std::fabs(grad[j]));
        }
        if (gmax < 1e-10) return;
        double step = 0.25 / std::max(1.0, gmax);
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            double decrease = 0.0;
            for (int j = 0; j < d; ++j) {
                trial[j] = z[j] - step * grad[j];
                decrease += grad[j] * grad[j];
            }
            const double ft = F(trial);
            if (ft <= fz - 1e-4 * step * decrease) {
                z = trial;
                fz = ft;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) return;  // no productive step at any scale
    }
}

// Nudges a near-feasible point across the boundary along the local uphill
// direction of the worst constraint. Returns false if the point stayed
// infeasible within the allowed (tiny) travel.
inline bool feasibility_snap(const ConstraintSet& S, Vec& z) {
    if (membership(S, z)) return true;
    const int d = S.dim;
    for (int round = 0; round < 45 && !membership(S, z); ++round) {
        Vec grad(d);
        double gmax = 0.0;
        for (int j = 0; j < d; ++j) {
            const double h = 1e-7 * std::max(1.0, std::fabs(z[j]));
            Vec zp = z, zm = z;
            zp[j] += h;
            zm[j] -= h;
            grad[j] = (min_constraint(S, zp) - min_constraint(S, zm)) / (2.0 * h);
            gmax = std::max(gmax, std::fabs(grad[j]));
        }
        if (gmax == 0.0) return false;
        const double step = (1e-9 * std::max(1.0, norm(z))) * std::pow(2.0, round) / gmax;
        for (int j = 0; j < d; ++j) z[j] += step * grad[j];
    }
    return membership(S, z);
}

// Fixed-step coordinate polling: accept any +-1e-5 coordinate move that stays
// feasible and shrinks the norm, until no direction improves. The returned
// point therefore certifies the stationarity condition the caller promises.
inline void coordinate_polish(const ConstraintSet& S, Vec& z) {
    const double step = 1e-5;
    const int d = S.dim;
    bool improved = true;
    long guard = 0;
    while (improved && ++guard < 200000) {
        improved = false;
        for (int j = 0; j < d; ++j) {
            for (double sgn : {+1.0, -1.0}) {
                Vec probe = z;
                probe[j] += sgn * step;
                if (norm2(probe) < norm2(z) && membership(S, probe)) {
                    z = probe;
                    improved = true;
                }
            }
        }
    }
}

}  // namespace detail

// Best local minimizer of |z| over the set across `multistarts` random
// starts. Each start runs a penalty-continuation descent on
// |z|^2 + rho * (squared violation), is nudged onto the feasible side, and
// is finished with fixed-step coordinate polling so that no feasible
// +-1e-5 coordinate move improves the returned point. Throws a runtime
// error when no start ends feasible.
inline Vec nearest_point(const ConstraintSet& S, int multistarts, RngStream& rng) {
    if (S.dim < 1) throw std::invalid_argument("nearest_point: set has no dimension");
    if (multistarts < 1) throw std::invalid_argument("nearest_point: need at least one start");
    Vec best;
    double best_norm2 = std::numeric_limits<double>::infinity();
    for (int start = 0; start < multistarts; ++start) {
        Vec z(S.dim);
        for (auto& v : z) {
            // random per-coordinate scale in {1/2, 1, 2, 4, 8}: curved sets
            // often need very different magnitudes per coordinate
            const int u = static_cast<int>(rng.uniform01() * 5.0);
            v = std::ldexp(rng.normal(), u - 1);
        }
        for (double rho : {1e2, 1e4, 1e6, 1e8}) {
            detail::penalty_descent(S, z, rho, 250);
        }
        if (!detail::feasibility_snap(S, z)) continue;
        detail::coordinate_polish(S, z);
        const double n2 = norm2(z);
        if (n2 < best_norm2) {
            best_norm2 = n2;
            best = z;
        }
    }
    if (best.empty()) {
        throw std::runtime_error(
            "nearest_point: no feasible point found within the multistart budget");
    }
    return best;
}

// ------------------------------------------------------------ clustering --

struct Clustering {
    std::vector<Vec> centroids;
    std::vector<std::vector<int>> members;  // indices into the input points
    std::size_t size() const { return centroids.size(); }
};

namespace detail {

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
}

inline Vec member_mean(const std::vector<Vec>& pts, const std::vector<int>& idx) {
    Vec c(pts[0].size(), 0.0);
    for (int i : idx) {
        for (std::size_t j = 0; j < c.size(); ++j) c[j] += pts[i][j];
    }
    for (auto& v : c) v /= static_cast<double>(idx.size());
    return c;
}

}  // namespace detail

// Lloyd clustering with distance-squared-weighted seeding, followed by a
// merge pass that repeatedly fuses the closest pair of centroids until all
// pairs are at least `merge_distance` apart. Deterministic for a given RNG
// stream.
inline Clustering cluster(const std::vector<Vec>& pts, int max_clusters, double merge_distance,
                          RngStream& rng) {
    if (pts.empty()) throw std::invalid_argument("cluster: no points");
    if (max_clusters < 1) throw std::invalid_argument("cluster: need max_clusters >= 1");
    if (!(merge_distance > 0.0)) {
        throw std::invalid_argument("cluster: merge distance must be positive");
    }
    const int n = static_cast<int>(pts.size());
    const int k_init = std::min(max_clusters, n);

    // seeding: first centroid uniform, then proportional to squared distance
    std::vector<Vec> centroids;
    centroids.push_back(pts[static_cast<int>(rng.uniform01() * n) % n]);
    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k_init) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& c : centroids) best = std::min(best, detail::dist2(pts[i], c));
            d2[i] = best;
            total += best;
        }
        if (total == 0.0) break;  // every point already coincides with a centroid
        double u = rng.uniform01() * total;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            u -= d2[i];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(pts[pick]);
    }

    std::vector<int> assign(n, -1);
    std::vector<std::vector<int>> members;
    for (int round = 0; round < 50; ++round) {
        // Lloyd iterations to a stable assignment
        for (int lloyd = 0; lloyd < 100; ++lloyd) {
            bool changed = false;
            members.assign(centroids.size(), {});
            for (int i = 0; i < n; ++i) {
                int best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < centroids.size(); ++c) {
                    const double d = detail::dist2(pts[i], centroids[c]);
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(c);
                    }
                }
                if (assign[i] != best) {
                    assign[i] = best;
                    changed = true;
                }
                members[best].push_back(i);
            }
            // drop empty clusters, recompute the rest
            std::vector<Vec> fresh;
            std::vector<std::vector<int>> kept;
            for (std::size_t c = 0; c < members.size(); ++c) {
                if (members[c].empty()) continue;
                fresh.push_back(detail::member_mean(pts, members[c]));
                kept.push_back(members[c]);
            }
            const bool dropped = fresh.size() != centroids.size();
            centroids = std::move(fresh);
            members = std::move(kept);
            if (dropped) {
                assign.assign(n, -1);
                continue;
            }
            if (!changed) break;
        }
        // merge the closest pair while any pair sits inside the merge radius
        bool merged = false;
        while (centroids.size() > 1) {
            double closest = std::numeric_limits<double>::infinity();
            std::size_t a = 0, b = 0;
            for (std::size_t i = 0; i + 1 < centroids.size(); ++i) {
                for (std::size_t j = i + 1; j < centroids.size(); ++j) {
                    const double d = detail::dist2(centroids[i], centroids[j]);
                    if (d < closest) {
                        closest = d;
                        a = i;
                        b = j;
                    }
                }
            }
            if (std::sqrt(closest) >= merge_distance) break;
            members[a].insert(members[a].end(), members[b].begin(), members[b].end());
            centroids[a] = detail::member_mean(pts, members[a]);
            centroids.erase(centroids.begin() + static_cast<std::ptrdiff_t>(b));
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(b));
            merged = true;
        }
        if (!merged) break;  // assignments stable and all centroids separated
        assign.assign(n, -1);  // merged: re-run the assignment loop
    }
    Clustering out;
    out.centroids = std::move(centroids);
    out.members = std::move(members);
    return out;
}

// ------------------------------------------------------------- discovery --

struct DiscoveryParams {
    int max_candidates = 50;        // retained pool of nearest feasible points
    int max_clusters = 10;
    double merge_distance = 0.25;   // centroid merge radius and norm-tie slack
    int samples_per_iteration = 100;
    int max_iterations = 50;
    double stall_tolerance = 1e-3;  // set movement below which iteration stops
};

struct DiscoveryTrace {
    std::vector<std::vector<Vec>> estimates;  // estimate set after each iteration
    int widenings = 0;                        // proposal concentration bumps used
    bool stalled = false;                     // stopped by the movement criterion
};

// Sequential search for the set of feasible points of (near-)minimal norm.
// Maintains two pieces of state: a pool of the `max_candidates` feasible
// points of smallest norm seen so far, and the current estimate of the
// dominating set. Each iteration samples around the current estimate with an
// axis-aligned Laplace mixture (the same proposal family the mixture
// estimator uses), refreshes the pool, clusters it, and rebuilds the
// estimate from each cluster's nearest-origin member, dropping members whose
// norm exceeds the best by more than the merge distance (a dominating point
// must tie the minimal norm up to sampling slack). Iteration stops when the
// estimate set moves less than `stall_tolerance` in Hausdorff distance, or
// after `max_iterations`.
//
// An iteration with no feasible sample doubles the Laplace rate — the
// mixture centers are feasible, so concentrating the proposal around them
// restores feasible draws — and retries; five consecutive failures abort.
inline DominatingSet discover_dominating_set(const ConstraintSet& S, const DiscoveryParams& p,
                                             const Vec& z0, RngStream& rng,
                                             DiscoveryTrace* trace = nullptr) {
    if (p.max_candidates < 1 || p.max_clusters < 1 || p.samples_per_iteration < 1 ||
        p.max_iterations < 1 || !(p.merge_distance > 0.0) || !(p.stall_tolerance > 0.0)) {
        throw std::invalid_argument("discovery: all parameters must be positive");
    }
    if (static_cast<int>(z0.size()) != S.dim) {
        throw std::invalid_argument("discovery: initial point dimension mismatch");
    }
    if (!membership(S, z0)) {
        throw std::invalid_argument("discovery: initial point must be feasible");
    }

    auto norm_less = [](const Vec& a, const Vec& b) {
        const double na = norm2(a), nb = norm2(b);
        if (na != nb) return na < nb;
        return a < b;  // deterministic tie-break
    };

    std::vector<Vec> pool{z0};      // nearest feasible points seen so far
    std::vector<Vec> estimate{z0};  // current dominating-set estimate
    double concentration = 1.0;
    int consecutive_failures = 0;

    for (int outer = 0; outer < p.max_iterations; ++outer) {
        const DominatingSet mix = make_dominating_set(estimate);
        std::vector<Vec> feasible;
        for (int i = 0; i < p.samples_per_iteration; ++i) {
            const std::size_t k = rng.categorical(mix.weights);
            const double r = mix.radii[k];
            Vec w(S.dim);
            w[0] = rng.laplace(r, r * concentration);
            for (int j = 1; j < S.dim; ++j) w[j] = rng.normal();
            Vec z = mix.rotations[k].apply(w);
            if (membership(S, z)) feasible.push_back(std::move(z));
        }
        if (feasible.empty()) {
            if (++consecutive_failures > 5) {
                throw std::runtime_error(
                    "discovery: no feasible samples after five proposal adjustments");
            }
            concentration *= 2.0;
            if (trace) ++trace->widenings;
            continue;
        }
        consecutive_failures = 0;

        // refresh the pool: best max_candidates by norm
        pool.insert(pool.end(), feasible.begin(), feasible.end());
        std::sort(pool.begin(), pool.end(), norm_less);
        if (static_cast<int>(pool.size()) > p.max_candidates) {
            pool.resize(static_cast<std::size_t>(p.max_candidates));
        }

        // rebuild the estimate: one nearest-origin representative per cluster
        const Clustering cl = cluster(pool, p.max_clusters, p.merge_distance, rng);
        std::vector<Vec> next;
        for (const auto& mem : cl.members) {
            int best = mem[0];
            for (int i : mem) {
                if (norm_less(pool[i], pool[best])) best = i;
            }
            next.push_back(pool[best]);
        }
        const double lead = norm(*std::min_element(next.begin(), next.end(), norm_less));
        next.erase(std::remove_if(next.begin(), next.end(),
                                  [&](const Vec& v) {
                                      return norm(v) > lead + p.merge_distance;
                                  }),
                   next.end());
        std::sort(next.begin(), next.end(), norm_less);

        const double moved = hausdorff_distance(estimate, next);
        estimate = std::move(next);
        if (trace) trace->estimates.push_back(estimate);
        if (moved < p.stall_tolerance) {
            if (trace) trace->stalled = true;
            break;
        }
    }
    return make_dominating_set(estimate);
}

}  // namespace gctail
