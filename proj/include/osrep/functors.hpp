#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include <osrep/representation.hpp>
#include <osrep/root_lattice.hpp>

namespace osrep {

struct FunctorResult {
    Representation rep;
    Character character;
};

namespace detail {

// Incident arrows of v on the named side, sorted by the opposite endpoint.
inline std::vector<std::pair<int, int>> sorted_band(const Quiver& q, int v, bool v_is_tail) {
    std::vector<std::pair<int, int>> band;  // (other vertex, arrow index)
    for (size_t a = 0; a < q.arrows.size(); ++a) {
        if (v_is_tail && q.arrows[a].tail == v) band.emplace_back(q.arrows[a].head, a);
        if (!v_is_tail && q.arrows[a].head == v) band.emplace_back(q.arrows[a].tail, a);
    }
    std::sort(band.begin(), band.end());
    return band;
}

// Rotate each column so its first nonzero entry is real positive.
inline void canonicalize_columns(Mat& k) {
    for (int c = 0; c < k.cols(); ++c) {
        for (int r = 0; r < k.rows(); ++r) {
            double m = std::abs(k(r, c));
            if (m > 1e-12) {
                k.col(c) *= std::conj(k(r, c)) / m;
                break;
            }
        }
    }
}

// Orthonormal basis of the orthogonal complement of the column space (when
// `kernel` is false) or of the kernel (when `kernel` is true) of m, together
// with a rank check against `expected_rank`.
inline Mat orthogonal_complement(const Mat& m, int expected_rank, bool kernel) {
    int n = kernel ? m.cols() : m.rows();
    if (std::min(m.rows(), m.cols()) == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double smax = svd.singularValues()[0];
    double cut = smax * 1e-9 * std::max(m.rows(), m.cols());
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()[rank] > cut) ++rank;
    if (rank != expected_rank)
        throw Error(ErrorCode::NumericalFailure, "band rank differs from the vertex dimension");
    Mat full = kernel ? svd.matrixV() : svd.matrixU();
    Mat out = full.rightCols(n - rank);
    canonicalize_columns(out);
    return out;
}

}  // namespace detail

// Coxeter reflection functor on a locally scalar representation: reflects the
// dimensions at every vertex of the given parity in one stroke. Dimensions
// transform by the parity sweep of that class; the character transforms by
// the sweep of the opposite class, since scalars sit on the other side of
// every arrow. Off-support character values feed the newly created blocks.
inline FunctorResult apply_reflection_functor(const Representation& T, const Character& chi,
                                              Parity reflected, double tol = 1e-9) {
    validate_representation(T);
    const Quiver& q = T.quiver;
    if (static_cast<int>(chi.size()) != q.size())
        throw Error(ErrorCode::IndexMismatch, "character length differs from the vertex count");

    OrthoReport before = orthoscalarity_report(T);
    double scale = std::max(1.0, detail::max_block_norm(T));
    double gate = std::max(tol, 1e-9) * scale * scale;
    if (before.defect > gate)
        throw Error(ErrorCode::NotOrthoscalar, "input representation is not locally scalar");
    for (int v = 0; v < q.size(); ++v)
        if (before.character.determined[v] &&
            std::abs(chi.values[v] - before.character.values[v]) > 10 * gate)
            throw Error(ErrorCode::ConstraintViolated,
                        "supplied character disagrees with the representation at " +
                            q.vertex_ids[v]);

    const bool even_side = (reflected == Parity::Even);

    std::vector<int> newdims = T.dims;
    for (int v = 0; v < q.size(); ++v) {
        if (q.parity[v] != reflected) continue;
        int sum = 0;
        for (int u : q.neighbors(v)) sum += T.dims[u];
        newdims[v] = sum - T.dims[v];
        if (newdims[v] < 0)
            throw Error(ErrorCode::InvalidDimension,
                        "reflected dimension is negative at " + q.vertex_ids[v]);
    }
    for (int v = 0; v < q.size(); ++v)
        if (q.parity[v] == reflected && (T.dims[v] > 0 || newdims[v] > 0) && chi.values[v] <= 0)
            throw Error(ErrorCode::NonPositiveCharacter,
                        "character must be positive at reflected vertex " + q.vertex_ids[v]);

    Representation out = make_zero_rep(q, newdims);
    for (int v = 0; v < q.size(); ++v) {
        if (q.parity[v] != reflected) continue;
        auto band = detail::sorted_band(q, v, even_side);
        int total = 0;
        for (auto& [u, a] : band) total += T.dims[u];
        if (total == 0) continue;

        // Stack the incident blocks into one band matrix.
        Mat stacked;
        if (even_side) {
            stacked = Mat(total, T.dims[v]);
            int off = 0;
            for (auto& [u, a] : band) {
                stacked.middleRows(off, T.dims[u]) = T.blocks[a];
                off += T.dims[u];
            }
        } else {
            stacked = Mat(T.dims[v], total);
            int off = 0;
            for (auto& [u, a] : band) {
                stacked.middleCols(off, T.dims[u]) = T.blocks[a];
                off += T.dims[u];
            }
        }

        Mat k = detail::orthogonal_complement(stacked, T.dims[v], /*kernel=*/!even_side);
        double root = std::sqrt(std::max(chi.values[v], 0.0));
        int off = 0;
        for (auto& [u, a] : band) {
            if (even_side)
                out.blocks[a] = root * k.middleRows(off, T.dims[u]);
            else
                out.blocks[a] = root * k.middleRows(off, T.dims[u]).adjoint();
            off += T.dims[u];
        }
    }

    // Character bookkeeping: untouched on the reflected class, swept on the
    // opposite class.
    Character outchi(q.size(), 0.0);
    for (int v = 0; v < q.size(); ++v) {
        outchi.determined[v] = true;
        if (q.parity[v] == reflected) {
            outchi.values[v] = chi.values[v];
        } else {
            double s = 0;
            for (int u : q.neighbors(v)) s += chi.values[u];
            outchi.values[v] = s - chi.values[v];
        }
    }

    int support_count = 0, lone = -1;
    for (int v = 0; v < q.size(); ++v)
        if (newdims[v] > 0) {
            ++support_count;
            lone = v;
        }
    double cs = 1.0;
    for (double x : outchi.values) cs = std::max(cs, std::abs(x));
    for (int v = 0; v < q.size(); ++v) {
        if (newdims[v] == 0 || outchi.values[v] > 1e-10 * cs) continue;
        if (support_count == 1 && v == lone && std::abs(outchi.values[v]) <= 1e-8 * cs) {
            outchi.values[v] = 0.0;  // a simple representation carries the zero scalar
            continue;
        }
        throw Error(ErrorCode::CharacterNonpositive,
                    "reflected character is not positive at " + q.vertex_ids[v]);
    }

    OrthoReport after = orthoscalarity_report(out);
    double oscale = std::max(1.0, detail::max_block_norm(out));
    double ogate = std::max(tol, 1e-9) * oscale * oscale * 100;
    if (after.defect > ogate)
        throw Error(ErrorCode::NumericalFailure, "functor output lost local scalarity");
    for (int v = 0; v < q.size(); ++v)
        if (after.character.determined[v] &&
            std::abs(after.character.values[v] - outchi.values[v]) > ogate * std::max(1.0, cs))
            throw Error(ErrorCode::NumericalFailure, "functor output character drifted");

    return {std::move(out), std::move(outchi)};
}

// Alternating chain of reflection functors; the first step reflects `start`.
inline FunctorResult functor_chain(const Representation& T, const Character& chi, int count,
                                   Parity start, double tol = 1e-9) {
    if (count < 0) throw Error(ErrorCode::InvalidSize, "chain length must be nonnegative");
    FunctorResult cur{T, chi};
    Parity p = start;
    for (int s = 0; s < count; ++s) {
        cur = apply_reflection_functor(cur.rep, cur.character, p, tol);
        p = (p == Parity::Even) ? Parity::Odd : Parity::Even;
    }
    return cur;
}

struct ConstructResult {
    Representation rep;
    Character character;
};

namespace detail {

inline ConstructResult replay_functors(ConstructResult cur, const std::vector<Parity>& steps,
                                       const GVec& target, double tol) {
    for (size_t s = 0; s < steps.size(); ++s) {
        try {
            FunctorResult fr = apply_reflection_functor(cur.rep, cur.character, steps[s], tol);
            cur.rep = std::move(fr.rep);
            cur.character = std::move(fr.character);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CharacterNonpositive ||
                e.code() == ErrorCode::NonPositiveCharacter)
                throw Error(ErrorCode::CharacterNonpositive,
                            std::string(e.what()) + " (replay step " + std::to_string(s) + ")");
            throw;
        }
    }
    if (cur.rep.dim_vector() != target)
        throw Error(ErrorCode::PathFailure, "replayed chain missed the target dimensions");
    return cur;
}

}  // namespace detail

// Build an indecomposable locally scalar representation with the given real
// root as dimension vector. Seed values act as the free character entries;
// everything else is forced by the reflection chain.
inline ConstructResult construct_real_root_rep(const Quiver& q, const GVec& d,
                                               const std::vector<double>& seeds,
                                               double tol = 1e-9) {
    check_indexing(q, d);
    if (seeds.size() != static_cast<size_t>(q.size()))
        throw Error(ErrorCode::IndexMismatch, "seed length differs from the vertex count");
    if (!vec_is_nonneg(d) || std::all_of(d.begin(), d.end(), [](long long x) { return x == 0; }))
        throw Error(ErrorCode::NotRealRoot, "dimension vector must be a positive real root");
    RootClass rc = classify_vector(q, d);
    if (rc.tag != RootTag::RealSingular && rc.tag != RootTag::RealRegular)
        throw Error(ErrorCode::NotRealRoot, "dimension vector is not a real root");

    int g = simple_root_vertex(d);
    if (g >= 0) {
        auto [rep, chi] = simple_rep(q, g, seeds);
        return {std::move(rep), std::move(chi)};
    }

    if (rc.tag == RootTag::RealSingular) {
        ReflectionPath path = singular_reduction_path(q, d);
        auto [rep, chi] = simple_rep(q, simple_root_vertex(path.terminal), seeds);
        return detail::replay_functors({std::move(rep), std::move(chi)}, path.steps, d, tol);
    }

    // Regular root. A faithful one reduces along a chain that keeps every
    // coordinate positive until one hits zero; it must fit under delta, or no
    // indecomposable locally scalar representation exists at all.
    bool faithful = std::all_of(d.begin(), d.end(), [](long long x) { return x > 0; });
    if (faithful) {
        for (int v = 0; v < q.size(); ++v)
            if (d[v] > q.delta[v])
                throw Error(ErrorCode::NotApplicable,
                            "no indecomposable locally scalar representation in this dimension");
        ReflectionPath path = faithful_reduction_path(q, d);
        ConstructResult inner = construct_real_root_rep(q, path.terminal, seeds, tol);
        return detail::replay_functors(std::move(inner), path.steps, d, tol);
    }

    // Non-faithful regular root: build on the support subquiver and pad with
    // zero blocks.
    std::vector<int> keep;
    for (int v = 0; v < q.size(); ++v)
        if (d[v] > 0) keep.push_back(v);
    Quiver sub = induced_subquiver(q, keep);
    GVec dsub(keep.size());
    std::vector<double> seedsub(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
        dsub[i] = d[keep[i]];
        seedsub[i] = seeds[keep[i]];
    }
    ConstructResult inner = construct_real_root_rep(sub, dsub, seedsub, tol);

    std::vector<int> dims(q.size());
    for (int v = 0; v < q.size(); ++v) dims[v] = static_cast<int>(d[v]);
    Representation emb = make_zero_rep(q, dims);
    size_t sub_arrow = 0;
    std::vector<int> new_index(q.size(), -1);
    for (size_t i = 0; i < keep.size(); ++i) new_index[keep[i]] = static_cast<int>(i);
    for (size_t a = 0; a < q.arrows.size(); ++a)
        if (new_index[q.arrows[a].tail] >= 0 && new_index[q.arrows[a].head] >= 0)
            emb.blocks[a] = inner.rep.blocks[sub_arrow++];

    Character chi(q.size(), 1.0);
    for (int v = 0; v < q.size(); ++v) {
        if (new_index[v] >= 0) {
            chi.values[v] = inner.character.values[new_index[v]];
            chi.determined[v] = inner.character.determined[new_index[v]];
        } else {
            if (seeds[v] <= 0)
                throw Error(ErrorCode::NonPositiveCharacter,
                            "seed character must be positive at " + q.vertex_ids[v]);
            chi.values[v] = seeds[v];
            chi.determined[v] = false;
        }
    }
    return {std::move(emb), std::move(chi)};
}

inline ConstructResult construct_real_root_rep(const Quiver& q, const GVec& d,
                                               double tol = 1e-9) {
    return construct_real_root_rep(q, d, std::vector<double>(q.size(), 1.0), tol);
}

// All-ones seeds first; on a sign failure somewhere along the chain, retry
// with reproducible randomized positive seeds.
inline ConstructResult construct_real_root_rep_seeded(const Quiver& q, const GVec& d,
                                                      std::uint64_t seed = 0, int attempts = 24,
                                                      double tol = 1e-9) {
    try {
        return construct_real_root_rep(q, d, tol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CharacterNonpositive) throw;
    }
    Rng rng(seed ^ 0xc0457ULL);
    for (int k = 0;; ++k) {
        std::vector<double> seeds(q.size());
        for (double& s : seeds) s = rng.uniform(0.25, 4.0);
        try {
            return construct_real_root_rep(q, d, seeds, tol);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CharacterNonpositive || k + 1 >= attempts) throw;
        }
    }
}

}  // namespace osrep
