#pragma once

#include <utility>
#include <vector>

#include <osrep/representation.hpp>

namespace osrep {

enum class MorphismCategory { RepQ, RepQH };

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

// Solution space of the blockwise intertwining equations in the unknown
// per-vertex maps C_v: T(v) -> T~(v). RepQ imposes A T = T~ B per arrow;
// RepQH adds B T^* = T~^* A. Both are complex-linear, so the space is the
// nullspace of one stacked system over the flattened unknowns.
struct MorphismSpace {
    std::vector<std::pair<int, int>> shapes;  // per vertex: (rows, cols)
    std::vector<int> offsets;                 // flat offset per vertex
    int total = 0;
    std::vector<Eigen::VectorXcd> basis;      // orthonormal nullspace vectors

    int dimension() const { return static_cast<int>(basis.size()); }

    std::vector<Mat> unflatten(const Eigen::VectorXcd& flat) const {
        std::vector<Mat> out;
        for (size_t v = 0; v < shapes.size(); ++v) {
            Mat m(shapes[v].first, shapes[v].second);
            for (int c = 0; c < m.cols(); ++c)
                for (int r = 0; r < m.rows(); ++r)
                    m(r, c) = flat[offsets[v] + c * m.rows() + r];
            out.push_back(std::move(m));
        }
        return out;
    }

    std::vector<Mat> element(const std::vector<cplx>& coeffs) const {
        Eigen::VectorXcd flat = Eigen::VectorXcd::Zero(total);
        for (size_t b = 0; b < basis.size(); ++b) flat += coeffs.at(b) * basis[b];
        return unflatten(flat);
    }
};

inline MorphismSpace morphism_space(const Representation& T, const Representation& Ttil,
                                    MorphismCategory cat, double rank_tol = 1e-9) {
    validate_representation(T);
    validate_representation(Ttil);
    if (T.quiver.name != Ttil.quiver.name || T.quiver.size() != Ttil.quiver.size())
        throw Error(ErrorCode::IndexMismatch, "morphisms need one common quiver");
    const Quiver& q = T.quiver;

    MorphismSpace sp;
    for (int v = 0; v < q.size(); ++v) {
        sp.shapes.emplace_back(Ttil.dims[v], T.dims[v]);
        sp.offsets.push_back(sp.total);
        sp.total += Ttil.dims[v] * T.dims[v];
    }
    if (sp.total == 0) return sp;

    long long rows = 0;
    for (size_t a = 0; a < q.arrows.size(); ++a) {
        const Arrow& ar = q.arrows[a];
        rows += static_cast<long long>(Ttil.dims[ar.head]) * T.dims[ar.tail];
        if (cat == MorphismCategory::RepQH)
            rows += static_cast<long long>(Ttil.dims[ar.tail]) * T.dims[ar.head];
    }
    Mat M = Mat::Zero(rows, sp.total);
    long long row = 0;
    for (size_t a = 0; a < q.arrows.size(); ++a) {
        const Arrow& ar = q.arrows[a];
        const int i = ar.head, j = ar.tail;
        const Mat& Ta = T.blocks[a];
        const Mat& Sa = Ttil.blocks[a];
        {
            // A_i T_a - T~_a B_j = 0, flattened column-major.
            long long n = static_cast<long long>(Ttil.dims[i]) * T.dims[j];
            if (n > 0) {
                M.block(row, sp.offsets[i], n, Ttil.dims[i] * T.dims[i]) =
                    kron(Ta.transpose(), Mat::Identity(Ttil.dims[i], Ttil.dims[i]));
                M.block(row, sp.offsets[j], n, Ttil.dims[j] * T.dims[j]) -=
                    kron(Mat::Identity(T.dims[j], T.dims[j]), Sa);
                row += n;
            }
        }
        if (cat == MorphismCategory::RepQH) {
            // B_j T_a^* - T~_a^* A_i = 0.
            long long n = static_cast<long long>(Ttil.dims[j]) * T.dims[i];
            if (n > 0) {
                M.block(row, sp.offsets[j], n, Ttil.dims[j] * T.dims[j]) =
                    kron(Ta.conjugate(), Mat::Identity(Ttil.dims[j], Ttil.dims[j]));
                M.block(row, sp.offsets[i], n, Ttil.dims[i] * T.dims[i]) -=
                    kron(Mat::Identity(T.dims[i], T.dims[i]), Sa.adjoint());
                row += n;
            }
        }
    }

    // Nullspace from the Hermitian Gram: eigenvectors below the rank cutoff.
    // Cheaper than a full SVD of M and directly orthonormal.
    Mat H = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    double lmax = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
    double dim = static_cast<double>(std::max<long long>(M.rows(), M.cols()));
    // Squared cutoff, floored at the eigensolver's own noise level so exact
    // null vectors of small well-scaled systems are not rejected.
    double cutoff = lmax * std::max(rank_tol * rank_tol * dim * dim, 1e-12);
    for (int k = 0; k < sp.total; ++k) {
        if (lmax > 0 && es.eigenvalues()[k] > cutoff) break;
        sp.basis.push_back(es.eigenvectors().col(k));
    }
    return sp;
}

inline int morphism_space_dim(const Representation& T, const Representation& Ttil,
                              MorphismCategory cat, double rank_tol = 1e-9) {
    return morphism_space(T, Ttil, cat, rank_tol).dimension();
}

inline bool is_schur(const Representation& T, double rank_tol = 1e-9) {
    if (T.total_dim() == 0)
        throw Error(ErrorCode::ZeroRepresentation, "the zero representation has no Schur test");
    return morphism_space_dim(T, T, MorphismCategory::RepQ, rank_tol) == 1;
}

struct EquivalenceResult {
    bool equivalent = false;
    // True when a nontrivial Hilbert-morphism space yielded no invertible
    // element within tolerance: a numerical no, not a certified one.
    bool inconclusive = false;
    double residual = 0.0;
    std::vector<Mat> witness;  // per-vertex unitaries U with U T U^* = T~

    explicit operator bool() const { return equivalent; }
};

namespace detail {

inline double conjugation_residual(const Representation& T, const Representation& Ttil,
                                   const std::vector<Mat>& U) {
    double r = 0;
    for (size_t a = 0; a < T.blocks.size(); ++a) {
        const Arrow& ar = T.quiver.arrows[a];
        r = std::max(r, (U[ar.head] * T.blocks[a] * U[ar.tail].adjoint() - Ttil.blocks[a]).norm());
    }
    return r;
}

}  // namespace detail

// Decide unitary equivalence. Quick rejects on dimension and character; then
// search the Hilbert-morphism space for an invertible element and project it
// blockwise to its unitary polar factor, which is again a morphism.
inline EquivalenceResult unitary_equivalent(const Representation& T, const Representation& Ttil,
                                            double tol = 1e-8, std::uint64_t seed = 0) {
    EquivalenceResult res;
    if (T.quiver.name != Ttil.quiver.name || T.quiver.size() != Ttil.quiver.size())
        throw Error(ErrorCode::IndexMismatch, "equivalence needs one common quiver");
    if (T.dims != Ttil.dims) return res;
    if (T.total_dim() == 0) {
        res.equivalent = true;
        for (int v = 0; v < T.quiver.size(); ++v) res.witness.push_back(Mat(0, 0));
        return res;
    }
    OrthoReport ra = orthoscalarity_report(T);
    OrthoReport rb = orthoscalarity_report(Ttil);
    double scale = std::max({1.0, detail::max_block_norm(T), detail::max_block_norm(Ttil)});
    for (int v = 0; v < T.quiver.size(); ++v) {
        if (!ra.character.determined[v]) continue;
        if (std::abs(ra.character.values[v] - rb.character.values[v]) > tol * scale * scale)
            return res;
    }

    MorphismSpace sp = morphism_space(T, Ttil, MorphismCategory::RepQH);
    if (sp.dimension() == 0) return res;

    Rng rng(seed ^ 0x5eedULL);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<cplx> coeffs(sp.dimension());
        if (attempt == 0 && sp.dimension() == 1)
            coeffs[0] = 1.0;
        else
            for (auto& c : coeffs) c = rng.gaussian_cplx();
        std::vector<Mat> C = sp.element(coeffs);
        bool invertible = true;
        std::vector<Mat> U(C.size());
        for (int v = 0; v < T.quiver.size() && invertible; ++v) {
            if (T.dims[v] == 0) {
                U[v] = Mat(0, 0);
                continue;
            }
            Eigen::JacobiSVD<Mat> svd(C[v], Eigen::ComputeThinU | Eigen::ComputeThinV);
            double smax = svd.singularValues()[0];
            double smin = svd.singularValues()[svd.singularValues().size() - 1];
            if (smax <= 0 || smin < 1e-7 * smax) {
                invertible = false;
                break;
            }
            U[v] = svd.matrixU() * svd.matrixV().adjoint();
        }
        if (!invertible) continue;
        double r = detail::conjugation_residual(T, Ttil, U);
        if (r <= tol * scale) {
            res.equivalent = true;
            res.residual = r;
            res.witness = std::move(U);
            return res;
        }
    }
    res.inconclusive = true;
    return res;
}

// Orthogonal direct-sum splitting: find a non-scalar self-adjoint element of
// the Hilbert endomorphism algebra, cut its joint spectrum at the widest gap,
// compress onto both spectral subspaces, recurse.
inline std::vector<Representation> split_decomposition(const Representation& T, double tol = 1e-8,
                                                       std::uint64_t seed = 0, int depth = 0) {
    if (depth == 0) {
        OrthoReport rep = orthoscalarity_report(T);
        double scale = std::max(1.0, detail::max_block_norm(T));
        if (rep.defect > std::max(tol, 1e-9) * scale * scale)
            throw Error(ErrorCode::NotOrthoscalar,
                        "splitting is defined for orthoscalar representations");
    }
    if (T.total_dim() == 0) return {};
    if (depth > 8 * T.quiver.size() + static_cast<int>(T.total_dim()))
        throw Error(ErrorCode::NumericalFailure, "splitting recursion failed to terminate");

    MorphismSpace end = morphism_space(T, T, MorphismCategory::RepQH);
    if (end.dimension() <= 1) return {T};

    Rng rng(seed ^ (0xdecULL + depth));
    double scale = std::max(1.0, detail::max_block_norm(T));
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<cplx> coeffs(end.dimension());
        for (auto& c : coeffs) c = rng.gaussian_cplx();
        std::vector<Mat> C = end.element(coeffs);
        std::vector<Mat> H(C.size());
        std::vector<Eigen::SelfAdjointEigenSolver<Mat>> eig(C.size());
        std::vector<double> all_eigs;
        for (int v = 0; v < T.quiver.size(); ++v) {
            if (T.dims[v] == 0) continue;
            H[v] = 0.5 * (C[v] + C[v].adjoint());
            eig[v].compute(H[v]);
            for (int k = 0; k < T.dims[v]; ++k) all_eigs.push_back(eig[v].eigenvalues()[k]);
        }
        std::sort(all_eigs.begin(), all_eigs.end());
        double spread = all_eigs.back() - all_eigs.front();
        if (spread <= 1e-10) continue;  // scalar element, try another combination
        double best_gap = 0, mid = 0;
        for (size_t k = 0; k + 1 < all_eigs.size(); ++k) {
            double gap = all_eigs[k + 1] - all_eigs[k];
            if (gap > best_gap) {
                best_gap = gap;
                mid = 0.5 * (all_eigs[k] + all_eigs[k + 1]);
            }
        }
        if (best_gap < 1e-6 * spread)
            throw Error(ErrorCode::NumericalFailure, "no usable spectral gap while splitting");

        std::vector<Mat> Q1(C.size()), Q2(C.size());
        std::vector<int> dims1(T.quiver.size(), 0), dims2(T.quiver.size(), 0);
        for (int v = 0; v < T.quiver.size(); ++v) {
            if (T.dims[v] == 0) {
                Q1[v] = Mat(0, 0);
                Q2[v] = Mat(0, 0);
                continue;
            }
            int low = 0;
            while (low < T.dims[v] && eig[v].eigenvalues()[low] < mid) ++low;
            dims1[v] = low;
            dims2[v] = T.dims[v] - low;
            Q1[v] = eig[v].eigenvectors().leftCols(low);
            Q2[v] = eig[v].eigenvectors().rightCols(T.dims[v] - low);
        }

        Representation T1 = make_zero_rep(T.quiver, dims1);
        Representation T2 = make_zero_rep(T.quiver, dims2);
        double cross = 0;
        for (size_t a = 0; a < T.blocks.size(); ++a) {
            const Arrow& ar = T.quiver.arrows[a];
            T1.blocks[a] = Q1[ar.head].adjoint() * T.blocks[a] * Q1[ar.tail];
            T2.blocks[a] = Q2[ar.head].adjoint() * T.blocks[a] * Q2[ar.tail];
            cross = std::max(cross, (Q2[ar.head].adjoint() * T.blocks[a] * Q1[ar.tail]).norm());
            cross = std::max(cross, (Q1[ar.head].adjoint() * T.blocks[a] * Q2[ar.tail]).norm());
        }
        if (cross > std::max(tol, 1e-9) * scale * 10) continue;  // bad split, retry

        std::vector<Representation> out =
            split_decomposition(T1, tol, seed + 1, depth + 1);
        std::vector<Representation> right =
            split_decomposition(T2, tol, seed + 2, depth + 1);
        out.insert(out.end(), std::make_move_iterator(right.begin()),
                   std::make_move_iterator(right.end()));
        return out;
    }
    throw Error(ErrorCode::NumericalFailure,
                "could not produce a non-scalar self-adjoint endomorphism");
}

}  // namespace osrep
