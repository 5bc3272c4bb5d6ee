#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include <osrep/root_lattice.hpp>

namespace osrep {

using Mat = Eigen::MatrixXcd;

// Largest |eigenvalue| of a Hermitian matrix; operator norm of residuals.
inline double hermitian_norm(const Mat& h) {
    if (h.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Haar-like random unitary: QR of a Gaussian matrix with the R diagonal
// phases absorbed, so the result is deterministic given the stream.
inline Mat random_unitary(int n, Rng& rng) {
    if (n == 0) return Mat(0, 0);
    Mat g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = rng.gaussian_cplx();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c) {
        cplx d = r(c, c);
        double m = std::abs(d);
        q.col(c) *= m > 0 ? d / m : cplx(1, 0);
    }
    return q;
}

// One complex matrix per arrow, shaped dims(head) x dims(tail).
struct Representation {
    Quiver quiver;
    std::vector<int> dims;
    std::vector<Mat> blocks;

    int dim(int v) const { return dims[v]; }
    const Mat& block(int arrow) const { return blocks[arrow]; }

    std::vector<int> support() const {
        std::vector<int> out;
        for (int v = 0; v < quiver.size(); ++v)
            if (dims[v] > 0) out.push_back(v);
        return out;
    }

    GVec dim_vector() const {
        GVec d(dims.size());
        for (size_t v = 0; v < dims.size(); ++v) d[v] = dims[v];
        return d;
    }

    long long total_dim() const {
        long long t = 0;
        for (int d : dims) t += d;
        return t;
    }
};

inline Representation make_zero_rep(const Quiver& q, const std::vector<int>& dims) {
    if (static_cast<int>(dims.size()) != q.size())
        throw Error(ErrorCode::IndexMismatch, "dimension vector does not index the quiver");
    for (int d : dims)
        if (d < 0) throw Error(ErrorCode::InvalidDimension, "negative dimension");
    Representation T;
    T.quiver = q;
    T.dims = dims;
    for (const Arrow& a : q.arrows) T.blocks.push_back(Mat::Zero(dims[a.head], dims[a.tail]));
    return T;
}

inline void validate_representation(const Representation& T) {
    if (static_cast<int>(T.dims.size()) != T.quiver.size() ||
        T.blocks.size() != T.quiver.arrows.size())
        throw Error(ErrorCode::IndexMismatch, "representation arrays do not index the quiver");
    for (size_t a = 0; a < T.blocks.size(); ++a) {
        const Arrow& ar = T.quiver.arrows[a];
        if (T.blocks[a].rows() != T.dims[ar.head] || T.blocks[a].cols() != T.dims[ar.tail])
            throw Error(ErrorCode::InvalidDimension,
                        "block " + std::to_string(a) + " shape disagrees with dims");
    }
}

// Vertex-indexed scalars of the orthoscalarity conditions. `determined` marks
// support vertices where the value was extracted from a Gram block; elsewhere
// the value is a free positive parameter (default 1).
struct Character {
    std::vector<double> values;
    std::vector<bool> determined;

    Character() = default;
    explicit Character(int n, double fill = 1.0) : values(n, fill), determined(n, false) {}

    double operator[](int v) const { return values[v]; }
    int size() const { return static_cast<int>(values.size()); }
};

inline Character uniform_character(const Quiver& q, double value = 1.0) {
    if (value <= 0) throw Error(ErrorCode::NonPositiveCharacter, "character values must be > 0");
    return Character(q.size(), value);
}

struct OrthoReport {
    Character character;
    double defect = 0.0;                 // max operator-norm residual over the support
    std::vector<double> scalar_targets;  // trace-average per vertex (0 off support)
};

// Row Gram at odd vertices, column Gram at even ones, scalar fit by trace
// average, residual in operator norm.
inline OrthoReport orthoscalarity_report(const Representation& T) {
    validate_representation(T);
    const Quiver& q = T.quiver;
    OrthoReport rep;
    rep.character = Character(q.size(), 1.0);
    rep.scalar_targets.assign(q.size(), 0.0);
    for (int v = 0; v < q.size(); ++v) {
        if (T.dims[v] == 0) continue;
        Mat gram = Mat::Zero(T.dims[v], T.dims[v]);
        for (size_t a = 0; a < q.arrows.size(); ++a) {
            const Arrow& ar = q.arrows[a];
            if (q.is_odd(v) && ar.head == v)
                gram += T.blocks[a] * T.blocks[a].adjoint();
            else if (q.is_even(v) && ar.tail == v)
                gram += T.blocks[a].adjoint() * T.blocks[a];
        }
        double chi = gram.real().trace() / T.dims[v];
        double residual = hermitian_norm(gram - chi * Mat::Identity(T.dims[v], T.dims[v]));
        rep.character.values[v] = chi;
        rep.character.determined[v] = true;
        rep.scalar_targets[v] = chi;
        rep.defect = std::max(rep.defect, residual);
    }
    return rep;
}

inline std::pair<bool, Character> is_orthoscalar(const Representation& T, double tol) {
    if (tol <= 0) throw Error(ErrorCode::NotPositive, "tolerance must be > 0");
    OrthoReport rep = orthoscalarity_report(T);
    return {rep.defect <= tol, rep.character};
}

// The simple object at g: one-dimensional space there, zero elsewhere. Its
// character is 0 at g and the given free positive values everywhere else.
inline std::pair<Representation, Character> simple_rep(const Quiver& q, int g,
                                                       const std::vector<double>& off_support) {
    if (g < 0 || g >= q.size()) throw Error(ErrorCode::IndexMismatch, "vertex out of range");
    if (static_cast<int>(off_support.size()) != q.size())
        throw Error(ErrorCode::IndexMismatch, "character seed does not index the quiver");
    std::vector<int> dims(q.size(), 0);
    dims[g] = 1;
    Representation T = make_zero_rep(q, dims);
    Character chi(q.size(), 1.0);
    for (int v = 0; v < q.size(); ++v) {
        if (v == g) {
            chi.values[v] = 0.0;
            chi.determined[v] = true;
        } else {
            if (off_support[v] <= 0)
                throw Error(ErrorCode::NonPositiveCharacter,
                            "off-support character values must be > 0");
            chi.values[v] = off_support[v];
        }
    }
    return {std::move(T), std::move(chi)};
}

inline std::pair<Representation, Character> simple_rep(const Quiver& q, int g,
                                                       double off_support_value = 1.0) {
    return simple_rep(q, g, std::vector<double>(q.size(), off_support_value));
}

// The m x n block matrix with odd row bands and even column bands; bands
// follow the display order restricted to each parity class.
inline Mat assemble_block_matrix(const Representation& T) {
    validate_representation(T);
    const Quiver& q = T.quiver;
    std::vector<int> odd = q.vertices_of_parity(Parity::Odd);
    std::vector<int> even = q.vertices_of_parity(Parity::Even);
    std::vector<int> row_off(odd.size(), 0), col_off(even.size(), 0);
    int rows = 0, cols = 0;
    for (size_t i = 0; i < odd.size(); ++i) {
        row_off[i] = rows;
        rows += T.dims[odd[i]];
    }
    for (size_t j = 0; j < even.size(); ++j) {
        col_off[j] = cols;
        cols += T.dims[even[j]];
    }
    Mat big = Mat::Zero(rows, cols);
    for (size_t a = 0; a < q.arrows.size(); ++a) {
        const Arrow& ar = q.arrows[a];
        size_t i = std::find(odd.begin(), odd.end(), ar.head) - odd.begin();
        size_t j = std::find(even.begin(), even.end(), ar.tail) - even.begin();
        big.block(row_off[i], col_off[j], T.dims[ar.head], T.dims[ar.tail]) = T.blocks[a];
    }
    return big;
}

inline Representation direct_sum(const Representation& S, const Representation& T) {
    if (S.quiver.name != T.quiver.name || S.quiver.size() != T.quiver.size())
        throw Error(ErrorCode::IndexMismatch, "direct sum needs one common quiver");
    Representation out;
    out.quiver = S.quiver;
    out.dims.resize(S.quiver.size());
    for (int v = 0; v < S.quiver.size(); ++v) out.dims[v] = S.dims[v] + T.dims[v];
    for (size_t a = 0; a < S.blocks.size(); ++a) {
        const Arrow& ar = S.quiver.arrows[a];
        Mat m = Mat::Zero(out.dims[ar.head], out.dims[ar.tail]);
        m.topLeftCorner(S.dims[ar.head], S.dims[ar.tail]) = S.blocks[a];
        m.bottomRightCorner(T.dims[ar.head], T.dims[ar.tail]) = T.blocks[a];
        out.blocks.push_back(std::move(m));
    }
    return out;
}

// Blockwise change of basis: new block = U[head] * old * U[tail]^*. With
// unitary U this realizes unitary equivalence.
inline Representation transform_rep(const Representation& T, const std::vector<Mat>& U) {
    validate_representation(T);
    if (static_cast<int>(U.size()) != T.quiver.size())
        throw Error(ErrorCode::IndexMismatch, "one transform per vertex required");
    Representation out = T;
    for (size_t a = 0; a < T.blocks.size(); ++a) {
        const Arrow& ar = T.quiver.arrows[a];
        out.blocks[a] = U[ar.head] * T.blocks[a] * U[ar.tail].adjoint();
    }
    return out;
}

namespace detail {

inline double max_block_norm(const Representation& T) {
    double m = 0;
    for (const Mat& b : T.blocks) m = std::max(m, b.norm());
    return m;
}

}  // namespace detail

inline Representation scale_blocks(const Representation& T, double factor) {
    Representation out = T;
    for (Mat& b : out.blocks) b *= factor;
    return out;
}

// ---------------------------------------------------------------------------
// JSON: complex entries as [re, im], matrices row-major. Shapes come from
// "dims", so empty matrices survive the round trip.
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const nlohmann::json& j, int rows, int cols) {
    Mat m = Mat::Zero(rows, cols);
    if (static_cast<int>(j.size()) != rows && !(j.empty() && rows == 0))
        throw Error(ErrorCode::ParseError, "matrix row count disagrees with dims");
    for (int r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        if (static_cast<int>(row.size()) != cols)
            throw Error(ErrorCode::ParseError, "matrix column count disagrees with dims");
        for (int c = 0; c < cols; ++c) {
            const auto& e = row.at(c);
            m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

inline nlohmann::json rep_to_json(const Representation& T,
                                  const std::optional<Character>& chi = std::nullopt) {
    validate_representation(T);
    const Quiver& q = T.quiver;
    nlohmann::json dims = nlohmann::json::object();
    for (int v = 0; v < q.size(); ++v) dims[q.vertex_ids[v]] = T.dims[v];
    nlohmann::json blocks = nlohmann::json::array();
    for (size_t a = 0; a < T.blocks.size(); ++a) {
        const Arrow& ar = q.arrows[a];
        blocks.push_back({{"tail", q.vertex_ids[ar.tail]},
                          {"head", q.vertex_ids[ar.head]},
                          {"matrix", matrix_to_json(T.blocks[a])}});
    }
    nlohmann::json j{{"graph", q.name}, {"dims", dims}, {"blocks", blocks}};
    if (chi) {
        nlohmann::json jc = nlohmann::json::object();
        for (int v = 0; v < q.size(); ++v) jc[q.vertex_ids[v]] = chi->values[v];
        j["character"] = jc;
    }
    return j;
}

inline std::pair<Representation, std::optional<Character>> rep_from_json(const nlohmann::json& j) {
    try {
        Quiver q = parse_graph_name(j.at("graph").get<std::string>());
        std::vector<int> dims(q.size(), 0);
        for (auto it = j.at("dims").begin(); it != j.at("dims").end(); ++it)
            dims[q.index_of(it.key())] = it.value().get<int>();
        Representation T = make_zero_rep(q, dims);
        for (const auto& jb : j.at("blocks")) {
            int tail = q.index_of(jb.at("tail").get<std::string>());
            int head = q.index_of(jb.at("head").get<std::string>());
            int arrow = -1;
            for (size_t a = 0; a < q.arrows.size(); ++a)
                if (q.arrows[a].tail == tail && q.arrows[a].head == head)
                    arrow = static_cast<int>(a);
            if (arrow < 0)
                throw Error(ErrorCode::ParseError, "block references a missing arrow");
            T.blocks[arrow] = matrix_from_json(jb.at("matrix"), dims[head], dims[tail]);
        }
        std::optional<Character> chi;
        if (j.contains("character")) {
            Character c(q.size(), 1.0);
            for (auto it = j.at("character").begin(); it != j.at("character").end(); ++it) {
                c.values[q.index_of(it.key())] = it.value().get<double>();
                c.determined[q.index_of(it.key())] = true;
            }
            chi = std::move(c);
        }
        return {std::move(T), std::move(chi)};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad representation JSON: ") + e.what());
    }
}

}  // namespace osrep
