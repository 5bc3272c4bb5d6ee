#pragma once
// Explicit one-parameter families of orthoscalar representations in dimension
// delta for the extended graphs. Each family is parametrized by moduli and
// angles; for the E graphs the central band (the "basis": all blocks adjacent
// to z, concatenated in catalog order) is built first and the outer arm blocks
// are completed from it uniquely.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <osrep/quiver.hpp>
#include <osrep/representation.hpp>

namespace osrep {

// ---------------------------------------------------------------------------
// Parameter points
// ---------------------------------------------------------------------------

// Named real parameters for one family member. Conventions:
//   A~(n):  m1 .. mn (positive moduli, one per cycle arrow), phase
//   D~(n):  x0 .. x{n-3}, y0 (positive), phi1, phi2, theta
//   E6~:    phi1..phi3, psi1..psi4, theta1..theta3, scale
//   E7~:    phi1..phi4, psi1..psi5, theta1, theta2, scale
//   E8~:    phi1..phi6, psi1..psi6, theta1, theta2, scale
struct ParameterPoint {
    std::string family;
    std::map<std::string, double> params;

    double at(const std::string& key) const {
        auto it = params.find(key);
        if (it == params.end())
            throw Error(ErrorCode::ParseError,
                        "missing parameter '" + key + "' for family " + family);
        return it->second;
    }

    double at_or(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

inline nlohmann::json parameter_point_to_json(const ParameterPoint& pt) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : pt.params) p[k] = v;
    return nlohmann::json{{"family", pt.family}, {"params", std::move(p)}};
}

// Accepts {"family", "params":{name: value}}; for the cycle family also the
// shorthand {"moduli":[...], "phase": ...} inside "params" or at top level.
inline ParameterPoint parameter_point_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "parameter point must be an object");
    ParameterPoint pt;
    pt.family = j.value("family", std::string{});
    const nlohmann::json& p = j.contains("params") ? j.at("params") : j;
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (it.key() == "family") continue;
        if (it.key() == "moduli") {
            if (!it.value().is_array())
                throw Error(ErrorCode::ParseError, "'moduli' must be an array");
            int k = 0;
            for (const auto& m : it.value())
                pt.params["m" + std::to_string(++k)] = m.get<double>();
            continue;
        }
        if (!it.value().is_number())
            throw Error(ErrorCode::ParseError, "parameter '" + it.key() + "' must be a number");
        pt.params[it.key()] = it.value().get<double>();
    }
    return pt;
}

// Degrees of freedom of the family on an extended graph: one modulus or angle
// per vertex plus one global phase/scale, i.e. |vertices| + 1.
inline int count_free_parameters(const std::string& family) {
    Quiver q = parse_graph_name(family);
    if (!q.has_delta())
        throw Error(ErrorCode::NoDelta, "no delta family on finite graph " + q.name);
    return q.size() + 1;
}

namespace detail {

inline double wrap_angle(double t) {
    double two_pi = 2.0 * M_PI;
    double w = std::fmod(t, two_pi);
    if (w < 0) w += two_pi;
    if (w >= two_pi) w -= two_pi;
    return w;
}

// Smallest residual |a e^{ix} + b e^{iy} + c| over all phases: the triangle
// defect of the moduli.
inline double triangle_defect(double a, double b, double c) {
    double m = std::max({a, b, c});
    return std::max(0.0, 2.0 * m - (a + b + c));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cycle family A~(n)
// ---------------------------------------------------------------------------

// One 1 x 1 block per cycle arrow: moduli m1 .. m_{n-1} on the first n-1
// arrows and modulus_n e^{i phase} on the closing arrow. Orthoscalarity is
// automatic; the character at each vertex is the sum of the two incident
// squared moduli. The phase survives every diagonal gauge, so it separates
// equivalence classes at fixed moduli.
inline Representation construct_A_family(const Quiver& q, const std::vector<double>& moduli,
                                         double modulus_n, double phase) {
    int n = static_cast<int>(q.arrows.size());
    if (q.size() != n || n < 4 || n % 2 != 0)
        throw Error(ErrorCode::InvalidSize, "cycle family needs the A~(n) graph, n even >= 4");
    if (static_cast<int>(moduli.size()) != n - 1)
        throw Error(ErrorCode::InvalidSize, "expected " + std::to_string(n - 1) +
                                                " moduli before the closing one, got " +
                                                std::to_string(moduli.size()));
    for (double m : moduli)
        if (!(m > 0)) throw Error(ErrorCode::NonPositiveModulus, "modulus must be positive");
    if (!(modulus_n > 0))
        throw Error(ErrorCode::NonPositiveModulus, "closing modulus must be positive");

    Representation T = make_zero_rep(q, std::vector<int>(n, 1));
    for (int a = 0; a < n - 1; ++a) T.blocks[a](0, 0) = moduli[a];
    T.blocks[n - 1](0, 0) = modulus_n * std::exp(cplx(0.0, phase));
    return T;
}

// ---------------------------------------------------------------------------
// Two-strand family D~(n)
// ---------------------------------------------------------------------------

struct DFamilyParams {
    std::vector<double> x;  // x0 .. x_{n-3}, one per chain segment plus the two fork blocks
    double y0 = 1.0;
    double phi1 = 0.0, phi2 = 0.0, theta = 0.0;
};

// The second strand is forced by scalarity along the chain:
//   y_{i+1}^2 = x_{i+1}^2 + (-1)^i (x0^2 - y0^2).
// Throws RecurrenceNegative naming the first index where y^2 drops below 0.
inline std::vector<double> d_family_second_strand(const DFamilyParams& p) {
    double gap = p.x[0] * p.x[0] - p.y0 * p.y0;
    std::vector<double> y{p.y0};
    for (size_t i = 0; i + 1 < p.x.size(); ++i) {
        double sq = p.x[i + 1] * p.x[i + 1] + (i % 2 == 0 ? gap : -gap);
        if (sq <= 0)
            throw Error(ErrorCode::RecurrenceNegative,
                        "strand recurrence fails at index " + std::to_string(i + 1) +
                            ": y^2 = " + std::to_string(sq));
        y.push_back(std::sqrt(sq));
    }
    return y;
}

inline bool d_family_is_degenerate(const DFamilyParams& p) {
    return !p.x.empty() && std::abs(p.x[0] - p.y0) < 1e-12;
}

// Fork blocks are the columns of
//   [ x0 cos(phi1)   x0 sin(phi1) | x_k cos(phi2)            x_k sin(phi2)           ]
//   [ y0 sin(phi1)  -y0 cos(phi1) | y_k sin(phi2) e^{i th}  -y_k cos(phi2) e^{i th}  ]
// (k = n-3) and the chain blocks are diag(x_i, y_i). The degenerate regime
// x0 = y0 collapses the recurrence to y_i = x_i and is routed around it.
inline Representation construct_D_family(const Quiver& q, const DFamilyParams& p) {
    int n = q.size() - 1;
    if (n < 4 || q.name.rfind("D~", 0) != 0)
        throw Error(ErrorCode::InvalidSize, "two-strand family needs a D~(n) graph");
    if (static_cast<int>(p.x.size()) != n - 2)
        throw Error(ErrorCode::InvalidSize, "expected " + std::to_string(n - 2) +
                                                " first-strand moduli, got " +
                                                std::to_string(p.x.size()));
    for (double v : p.x)
        if (!(v > 0)) throw Error(ErrorCode::NonPositiveModulus, "strand modulus must be positive");
    if (!(p.y0 > 0)) throw Error(ErrorCode::NonPositiveModulus, "y0 must be positive");

    std::vector<double> y;
    if (d_family_is_degenerate(p)) {
        y = p.x;  // the recurrence is the identity here; skip it
    } else {
        y = d_family_second_strand(p);
    }
    size_t last = p.x.size() - 1;

    std::vector<int> dims(q.size(), 0);
    for (int v = 0; v < q.size(); ++v) dims[v] = static_cast<int>(q.delta[v]);
    Representation T = make_zero_rep(q, dims);

    cplx ph = std::exp(cplx(0.0, p.theta));
    double c1 = std::cos(p.phi1), s1 = std::sin(p.phi1);
    double c2 = std::cos(p.phi2), s2 = std::sin(p.phi2);
    Mat fork_a(2, 2), fork_b(2, 2);
    fork_a << p.x[0] * c1, p.x[0] * s1, p.y0 * s1, -p.y0 * c1;
    fork_b << p.x[last] * c2, p.x[last] * s2, y[last] * s2 * ph, -y[last] * c2 * ph;

    auto put = [&](const std::string& u, const std::string& v, const Mat& m) {
        int a = q.arrow_between(q.index_of(u), q.index_of(v));
        const Arrow& ar = q.arrows[a];
        // Blocks are written head x tail; transpose the 2 x 1 columns when the
        // dim-2 vertex sits on the even side.
        if (T.dims[ar.head] == static_cast<int>(m.rows()))
            T.blocks[a] = m;
        else
            T.blocks[a] = m.adjoint();
    };

    std::string hub = n == 4 ? "z" : "c1";
    std::string tip = n == 4 ? "z" : "c" + std::to_string(n - 3);
    put("a1", hub, fork_a.col(0));
    put("a2", hub, fork_a.col(1));
    put("b1", tip, fork_b.col(0));
    put("b2", tip, fork_b.col(1));
    for (int i = 1; i + 2 <= n - 2; ++i) {
        Mat link = Mat::Zero(2, 2);
        link(0, 0) = p.x[i];
        link(1, 1) = y[i];
        put("c" + std::to_string(i), "c" + std::to_string(i + 1), link);
    }
    return T;
}

// ---------------------------------------------------------------------------
// Shared arm-closing step for the E completions
// ---------------------------------------------------------------------------

// Positive/negative root split of z^2 - s z - t with t >= 0: returns
// (p, m) with p - m = s, p m = t, p >= 0 >= -m.
inline std::pair<double, double> arm_quadratic_split(double s, double t) {
    if (t < 0)
        throw Error(ErrorCode::CompletionInfeasible,
                    "arm quadratic needs t >= 0, got t = " + std::to_string(t));
    double root = std::sqrt(s * s + 4.0 * t);
    double p = 0.5 * (s + root);
    return {p, p - s};
}

namespace detail {

// Closing 1 x 2 block (u, v) of a length-2 arm whose z-side block has columns
// col1 = (0, p, r)^T, col2 = (q, 0, w)^T: scalarity of the stacked column pair
// forces |u|^2 - |v|^2 = len^2(col2) - len^2(col1) and conj(u) v = -conj(r) w.
inline Mat close_arm(const Mat& zblock, const std::string& arm) {
    cplx mu = std::conj(zblock(2, 0)) * zblock(2, 1);
    double t = std::norm(mu);
    double s = zblock.col(1).squaredNorm() - zblock.col(0).squaredNorm();
    if (t <= 1e-14)
        throw Error(ErrorCode::CompletionInfeasible,
                    arm + " arm closing block is underdetermined: t <= 0");
    auto [p, m] = arm_quadratic_split(s, t);
    Mat out(1, 2);
    out(0, 0) = std::sqrt(p);
    out(0, 1) = -mu / out(0, 0);
    (void)m;  // |out(0,1)|^2 = t / p = m by construction
    return out;
}

// Factor F (budget x n) with F^* F = chi I - gram, chi = top eigenvalue of
// gram. Rows come out mutually orthogonal, ordered by decreasing weight, each
// with its leading entry made real nonnegative. Throws when chi I - gram has
// more than `budget` significant directions, i.e. the band cannot be closed
// by a block of the requested height.
inline std::pair<Mat, double> scalar_complement_factor(const Mat& gram, int budget,
                                                       const std::string& where) {
    int n = static_cast<int>(gram.rows());
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NumericalFailure, "eigensolver failed at " + where);
    double chi = es.eigenvalues()(n - 1);
    Mat deficit = chi * Mat::Identity(n, n) - gram;
    Eigen::SelfAdjointEigenSolver<Mat> ed(deficit);
    if (ed.info() != Eigen::Success)
        throw Error(ErrorCode::NumericalFailure, "eigensolver failed at " + where);
    double top = std::max(ed.eigenvalues()(n - 1), 0.0);
    double cut = std::max(1e-8 * top, 1e-13 * std::max(chi, 1.0));
    int significant = 0;
    for (int i = 0; i < n; ++i)
        if (ed.eigenvalues()(i) > cut) ++significant;
    if (significant > budget)
        throw Error(ErrorCode::CompletionInfeasible,
                    where + ": complement has " + std::to_string(significant) +
                        " directions but the closing block allows " + std::to_string(budget));
    Mat f = Mat::Zero(budget, n);
    for (int k = 0; k < std::min(budget, n); ++k) {
        int idx = n - 1 - k;  // descending eigenvalues
        double w = std::max(ed.eigenvalues()(idx), 0.0);
        if (w <= cut && k >= significant) break;
        Mat v = ed.eigenvectors().col(idx);
        for (int r = 0; r < n; ++r) {
            if (std::abs(v(r, 0)) > 1e-12) {
                v *= std::conj(v(r, 0)) / std::abs(v(r, 0));
                break;
            }
        }
        f.row(k) = std::sqrt(w) * v.adjoint();
    }
    return {f, chi};
}

inline void check_rows_orthonormal(const Mat& basis, double tol, const std::string& who) {
    Mat g = basis * basis.adjoint();
    double residual = hermitian_norm(g - Mat::Identity(g.rows(), g.cols()));
    if (residual > tol)
        throw Error(ErrorCode::ConstraintViolated,
                    who + " rows are not orthonormal: residual " + std::to_string(residual));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// E6~ family
// ---------------------------------------------------------------------------

struct E6Params {
    double phi1 = 0, phi2 = 0, phi3 = 0;
    double psi1 = 0, psi2 = 0, psi3 = 0, psi4 = 0;
    double theta1 = 0, theta2 = 0, theta3 = 0;
};

// Central band (3 x 6, columns [a2 | c2 | b2]) with unit character at z.
// Row orthonormality reduces to one closing relation between rows 2 and 3:
//   alpha e^{i theta2} + beta e^{i theta3} + gamma = 0,
//   alpha = cos(phi2)cos(psi2) cos(phi3)cos(psi4)sin(psi3),
//   beta  = sin(phi2)cos(psi2) sin(phi3)cos(psi4)sin(psi3),
//   gamma = sin(psi2) sin(psi4)sin(psi3).
// theta1 is a gauge angle: it never changes the equivalence class.
inline Mat construct_E6_basis(const E6Params& p, double tol = 1e-9) {
    for (double bad : {std::sin(p.psi1), std::sin(p.psi2), std::sin(p.psi3), std::sin(p.phi2)})
        if (std::abs(bad) < 1e-12)
            throw Error(ErrorCode::DegenerateParameters,
                        "psi1, psi2, psi3 and phi2 must stay away from 0: the band loses "
                        "support and the family degenerates");
    cplx e1 = std::exp(cplx(0, p.theta1)), e2 = std::exp(cplx(0, p.theta2)),
         e3 = std::exp(cplx(0, p.theta3));
    double c1 = std::cos(p.phi1), s1 = std::sin(p.phi1);
    double c2 = std::cos(p.phi2), s2 = std::sin(p.phi2);
    double c3 = std::cos(p.phi3), s3 = std::sin(p.phi3);
    double cq1 = std::cos(p.psi1), sq1 = std::sin(p.psi1);
    double cq2 = std::cos(p.psi2), sq2 = std::sin(p.psi2);
    double cq3 = std::cos(p.psi3), sq3 = std::sin(p.psi3);
    double cq4 = std::cos(p.psi4), sq4 = std::sin(p.psi4);

    Mat b = Mat::Zero(3, 6);
    // a2 columns
    b(0, 0) = sq1;
    b(1, 1) = c2 * cq2;
    b(2, 1) = c3 * cq4 * sq3 * e2;
    // c2 columns
    b(0, 3) = c1 * cq1;
    b(1, 2) = sq2;
    b(2, 2) = sq4 * sq3;
    b(2, 3) = s1 * cq3 * e1;
    // b2 columns
    b(0, 5) = s1 * cq1;
    b(1, 4) = s2 * cq2;
    b(2, 4) = s3 * cq4 * sq3 * e3;
    b(2, 5) = -c1 * cq3 * e1;
    detail::check_rows_orthonormal(b, tol, "central band");
    return b;
}

// Completes the outer arm blocks from the central band. The a-arm closes with
// (0, x0), x0^2 = |b(0,0)|^2 - |b(1,1)|^2 - |b(2,1)|^2; the b and c arms close
// through the quadratic split (the two real roots have opposite signs exactly
// when t > 0).
inline Representation complete_E6(const Quiver& q, const Mat& basis, double tol = 1e-9) {
    if (q.name != "E6~")
        throw Error(ErrorCode::InvalidSize, "completion scheme expects the E6~ graph");
    if (basis.rows() != 3 || basis.cols() != 6)
        throw Error(ErrorCode::InvalidSize, "central band must be 3 x 6");
    detail::check_rows_orthonormal(basis, std::max(tol, 1e-9), "central band");

    Mat a2 = basis.block(0, 0, 3, 2);
    Mat c2 = basis.block(0, 2, 3, 2);
    Mat b2 = basis.block(0, 4, 3, 2);

    double x0_sq = a2.col(0).squaredNorm() - a2.col(1).squaredNorm();
    if (x0_sq < -1e-12)
        throw Error(ErrorCode::CompletionInfeasible,
                    "negative x0^2 = " + std::to_string(x0_sq) + " on the a arm");
    Mat a1 = Mat::Zero(1, 2);
    a1(0, 1) = std::sqrt(std::max(x0_sq, 0.0));

    Mat c1 = detail::close_arm(c2, "c");
    Mat b1 = detail::close_arm(b2, "b");

    std::vector<int> dims;
    for (long long d : q.delta) dims.push_back(static_cast<int>(d));
    Representation T = make_zero_rep(q, dims);
    auto put = [&](const std::string& u, const std::string& v, const Mat& m) {
        T.blocks[q.arrow_between(q.index_of(u), q.index_of(v))] = m;
    };
    put("a1", "a2", a1);
    put("a2", "z", a2);
    put("z", "c2", c2);
    put("c2", "c1", c1);
    put("z", "b2", b2);
    put("b2", "b1", b1);

    double defect = orthoscalarity_report(T).defect;
    if (defect > std::max(tol, 1e-9))
        throw Error(ErrorCode::CompletionInfeasible,
                    "completed representation is not scalar: defect " + std::to_string(defect));
    return T;
}

// ---------------------------------------------------------------------------
// E7~ family
// ---------------------------------------------------------------------------

struct E7Params {
    double phi1 = 0, phi2 = 0, phi3 = 0, phi4 = 0;
    double psi1 = 0, psi2 = 0, psi3 = 0, psi4 = 0, psi5 = 0;
    double theta1 = 0, theta2 = 0;
};

// Central band (4 x 8, columns [a3 | b3 | c1]) with unit character at z.
// Beyond the closing relation between rows 3 and 4,
//   alpha + beta e^{i theta1} + gamma e^{i theta2} = 0,
//   alpha = cos(phi3)sin(phi4) cos(psi3)sin(psi4)sin(psi5),
//   beta  = sin(phi3)cos(phi4) cos(psi3)sin(psi4)sin(psi5),
//   gamma = sin(psi3)sin(psi4) cos(psi5),
// the two c1 columns must have equal length:
//   sin^2(phi1)cos^2(psi1) + cos^2(phi1)cos^2(psi2)
//     = sin^2(phi3)cos^2(psi3)sin^2(psi4) + cos^2(phi4)sin^2(psi5).
inline Mat construct_E7_basis(const E7Params& p, double tol = 1e-9) {
    cplx e1 = std::exp(cplx(0, p.theta1)), e2 = std::exp(cplx(0, p.theta2));
    double c1 = std::cos(p.phi1), s1 = std::sin(p.phi1);
    double c2 = std::cos(p.phi2), s2 = std::sin(p.phi2);
    double c3 = std::cos(p.phi3), s3 = std::sin(p.phi3);
    double c4 = std::cos(p.phi4), s4 = std::sin(p.phi4);
    double cq1 = std::cos(p.psi1), sq1 = std::sin(p.psi1);
    double cq2 = std::cos(p.psi2), sq2 = std::sin(p.psi2);
    double cq3 = std::cos(p.psi3), sq3 = std::sin(p.psi3);
    double cq4 = std::cos(p.psi4), sq4 = std::sin(p.psi4);
    double cq5 = std::cos(p.psi5), sq5 = std::sin(p.psi5);

    Mat b = Mat::Zero(4, 8);
    // a3 columns
    b(0, 0) = c1 * cq1;
    b(1, 0) = s1 * cq2;
    b(1, 1) = c2 * sq2;
    b(2, 1) = s2 * cq4;
    b(2, 2) = c3 * cq3 * sq4;
    b(3, 2) = s4 * sq5;
    // b3 columns
    b(0, 5) = sq1;
    b(1, 3) = s2 * sq2;
    b(2, 3) = -c2 * cq4;
    b(2, 4) = sq3 * sq4;
    b(3, 4) = cq5 * e2;
    // c1 columns
    b(0, 6) = s1 * cq1;
    b(1, 6) = -c1 * cq2;
    b(2, 7) = s3 * cq3 * sq4;
    b(3, 7) = c4 * sq5 * e1;

    double col_gap = b.col(6).squaredNorm() - b.col(7).squaredNorm();
    if (std::abs(col_gap) > tol)
        throw Error(ErrorCode::ConstraintViolated,
                    "c1 columns differ in length: residual " + std::to_string(std::abs(col_gap)));
    detail::check_rows_orthonormal(b, tol, "central band");
    return b;
}

// Completion along the printed entry scheme. The b3 band closes from the
// column Gram equations, the b2 band from the row pair (quadratic split), and
// the a arm from the column parametrization anchored at x = the largest
// singular value of the a3 block.
inline Representation complete_E7(const Quiver& q, const Mat& basis, double tol = 1e-9) {
    if (q.name != "E7~")
        throw Error(ErrorCode::InvalidSize, "completion scheme expects the E7~ graph");
    if (basis.rows() != 4 || basis.cols() != 8)
        throw Error(ErrorCode::InvalidSize, "central band must be 4 x 8");
    detail::check_rows_orthonormal(basis, std::max(tol, 1e-9), "central band");

    Mat a22 = basis.block(0, 0, 4, 3);
    Mat a24 = basis.block(0, 3, 4, 3);
    Mat a23 = basis.block(0, 6, 4, 2);

    // b3 band: columns of [a24; a34] all share the length of the pure column 3.
    double len = a24.col(2).squaredNorm();
    double w87_sq = len - a24.col(0).squaredNorm();
    if (w87_sq <= 1e-13)
        throw Error(ErrorCode::CompletionInfeasible, "b3 column 1 already exhausts the character");
    double w87 = std::sqrt(w87_sq);
    cplx cross = (a24.col(0).adjoint() * a24.col(1))(0, 0);
    cplx w88 = -cross / w87;
    double w78_sq = len - a24.col(1).squaredNorm() - std::norm(w88);
    if (w78_sq < -1e-12)
        throw Error(ErrorCode::CompletionInfeasible, "b3 column 2 overflows the character");
    double w78 = std::sqrt(std::max(w78_sq, 0.0));
    Mat a34 = Mat::Zero(2, 3);
    a34(0, 1) = w78;
    a34(1, 0) = w87;
    a34(1, 1) = w88;

    // b2 band: one more quadratic split against the b1 column.
    double s = a34.row(1).squaredNorm() - a34.row(0).squaredNorm();
    cplx rho = (a34.row(1) * a34.row(0).adjoint())(0, 0);  // row1 . conj(row0)
    auto [p_pos, p_neg] = arm_quadratic_split(s, std::norm(rho));
    Mat a35 = Mat::Zero(2, 1);
    a35(0, 0) = std::sqrt(p_pos);
    a35(1, 0) = p_pos > 1e-13 ? -rho / a35(0, 0) : cplx(std::sqrt(p_neg), 0.0);

    // a arm, anchored at the top singular value of the a3 block.
    Eigen::JacobiSVD<Mat> svd(a22);
    double x = svd.singularValues()(0);
    double x_sq = x * x;
    auto strut = [&](double used, const char* which) {
        double v = x_sq - used;
        if (v < -1e-12)
            throw Error(ErrorCode::CompletionInfeasible,
                        std::string("a3 column ") + which + " overflows the character");
        return std::sqrt(std::max(v, 0.0));
    };
    double xb1 = strut(a22.col(0).squaredNorm(), "1");
    double xb2 = strut(a22.col(1).squaredNorm(), "2");
    double xb3 = strut(a22.col(2).squaredNorm(), "3");
    (void)xb2;  // its length is consumed through the two cross products below
    if (xb1 <= 1e-13 || xb3 <= 1e-13)
        throw Error(ErrorCode::CompletionInfeasible, "a3 band leaves no room for the a2 block");
    cplx g12 = (a22.col(0).adjoint() * a22.col(1))(0, 0);
    cplx g23 = (a22.col(1).adjoint() * a22.col(2))(0, 0);
    Mat a12 = Mat::Zero(2, 3);
    a12(0, 1) = std::conj(g23) / xb3;
    a12(0, 2) = -xb3;
    a12(1, 0) = xb1;
    a12(1, 1) = -g12 / xb1;

    // a2 band closes like the b2 one.
    double sa = a12.row(1).squaredNorm() - a12.row(0).squaredNorm();
    cplx rho_a = (a12.row(1) * a12.row(0).adjoint())(0, 0);
    auto [qa_pos, qa_neg] = arm_quadratic_split(sa, std::norm(rho_a));
    Mat a11 = Mat::Zero(2, 1);
    a11(0, 0) = std::sqrt(qa_pos);
    a11(1, 0) = qa_pos > 1e-13 ? -rho_a / a11(0, 0) : cplx(std::sqrt(qa_neg), 0.0);

    std::vector<int> dims;
    for (long long d : q.delta) dims.push_back(static_cast<int>(d));
    Representation T = make_zero_rep(q, dims);
    auto put = [&](const std::string& u, const std::string& v, const Mat& m) {
        T.blocks[q.arrow_between(q.index_of(u), q.index_of(v))] = m;
    };
    put("a1", "a2", a11);
    put("a2", "a3", a12);
    put("a3", "z", a22);
    put("z", "b3", a24);
    put("b3", "b2", a34);
    put("b2", "b1", a35);
    put("z", "c1", a23);

    double defect = orthoscalarity_report(T).defect;
    if (defect > std::max(tol, 1e-9))
        throw Error(ErrorCode::CompletionInfeasible,
                    "completed representation is not scalar: defect " + std::to_string(defect));
    return T;
}

// ---------------------------------------------------------------------------
// E8~ family
// ---------------------------------------------------------------------------

struct E8Params {
    double phi1 = 0, phi2 = 0, phi3 = 0, phi4 = 0, phi5 = 0, phi6 = 0;
    double psi1 = 0, psi2 = 0, psi3 = 0, psi4 = 0, psi5 = 0, psi6 = 0;
    double theta1 = 0, theta2 = 0;
};

// Central band (6 x 12, columns [a5 | b2 | c1]) with unit character at z.
// Validity needs the closing relation between rows 5 and 6,
//   alpha + beta e^{i theta1} - gamma e^{i theta2} = 0,
//   alpha = cos(phi5)cos(phi6) sin(psi5)cos(psi6),
//   beta  = sin(phi5)sin(phi6) sin(psi5)cos(psi6),
//   gamma = sin(psi4)cos(psi5) sin(psi6),
// and equal lengths of all three c1 columns. Closing the band at b1 needs
// more: the two 2 x 2 diagonal blocks of the b2 column Gram must share their
// spectrum. That is checked by complete_E8, not here, so that a band valid as
// a matrix is still constructible for inspection.
inline Mat construct_E8_basis(const E8Params& p, double tol = 1e-9) {
    cplx e1 = std::exp(cplx(0, p.theta1)), e2 = std::exp(cplx(0, p.theta2));
    double c1 = std::cos(p.phi1), s1 = std::sin(p.phi1);
    double c2 = std::cos(p.phi2), s2 = std::sin(p.phi2);
    double c3 = std::cos(p.phi3), s3 = std::sin(p.phi3);
    double c4 = std::cos(p.phi4), s4 = std::sin(p.phi4);
    double c5 = std::cos(p.phi5), s5 = std::sin(p.phi5);
    double c6 = std::cos(p.phi6), s6 = std::sin(p.phi6);
    double cq1 = std::cos(p.psi1), sq1 = std::sin(p.psi1);
    double cq2 = std::cos(p.psi2), sq2 = std::sin(p.psi2);
    double cq3 = std::cos(p.psi3), sq3 = std::sin(p.psi3);
    double cq4 = std::cos(p.psi4), sq4 = std::sin(p.psi4);
    double cq5 = std::cos(p.psi5), sq5 = std::sin(p.psi5);
    double cq6 = std::cos(p.psi6), sq6 = std::sin(p.psi6);

    Mat b = Mat::Zero(6, 12);
    // a5 columns
    b(0, 0) = sq1;
    b(1, 1) = s2 * sq2;
    b(2, 1) = c2 * sq3;
    b(2, 2) = s3 * cq3;
    b(3, 2) = c3 * sq4;
    b(3, 3) = s4 * cq4;
    b(4, 3) = c4 * cq4 * cq5;
    b(4, 4) = c5 * sq5;
    b(5, 4) = c6 * cq6;
    // b2 columns
    b(0, 5) = s1 * cq1;
    b(1, 5) = -c1 * cq2;
    b(1, 6) = c2 * sq2;
    b(2, 6) = -s2 * sq3;
    b(3, 7) = -c4 * cq4;
    b(4, 7) = s4 * cq4 * cq5;
    b(4, 8) = sq4 * cq5;
    b(5, 8) = -sq6 * e2;
    // c1 columns
    b(0, 9) = c1 * cq1;
    b(1, 9) = s1 * cq2;
    b(2, 10) = c3 * cq3;
    b(3, 10) = -s3 * sq4;
    b(4, 11) = s5 * sq5;
    b(5, 11) = s6 * cq6 * e1;

    double len1 = b.col(9).squaredNorm();
    for (int c : {10, 11}) {
        double gap = std::abs(b.col(c).squaredNorm() - len1);
        if (gap > tol)
            throw Error(ErrorCode::ConstraintViolated,
                        "c1 column " + std::to_string(c - 8) +
                            " differs in length: residual " + std::to_string(gap));
    }
    detail::check_rows_orthonormal(b, tol, "central band");
    return b;
}

// Completion by scalar-complement factoring along both arms; each step
// subtracts the accumulated column (or row) Gram from the top eigenvalue
// times the identity and factors the deficit into the next block.
inline Representation complete_E8(const Quiver& q, const Mat& basis, double tol = 1e-9) {
    if (q.name != "E8~")
        throw Error(ErrorCode::InvalidSize, "completion scheme expects the E8~ graph");
    if (basis.rows() != 6 || basis.cols() != 12)
        throw Error(ErrorCode::InvalidSize, "central band must be 6 x 12");
    detail::check_rows_orthonormal(basis, std::max(tol, 1e-9), "central band");

    Mat a33 = basis.block(0, 0, 6, 5);
    Mat a35 = basis.block(0, 5, 6, 4);
    Mat a34 = basis.block(0, 9, 6, 3);

    auto [a23, chi_a5] = detail::scalar_complement_factor(a33.adjoint() * a33, 4, "a5 band");
    auto [a22adj, chi_a4] = detail::scalar_complement_factor(a23 * a23.adjoint(), 3, "a4 band");
    Mat a22 = a22adj.adjoint();
    auto [a12, chi_a3] = detail::scalar_complement_factor(a22.adjoint() * a22, 2, "a3 band");
    auto [a11adj, chi_a2] = detail::scalar_complement_factor(a12 * a12.adjoint(), 1, "a2 band");
    Mat a11 = a11adj.adjoint();
    auto [a45, chi_b2] = detail::scalar_complement_factor(a35.adjoint() * a35, 2, "b2 band");

    std::vector<int> dims;
    for (long long d : q.delta) dims.push_back(static_cast<int>(d));
    Representation T = make_zero_rep(q, dims);
    auto put = [&](const std::string& u, const std::string& v, const Mat& m) {
        T.blocks[q.arrow_between(q.index_of(u), q.index_of(v))] = m;
    };
    put("a1", "a2", a11);
    put("a2", "a3", a12);
    put("a3", "a4", a22);
    put("a4", "a5", a23);
    put("a5", "z", a33);
    put("z", "b2", a35);
    put("b2", "b1", a45);
    put("z", "c1", a34);

    OrthoReport rep = orthoscalarity_report(T);
    if (rep.defect > std::max(tol, 1e-9))
        throw Error(ErrorCode::CompletionInfeasible,
                    "completed band is not scalar: defect " + std::to_string(rep.defect));
    return T;
}

// ---------------------------------------------------------------------------
// Constraint residuals, solving, sampling, dispatch
// ---------------------------------------------------------------------------

namespace detail {

struct E6Coeffs {
    double alpha, beta, gamma;
};
inline E6Coeffs e6_coeffs(const ParameterPoint& pt) {
    double cq2 = std::cos(pt.at("psi2")), sq2 = std::sin(pt.at("psi2"));
    double cq4 = std::cos(pt.at("psi4")), sq4 = std::sin(pt.at("psi4"));
    double sq3 = std::sin(pt.at("psi3"));
    return {std::cos(pt.at("phi2")) * cq2 * std::cos(pt.at("phi3")) * cq4 * sq3,
            std::sin(pt.at("phi2")) * cq2 * std::sin(pt.at("phi3")) * cq4 * sq3,
            sq2 * sq4 * sq3};
}

struct E7Coeffs {
    double alpha, beta, gamma, c1_left, c1_right;
};
inline E7Coeffs e7_coeffs(const ParameterPoint& pt) {
    double c1 = std::cos(pt.at("phi1")), s1 = std::sin(pt.at("phi1"));
    double c3 = std::cos(pt.at("phi3")), s3 = std::sin(pt.at("phi3"));
    double c4 = std::cos(pt.at("phi4")), s4 = std::sin(pt.at("phi4"));
    double cq1 = std::cos(pt.at("psi1")), cq2 = std::cos(pt.at("psi2"));
    double cq3 = std::cos(pt.at("psi3")), sq3 = std::sin(pt.at("psi3"));
    double sq4 = std::sin(pt.at("psi4"));
    double cq5 = std::cos(pt.at("psi5")), sq5 = std::sin(pt.at("psi5"));
    return {c3 * s4 * cq3 * sq4 * sq5, s3 * c4 * cq3 * sq4 * sq5, sq3 * sq4 * cq5,
            s1 * s1 * cq1 * cq1 + c1 * c1 * cq2 * cq2,
            s3 * s3 * cq3 * cq3 * sq4 * sq4 + c4 * c4 * sq5 * sq5};
}

struct E8Coeffs {
    double alpha, beta, gamma;  // rows 5x6 closing relation
    double len1, len2, len3;    // c1 column lengths
    double s1, s2, m1;          // b2 Gram, first 2 x 2 block
    double t1, t2, m2;          // b2 Gram, second 2 x 2 block
};
inline E8Coeffs e8_coeffs(const ParameterPoint& pt) {
    double c1 = std::cos(pt.at("phi1")), s1 = std::sin(pt.at("phi1"));
    double c2 = std::cos(pt.at("phi2")), s2 = std::sin(pt.at("phi2"));
    double c3 = std::cos(pt.at("phi3")), s3 = std::sin(pt.at("phi3"));
    double c4 = std::cos(pt.at("phi4")), s4 = std::sin(pt.at("phi4"));
    double c5 = std::cos(pt.at("phi5")), s5 = std::sin(pt.at("phi5"));
    double c6 = std::cos(pt.at("phi6")), s6 = std::sin(pt.at("phi6"));
    double cq1 = std::cos(pt.at("psi1"));
    double cq2 = std::cos(pt.at("psi2")), sq2 = std::sin(pt.at("psi2"));
    double cq3 = std::cos(pt.at("psi3")), sq3 = std::sin(pt.at("psi3"));
    double cq4 = std::cos(pt.at("psi4")), sq4 = std::sin(pt.at("psi4"));
    double cq5 = std::cos(pt.at("psi5")), sq5 = std::sin(pt.at("psi5"));
    double cq6 = std::cos(pt.at("psi6")), sq6 = std::sin(pt.at("psi6"));
    E8Coeffs e;
    e.alpha = c5 * c6 * sq5 * cq6;
    e.beta = s5 * s6 * sq5 * cq6;
    e.gamma = sq4 * cq5 * sq6;
    e.len1 = c1 * c1 * cq1 * cq1 + s1 * s1 * cq2 * cq2;
    e.len2 = c3 * c3 * cq3 * cq3 + s3 * s3 * sq4 * sq4;
    e.len3 = s5 * s5 * sq5 * sq5 + s6 * s6 * cq6 * cq6;
    e.s1 = s1 * s1 * cq1 * cq1 + c1 * c1 * cq2 * cq2;
    e.s2 = c2 * c2 * sq2 * sq2 + s2 * s2 * sq3 * sq3;
    e.m1 = -c1 * cq2 * c2 * sq2;
    e.t1 = c4 * c4 * cq4 * cq4 + s4 * s4 * cq4 * cq4 * cq5 * cq5;
    e.t2 = sq4 * sq4 * cq5 * cq5 + sq6 * sq6;
    e.m2 = s4 * sq4 * cq4 * cq5 * cq5;
    return e;
}

inline double closing_residual(double a, double b, double c, double t1, double t2) {
    return std::abs(a + b * std::exp(cplx(0, t1)) + c * std::exp(cplx(0, t2)));
}

}  // namespace detail

// Largest violation among the family's defining relations at a full parameter
// point; zero for the two constraint-free families.
inline double family_constraint_residual(const ParameterPoint& pt) {
    Quiver q = parse_graph_name(pt.family);
    if (q.name.rfind("A~", 0) == 0 || q.name.rfind("D~", 0) == 0) return 0.0;
    if (q.name == "E6~") {
        auto c = detail::e6_coeffs(pt);
        return detail::closing_residual(c.gamma, c.alpha, c.beta, pt.at("theta2"),
                                        pt.at("theta3"));
    }
    if (q.name == "E7~") {
        auto c = detail::e7_coeffs(pt);
        double closing = detail::closing_residual(c.alpha, c.beta, c.gamma, pt.at("theta1"),
                                                  pt.at("theta2"));
        return std::max(closing, std::abs(c.c1_left - c.c1_right));
    }
    if (q.name == "E8~") {
        auto c = detail::e8_coeffs(pt);
        double closing = detail::closing_residual(c.alpha, c.beta, -c.gamma, pt.at("theta1"),
                                                  pt.at("theta2"));
        double r = std::max({closing, std::abs(c.len2 - c.len1), std::abs(c.len3 - c.len1)});
        r = std::max(r, std::abs(c.s1 + c.s2 - c.t1 - c.t2));
        r = std::max(r, std::abs(c.s1 * c.s2 - c.m1 * c.m1 - c.t1 * c.t2 + c.m2 * c.m2));
        return r;
    }
    throw Error(ErrorCode::NoDelta, "no delta family on graph " + q.name);
}

namespace detail {

// Solves a e^{ix} = -(b + c e^{iy}) style closings: returns (x, y) with x the
// smallest nonnegative branch of the cosine and y the principal argument.
inline std::pair<double, double> solve_phase_pair(double a, double b, double c,
                                                  double sign_c) {
    // relation: a + b e^{i x} + sign_c * c e^{i y} = 0 with a, b, c >= 0 moduli
    if (b < 1e-13 || c < 1e-13 || a < 1e-13)
        throw Error(ErrorCode::NoSolution,
                    "phase closing degenerates: a modulus vanished (a = " + std::to_string(a) +
                        ", b = " + std::to_string(b) + ", c = " + std::to_string(c) + ")");
    double cosx = (c * c - a * a - b * b) / (2.0 * a * b);
    if (std::abs(cosx) > 1.0 + 1e-9)
        throw Error(ErrorCode::NoSolution,
                    "phase closing infeasible; best residual " +
                        std::to_string(triangle_defect(a, b, c)));
    double x = std::acos(std::clamp(cosx, -1.0, 1.0));
    cplx rest = -(a + b * std::exp(cplx(0, x))) / (sign_c * c);
    double y = wrap_angle(std::arg(rest));
    return {x, y};
}

}  // namespace detail

// Fills in the dependent parameters from the free ones. Free sets:
//   A~(n): m1..mn, phase              (nothing to solve)
//   D~(n): x0.., y0, phi1, phi2, theta (recurrence feasibility is checked)
//   E6~:   phi1..phi3, psi1..psi4     -> theta2, theta3 (theta1 is gauge, kept or 0)
//   E7~:   phi1..phi3, psi1..psi5     -> phi4, theta1, theta2
//   E8~:   phi1, phi4, phi5, psi1, psi2, psi4, psi5, psi6 -> phi2, psi3 (b2
//          Gram spectrum match), phi3, phi6 (c1 length match), theta1, theta2
// plus an optional positive "scale" for the E families. Throws NoSolution when
// the closing relations cannot be met, reporting the best achievable residual.
inline ParameterPoint solve_family_constraint(const std::string& family,
                                              const std::map<std::string, double>& free_params,
                                              double tol = 1e-12) {
    Quiver q = parse_graph_name(family);
    ParameterPoint pt{q.name, free_params};
    auto need_positive = [&](const std::string& k) {
        if (!(pt.at(k) > 0))
            throw Error(ErrorCode::NonPositiveModulus, "'" + k + "' must be positive");
    };

    if (q.name.rfind("A~", 0) == 0) {
        int n = q.size();
        for (int k = 1; k <= n; ++k) need_positive("m" + std::to_string(k));
        pt.params["phase"] = detail::wrap_angle(pt.at("phase"));
        return pt;
    }
    if (q.name.rfind("D~", 0) == 0) {
        int n = q.size() - 1;
        DFamilyParams dp;
        for (int k = 0; k <= n - 3; ++k) {
            need_positive("x" + std::to_string(k));
            dp.x.push_back(pt.at("x" + std::to_string(k)));
        }
        need_positive("y0");
        dp.y0 = pt.at("y0");
        pt.at("phi1");
        pt.at("phi2");
        if (!d_family_is_degenerate(dp)) d_family_second_strand(dp);  // feasibility
        pt.params["theta"] = detail::wrap_angle(pt.at("theta"));
        return pt;
    }

    double scale = pt.at_or("scale", 1.0);
    if (!(scale > 0)) throw Error(ErrorCode::NotPositive, "'scale' must be positive");
    pt.params["scale"] = scale;

    if (q.name == "E6~") {
        pt.params["theta1"] = pt.at_or("theta1", 0.0);
        auto c = detail::e6_coeffs(pt);
        // gamma + alpha e^{i theta2} + beta e^{i theta3} = 0
        auto [t2, t3] = detail::solve_phase_pair(c.gamma, c.alpha, c.beta, 1.0);
        pt.params["theta2"] = t2;
        pt.params["theta3"] = t3;
    } else if (q.name == "E7~") {
        double s1 = std::sin(pt.at("phi1")), cg1 = std::cos(pt.at("phi1"));
        double left = s1 * s1 * std::pow(std::cos(pt.at("psi1")), 2) +
                      cg1 * cg1 * std::pow(std::cos(pt.at("psi2")), 2);
        double s3 = std::sin(pt.at("phi3")), cq3 = std::cos(pt.at("psi3"));
        double sq4 = std::sin(pt.at("psi4")), sq5 = std::sin(pt.at("psi5"));
        double rest = left - s3 * s3 * cq3 * cq3 * sq4 * sq4;
        if (sq5 * sq5 < 1e-13)
            throw Error(ErrorCode::NoSolution, "psi5 too small to balance the c1 columns");
        double cos4_sq = rest / (sq5 * sq5);
        if (cos4_sq < -1e-10 || cos4_sq > 1.0 + 1e-10)
            throw Error(ErrorCode::NoSolution,
                        "c1 length balance needs cos^2(phi4) = " + std::to_string(cos4_sq));
        pt.params["phi4"] = std::acos(std::sqrt(std::clamp(cos4_sq, 0.0, 1.0)));
        auto c = detail::e7_coeffs(pt);
        auto [t1, t2] = detail::solve_phase_pair(c.alpha, c.beta, c.gamma, 1.0);
        pt.params["theta1"] = t1;
        pt.params["theta2"] = t2;
    } else if (q.name == "E8~") {
        // Both 2 x 2 blocks of the b2 column Gram must share their spectrum
        // for the band to close at b1, so phi2 and psi3 are solved from the
        // trace and determinant matches; phi3 and phi6 then balance the c1
        // column lengths, and the phases close rows 5 and 6.
        auto range_check = [](double v, const char* what) {
            if (v < -1e-10 || v > 1.0 + 1e-10)
                throw Error(ErrorCode::NoSolution,
                            std::string("spectrum/length balance needs ") + what + " = " +
                                std::to_string(v));
            return std::clamp(v, 0.0, 1.0);
        };
        double c1a = std::cos(pt.at("phi1")), s1a = std::sin(pt.at("phi1"));
        double c4 = std::cos(pt.at("phi4")), s4 = std::sin(pt.at("phi4"));
        double s5 = std::sin(pt.at("phi5"));
        double cq1 = std::cos(pt.at("psi1")), cq2 = std::cos(pt.at("psi2"));
        double sq2 = std::sin(pt.at("psi2"));
        double cq4 = std::cos(pt.at("psi4")), sq4 = std::sin(pt.at("psi4"));
        double cq5 = std::cos(pt.at("psi5")), sq5 = std::sin(pt.at("psi5"));
        double cq6 = std::cos(pt.at("psi6")), sq6 = std::sin(pt.at("psi6"));

        double s1v = s1a * s1a * cq1 * cq1 + c1a * c1a * cq2 * cq2;
        double len1 = c1a * c1a * cq1 * cq1 + s1a * s1a * cq2 * cq2;
        double t1 = c4 * c4 * cq4 * cq4 + s4 * s4 * cq4 * cq4 * cq5 * cq5;
        double t2 = sq4 * sq4 * cq5 * cq5 + sq6 * sq6;
        double m2 = s4 * sq4 * cq4 * cq5 * cq5;

        double big_s = t1 + t2 - s1v;  // target for the second diagonal entry
        if (big_s <= 1e-13)
            throw Error(ErrorCode::NoSolution, "b2 Gram trace balance needs " +
                                                   std::to_string(big_s) + " > 0");
        double m1_sq = s1v * big_s - (t1 * t2 - m2 * m2);
        if (m1_sq < -1e-10)
            throw Error(ErrorCode::NoSolution, "b2 Gram determinant balance needs m1^2 = " +
                                                   std::to_string(m1_sq));
        m1_sq = std::max(m1_sq, 0.0);
        double denom12 = c1a * c1a * cq2 * cq2;
        if (denom12 < 1e-13 || sq2 * sq2 < 1e-13)
            throw Error(ErrorCode::NoSolution, "phi1/psi2 degenerate for the b2 Gram balance");
        double mixed = m1_sq / denom12;  // = cos^2(phi2) sin^2(psi2)
        double cos2_sq = range_check(mixed / (sq2 * sq2), "cos^2(phi2)");
        pt.params["phi2"] = std::acos(std::sqrt(cos2_sq));
        double sin2_sq = 1.0 - cos2_sq;
        if (sin2_sq < 1e-13)
            throw Error(ErrorCode::NoSolution, "phi2 lands on 0: psi3 undetermined");
        double sin3_sq = range_check((big_s - mixed) / sin2_sq, "sin^2(psi3)");
        pt.params["psi3"] = std::asin(std::sqrt(sin3_sq));

        double cq3sq = 1.0 - sin3_sq;
        double denom = cq3sq - sq4 * sq4;
        if (std::abs(denom) < 1e-12)
            throw Error(ErrorCode::NoSolution, "psi3 and psi4 collide: c1 balance degenerates");
        double cos3_sq = range_check((len1 - sq4 * sq4) / denom, "cos^2(phi3)");
        pt.params["phi3"] = std::acos(std::sqrt(cos3_sq));

        if (cq6 * cq6 < 1e-13)
            throw Error(ErrorCode::NoSolution, "psi6 too close to pi/2: c1 balance degenerates");
        double sin6_sq = range_check((len1 - s5 * s5 * sq5 * sq5) / (cq6 * cq6), "sin^2(phi6)");
        pt.params["phi6"] = std::asin(std::sqrt(sin6_sq));

        auto c = detail::e8_coeffs(pt);
        auto [t1p, t2p] = detail::solve_phase_pair(c.alpha, c.beta, c.gamma, -1.0);
        pt.params["theta1"] = t1p;
        pt.params["theta2"] = t2p;
    } else {
        throw Error(ErrorCode::NoDelta, "no delta family on graph " + q.name);
    }

    double residual = family_constraint_residual(pt);
    if (residual > tol)
        throw Error(ErrorCode::NoSolution,
                    "constraints remain violated after solving: residual " +
                        std::to_string(residual));
    return pt;
}

// Builds the family member at a full parameter point (dependents included).
inline Representation construct_delta_family(const ParameterPoint& pt, double tol = 1e-9) {
    Quiver q = parse_graph_name(pt.family);
    if (q.name.rfind("A~", 0) == 0) {
        int n = q.size();
        std::vector<double> moduli;
        for (int k = 1; k < n; ++k) moduli.push_back(pt.at("m" + std::to_string(k)));
        return construct_A_family(q, moduli, pt.at("m" + std::to_string(n)), pt.at("phase"));
    }
    if (q.name.rfind("D~", 0) == 0) {
        int n = q.size() - 1;
        DFamilyParams dp;
        for (int k = 0; k <= n - 3; ++k) dp.x.push_back(pt.at("x" + std::to_string(k)));
        dp.y0 = pt.at("y0");
        dp.phi1 = pt.at("phi1");
        dp.phi2 = pt.at("phi2");
        dp.theta = pt.at("theta");
        return construct_D_family(q, dp);
    }

    double scale = pt.at_or("scale", 1.0);
    if (!(scale > 0)) throw Error(ErrorCode::NotPositive, "'scale' must be positive");
    Representation T;
    if (q.name == "E6~") {
        E6Params p;
        p.phi1 = pt.at("phi1");
        p.phi2 = pt.at("phi2");
        p.phi3 = pt.at("phi3");
        p.psi1 = pt.at("psi1");
        p.psi2 = pt.at("psi2");
        p.psi3 = pt.at("psi3");
        p.psi4 = pt.at("psi4");
        p.theta1 = pt.at_or("theta1", 0.0);
        p.theta2 = pt.at("theta2");
        p.theta3 = pt.at("theta3");
        T = complete_E6(q, construct_E6_basis(p, tol), tol);
    } else if (q.name == "E7~") {
        E7Params p;
        p.phi1 = pt.at("phi1");
        p.phi2 = pt.at("phi2");
        p.phi3 = pt.at("phi3");
        p.phi4 = pt.at("phi4");
        p.psi1 = pt.at("psi1");
        p.psi2 = pt.at("psi2");
        p.psi3 = pt.at("psi3");
        p.psi4 = pt.at("psi4");
        p.psi5 = pt.at("psi5");
        p.theta1 = pt.at("theta1");
        p.theta2 = pt.at("theta2");
        T = complete_E7(q, construct_E7_basis(p, tol), tol);
    } else if (q.name == "E8~") {
        E8Params p;
        p.phi1 = pt.at("phi1");
        p.phi2 = pt.at("phi2");
        p.phi3 = pt.at("phi3");
        p.phi4 = pt.at("phi4");
        p.phi5 = pt.at("phi5");
        p.phi6 = pt.at("phi6");
        p.psi1 = pt.at("psi1");
        p.psi2 = pt.at("psi2");
        p.psi3 = pt.at("psi3");
        p.psi4 = pt.at("psi4");
        p.psi5 = pt.at("psi5");
        p.psi6 = pt.at("psi6");
        p.theta1 = pt.at("theta1");
        p.theta2 = pt.at("theta2");
        T = complete_E8(q, construct_E8_basis(p, tol), tol);
    } else {
        throw Error(ErrorCode::NoDelta, "no delta family on graph " + q.name);
    }
    return scale == 1.0 ? T : scale_blocks(T, scale);
}

// Draws free parameters from open boxes that keep every modulus and coupling
// away from the degenerate walls, then solves for the dependents.
inline ParameterPoint sample_family_params(const std::string& family, Rng& rng) {
    Quiver q = parse_graph_name(family);
    std::map<std::string, double> f;
    auto angle = [&] { return rng.uniform(0.3, 1.25); };
    if (q.name.rfind("A~", 0) == 0) {
        for (int k = 1; k <= q.size(); ++k)
            f["m" + std::to_string(k)] = rng.uniform(0.5, 2.0);
        f["phase"] = rng.uniform(0.3, 5.9);
    } else if (q.name.rfind("D~", 0) == 0) {
        int n = q.size() - 1;
        for (int k = 0; k <= n - 3; ++k) f["x" + std::to_string(k)] = rng.uniform(0.9, 1.4);
        double y0 = rng.uniform(0.9, 1.4);
        while (std::abs(y0 - f["x0"]) < 0.04) y0 = rng.uniform(0.9, 1.4);
        f["y0"] = y0;
        f["phi1"] = angle();
        f["phi2"] = angle();
        f["theta"] = rng.uniform(0.3, 5.9);
    } else if (q.name == "E6~") {
        for (const char* k : {"phi1", "phi2", "phi3", "psi1", "psi2", "psi3", "psi4"})
            f[k] = angle();
        f["theta1"] = 0.0;
        f["scale"] = rng.uniform(0.8, 1.6);
    } else if (q.name == "E7~") {
        // The band only closes when the pure b3 column dominates its band, so
        // psi1 is kept high and psi2 low; the rest stays generic.
        for (const char* k : {"phi1", "phi2", "phi3", "psi3", "psi4"}) f[k] = angle();
        f["psi1"] = rng.uniform(0.8, 1.45);
        f["psi2"] = rng.uniform(0.15, 0.8);
        f["psi5"] = rng.uniform(0.6, 1.4);
        f["scale"] = rng.uniform(0.8, 1.6);
    } else if (q.name == "E8~") {
        for (const char* k : {"phi1", "phi4", "phi5", "psi1", "psi2", "psi4", "psi5", "psi6"})
            f[k] = angle();
        f["scale"] = rng.uniform(0.8, 1.6);
    } else {
        throw Error(ErrorCode::NoDelta, "no delta family on graph " + q.name);
    }
    return solve_family_constraint(q.name, f);
}

struct FamilySample {
    ParameterPoint point;
    Representation rep;
};

// Seeded generic member: resamples deterministically until the constraints
// solve and the completion goes through. The E8 band closes for roughly one
// draw in sixteen, so the attempt budget is generous; failed draws cost only
// trigonometry.
inline FamilySample construct_family_seeded(const std::string& family, std::uint64_t seed,
                                            int attempts = 400) {
    Rng rng(seed ^ 0xfa317ULL);
    std::string last;
    for (int k = 0; k < attempts; ++k) {
        try {
            ParameterPoint pt = sample_family_params(family, rng);
            return {pt, construct_delta_family(pt)};
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::NoSolution:
                case ErrorCode::RecurrenceNegative:
                case ErrorCode::CompletionInfeasible:
                case ErrorCode::DegenerateParameters:
                    last = e.what();
                    continue;
                default:
                    throw;
            }
        }
    }
    throw Error(ErrorCode::NumericalFailure,
                "no valid family member after " + std::to_string(attempts) +
                    " attempts; last failure: " + last);
}

// Central band of an assembled representation: the blocks at the arrows
// touching z, concatenated in arrow order (the E completions accept this).
inline Mat z_band(const Representation& T) {
    int z = T.quiver.index_of("z");
    int rows = T.dims[z];
    int cols = 0;
    for (size_t a = 0; a < T.quiver.arrows.size(); ++a) {
        const Arrow& ar = T.quiver.arrows[a];
        if (ar.head == z) cols += T.dims[ar.tail];
    }
    Mat band(rows, cols);
    int at = 0;
    for (size_t a = 0; a < T.quiver.arrows.size(); ++a) {
        const Arrow& ar = T.quiver.arrows[a];
        if (ar.head != z) continue;
        band.block(0, at, rows, T.dims[ar.tail]) = T.blocks[a];
        at += T.dims[ar.tail];
    }
    return band;
}

}  // namespace osrep
