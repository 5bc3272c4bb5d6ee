#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <osrep/quiver.hpp>

namespace osrep {

// Integer vector indexed by the quiver's vertices in display order.
using GVec = std::vector<long long>;

inline void check_indexing(const Quiver& q, const GVec& x) {
    if (static_cast<int>(x.size()) != q.size())
        throw Error(ErrorCode::IndexMismatch,
                    "vector has " + std::to_string(x.size()) + " entries, quiver " + q.name +
                        " has " + std::to_string(q.size()) + " vertices");
}

inline bool vec_is_nonneg(const GVec& x) {
    return std::all_of(x.begin(), x.end(), [](long long v) { return v >= 0; });
}

inline bool vec_is_positive(const GVec& x) {
    return vec_is_nonneg(x) && std::any_of(x.begin(), x.end(), [](long long v) { return v > 0; });
}

// Index of the single nonzero coordinate when x = e_g, else -1.
inline int simple_root_vertex(const GVec& x) {
    int g = -1;
    for (size_t v = 0; v < x.size(); ++v) {
        if (x[v] == 0) continue;
        if (x[v] != 1 || g >= 0) return -1;
        g = static_cast<int>(v);
    }
    return g;
}

inline GVec unit_vector(const Quiver& q, int g) {
    GVec x(q.size(), 0);
    x.at(g) = 1;
    return x;
}

// q(x) = sum of squares minus the edge products; exact.
inline long long tits_form(const Quiver& q, const GVec& x) {
    check_indexing(q, x);
    long long val = 0;
    for (long long v : x) val += v * v;
    for (const Arrow& a : q.arrows) val -= x[a.tail] * x[a.head];
    return val;
}

inline GVec simple_reflection(const Quiver& q, int k, const GVec& x) {
    check_indexing(q, x);
    if (k < 0 || k >= q.size()) throw Error(ErrorCode::IndexMismatch, "vertex out of range");
    GVec out = x;
    long long s = 0;
    for (int w : q.neighbors(k)) s += x[w];
    out[k] = -x[k] + s;
    return out;
}

// All simple reflections of one parity class; they commute because same-parity
// vertices are never adjacent in a separated quiver.
inline GVec coxeter_sweep(const Quiver& q, Parity p, const GVec& x) {
    check_indexing(q, x);
    GVec out = x;
    for (int v = 0; v < q.size(); ++v) {
        if (q.parity[v] != p) continue;
        long long s = 0;
        for (int w : q.neighbors(v)) s += x[w];
        out[v] = -x[v] + s;
    }
    return out;
}

// c^t with c = (even sweep) after (odd sweep); inverse applies even first.
inline GVec coxeter_transform(const Quiver& q, const GVec& x, long long t) {
    check_indexing(q, x);
    GVec cur = x;
    long long n = t >= 0 ? t : -t;
    for (long long i = 0; i < n; ++i) {
        if (t >= 0) {
            cur = coxeter_sweep(q, Parity::Odd, cur);
            cur = coxeter_sweep(q, Parity::Even, cur);
        } else {
            cur = coxeter_sweep(q, Parity::Even, cur);
            cur = coxeter_sweep(q, Parity::Odd, cur);
        }
    }
    return cur;
}

// L(x) = sum over odd vertices of delta*x minus the even such sum.
inline long long linear_form_L(const Quiver& q, const GVec& x) {
    check_indexing(q, x);
    if (!q.has_delta())
        throw Error(ErrorCode::NoDelta, "linear form needs the minimal imaginary root; " +
                                            q.name + " has none");
    long long val = 0;
    for (int v = 0; v < q.size(); ++v)
        val += q.is_odd(v) ? q.delta[v] * x[v] : -q.delta[v] * x[v];
    return val;
}

enum class RootTag { NotRoot, RealSingular, RealRegular, Imaginary };

inline const char* root_tag_name(RootTag t) {
    switch (t) {
        case RootTag::NotRoot:      return "NotRoot";
        case RootTag::RealSingular: return "RealSingular";
        case RootTag::RealRegular:  return "RealRegular";
        case RootTag::Imaginary:    return "Imaginary";
    }
    return "?";
}

struct RootClass {
    RootTag tag = RootTag::NotRoot;
    long long q_value = 0;
    long long l_value = 0;
    bool l_known = false;  // false on graphs without delta
};

// Positive vectors only. Real roots on graphs without delta are all singular
// (Dynkin case); with delta the sign of L separates singular from regular.
inline RootClass classify_vector(const Quiver& q, const GVec& x) {
    check_indexing(q, x);
    if (!vec_is_positive(x))
        throw Error(ErrorCode::NotPositive, "classification needs a positive vector");
    RootClass rc;
    rc.q_value = tits_form(q, x);
    if (q.has_delta()) {
        rc.l_value = linear_form_L(q, x);
        rc.l_known = true;
    }
    if (rc.q_value == 0 && q.has_delta())
        rc.tag = RootTag::Imaginary;
    else if (rc.q_value == 1)
        rc.tag = !rc.l_known || rc.l_value != 0 ? RootTag::RealSingular : RootTag::RealRegular;
    else
        rc.tag = RootTag::NotRoot;
    return rc;
}

// Closure of the simple roots under single reflections, kept inside the box,
// plus the multiples of delta. Complete because every positive real root
// descends to a simple root through positive roots that only ever shrink
// coordinatewise (so the whole descent chain stays inside the box).
inline std::vector<std::pair<GVec, RootClass>> enumerate_positive_roots(
    const Quiver& q, const GVec& bound, double volume_cap = 1e15) {
    check_indexing(q, bound);
    for (long long b : bound)
        if (b < 1) throw Error(ErrorCode::NotPositive, "bound must be >= 1 everywhere");
    double volume = 1.0;
    for (long long b : bound) volume *= static_cast<double>(b) + 1.0;
    if (volume > volume_cap)
        throw Error(ErrorCode::BoundTooLarge, "search box volume exceeds the cap");

    std::set<GVec> seen;
    std::vector<GVec> stack;
    for (int g = 0; g < q.size(); ++g) {
        GVec e = unit_vector(q, g);
        if (seen.insert(e).second) stack.push_back(e);
    }
    while (!stack.empty()) {
        GVec x = stack.back();
        stack.pop_back();
        for (int k = 0; k < q.size(); ++k) {
            GVec y = simple_reflection(q, k, x);
            if (y[k] < 0 || y[k] > bound[k]) continue;
            if (seen.insert(y).second) stack.push_back(y);
        }
    }
    if (q.has_delta()) {
        for (long long k = 1;; ++k) {
            GVec m(q.delta);
            bool fits = true;
            for (int v = 0; v < q.size(); ++v) {
                m[v] *= k;
                fits = fits && m[v] <= bound[v];
            }
            if (!fits) break;
            seen.insert(m);
        }
    }
    std::vector<std::pair<GVec, RootClass>> out;
    for (const GVec& x : seen) out.emplace_back(x, classify_vector(q, x));
    return out;  // std::set iteration is already lexicographic
}

// Alternating parity sweeps, recorded in replay order: applying steps[0],
// steps[1], ... to terminal reproduces the reduced vector.
struct ReflectionPath {
    std::vector<Parity> steps;
    GVec terminal;
};

inline GVec apply_path(const Quiver& q, const ReflectionPath& path) {
    GVec cur = path.terminal;
    for (Parity p : path.steps) cur = coxeter_sweep(q, p, cur);
    return cur;
}

namespace detail {

// Strict alternation from x, first sweep start; returns the encounter-ordered
// sweep list once stop(current) holds, or nothing within the cap.
template <typename Stop>
inline std::optional<std::vector<Parity>> alternate_until(const Quiver& q, GVec x, Parity start,
                                                          Stop stop, int cap) {
    std::vector<Parity> used;
    Parity next = start;
    for (int it = 0; it <= cap; ++it) {
        if (stop(x)) return used;
        x = coxeter_sweep(q, next, x);
        used.push_back(next);
        if (!vec_is_nonneg(x)) return std::nullopt;
        next = next == Parity::Even ? Parity::Odd : Parity::Even;
    }
    return std::nullopt;
}

inline ReflectionPath path_from_encounter(const Quiver& q, const GVec& d,
                                          std::vector<Parity> encounter) {
    ReflectionPath path;
    GVec cur = d;
    for (Parity p : encounter) cur = coxeter_sweep(q, p, cur);
    path.terminal = std::move(cur);
    std::reverse(encounter.begin(), encounter.end());
    path.steps = std::move(encounter);
    return path;
}

}  // namespace detail

// Reduce a singular real root to a simple root by alternating sweeps. Both
// starting parities are tried; the shorter path wins, ties go to even-first.
inline ReflectionPath singular_reduction_path(const Quiver& q, const GVec& d, int cap = 1000) {
    RootClass rc = classify_vector(q, d);
    if (rc.tag != RootTag::RealSingular)
        throw Error(ErrorCode::NotSingular,
                    std::string("need a singular real root, got ") + root_tag_name(rc.tag));
    auto at_simple = [](const GVec& x) { return simple_root_vertex(x) >= 0; };
    auto even = detail::alternate_until(q, d, Parity::Even, at_simple, cap);
    auto odd = detail::alternate_until(q, d, Parity::Odd, at_simple, cap);
    std::optional<std::vector<Parity>> best;
    if (even && odd)
        best = even->size() <= odd->size() ? even : odd;
    else
        best = even ? even : odd;
    if (!best)
        throw Error(ErrorCode::NoPathFound, "no alternating sweep sequence reached a simple root");
    return detail::path_from_encounter(q, d, *best);
}

// Reduce a faithful real root below delta to a root with a zero coordinate.
inline ReflectionPath faithful_reduction_path(const Quiver& q, const GVec& d, int cap = 1000) {
    check_indexing(q, d);
    if (!q.has_delta())
        throw Error(ErrorCode::NotApplicable, "faithful reduction needs an extended graph");
    if (!vec_is_positive(d) || tits_form(q, d) != 1)
        throw Error(ErrorCode::NotApplicable, "faithful reduction needs a real root");
    bool faithful = std::all_of(d.begin(), d.end(), [](long long v) { return v > 0; });
    bool below = true, equal = true;
    for (int v = 0; v < q.size(); ++v) {
        below = below && d[v] <= q.delta[v];
        equal = equal && d[v] == q.delta[v];
    }
    if (!faithful || !below || equal)
        throw Error(ErrorCode::NotApplicable,
                    "faithful reduction expects a faithful real root bounded by delta");
    auto has_zero = [](const GVec& x) {
        return std::any_of(x.begin(), x.end(), [](long long v) { return v == 0; });
    };
    auto even = detail::alternate_until(q, d, Parity::Even, has_zero, cap);
    auto odd = detail::alternate_until(q, d, Parity::Odd, has_zero, cap);
    std::optional<std::vector<Parity>> best;
    if (even && odd)
        best = even->size() <= odd->size() ? even : odd;
    else
        best = even ? even : odd;
    if (!best)
        throw Error(ErrorCode::NoPathFound, "no alternating sweep sequence produced a zero coordinate");
    return detail::path_from_encounter(q, d, *best);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json gvec_to_json(const Quiver& q, const GVec& x) {
    check_indexing(q, x);
    nlohmann::json entries = nlohmann::json::object();
    for (int v = 0; v < q.size(); ++v) entries[q.vertex_ids[v]] = x[v];
    return nlohmann::json{{"graph", q.name}, {"entries", entries}};
}

inline GVec gvec_from_json(const Quiver& q, const nlohmann::json& j) {
    GVec x(q.size(), 0);
    try {
        const auto& entries = j.at("entries");
        for (auto it = entries.begin(); it != entries.end(); ++it)
            x[q.index_of(it.key())] = it.value().get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad vector JSON: ") + e.what());
    }
    return x;
}

inline nlohmann::json root_class_to_json(const RootClass& rc) {
    nlohmann::json j{{"class", root_tag_name(rc.tag)}, {"q", rc.q_value}};
    if (rc.l_known) j["L"] = rc.l_value;
    return j;
}

inline nlohmann::json path_to_json(const Quiver& q, const ReflectionPath& path) {
    nlohmann::json steps = nlohmann::json::array();
    for (Parity p : path.steps) steps.push_back(parity_name(p));
    return nlohmann::json{{"steps", steps}, {"terminal", gvec_to_json(q, path.terminal)}};
}

}  // namespace osrep
