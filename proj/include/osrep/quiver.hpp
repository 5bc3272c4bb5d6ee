#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <osrep/common.hpp>

namespace osrep {

enum class Parity { Even, Odd };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// Arrow between vertex indices; the stored convention is tail even, head odd.
struct Arrow {
    int tail = -1;
    int head = -1;
};

// Bipartite single quiver. Vertex order is the catalog display order, which is
// also the order CLI vectors and JSON arrays use. delta is the minimal positive
// imaginary root for extended Dynkin entries and empty otherwise.
struct Quiver {
    std::string name;
    std::vector<std::string> vertex_ids;
    std::vector<Parity> parity;
    std::vector<Arrow> arrows;
    std::vector<long long> delta;

    std::vector<std::vector<int>> adj;  // undirected neighbor lists, built by finalize()

    int size() const { return static_cast<int>(vertex_ids.size()); }
    bool has_delta() const { return !delta.empty(); }
    bool is_odd(int v) const { return parity[v] == Parity::Odd; }
    bool is_even(int v) const { return parity[v] == Parity::Even; }

    int index_of(const std::string& id) const {
        for (int v = 0; v < size(); ++v)
            if (vertex_ids[v] == id) return v;
        throw Error(ErrorCode::IndexMismatch, "no vertex '" + id + "' in quiver " + name);
    }

    std::vector<int> vertices_of_parity(Parity p) const {
        std::vector<int> out;
        for (int v = 0; v < size(); ++v)
            if (parity[v] == p) out.push_back(v);
        return out;
    }

    const std::vector<int>& neighbors(int v) const { return adj[v]; }

    // Arrow index joining u and v in either role, or -1.
    int arrow_between(int u, int v) const {
        for (int a = 0; a < static_cast<int>(arrows.size()); ++a) {
            if ((arrows[a].tail == u && arrows[a].head == v) ||
                (arrows[a].tail == v && arrows[a].head == u))
                return a;
        }
        return -1;
    }

    void finalize() {
        adj.assign(vertex_ids.size(), {});
        for (const Arrow& a : arrows) {
            adj[a.tail].push_back(a.head);
            adj[a.head].push_back(a.tail);
        }
        for (auto& list : adj) std::sort(list.begin(), list.end());
    }
};

// Structural checks; every violated invariant is reported, nothing throws.
inline std::vector<std::string> validate_quiver(const Quiver& q) {
    std::vector<std::string> violations;
    const int n = q.size();
    if (n == 0) {
        violations.push_back("empty vertex set");
        return violations;
    }
    if (q.parity.size() != q.vertex_ids.size())
        violations.push_back("parity list size differs from vertex list size");
    for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
            if (q.vertex_ids[v] == q.vertex_ids[w])
                violations.push_back("duplicate vertex id '" + q.vertex_ids[v] + "'");
    bool arrows_ok = true;
    for (const Arrow& a : q.arrows) {
        if (a.tail < 0 || a.tail >= n || a.head < 0 || a.head >= n) {
            violations.push_back("arrow endpoint out of range");
            arrows_ok = false;
        }
    }
    if (!arrows_ok) return violations;

    for (const Arrow& a : q.arrows) {
        if (a.tail == a.head)
            violations.push_back("loop at vertex '" + q.vertex_ids[a.tail] + "'");
        else if (!(q.is_even(a.tail) && q.is_odd(a.head)))
            violations.push_back("not separated: arrow " + q.vertex_ids[a.tail] + " -> " +
                                 q.vertex_ids[a.head] + " is not even -> odd");
    }
    for (size_t i = 0; i < q.arrows.size(); ++i) {
        for (size_t j = i + 1; j < q.arrows.size(); ++j) {
            bool same = q.arrows[i].tail == q.arrows[j].tail && q.arrows[i].head == q.arrows[j].head;
            bool flipped = q.arrows[i].tail == q.arrows[j].head && q.arrows[i].head == q.arrows[j].tail;
            if (same || flipped)
                violations.push_back("not single: arrows " + std::to_string(i) + " and " +
                                     std::to_string(j) + " join the same vertex pair");
        }
    }
    // Connectivity by traversal over the undirected graph.
    std::vector<std::vector<int>> adj(n);
    for (const Arrow& a : q.arrows) {
        adj[a.tail].push_back(a.head);
        adj[a.head].push_back(a.tail);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        violations.push_back("not connected");
    if (q.has_delta() && q.delta.size() != q.vertex_ids.size())
        violations.push_back("delta size differs from vertex count");
    return violations;
}

namespace detail {

struct QuiverBuilder {
    Quiver q;

    int vertex(const std::string& id, Parity p) {
        q.vertex_ids.push_back(id);
        q.parity.push_back(p);
        return q.size() - 1;
    }

    // Joins two vertices of opposite parity; the even one becomes the tail.
    void edge(int u, int v) {
        if (q.parity[u] == q.parity[v])
            throw Error(ErrorCode::InvalidSize, "edge within one parity class in " + q.name);
        if (q.is_even(u))
            q.arrows.push_back({u, v});
        else
            q.arrows.push_back({v, u});
    }

    Quiver take(std::vector<long long> delta = {}) {
        q.delta = std::move(delta);
        q.finalize();
        return std::move(q);
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Catalog
//
// Vertex display orders (= CLI vector order):
//   A(n):   a1 .. an along the path, a1 odd, parity alternating
//   D(n):   a1, a2, c1 .. c_{n-2}; leaves a1, a2 attach to c1 (odd branch vertex)
//   E6:     a1, a2, z, c2, c1, b2      E7: a2, a3, z, b3, b2, b1, c1
//   E8:     a2, a3, a4, a5, z, b2, b1, c1
//   A~(n):  a1 .. an around the cycle (n even), a1 odd
//   D~(4):  a1, a2, b1, b2, z (odd center, dim-2 vertex last)
//   D~(n>4): a1, a2, c1 .. c_{n-3}, b1, b2; a-leaves on c1 (odd), b-leaves on c_{n-3}
//   E6~:    a1, a2, z, c2, c1, b2, b1   (three arms of length 2 at z)
//   E7~:    a1, a2, a3, z, b3, b2, b1, c1
//   E8~:    a1, a2, a3, a4, a5, z, b2, b1, c1
// Finite E-type labels are the extended ones minus the vertex whose removal
// leaves the Dynkin graph (b1 for E6, a1 for E7 and E8).
// ---------------------------------------------------------------------------

enum class GraphFamily { A, D, E6, E7, E8, A_ext, D_ext, E6_ext, E7_ext, E8_ext };

inline bool is_extended_family(GraphFamily f) {
    switch (f) {
        case GraphFamily::A_ext:
        case GraphFamily::D_ext:
        case GraphFamily::E6_ext:
        case GraphFamily::E7_ext:
        case GraphFamily::E8_ext:
            return true;
        default:
            return false;
    }
}

inline bool family_takes_size(GraphFamily f) {
    return f == GraphFamily::A || f == GraphFamily::D || f == GraphFamily::A_ext ||
           f == GraphFamily::D_ext;
}

inline Quiver build_catalog_quiver(GraphFamily family, int n = 0) {
    using detail::QuiverBuilder;
    auto parity_at = [](int k) { return k % 2 == 0 ? Parity::Odd : Parity::Even; };

    switch (family) {
        case GraphFamily::A: {
            if (n < 1) throw Error(ErrorCode::InvalidSize, "A(n) needs n >= 1");
            QuiverBuilder b;
            b.q.name = "A(" + std::to_string(n) + ")";
            for (int k = 0; k < n; ++k) b.vertex("a" + std::to_string(k + 1), parity_at(k));
            for (int k = 0; k + 1 < n; ++k) b.edge(k, k + 1);
            return b.take();
        }
        case GraphFamily::D: {
            if (n < 4) throw Error(ErrorCode::InvalidSize, "D(n) needs n >= 4");
            QuiverBuilder b;
            b.q.name = "D(" + std::to_string(n) + ")";
            int a1 = b.vertex("a1", Parity::Even);
            int a2 = b.vertex("a2", Parity::Even);
            std::vector<int> c;
            for (int k = 0; k < n - 2; ++k)
                c.push_back(b.vertex("c" + std::to_string(k + 1), parity_at(k)));
            b.edge(a1, c[0]);
            b.edge(a2, c[0]);
            for (size_t k = 0; k + 1 < c.size(); ++k) b.edge(c[k], c[k + 1]);
            return b.take();
        }
        case GraphFamily::E6: {
            QuiverBuilder b;
            b.q.name = "E6";
            int a1 = b.vertex("a1", Parity::Odd);
            int a2 = b.vertex("a2", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int c2 = b.vertex("c2", Parity::Even);
            int c1 = b.vertex("c1", Parity::Odd);
            int b2 = b.vertex("b2", Parity::Even);
            b.edge(a1, a2);
            b.edge(a2, z);
            b.edge(z, c2);
            b.edge(c2, c1);
            b.edge(z, b2);
            return b.take();
        }
        case GraphFamily::E7: {
            QuiverBuilder b;
            b.q.name = "E7";
            int a2 = b.vertex("a2", Parity::Odd);
            int a3 = b.vertex("a3", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int b3 = b.vertex("b3", Parity::Even);
            int b2 = b.vertex("b2", Parity::Odd);
            int b1 = b.vertex("b1", Parity::Even);
            int c1 = b.vertex("c1", Parity::Even);
            b.edge(a2, a3);
            b.edge(a3, z);
            b.edge(z, b3);
            b.edge(b3, b2);
            b.edge(b2, b1);
            b.edge(z, c1);
            return b.take();
        }
        case GraphFamily::E8: {
            QuiverBuilder b;
            b.q.name = "E8";
            int a2 = b.vertex("a2", Parity::Odd);
            int a3 = b.vertex("a3", Parity::Even);
            int a4 = b.vertex("a4", Parity::Odd);
            int a5 = b.vertex("a5", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int b2 = b.vertex("b2", Parity::Even);
            int b1 = b.vertex("b1", Parity::Odd);
            int c1 = b.vertex("c1", Parity::Even);
            b.edge(a2, a3);
            b.edge(a3, a4);
            b.edge(a4, a5);
            b.edge(a5, z);
            b.edge(z, b2);
            b.edge(b2, b1);
            b.edge(z, c1);
            return b.take();
        }
        case GraphFamily::A_ext: {
            if (n < 4 || n % 2 != 0)
                throw Error(ErrorCode::InvalidSize, "A~(n) needs even n >= 4");
            QuiverBuilder b;
            b.q.name = "A~(" + std::to_string(n) + ")";
            for (int k = 0; k < n; ++k) b.vertex("a" + std::to_string(k + 1), parity_at(k));
            for (int k = 0; k < n; ++k) b.edge(k, (k + 1) % n);
            return b.take(std::vector<long long>(n, 1));
        }
        case GraphFamily::D_ext: {
            if (n < 4) throw Error(ErrorCode::InvalidSize, "D~(n) needs n >= 4");
            QuiverBuilder b;
            b.q.name = "D~(" + std::to_string(n) + ")";
            if (n == 4) {
                int a1 = b.vertex("a1", Parity::Even);
                int a2 = b.vertex("a2", Parity::Even);
                int b1 = b.vertex("b1", Parity::Even);
                int b2 = b.vertex("b2", Parity::Even);
                int z = b.vertex("z", Parity::Odd);
                b.edge(a1, z);
                b.edge(a2, z);
                b.edge(b1, z);
                b.edge(b2, z);
                return b.take({1, 1, 1, 1, 2});
            }
            int a1 = b.vertex("a1", Parity::Even);
            int a2 = b.vertex("a2", Parity::Even);
            std::vector<int> c;
            for (int k = 0; k < n - 3; ++k)
                c.push_back(b.vertex("c" + std::to_string(k + 1), parity_at(k)));
            Parity leaf = b.q.parity[c.back()] == Parity::Odd ? Parity::Even : Parity::Odd;
            int b1 = b.vertex("b1", leaf);
            int b2 = b.vertex("b2", leaf);
            b.edge(a1, c[0]);
            b.edge(a2, c[0]);
            for (size_t k = 0; k + 1 < c.size(); ++k) b.edge(c[k], c[k + 1]);
            b.edge(c.back(), b1);
            b.edge(c.back(), b2);
            std::vector<long long> delta{1, 1};
            delta.insert(delta.end(), c.size(), 2);
            delta.push_back(1);
            delta.push_back(1);
            return b.take(std::move(delta));
        }
        case GraphFamily::E6_ext: {
            QuiverBuilder b;
            b.q.name = "E6~";
            int a1 = b.vertex("a1", Parity::Odd);
            int a2 = b.vertex("a2", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int c2 = b.vertex("c2", Parity::Even);
            int c1 = b.vertex("c1", Parity::Odd);
            int b2 = b.vertex("b2", Parity::Even);
            int b1 = b.vertex("b1", Parity::Odd);
            b.edge(a1, a2);
            b.edge(a2, z);
            b.edge(z, c2);
            b.edge(c2, c1);
            b.edge(z, b2);
            b.edge(b2, b1);
            return b.take({1, 2, 3, 2, 1, 2, 1});
        }
        case GraphFamily::E7_ext: {
            QuiverBuilder b;
            b.q.name = "E7~";
            int a1 = b.vertex("a1", Parity::Even);
            int a2 = b.vertex("a2", Parity::Odd);
            int a3 = b.vertex("a3", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int b3 = b.vertex("b3", Parity::Even);
            int b2 = b.vertex("b2", Parity::Odd);
            int b1 = b.vertex("b1", Parity::Even);
            int c1 = b.vertex("c1", Parity::Even);
            b.edge(a1, a2);
            b.edge(a2, a3);
            b.edge(a3, z);
            b.edge(z, b3);
            b.edge(b3, b2);
            b.edge(b2, b1);
            b.edge(z, c1);
            return b.take({1, 2, 3, 4, 3, 2, 1, 2});
        }
        case GraphFamily::E8_ext: {
            QuiverBuilder b;
            b.q.name = "E8~";
            int a1 = b.vertex("a1", Parity::Even);
            int a2 = b.vertex("a2", Parity::Odd);
            int a3 = b.vertex("a3", Parity::Even);
            int a4 = b.vertex("a4", Parity::Odd);
            int a5 = b.vertex("a5", Parity::Even);
            int z = b.vertex("z", Parity::Odd);
            int b2 = b.vertex("b2", Parity::Even);
            int b1 = b.vertex("b1", Parity::Odd);
            int c1 = b.vertex("c1", Parity::Even);
            b.edge(a1, a2);
            b.edge(a2, a3);
            b.edge(a3, a4);
            b.edge(a4, a5);
            b.edge(a5, z);
            b.edge(z, b2);
            b.edge(b2, b1);
            b.edge(z, c1);
            return b.take({1, 2, 3, 4, 5, 6, 4, 2, 3});
        }
    }
    throw Error(ErrorCode::UnknownGraph, "unhandled family");
}

// Accepts "A~4", "A~(4)", "D~6", "E6~", "A4", "A(4)", "E8", case-insensitive.
inline Quiver parse_graph_name(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (s.empty()) throw Error(ErrorCode::UnknownGraph, "empty graph name");

    char letter = s[0];
    std::string rest = s.substr(1);
    bool extended = false;
    std::string digits;
    for (char c : rest) {
        if (c == '~') extended = true;
        else if (c == '(' || c == ')') continue;
        else if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
        else throw Error(ErrorCode::UnknownGraph, "cannot parse graph name '" + raw + "'");
    }

    if (letter == 'E') {
        if (digits == "6") return build_catalog_quiver(extended ? GraphFamily::E6_ext : GraphFamily::E6);
        if (digits == "7") return build_catalog_quiver(extended ? GraphFamily::E7_ext : GraphFamily::E7);
        if (digits == "8") return build_catalog_quiver(extended ? GraphFamily::E8_ext : GraphFamily::E8);
        throw Error(ErrorCode::UnknownGraph, "unknown E-type graph '" + raw + "'");
    }
    if (digits.empty())
        throw Error(ErrorCode::UnknownGraph, "graph '" + raw + "' needs a size, e.g. " + std::string(1, letter) + "4");
    int n = 0;
    try {
        n = std::stoi(digits);
    } catch (const std::exception&) {
        throw Error(ErrorCode::UnknownGraph, "bad size in graph name '" + raw + "'");
    }
    if (letter == 'A') return build_catalog_quiver(extended ? GraphFamily::A_ext : GraphFamily::A, n);
    if (letter == 'D') return build_catalog_quiver(extended ? GraphFamily::D_ext : GraphFamily::D, n);
    throw Error(ErrorCode::UnknownGraph, "unknown graph family '" + std::string(1, letter) + "'");
}

// Induced subquiver on the given vertex set; labels and parities carry over,
// delta does not (the restriction is generally not an imaginary root).
inline Quiver induced_subquiver(const Quiver& q, const std::vector<int>& keep) {
    Quiver sub;
    sub.name = q.name + "|sub";
    std::vector<int> new_index(q.size(), -1);
    for (int v : keep) {
        if (v < 0 || v >= q.size())
            throw Error(ErrorCode::IndexMismatch, "subquiver vertex out of range");
        new_index[v] = static_cast<int>(sub.vertex_ids.size());
        sub.vertex_ids.push_back(q.vertex_ids[v]);
        sub.parity.push_back(q.parity[v]);
    }
    for (const Arrow& a : q.arrows)
        if (new_index[a.tail] >= 0 && new_index[a.head] >= 0)
            sub.arrows.push_back({new_index[a.tail], new_index[a.head]});
    sub.finalize();
    return sub;
}

inline nlohmann::json quiver_to_json(const Quiver& q) {
    nlohmann::json jverts = nlohmann::json::array();
    for (int v = 0; v < q.size(); ++v)
        jverts.push_back({{"id", q.vertex_ids[v]}, {"parity", parity_name(q.parity[v])}});
    nlohmann::json jarrows = nlohmann::json::array();
    for (const Arrow& a : q.arrows)
        jarrows.push_back({{"tail", q.vertex_ids[a.tail]}, {"head", q.vertex_ids[a.head]}});
    nlohmann::json j{{"name", q.name}, {"vertices", jverts}, {"arrows", jarrows}};
    if (q.has_delta()) j["delta"] = q.delta;
    return j;
}

inline Quiver quiver_from_json(const nlohmann::json& j) {
    Quiver q;
    try {
        q.name = j.value("name", "");
        for (const auto& jv : j.at("vertices")) {
            q.vertex_ids.push_back(jv.at("id").get<std::string>());
            std::string p = jv.at("parity").get<std::string>();
            if (p == "even") q.parity.push_back(Parity::Even);
            else if (p == "odd") q.parity.push_back(Parity::Odd);
            else throw Error(ErrorCode::ParseError, "parity must be 'even' or 'odd'");
        }
        for (const auto& ja : j.at("arrows")) {
            Arrow a;
            a.tail = q.index_of(ja.at("tail").get<std::string>());
            a.head = q.index_of(ja.at("head").get<std::string>());
            q.arrows.push_back(a);
        }
        if (j.contains("delta")) q.delta = j.at("delta").get<std::vector<long long>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad quiver JSON: ") + e.what());
    }
    q.finalize();
    return q;
}

}  // namespace osrep
