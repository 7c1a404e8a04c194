#include "pdtn/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pdtn {

namespace {

/// Accumulates vertices/edges by id and resolves edge endpoints to
/// indices at insertion time.
struct Builder {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::unordered_map<std::string, int> index;

    int vertex(const std::string& id, VertexKind kind, double measure) {
        Vertex v;
        v.id = id;
        v.kind = kind;
        v.measure = measure;
        index[id] = static_cast<int>(vertices.size());
        vertices.push_back(std::move(v));
        return static_cast<int>(vertices.size()) - 1;
    }
    int boundary(const std::string& id, double nu) { return vertex(id, VertexKind::Boundary, nu); }
    int interior(const std::string& id, double mu) { return vertex(id, VertexKind::Interior, mu); }

    void at(int v, double x, double y) { vertices[v].pos = std::array<double, 2>{x, y}; }

    void edge(const std::string& u, const std::string& v, double length = 1.0, double mu = 1.0) {
        Edge e;
        e.u = index.at(u);
        e.v = index.at(v);
        e.length = length;
        e.measure = mu;
        edges.push_back(e);
    }
    void edge_idx(int u, int v, double length, double mu) {
        Edge e;
        e.u = u;
        e.v = v;
        e.length = length;
        e.measure = mu;
        edges.push_back(e);
    }

    MetricMeasureGraph build() { return MetricMeasureGraph(std::move(vertices), std::move(edges)); }
};

std::string letter_id(int k) {
    std::string s;
    ++k;  // 1-based so 1 -> "a", 26 -> "z", 27 -> "aa"
    while (k > 0) {
        int r = (k - 1) % 26;
        s.insert(s.begin(), static_cast<char>('a' + r));
        k = (k - 1) / 26;
    }
    return s;
}

}  // namespace

MetricMeasureGraph make_path(int n) {
    if (n < 3) throw std::invalid_argument("path generator needs at least 3 vertices");
    Builder b;
    for (int i = 0; i < n; ++i) {
        bool end = (i == 0 || i == n - 1);
        int v = end ? b.boundary(letter_id(i), 1.0) : b.interior(letter_id(i), 1.0);
        b.at(v, static_cast<double>(i), 0.0);
    }
    for (int i = 0; i + 1 < n; ++i) b.edge(letter_id(i), letter_id(i + 1));
    return b.build();
}

MetricMeasureGraph make_grid(int n) {
    if (n < 3) throw std::invalid_argument("grid generator needs n >= 3");
    Builder b;
    auto id = [](int i, int j) { return "r" + std::to_string(i) + "c" + std::to_string(j); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool rim = (i == 0 || j == 0 || i == n - 1 || j == n - 1);
            int v = rim ? b.boundary(id(i, j), 1.0) : b.interior(id(i, j), 1.0);
            b.at(v, static_cast<double>(j), static_cast<double>(i));
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i + 1 < n) b.edge(id(i, j), id(i + 1, j));
            if (j + 1 < n) b.edge(id(i, j), id(i, j + 1));
        }
    return b.build();
}

MetricMeasureGraph make_lshape(int n) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("lshape generator needs odd n >= 3");
    const int h = (n - 1) / 2;
    auto kept = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= n || j >= n) return false;
        return !(i > h && j > h);
    };
    auto id = [](int i, int j) { return "r" + std::to_string(i) + "c" + std::to_string(j); };
    Builder b;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!kept(i, j)) continue;
            int deg = 0;
            for (int k = 0; k < 4; ++k) deg += kept(i + di[k], j + dj[k]) ? 1 : 0;
            int v = (deg < 4) ? b.boundary(id(i, j), 1.0) : b.interior(id(i, j), 1.0);
            b.at(v, static_cast<double>(j), static_cast<double>(i));
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!kept(i, j)) continue;
            if (kept(i + 1, j)) b.edge(id(i, j), id(i + 1, j));
            if (kept(i, j + 1)) b.edge(id(i, j), id(i, j + 1));
        }
    return b.build();
}

namespace {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

void koch_segment(Point a, Point bp, int depth, std::vector<Point>& out) {
    if (depth == 0) {
        out.push_back(a);
        return;
    }
    Point u{(bp.x - a.x) / 3.0, (bp.y - a.y) / 3.0};
    Point p1{a.x + u.x, a.y + u.y};
    Point p3{a.x + 2.0 * u.x, a.y + 2.0 * u.y};
    // Rotate the middle third by -60 degrees so the bump points away
    // from the interior of a counterclockwise polygon.
    const double c = 0.5, s = -std::sqrt(3.0) / 2.0;
    Point p2{p1.x + c * u.x - s * u.y, p1.y + s * u.x + c * u.y};
    koch_segment(a, p1, depth - 1, out);
    koch_segment(p1, p2, depth - 1, out);
    koch_segment(p2, p3, depth - 1, out);
    koch_segment(p3, bp, depth - 1, out);
}

bool point_in_polygon(const Point& q, const std::vector<Point>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y > q.y) != (b.y > q.y)) {
            double xint = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (q.x < xint) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

MetricMeasureGraph make_snowflake(int level) {
    if (level < 0 || level > 5)
        throw std::invalid_argument("snowflake level must be between 0 and 5");
    const double h = std::pow(3.0, -level);

    // Counterclockwise base triangle with unit sides.
    Point A{0.0, 0.0}, B{1.0, 0.0}, C{0.5, std::sqrt(3.0) / 2.0};
    std::vector<Point> poly;
    koch_segment(A, B, level, poly);
    koch_segment(B, C, level, poly);
    koch_segment(C, A, level, poly);

    // Candidate interior sites on a triangular lattice of spacing h,
    // kept when inside the polygon and not hugging the boundary.
    std::map<std::pair<int, int>, int> site_index;
    std::vector<Point> sites;
    const double ax = h, bx = h / 2.0, by = h * std::sqrt(3.0) / 2.0;
    int imin = static_cast<int>(std::floor(-1.0 / h)) - 2;
    int imax = static_cast<int>(std::ceil(2.0 / h)) + 2;
    double min_gap2 = 0.09 * h * h;  // keep 0.3 h clear of boundary nodes
    for (int j = imin; j <= imax; ++j)
        for (int i = imin; i <= imax; ++i) {
            Point q{i * ax + j * bx, j * by};
            if (q.x < -0.4 || q.x > 1.4 || q.y < -0.4 || q.y > 1.3) continue;
            if (!point_in_polygon(q, poly)) continue;
            bool clear = true;
            for (const Point& bpt : poly) {
                double dx = q.x - bpt.x, dy = q.y - bpt.y;
                if (dx * dx + dy * dy < min_gap2) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            site_index[{i, j}] = static_cast<int>(sites.size());
            sites.push_back(q);
        }
    if (sites.empty()) {
        site_index[{0, 0}] = 0;
        sites.push_back(Point{0.5, std::sqrt(3.0) / 6.0});  // centroid fallback
    }

    // Lattice adjacency, then keep only the largest connected component
    // so spiky pockets cannot disconnect the graph.
    std::vector<std::vector<int>> adj(sites.size());
    const int noff[3][2] = {{1, 0}, {0, 1}, {-1, 1}};
    for (const auto& [key, idx] : site_index)
        for (const auto& off : noff) {
            auto it = site_index.find({key.first + off[0], key.second + off[1]});
            if (it != site_index.end()) {
                adj[idx].push_back(it->second);
                adj[it->second].push_back(idx);
            }
        }
    std::vector<int> comp(sites.size(), -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::queue<int> bfs;
        bfs.push(static_cast<int>(s));
        comp[s] = ncomp;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop();
            for (int w : adj[v])
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    bfs.push(w);
                }
        }
        ++ncomp;
    }
    std::vector<int> comp_size(ncomp, 0);
    for (int c : comp) ++comp_size[c];
    int main_comp = static_cast<int>(
        std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());

    Builder b;
    std::vector<int> keep_idx(sites.size(), -1);
    const double mu_site = h * h;
    const double nu_node = std::pow(4.0, -level);
    int kept = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
        if (comp[s] != main_comp) continue;
        int v = b.interior("i" + std::to_string(kept), mu_site);
        b.at(v, sites[s].x, sites[s].y);
        keep_idx[s] = v;
        ++kept;
    }
    for (const auto& [key, idx] : site_index) {
        if (keep_idx[idx] < 0) continue;
        for (const auto& off : noff) {
            auto it = site_index.find({key.first + off[0], key.second + off[1]});
            if (it != site_index.end() && keep_idx[it->second] >= 0)
                b.edge_idx(keep_idx[idx], keep_idx[it->second], h, h * h);
        }
    }

    for (std::size_t k = 0; k < poly.size(); ++k) {
        int v = b.boundary("b" + std::to_string(k), nu_node);
        b.at(v, poly[k].x, poly[k].y);
        // Couple to the nearest surviving interior site.
        int best = -1;
        double best_d2 = 0.0;
        for (std::size_t s = 0; s < sites.size(); ++s) {
            if (keep_idx[s] < 0) continue;
            double dx = poly[k].x - sites[s].x, dy = poly[k].y - sites[s].y;
            double d2 = dx * dx + dy * dy;
            if (best < 0 || d2 < best_d2) {
                best = static_cast<int>(s);
                best_d2 = d2;
            }
        }
        b.edge_idx(v, keep_idx[best], std::sqrt(best_d2), h * h);
    }

    return b.build();
}

MetricMeasureGraph make_random_graph(int n, uint64_t seed, double boundary_fraction,
                                     double extra_edge_fraction) {
    if (n < 3) throw std::invalid_argument("random graph needs at least 3 vertices");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    int nb = static_cast<int>(std::lround(boundary_fraction * n));
    nb = std::max(2, std::min(nb, n - 1));

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_boundary(n, false);
    for (int i = 0; i < nb; ++i) is_boundary[order[i]] = true;

    Builder b;
    for (int i = 0; i < n; ++i) {
        std::string id = "v" + std::to_string(i);
        if (is_boundary[i])
            b.boundary(id, uniform(0.5, 2.0));
        else
            b.interior(id, uniform(0.5, 2.0));
    }

    std::set<std::pair<int, int>> used;
    auto add_edge = [&](int u, int v) {
        auto key = std::minmax(u, v);
        if (u == v || used.count(key)) return;
        used.insert(key);
        b.edge_idx(u, v, uniform(0.5, 1.5), uniform(0.5, 1.5));
    };
    for (int v = 1; v < n; ++v) add_edge(static_cast<int>(rng() % static_cast<uint64_t>(v)), v);
    int extras = static_cast<int>(std::lround(extra_edge_fraction * n));
    for (int k = 0; k < extras; ++k) {
        int u = static_cast<int>(rng() % static_cast<uint64_t>(n));
        int v = static_cast<int>(rng() % static_cast<uint64_t>(n));
        add_edge(u, v);
    }
    return b.build();
}

MetricMeasureGraph make_codimension_star(double Theta, int arms) {
    if (arms < 2) throw std::invalid_argument("codimension star needs at least 2 arms");
    if (!(Theta > 0.0)) throw std::invalid_argument("Theta must be positive");
    Builder b;
    b.interior("c", std::pow(2.0, Theta) - 1.0);
    for (int k = 0; k < arms; ++k) {
        std::string w = "w" + std::to_string(k);
        std::string z = "z" + std::to_string(k);
        b.interior(w, 1.0);
        b.boundary(z, 1.0);
        b.edge("c", w);
        b.edge(w, z);
    }
    return b.build();
}

MetricMeasureGraph make_named(const std::string& family, int size) {
    if (family == "path") return make_path(size);
    if (family == "grid") return make_grid(size);
    if (family == "lshape") return make_lshape(size);
    if (family == "snowflake") return make_snowflake(size);
    throw std::invalid_argument("unknown graph family: " + family);
}

}  // namespace pdtn
