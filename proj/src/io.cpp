#include "pdtn/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace pdtn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

const json& need(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + " is missing required key '" + key + "'");
    return *it;
}

double need_number(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_number()) fail(where + " key '" + key + "' must be a number");
    return v.get<double>();
}

std::string need_string(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_string()) fail(where + " key '" + key + "' must be a string");
    return v.get<std::string>();
}

bool need_bool(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_boolean()) fail(where + " key '" + key + "' must be a boolean");
    return v.get<bool>();
}

}  // namespace

GraphBundle load_graph_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        fail("invalid JSON: " + msg);
    }
    if (!root.is_object()) fail("graph file must be a JSON object");

    GraphBundle bundle;
    const json& params = need(root, "params", "graph file");
    if (!params.is_object()) fail("'params' must be an object");
    bundle.p = need_number(params, "p", "params");
    if (params.contains("theta")) {
        if (!params["theta"].is_number()) fail("params key 'theta' must be a number");
        bundle.theta = params["theta"].get<double>();
    }
    if (params.contains("Theta")) {
        if (!params["Theta"].is_number()) fail("params key 'Theta' must be a number");
        bundle.Theta = params["Theta"].get<double>();
    }
    if (bundle.theta && bundle.Theta) fail("params may carry 'theta' or 'Theta', not both");

    const json& jverts = need(root, "vertices", "graph file");
    if (!jverts.is_array()) fail("'vertices' must be an array");
    const json& jedges = need(root, "edges", "graph file");
    if (!jedges.is_array()) fail("'edges' must be an array");

    std::vector<Vertex> vertices;
    std::unordered_map<std::string, int> index;
    for (const json& jv : jverts) {
        if (!jv.is_object()) fail("each vertex must be an object");
        Vertex v;
        v.id = need_string(jv, "id", "vertex");
        bool boundary = need_bool(jv, "boundary", "vertex '" + v.id + "'");
        v.kind = boundary ? VertexKind::Boundary : VertexKind::Interior;
        const char* want = boundary ? "nu" : "mu";
        const char* wrong = boundary ? "mu" : "nu";
        if (jv.contains(wrong))
            fail("vertex '" + v.id + "' is " + (boundary ? "boundary" : "interior") +
                 " and must carry '" + want + "', not '" + wrong + "'");
        v.measure = need_number(jv, want, "vertex '" + v.id + "'");
        if (jv.contains("pos")) {
            const json& jp = jv["pos"];
            if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() || !jp[1].is_number())
                fail("vertex '" + v.id + "' key 'pos' must be an array of two numbers");
            v.pos = std::array<double, 2>{jp[0].get<double>(), jp[1].get<double>()};
        }
        if (!index.count(v.id)) index[v.id] = static_cast<int>(vertices.size());
        vertices.push_back(std::move(v));
    }

    std::vector<Edge> edges;
    for (const json& je : jedges) {
        if (!je.is_object()) fail("each edge must be an object");
        Edge e;
        std::string u = need_string(je, "u", "edge");
        std::string v = need_string(je, "v", "edge");
        auto lookup = [&](const std::string& id) {
            auto it = index.find(id);
            return it == index.end() ? -1 : it->second;
        };
        e.u = lookup(u);
        e.v = lookup(v);
        if (e.u < 0) fail("edge endpoint '" + u + "' is not a vertex id");
        if (e.v < 0) fail("edge endpoint '" + v + "' is not a vertex id");
        e.length = need_number(je, "length", "edge " + u + "-" + v);
        e.measure = need_number(je, "mu", "edge " + u + "-" + v);
        edges.push_back(e);
    }

    bundle.graph = MetricMeasureGraph(std::move(vertices), std::move(edges));
    return bundle;
}

GraphBundle load_graph_file(const std::string& path) {
    return load_graph_json(read_text_file(path));
}

std::string graph_to_json(const GraphBundle& bundle) {
    JsonWriter w;
    w.begin_object();
    w.key("params").begin_object();
    w.field("p", bundle.p);
    if (bundle.theta) w.field("theta", *bundle.theta);
    if (bundle.Theta) w.field("Theta", *bundle.Theta);
    w.end_object();
    w.key("vertices").begin_array();
    for (const Vertex& v : bundle.graph.vertices()) {
        bool boundary = v.kind == VertexKind::Boundary;
        w.begin_object();
        w.field("id", v.id);
        w.field("boundary", boundary);
        w.field(boundary ? "nu" : "mu", v.measure);
        if (v.pos) {
            w.key("pos").begin_array();
            w.value((*v.pos)[0]).value((*v.pos)[1]);
            w.end_array();
        }
        w.end_object();
    }
    w.end_array();
    w.key("edges").begin_array();
    for (const Edge& e : bundle.graph.edges()) {
        w.begin_object();
        w.field("u", bundle.graph.id_of(e.u));
        w.field("v", bundle.graph.id_of(e.v));
        w.field("length", e.length);
        w.field("mu", e.measure);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

void save_graph_file(const GraphBundle& bundle, const std::string& path) {
    write_text_file(path, graph_to_json(bundle));
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& token, int line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        fail("values file line " + std::to_string(line_no) + ": '" + token +
             "' is not a number");
    return v;
}

}  // namespace

Eigen::VectorXd load_boundary_csv(const std::string& text, const MetricMeasureGraph& graph,
                                  const std::string& value_column) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    const int m = graph.boundary_count();
    Eigen::VectorXd values = Eigen::VectorXd::Zero(m);
    std::vector<bool> seen(m, false);
    int covered = 0;

    while (std::getline(stream, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t comma = t.find(',');
        if (comma == std::string::npos)
            fail("values file line " + std::to_string(line_no) + " has no comma");
        std::string left = trim(t.substr(0, comma));
        std::string right = trim(t.substr(comma + 1));
        if (!saw_header) {
            if (left != "id" || right != value_column)
                fail("values file header must be 'id," + value_column + "', got '" + t + "'");
            saw_header = true;
            continue;
        }
        int v = graph.index_of(left);
        if (v < 0) fail("values file line " + std::to_string(line_no) + ": unknown id '" +
                        left + "'");
        int bp = graph.boundary_position(v);
        if (bp < 0)
            fail("values file line " + std::to_string(line_no) + ": '" + left +
                 "' is not a boundary vertex");
        if (seen[bp])
            fail("values file line " + std::to_string(line_no) + ": duplicate id '" + left +
                 "'");
        seen[bp] = true;
        values(bp) = parse_number(right, line_no);
        ++covered;
    }
    if (!saw_header) fail("values file is empty");
    if (covered < m) {
        for (int i = 0; i < m; ++i)
            if (!seen[i])
                fail("values file misses " + std::to_string(m - covered) +
                     " boundary vertices (first missing: '" +
                     graph.id_of(graph.boundary_vertices()[i]) + "')");
    }
    return values;
}

Eigen::VectorXd load_boundary_csv_file(const std::string& path,
                                       const MetricMeasureGraph& graph,
                                       const std::string& value_column) {
    return load_boundary_csv(read_text_file(path), graph, value_column);
}

std::string boundary_to_csv(const Eigen::VectorXd& values, const MetricMeasureGraph& graph,
                            const std::string& value_column) {
    if (values.size() != graph.boundary_count())
        fail("boundary vector length does not match the boundary vertex count");
    std::string out = "id," + value_column + "\n";
    for (int i = 0; i < graph.boundary_count(); ++i)
        out += graph.id_of(graph.boundary_vertices()[i]) + "," + format_real(values(i)) + "\n";
    return out;
}

std::string format_real(double v) {
    if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

void JsonWriter::pre_value() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) out_ += ',';
        first_in_scope_.back() = false;
    }
}

JsonWriter& JsonWriter::begin_object() {
    pre_value();
    out_ += '{';
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    first_in_scope_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    pre_value();
    out_ += '[';
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    first_in_scope_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) out_ += ',';
        first_in_scope_.back() = false;
    }
    out_ += '"' + escape_json(name) + "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    pre_value();
    out_ += format_real(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    pre_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(long v) {
    pre_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    pre_value();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    pre_value();
    out_ += '"' + escape_json(v) + '"';
    return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::null_value() {
    pre_value();
    out_ += "null";
    return *this;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace pdtn
