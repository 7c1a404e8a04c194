#ifndef PDTN_IO_HPP
#define PDTN_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdtn/graph.hpp"

namespace pdtn {

/// A graph together with the exponent parameters stored in its file.
/// Exactly one of theta/Theta may be present (both empty is allowed; the
/// CLI then requires the value on the command line).
struct GraphBundle {
    MetricMeasureGraph graph;
    double p = 2.0;
    std::optional<double> theta;
    std::optional<double> Theta;
};

/// Parse the JSON graph format:
/// {"params": {"p": .., "theta"?: .., "Theta"?: ..},
///  "vertices": [{"id", "boundary", "mu"?|"nu"?, "pos"?: [x, y]}],
///  "edges": [{"u", "v", "length", "mu"}]}.
/// Structural problems (missing keys, wrong types, both theta and Theta)
/// throw std::invalid_argument with a one-line message. Semantic
/// violations (bad signs, dangling ids...) are left for validate().
GraphBundle load_graph_json(const std::string& text);
GraphBundle load_graph_file(const std::string& path);

std::string graph_to_json(const GraphBundle& bundle);
void save_graph_file(const GraphBundle& bundle, const std::string& path);

/// Values file: CSV with header "id,value" (boundary functions) or
/// "id,weight" (functionals). Every id must resolve to a boundary vertex
/// of the graph and appear exactly once; every boundary vertex must be
/// covered. Returns values in boundary order.
Eigen::VectorXd load_boundary_csv(const std::string& text, const MetricMeasureGraph& graph,
                                  const std::string& value_column);
Eigen::VectorXd load_boundary_csv_file(const std::string& path, const MetricMeasureGraph& graph,
                                       const std::string& value_column);

std::string boundary_to_csv(const Eigen::VectorXd& values, const MetricMeasureGraph& graph,
                            const std::string& value_column);

/// Streaming JSON writer with insertion-ordered keys and %.17g reals, so
/// repeated runs produce byte-identical reports.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v);
    JsonWriter& null_value();

    /// Convenience: key(name).value(v).
    template <typename T>
    JsonWriter& field(const std::string& name, const T& v) {
        key(name);
        return value(v);
    }

    std::string str() const { return out_; }

private:
    void pre_value();
    std::string out_;
    std::vector<bool> first_in_scope_;
    bool pending_key_ = false;
};

/// Formats a double exactly as the report writer does.
std::string format_real(double v);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace pdtn

#endif
