#include "crb/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crb/errors.hpp"

namespace crb {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
    out << content;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorKind::ParseError,
                    path + ":" + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    return value;
}

}  // namespace

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::ParseError, path + ": empty file");
    }
    const std::vector<std::string> columns = split(strip_cr(line), ',');
    std::vector<double> flat;
    std::size_t n_rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != columns.size()) {
            throw Error(ErrorKind::ParseError,
                        path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(columns.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        for (const auto& f : fields) flat.push_back(parse_double(f, path, line_no));
        ++n_rows;
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(n_rows),
                           static_cast<Eigen::Index>(columns.size()));
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                flat[r * columns.size() + c];
        }
    }
    return Dataset(columns, std::move(values));
}

void write_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c > 0) out << ',';
        out << data.columns[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < data.n_rows(); ++r) {
        for (Eigen::Index c = 0; c < data.n_cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(data.values(r, c));
        }
        out << '\n';
    }
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
    write_csv(data, out);
}

namespace {

Dag dag_from_json(const json& doc, const std::string& path) {
    if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
        throw Error(ErrorKind::ParseError, path + ": missing 'vertices' array");
    }
    std::vector<std::string> vertices = doc["vertices"].get<std::vector<std::string>>();
    std::vector<Edge> edges;
    auto index_of = [&](const json& endpoint) -> int {
        if (endpoint.is_number_integer()) return endpoint.get<int>();
        const std::string name = endpoint.get<std::string>();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (vertices[i] == name) return static_cast<int>(i);
        }
        throw Error(ErrorKind::UnknownVertex, path + ": unknown vertex '" + name + "'");
    };
    for (const auto& e : doc.value("edges", json::array())) {
        if (!e.is_array() || e.size() != 2) {
            throw Error(ErrorKind::ParseError, path + ": edges must be [parent, child] pairs");
        }
        edges.emplace_back(index_of(e[0]), index_of(e[1]));
    }
    return Dag(std::move(vertices), std::move(edges));
}

struct EdgeListFile {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> undirected;
};

EdgeListFile parse_edge_list(const std::string& path, const std::string& text) {
    EdgeListFile parsed;
    bool have_header = false;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto marker = line.find("vertices:");
            if (marker != std::string::npos) {
                for (auto& name : split(line.substr(marker + 9), ',')) {
                    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
                    while (!name.empty() && name.back() == ' ') name.pop_back();
                    if (!name.empty()) parsed.vertices.push_back(name);
                }
                have_header = true;
            }
            continue;
        }
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() == 2) {
            parsed.directed.emplace_back(fields[0], fields[1]);
        } else if (fields.size() == 3 && fields[1] == "--") {
            parsed.undirected.emplace_back(fields[0], fields[2]);
        } else {
            throw Error(ErrorKind::ParseError,
                        path + ":" + std::to_string(line_no) + ": expected 'parent<TAB>child'");
        }
    }
    if (!have_header) {
        // header absent: vertex order is first appearance in the edge lines
        auto note = [&](const std::string& name) {
            for (const auto& v : parsed.vertices) {
                if (v == name) return;
            }
            parsed.vertices.push_back(name);
        };
        for (const auto& [p, c] : parsed.directed) {
            note(p);
            note(c);
        }
        for (const auto& [a, b] : parsed.undirected) {
            note(a);
            note(b);
        }
    }
    return parsed;
}

int named_index(const std::vector<std::string>& vertices, const std::string& name,
                const std::string& path) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i] == name) return static_cast<int>(i);
    }
    throw Error(ErrorKind::UnknownVertex, path + ": vertex '" + name + "' not declared");
}

bool looks_like_json(const std::string& text) {
    for (char ch : text) {
        if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') continue;
        return ch == '{';
    }
    return false;
}

}  // namespace

Dag read_dag(const std::string& path) {
    const std::string text = read_text_file(path);
    if (looks_like_json(text)) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::ParseError, path + ": " + e.what());
        }
        return dag_from_json(doc, path);
    }
    const EdgeListFile parsed = parse_edge_list(path, text);
    if (!parsed.undirected.empty()) {
        throw Error(ErrorKind::ParseError, path + ": undirected edges in a DAG file");
    }
    std::vector<Edge> edges;
    for (const auto& [p, c] : parsed.directed) {
        edges.emplace_back(named_index(parsed.vertices, p, path),
                           named_index(parsed.vertices, c, path));
    }
    return Dag(parsed.vertices, std::move(edges));
}

namespace {

std::string vertices_header(const std::vector<std::string>& vertices) {
    std::string header = "# vertices: ";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i > 0) header += ',';
        header += vertices[i];
    }
    header += '\n';
    return header;
}

}  // namespace

void write_dag(const Dag& g, const std::string& path) {
    std::string out = vertices_header(g.vertices());
    for (const auto& [p, c] : g.edges()) {
        out += g.name(p);
        out += '\t';
        out += g.name(c);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_cpdag(const Cpdag& g, const std::string& path) {
    std::string out = vertices_header(g.vertices());
    for (const auto& [p, c] : g.directed_edges()) {
        out += g.vertices()[static_cast<std::size_t>(p)];
        out += '\t';
        out += g.vertices()[static_cast<std::size_t>(c)];
        out += '\n';
    }
    for (const auto& [a, b] : g.undirected_edges()) {
        out += g.vertices()[static_cast<std::size_t>(a)];
        out += "\t--\t";
        out += g.vertices()[static_cast<std::size_t>(b)];
        out += '\n';
    }
    write_text_file(path, out);
}

Cpdag read_cpdag(const std::string& path) {
    const EdgeListFile parsed = parse_edge_list(path, read_text_file(path));
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    for (const auto& [p, c] : parsed.directed) {
        directed.emplace_back(named_index(parsed.vertices, p, path),
                              named_index(parsed.vertices, c, path));
    }
    for (const auto& [a, b] : parsed.undirected) {
        undirected.emplace_back(named_index(parsed.vertices, a, path),
                                named_index(parsed.vertices, b, path));
    }
    return Cpdag(parsed.vertices, std::move(directed), std::move(undirected));
}

AnyScm read_scm(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
    if (doc.contains("chain_kind")) {
        const auto kind = chain_kind_from_string(doc["chain_kind"].get<std::string>());
        const auto seed = doc.value("mechanism_seed", std::uint64_t{0});
        const double coefficient = doc.value("coefficient", 1.0);
        const double noise_scale = doc.value("noise_scale", 0.5);
        return make_chain_scm(kind, seed, coefficient, noise_scale);
    }
    if (!doc.contains("dag")) {
        throw Error(ErrorKind::ParseError, path + ": missing 'dag' object");
    }
    Dag dag = dag_from_json(doc["dag"], path);
    std::map<Edge, double> weights;
    for (const auto& entry : doc.value("coefficients", json::array())) {
        if (!entry.is_array() || entry.size() != 3) {
            throw Error(ErrorKind::ParseError,
                        path + ": coefficients must be [parent, child, weight] triples");
        }
        const int p = entry[0].is_number_integer() ? entry[0].get<int>()
                                                   : dag.index_of(entry[0].get<std::string>());
        const int c = entry[1].is_number_integer() ? entry[1].get<int>()
                                                   : dag.index_of(entry[1].get<std::string>());
        weights[{p, c}] = entry[2].get<double>();
    }
    std::vector<NoiseSpec> noise;
    if (!doc.contains("noise") || !doc["noise"].is_object()) {
        throw Error(ErrorKind::ParseError, path + ": missing 'noise' object keyed by vertex");
    }
    for (int v = 0; v < dag.n_vertices(); ++v) {
        const auto it = doc["noise"].find(dag.name(v));
        if (it == doc["noise"].end()) {
            throw Error(ErrorKind::ParseError,
                        path + ": no noise spec for vertex '" + dag.name(v) + "'");
        }
        const std::string family = it->value("family", "gaussian");
        if (family == "gaussian") {
            noise.push_back(NoiseSpec::gaussian(it->value("sigma", 1.0)));
        } else if (family == "uniform") {
            noise.push_back(NoiseSpec::uniform(it->value("half_width", 1.0)));
        } else {
            throw Error(ErrorKind::ParseError, path + ": unknown noise family '" + family + "'");
        }
    }
    return LinearScm(std::move(dag), weights, std::move(noise));
}

void write_scm(const LinearScm& scm, const std::string& path) {
    json doc;
    doc["dag"]["vertices"] = scm.dag().vertices();
    json edges = json::array();
    json coefficients = json::array();
    for (const auto& [p, c] : scm.dag().edges()) {
        edges.push_back({scm.dag().name(p), scm.dag().name(c)});
        coefficients.push_back({scm.dag().name(p), scm.dag().name(c), scm.weight(p, c)});
    }
    doc["dag"]["edges"] = edges;
    doc["coefficients"] = coefficients;
    json noise = json::object();
    for (int v = 0; v < scm.dag().n_vertices(); ++v) {
        const NoiseSpec& spec = scm.noise()[static_cast<std::size_t>(v)];
        if (spec.family == NoiseSpec::Family::Gaussian) {
            noise[scm.dag().name(v)] = {{"family", "gaussian"}, {"sigma", spec.scale}};
        } else {
            noise[scm.dag().name(v)] = {{"family", "uniform"}, {"half_width", spec.scale}};
        }
    }
    doc["noise"] = noise;
    write_text_file(path, doc.dump(2) + "\n");
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& names,
                      const std::string& path) {
    std::ostringstream out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c > 0) out << ',';
        out << names[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    const Dataset data = read_csv(path);
    return data.values;
}

}  // namespace crb
