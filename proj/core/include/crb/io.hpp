#ifndef CRB_IO_HPP
#define CRB_IO_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <variant>

#include "crb/dataset.hpp"
#include "crb/graph.hpp"
#include "crb/scm.hpp"

namespace crb {

// Numbers serialize with 17 significant digits so round-trips are lossless.
std::string format_double(double value);

// CSV with a header row of column names, decimal-point floats, no index
// column.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);
void write_csv(const Dataset& data, std::ostream& out);

// Plain-text edge list, one parent<TAB>child pair per line, preceded by a
// `# vertices: name1,name2,...` header declaring isolated vertices and
// column order. A JSON object {"vertices": [...], "edges": [[p, c], ...]}
// with names or indices as endpoints is accepted as well.
Dag read_dag(const std::string& path);
void write_dag(const Dag& g, const std::string& path);

// Same edge-list format; undirected pairs carry a `--` marker column.
void write_cpdag(const Cpdag& g, const std::string& path);
Cpdag read_cpdag(const std::string& path);

// JSON with the graph plus either explicit edge coefficients and noise specs
// or a chain mechanism kind with its seed.
using AnyScm = std::variant<LinearScm, MechanismScm>;
AnyScm read_scm(const std::string& path);
void write_scm(const LinearScm& scm, const std::string& path);

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& names,
                      const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace crb

#endif
