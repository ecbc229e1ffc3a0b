#ifndef NULLITY_IO_HPP
#define NULLITY_IO_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nullity/lie_metric.hpp"
#include "nullity/nullity_solver.hpp"
#include "nullity/splitting_flow.hpp"

namespace nullity::io {

using Json = nlohmann::ordered_json;

/// Malformed input document or flag value.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// {"dim": n, "brackets": [{"i":0,"j":1,"coeffs":[...]}], "metric": [[...]]}
LieMetricSpace<double> lie_from_json(const nlohmann::json& j);
Json lie_to_json(const LieMetricSpace<double>& space);

/// {"m": 4, "A": [[...]]}
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
Json matrix_doc(const Eigen::MatrixXd& a);

nlohmann::json read_json_file(const std::string& path);

Json to_json(const Eigen::MatrixXd& m);
Json to_json(const Eigen::VectorXd& v);
Json to_json(const NullityResult<double>& r);

/// Deterministic text form: fixed key order, floats as %.17g, two-space indent.
std::string dump(const Json& j);

/// "a:b:n", inclusive with n samples.
std::vector<double> parse_range(const std::string& s);
/// "x,y,z"
std::vector<double> parse_list(const std::string& s);
/// Rows separated by ';', entries by ','.
Eigen::MatrixXd parse_matrix(const std::string& s);

/// Named catalog entries: milnor:l1,l2,l3  heisenberg  conullity2:F
/// perrone:alpha  table:FAMILY:theta
LieMetricSpace<double> named_algebra(const std::string& name);

/// Header t,C_00,...,C_{k-1}{k-1},trC,detJ0[,KD]. Rows at singular times are
/// skipped and their t values returned.
std::vector<double> write_splitting_csv(std::ostream& os, const SplittingState<double>& state,
                                        const std::vector<double>& ts, std::optional<double> kd0);

}  // namespace nullity::io

#endif  // NULLITY_IO_HPP
