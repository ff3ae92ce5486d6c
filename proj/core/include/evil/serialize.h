#ifndef EVIL_SERIALIZE_H_
#define EVIL_SERIALIZE_H_

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace evil {

// Parameter files are JSON objects:
//   {"format": "evil-params", "version": 1, "type": "<model type>", ...}
inline constexpr int kParamFormatVersion = 1;

nlohmann::json param_header(const std::string& type);
// Validates format/version/type; throws std::runtime_error on mismatch.
void check_param_header(const nlohmann::json& j, const std::string& type);

std::vector<double> to_vector(const Eigen::VectorXd& v);
Eigen::VectorXd to_eigen(const std::vector<double>& v);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace evil

#endif  // EVIL_SERIALIZE_H_
