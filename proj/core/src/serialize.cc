#include "evil/serialize.h"

#include <fstream>
#include <stdexcept>

namespace evil {

nlohmann::json param_header(const std::string& type) {
  return {{"format", "evil-params"}, {"version", kParamFormatVersion}, {"type", type}};
}

void check_param_header(const nlohmann::json& j, const std::string& type) {
  if (j.value("format", "") != "evil-params") throw std::runtime_error("not an evil-params file");
  if (j.value("version", 0) != kParamFormatVersion) {
    throw std::runtime_error("unsupported evil-params version " + std::to_string(j.value("version", 0)));
  }
  if (j.value("type", "") != type) {
    throw std::runtime_error("expected parameter type '" + type + "', got '" + j.value("type", "") + "'");
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

}  // namespace evil
