#pragma once

#include "ofd/market_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace ofd
{

using json = nlohmann::json;

class ParseError : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::MatrixXd& M);   // row-major nested arrays
Eigen::VectorXd vector_from_json(const json& j);
Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0);

json to_json(const HPolytope& P);
HPolytope polytope_from_json(const json& j);

// Doubles are written in the shortest form that parses back to the same
// bits, so every artifact round-trips exactly.
std::string dump(const json& j, int indent = 1);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace ofd
