#include "ofd/io.hpp"

#include <fstream>
#include <sstream>

namespace ofd
{

json to_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

json to_json(const Eigen::MatrixXd& M)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vector_from_json(const json& j)
{
    if (!j.is_array())
        throw ParseError("expected a JSON array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
            throw ParseError("expected a number at index " + std::to_string(i));
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_if_empty)
{
    if (!j.is_array())
        throw ParseError("expected a JSON array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0)
        return Eigen::MatrixXd(0, cols_if_empty);
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("ragged matrix row " + std::to_string(i));
        for (Eigen::Index k = 0; k < cols; ++k)
            M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return M;
}

json to_json(const HPolytope& P)
{
    json out;
    out["A"] = to_json(P.A);
    out["b"] = to_json(P.b);
    out["tags"] = P.tags;
    out["dim"] = P.dim();
    return out;
}

HPolytope polytope_from_json(const json& j)
{
    try
    {
        HPolytope P;
        const Eigen::Index dim = j.contains("dim") ? j.at("dim").get<Eigen::Index>() : 0;
        P.A = matrix_from_json(j.at("A"), dim);
        P.b = vector_from_json(j.at("b"));
        if (j.contains("tags"))
            P.tags = j.at("tags").get<std::vector<std::string>>();
        P.validate();
        return P;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("polytope: ") + e.what());
    }
}

std::string dump(const json& j, int indent)
{
    return j.dump(indent);
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::exception& e)
    {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
    write_text_file(path, dump(j) + "\n");
}

} // namespace ofd
