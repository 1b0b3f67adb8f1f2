#include "ibrt/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ibrt/error.hpp"

namespace ibrt {

using nlohmann::json;

IBProblem parse_problem_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("problem JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("p_x") || !doc.contains("p_y_given_x"))
        throw InputError("problem JSON must be an object with keys p_x and p_y_given_x");
    try {
        Vector px = doc.at("p_x").get<Vector>();
        auto rows = doc.at("p_y_given_x").get<std::vector<Vector>>();
        return IBProblem::make(Matrix::from_rows(rows), std::move(px));
    } catch (const json::exception& e) {
        throw InputError(std::string("problem JSON has the wrong shape: ") + e.what());
    }
}

IBProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem_json(buf.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string problem_to_json(const IBProblem& prob) {
    json doc;
    doc["p_x"] = prob.p_x();
    std::vector<Vector> rows;
    for (std::size_t y = 0; y < prob.ny(); ++y) rows.push_back(prob.p_y_given_x().row(y));
    doc["p_y_given_x"] = rows;
    return doc.dump();
}

}  // namespace ibrt
