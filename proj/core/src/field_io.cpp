#include "phkin/field_io.hpp"

#include "json.hpp"

namespace phkin {

using nlohmann::json;

std::string field_to_json(const SphericalField& field) {
    json j;
    j["params"] = {{"g", field.params.g},
                   {"n_c", field.params.n_c},
                   {"m", field.params.m},
                   {"k_b", field.params.k_b},
                   {"temperature", field.params.temperature}};
    j["l_max"] = field.l_max;
    j["r_nodes"] = field.r_nodes;
    j["r_weights"] = field.r_weights;
    json modes = json::array();
    for (const Mode& mode : field.modes) {
        std::vector<double> radial(mode.radial.data(),
                                   mode.radial.data() + mode.radial.size());
        modes.push_back(
            {{"ell", mode.ell}, {"m", mode.m_index}, {"radial", radial}});
    }
    j["modes"] = modes;
    return j.dump(2) + "\n";
}

SphericalField field_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("field_from_json: parse error: ") +
                               e.what());
    }
    try {
        SphericalField field;
        const json& p = j.at("params");
        field.params.g = p.at("g").get<double>();
        field.params.n_c = p.at("n_c").get<double>();
        field.params.m = p.at("m").get<double>();
        field.params.k_b = p.at("k_b").get<double>();
        field.params.temperature = p.at("temperature").get<double>();
        field.params.validate();
        field.l_max = j.at("l_max").get<int>();
        field.r_nodes = j.at("r_nodes").get<std::vector<double>>();
        field.r_weights = j.at("r_weights").get<std::vector<double>>();
        const int expected = (field.l_max + 1) * (field.l_max + 1);
        if (static_cast<int>(j.at("modes").size()) != expected)
            throw InvalidSpecError("field_from_json: wrong mode count");
        field.modes.resize(expected);
        for (const json& mj : j.at("modes")) {
            Mode mode;
            mode.ell = mj.at("ell").get<int>();
            mode.m_index = mj.at("m").get<int>();
            auto radial = mj.at("radial").get<std::vector<double>>();
            if (radial.size() != field.r_nodes.size())
                throw InvalidSpecError("field_from_json: radial length mismatch");
            mode.radial = Eigen::Map<const Eigen::VectorXd>(
                radial.data(), static_cast<long>(radial.size()));
            field.modes[field.mode_index(mode.ell, mode.m_index)] =
                std::move(mode);
        }
        return field;
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("field_from_json: bad field: ") +
                               e.what());
    }
}

}  // namespace phkin
