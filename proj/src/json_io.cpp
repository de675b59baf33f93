#include "loophole/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace loophole {

nlohmann::json distribution_to_json(const Distribution& p) {
    const Scenario& sc = p.scenario();
    nlohmann::json j;
    j["scenario"] = {{"mA", sc.mA}, {"mB", sc.mB}, {"nA", sc.nA}, {"nB", sc.nB}};
    auto& table = j["table"] = nlohmann::json::array();
    for (const Rational& v : p.table()) table.push_back(v.str());
    return j;
}

Distribution distribution_from_json(const nlohmann::json& j) {
    if (!j.contains("scenario") || !j.contains("table"))
        throw std::invalid_argument("distribution: missing scenario or table");
    const auto& s = j.at("scenario");
    const Scenario sc(s.at("mA").get<int>(), s.at("mB").get<int>(), s.at("nA").get<int>(),
                      s.at("nB").get<int>());
    const auto& table = j.at("table");
    if (!table.is_array() || table.size() != sc.table_size())
        throw std::invalid_argument("distribution: table length mismatch");
    std::vector<Rational> t;
    t.reserve(table.size());
    for (const auto& e : table) t.push_back(Rational::parse(e.get<std::string>()));
    return Distribution(sc, std::move(t));
}

Distribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return distribution_from_json(j);
}

void save_distribution(const Distribution& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << distribution_to_json(p).dump(2) << "\n";
}

}  // namespace loophole
