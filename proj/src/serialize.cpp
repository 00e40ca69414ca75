#include "sqisw/serialize.hpp"

namespace sqisw {

using nlohmann::json;

namespace {

void require_keys(const json& j, const char* what,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw config_error(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok)
            throw config_error(std::string(what) + ": unknown key \"" + item.key() + "\"");
    }
    for (const char* k : allowed)
        if (!j.contains(k))
            throw config_error(std::string(what) + ": missing key \"" + k + "\"");
}

} // namespace

json matrix_to_json(const CMat& m, const std::string& basis) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rrow = json::array();
        json irow = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rrow.push_back(std::real(m(i, j)));
            irow.push_back(std::imag(m(i, j)));
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return {{"dim", m.rows()}, {"basis", basis}, {"re", std::move(re)}, {"im", std::move(im)}};
}

LabelledMatrix matrix_from_json(const json& j) {
    require_keys(j, "matrix", {"dim", "basis", "re", "im"});
    const auto dim = j.at("dim").get<Eigen::Index>();
    if (dim <= 0) throw config_error("matrix: dim must be positive");
    LabelledMatrix out;
    out.basis = j.at("basis").get<std::string>();
    out.mat.resize(dim, dim);
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (static_cast<Eigen::Index>(re.size()) != dim || static_cast<Eigen::Index>(im.size()) != dim)
        throw config_error("matrix: row count does not match dim");
    for (Eigen::Index i = 0; i < dim; ++i) {
        const json& rrow = re.at(i);
        const json& irow = im.at(i);
        if (static_cast<Eigen::Index>(rrow.size()) != dim ||
            static_cast<Eigen::Index>(irow.size()) != dim)
            throw config_error("matrix: column count does not match dim");
        for (Eigen::Index k = 0; k < dim; ++k)
            out.mat(i, k) = Complex(rrow.at(k).get<double>(), irow.at(k).get<double>());
    }
    return out;
}

json chi_to_json(const ChiMatrix& chi) { return matrix_to_json(chi.mat, chi.basis); }

ChiMatrix chi_from_json(const json& j) {
    LabelledMatrix m = matrix_from_json(j);
    if (m.mat.rows() != 16) throw config_error("chi: expected a 16x16 matrix");
    return {std::move(m.mat), std::move(m.basis)};
}

json density_to_json(const CMat& rho) { return matrix_to_json(rho, kRhoBasis); }

CMat density_from_json(const json& j) {
    LabelledMatrix m = matrix_from_json(j);
    if (m.mat.rows() != 4) throw config_error("density matrix: expected a 4x4 matrix");
    if (m.basis != kRhoBasis) throw config_error("density matrix: unexpected basis tag");
    return std::move(m.mat);
}

json shot_record_to_json(const ShotRecord& r) {
    return {{"n00", r.n00}, {"n01", r.n01}, {"n10", r.n10}, {"n11", r.n11},
            {"shots", r.shots}, {"setting", r.setting}};
}

ShotRecord shot_record_from_json(const json& j) {
    require_keys(j, "shot record", {"n00", "n01", "n10", "n11", "shots", "setting"});
    ShotRecord r;
    r.n00 = j.at("n00").get<std::uint64_t>();
    r.n01 = j.at("n01").get<std::uint64_t>();
    r.n10 = j.at("n10").get<std::uint64_t>();
    r.n11 = j.at("n11").get<std::uint64_t>();
    r.shots = j.at("shots").get<std::uint64_t>();
    r.setting = j.at("setting").get<std::string>();
    if (r.n00 + r.n01 + r.n10 + r.n11 != r.shots)
        throw config_error("shot record: counts do not sum to shots");
    return r;
}

json measurement_model_to_json(const MeasurementModel& m) {
    return {{"f0a", m.f0a}, {"f1a", m.f1a}, {"f0b", m.f0b}, {"f1b", m.f1b},
            {"xab", m.xab}, {"xba", m.xba}};
}

MeasurementModel measurement_model_from_json(const json& j) {
    require_keys(j, "measurement", {"f0a", "f1a", "f0b", "f1b", "xab", "xba"});
    MeasurementModel m;
    m.f0a = j.at("f0a").get<double>();
    m.f1a = j.at("f1a").get<double>();
    m.f0b = j.at("f0b").get<double>();
    m.f1b = j.at("f1b").get<double>();
    m.xab = j.at("xab").get<double>();
    m.xba = j.at("xba").get<double>();
    m.validate();
    return m;
}

} // namespace sqisw
