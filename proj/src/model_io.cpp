#include "mmlevy/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmlevy {

using nlohmann::json;

namespace {

json vec_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json mat_to_json(const Matrix& a) {
    json out = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

json density_to_json(const JumpDensity& d) {
    switch (d.kind()) {
        case DensityKind::none: return json{{"kind", "none"}};
        case DensityKind::exponential: {
            const auto& e = d.as_exponential();
            return json{{"kind", "exponential"}, {"rate", e.rate}, {"weight", e.weight}};
        }
        case DensityKind::phase_type: {
            const auto& p = d.as_phase_type();
            return json{{"kind", "phase_type"}, {"init", vec_to_json(p.init)}, {"gen", mat_to_json(p.gen)},
                        {"weight", p.weight}};
        }
    }
    return json{};
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

Vector vec_from_json(const json& j, const std::string& path, std::optional<Eigen::Index> len = std::nullopt) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    if (len && static_cast<Eigen::Index>(j.size()) != *len) {
        throw SchemaError(path, "expected " + std::to_string(*len) + " entries");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], idx(path, i));
    return v;
}

Matrix mat_from_json(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        throw SchemaError(path, "expected " + std::to_string(rows) + " rows");
    }
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = vec_from_json(j[i], idx(path, i), cols).transpose();
    }
    return a;
}

JumpDensity density_from_json(const json& j, const std::string& path) {
    const json& kind = field(j, "kind", path);
    if (!kind.is_string()) throw SchemaError(sub(path, "kind"), "expected a string");
    const auto k = kind.get<std::string>();
    try {
        if (k == "none") return JumpDensity::none();
        if (k == "exponential") {
            const double weight = j.contains("weight") ? number(j["weight"], sub(path, "weight")) : 1.0;
            return JumpDensity::exponential(number(field(j, "rate", path), sub(path, "rate")), weight);
        }
        if (k == "phase_type") {
            const Vector init = vec_from_json(field(j, "init", path), sub(path, "init"));
            const Matrix gen = mat_from_json(field(j, "gen", path), sub(path, "gen"), init.size(), init.size());
            const double weight = j.contains("weight") ? number(j["weight"], sub(path, "weight")) : 1.0;
            return JumpDensity::phase_type(init, gen, weight);
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(sub(path, "kind"), "unknown density kind '" + k + "'");
}

}  // namespace

std::string model_to_json(const MmLevyModel& m) {
    json j;
    j["n"] = m.n();
    j["a"] = vec_to_json(m.a);
    j["sigma2"] = vec_to_json(m.sigma2);
    j["Q"] = mat_to_json(m.Q);
    j["U0"] = mat_to_json(m.U0);
    json nu = json::array();
    for (const auto& d : m.nu) nu.push_back(density_to_json(d));
    j["nu"] = std::move(nu);
    json mu = json::array();
    for (const auto& row : m.mu) {
        json r = json::array();
        for (const auto& d : row) r.push_back(density_to_json(d));
        mu.push_back(std::move(r));
    }
    j["mu"] = std::move(mu);
    return j.dump(2) + "\n";
}

MmLevyModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("not valid JSON: ") + e.what());
    }
    const json& nj = field(j, "n", "");
    if (!nj.is_number_integer() || nj.get<long long>() < 1) throw SchemaError("n", "expected a positive integer");
    const auto n = static_cast<Eigen::Index>(nj.get<long long>());
    const auto un = static_cast<std::size_t>(n);

    Vector a = vec_from_json(field(j, "a", ""), "a", n);
    Vector sigma2 = vec_from_json(field(j, "sigma2", ""), "sigma2", n);
    Matrix q = mat_from_json(field(j, "Q", ""), "Q", n, n);

    const json& nuj = field(j, "nu", "");
    if (!nuj.is_array() || nuj.size() != un) throw SchemaError("nu", "expected " + std::to_string(n) + " densities");
    std::vector<JumpDensity> nu;
    for (std::size_t i = 0; i < un; ++i) nu.push_back(density_from_json(nuj[i], idx("nu", i)));

    std::optional<Matrix> u0;
    if (j.contains("U0")) u0 = mat_from_json(j["U0"], "U0", n, n);

    std::optional<DensityGrid> mu;
    if (j.contains("mu")) {
        const json& muj = j["mu"];
        if (!muj.is_array() || muj.size() != un) throw SchemaError("mu", "expected " + std::to_string(n) + " rows");
        DensityGrid grid(un);
        for (std::size_t i = 0; i < un; ++i) {
            const auto path = idx("mu", i);
            if (!muj[i].is_array() || muj[i].size() != un) {
                throw SchemaError(path, "expected " + std::to_string(n) + " densities");
            }
            for (std::size_t k = 0; k < un; ++k) grid[i].push_back(density_from_json(muj[i][k], idx(path, k)));
        }
        mu = std::move(grid);
    }
    return MmLevyModel(std::move(a), std::move(sigma2), std::move(q), std::move(nu), std::move(u0), std::move(mu));
}

MmLevyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return model_from_json(os.str());
}

void save_model(const std::filesystem::path& path, const MmLevyModel& m) {
    write_file_atomic(path, model_to_json(m));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mmlevy
