#include "brandtlab/cache.hpp"

#include <filesystem>
#include <fstream>

namespace brandtlab {

namespace {

Json lattice_to_json(const Lattice& L) {
    Json j;
    j["den"] = L.den.get_str();
    Json rows = Json::array();
    for (auto& r : L.rows) {
        Json row = Json::array();
        for (auto& x : r) row.push_back(x.get_str());
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

Lattice lattice_from_json(const Json& j) {
    Lattice L;
    L.den = Int(j.at("den").get<std::string>());
    for (auto& row : j.at("rows")) {
        VecZ r;
        for (auto& x : row) r.push_back(Int(x.get<std::string>()));
        L.rows.push_back(r);
    }
    return L;
}

}  // namespace

Json classset_to_json(const ClassSetData& cs) {
    Json j;
    j["schema"] = 1;
    j["key"] = {{"a", cs.A.a.get_str()},
                {"b", cs.A.b.get_str()},
                {"N1", cs.level.N1.get_str()},
                {"N2", cs.level.N2.get_str()},
                {"M", cs.level.M.get_str()}};
    j["ap_convention"] = "brandt_eigenvalue";
    j["mass"] = rat_str(cs.mass);
    j["coprime_modulus"] = cs.coprime_modulus.get_str();
    j["order"] = lattice_to_json(cs.O.L);
    Json classes = Json::array();
    for (int i = 0; i < cs.n(); ++i) {
        Json c;
        c["ideal"] = lattice_to_json(cs.ideals[i]);
        c["left_order"] = lattice_to_json(cs.left_orders[i].L);
        c["weight"] = cs.weights[i].get_str();
        c["norm"] = rat_str(cs.norms[i]);
        classes.push_back(c);
    }
    j["classes"] = classes;
    return j;
}

ClassSetData classset_from_json(const Json& j) {
    if (j.at("schema").get<int>() != 1) throw Error("Cache", "unknown cache schema");
    ClassSetData cs;
    Int a(j.at("key").at("a").get<std::string>());
    Int b(j.at("key").at("b").get<std::string>());
    cs.A = make_algebra(a, b);
    cs.level = validate_level(Int(j.at("key").at("N1").get<std::string>()),
                              Int(j.at("key").at("N2").get<std::string>()),
                              Int(j.at("key").at("M").get<std::string>()));
    cs.mass = rat_parse(j.at("mass").get<std::string>());
    cs.coprime_modulus = Int(j.at("coprime_modulus").get<std::string>());
    cs.O = make_order(cs.A, lattice_from_json(j.at("order")));
    for (auto& c : j.at("classes")) {
        cs.ideals.push_back(lattice_from_json(c.at("ideal")));
        cs.left_orders.push_back(make_order(cs.A, lattice_from_json(c.at("left_order"))));
        cs.weights.push_back(Int(c.at("weight").get<std::string>()));
        cs.norms.push_back(rat_parse(c.at("norm").get<std::string>()));
    }
    if (cs.mass != mass_formula(cs.level)) throw Error("Cache", "cached mass mismatch");
    return cs;
}

Json brandt_to_json(const Int& m, const MatQ& am) {
    Json j;
    j["schema"] = 1;
    j["m"] = m.get_str();
    Json rows = Json::array();
    for (int i = 0; i < am.rows; ++i) {
        Json row = Json::array();
        for (int c = 0; c < am.cols; ++c) row.push_back(rat_str(am.at(i, c)));
        rows.push_back(row);
    }
    j["entries"] = rows;
    return j;
}

Json classmap_to_json(const ClassMapData& cmd) {
    Json j;
    j["schema"] = 1;
    j["d"] = cmd.K.d.get_str();
    j["D_K"] = cmd.K.D.get_str();
    j["u_K"] = cmd.K.u;
    Json gen = Json::array();
    for (auto& x : q_vec(cmd.generator_image)) gen.push_back(rat_str(x));
    j["generator_image"] = gen;
    j["base_class"] = cmd.base_class;
    Json fib = Json::array();
    for (auto& h : cmd.fibers) fib.push_back(h.get_str());
    j["fibers"] = fib;
    j["images"] = cmd.images;
    return j;
}

Json eigensystem_to_json(const Eigensystem& es) {
    Json j;
    j["multiplicity"] = es.multiplicity;
    j["eisenstein"] = es.is_eisenstein;
    j["rational"] = es.rational;
    Json ev = Json::object();
    for (auto& [m, l] : es.eigenvalues) ev[std::to_string(m)] = rat_str(l);
    j["eigenvalues"] = ev;
    if (!es.rational) j["numeric_eigenvalues"] = es.numeric_eigenvalues;
    if (es.exact_level != 0) {
        j["exact_level"] = es.exact_level.get_str();
        Json lt = Json::object();
        for (auto& [p, t] : es.local_types) {
            const char* name = "";
            switch (t) {
                case LocalType::unram_steinberg: name = "unram-steinberg"; break;
                case LocalType::ram_steinberg: name = "ram-steinberg"; break;
                case LocalType::supercuspidal: name = "supercuspidal"; break;
                case LocalType::one_dim_db: name = "one-dim-at-DB"; break;
                case LocalType::eichler_new: name = "eichler-new"; break;
                case LocalType::eichler_old: name = "eichler-old"; break;
            }
            lt[std::to_string(p)] = name;
        }
        j["local_types"] = lt;
    }
    return j;
}

Json report_to_json(const VerificationReport& rep) {
    Json j;
    j["schema"] = 1;
    j["identity"] = rep.identity;
    j["inputs"] = rep.inputs;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["exact_match"] = rep.exact_match;
    j["tolerance"] = rat_str(rep.tolerance_used);
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

Json symbolic_to_json(const SymbolicLValue& v) {
    Json j;
    j["coeff"] = rat_str(v.coeff);
    j["disc"] = v.disc.get_str();
    j["unit"] = "pi^2*sqrt";
    return j;
}

std::string cache_file_name(const QuatAlgebra& A, const LevelType& lt) {
    return "classset_a" + A.a.get_str() + "_b" + A.b.get_str() + "_" + lt.N1.get_str() + "_" +
           lt.N2.get_str() + "_" + lt.M.get_str() + ".json";
}

std::string cache_file_name(const ClassSetData& cs) { return cache_file_name(cs.A, cs.level); }

bool load_classset(const std::string& dir, const QuatAlgebra& A, const LevelType& lt,
                   const Int& min_modulus, ClassSetData& out) {
    if (dir.empty()) return false;
    std::filesystem::path p = std::filesystem::path(dir) / cache_file_name(A, lt);
    std::ifstream in(p);
    if (!in) return false;
    try {
        Json j;
        in >> j;
        ClassSetData cs = classset_from_json(j);
        if (cs.coprime_modulus % min_modulus != 0) return false;
        out = std::move(cs);
        return true;
    } catch (...) {
        return false;
    }
}

void store_classset(const std::string& dir, const ClassSetData& cs) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::filesystem::path p = std::filesystem::path(dir) / cache_file_name(cs);
    std::ofstream out(p);
    out << classset_to_json(cs).dump(2) << "\n";
}

}  // namespace brandtlab
