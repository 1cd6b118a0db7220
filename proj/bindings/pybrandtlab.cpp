#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brandtlab/cache.hpp"

namespace py = pybind11;
using namespace brandtlab;

namespace {

Workspace& ws() {
    static Workspace instance;
    return instance;
}

LevelType level_of(long n1, long n2, long m) { return validate_level(n1, n2, m); }

std::string classset_json(long n1, long n2, long m) {
    const ClassSetData& cs = ws().class_set(level_of(n1, n2, m));
    return classset_to_json(cs).dump();
}

std::string mass_str(long n1, long n2, long m) {
    return rat_str(mass_formula(level_of(n1, n2, m)));
}

std::vector<std::vector<long>> brandt_py(long n1, long n2, long m, long index) {
    const ClassSetData& cs = ws().class_set(level_of(n1, n2, m));
    MatQ am = brandt_matrix(cs, index);
    std::vector<std::vector<long>> out(am.rows, std::vector<long>(am.cols));
    for (int i = 0; i < am.rows; ++i)
        for (int j = 0; j < am.cols; ++j) out[i][j] = to_long(to_int(am.at(i, j)));
    return out;
}

std::string class_map_json(long n1, long n2, long m, long d) {
    LevelType lt = level_of(n1, n2, m);
    ImagQuadField K = make_field(squarefree_part(Int(d)));
    return classmap_to_json(ws().map_for(lt, K)).dump();
}

std::string verify_json(long n1, long n2, long m, long d, long index) {
    LevelType lt = level_of(n1, n2, m);
    ImagQuadField K = make_field(squarefree_part(Int(d)));
    return report_to_json(verify_double_average(ws(), lt, K, index)).dump();
}

std::string eigensystems_json(long n1, long n2, long m, long hecke_max) {
    auto& systems = ws().systems_for(level_of(n1, n2, m), hecke_max);
    Json arr = Json::array();
    for (auto& es : systems) arr.push_back(eigensystem_to_json(es));
    return arr.dump();
}

std::string predicted_json(long n1, long n2, long m, long d) {
    LevelType lt = level_of(n1, n2, m);
    ImagQuadField K = make_field(squarefree_part(Int(d)));
    const ClassSetData& cs = ws().class_set(lt, K.D);
    auto& systems = ws().systems_for(lt);
    auto G = std::make_shared<ClassGroup>(class_group(K));
    auto chars = characters(*G);
    for (auto& ch : chars) ch.G = G;
    Json arr = Json::array();
    for (auto& es : systems) {
        if (es.is_eisenstein) continue;
        Json row;
        row["multiplicity"] = es.multiplicity;
        Json per_chi = Json::array();
        for (auto& ch : chars) {
            Json v;
            v["chi_order"] = ch.order();
            try {
                v["lvalue"] = symbolic_to_json(predicted_lvalue(ws(), cs, es, K, ch));
            } catch (const Error& e) {
                v["error"] = e.code();
            }
            per_chi.push_back(v);
        }
        row["values"] = per_chi;
        arr.push_back(row);
    }
    return arr.dump();
}

int kronecker_py(long a, long n) { return kronecker(Int(a), Int(n)); }

}  // namespace

PYBIND11_MODULE(_brandtlab, m) {
    m.doc() = "exact Brandt matrix periods and central L-value identities";
    m.def("mass", &mass_str, "mass of the special-order genus (as a fraction string)");
    m.def("classset", &classset_json, "class set summary as a JSON string");
    m.def("brandt", &brandt_py, "Brandt matrix entries as integers");
    m.def("class_map", &class_map_json, "ideal class map data as a JSON string");
    m.def("verify_double_average", &verify_json, "double-average identity report (JSON)");
    m.def("eigensystems", &eigensystems_json, py::arg("n1"), py::arg("n2"), py::arg("m"),
          py::arg("hecke_max") = 13, "eigensystem summaries (JSON)");
    m.def("predicted_lvalues", &predicted_json, "predicted central L-values (JSON)");
    m.def("kronecker", &kronecker_py);
    m.def("set_cache_dir", [](const std::string& dir) { ws().set_cache_dir(dir); });
}
