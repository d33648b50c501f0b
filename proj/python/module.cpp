#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vqclab/experiment.hpp"
#include "vqclab/targets.hpp"
#include "vqclab/verifier.hpp"

namespace py = pybind11;
using namespace vqc;
using nlohmann::json;

namespace {

// Python dicts cross the boundary as JSON text; the package wrapper does the dumps/loads.
NoiseSchedule noise_from(const std::string& text, int n, bool fumc) {
    return text.empty() ? NoiseSchedule::none() : parse_noise(json::parse(text), n, fumc);
}

double cost(CostKind k, const Matrix& u, const Matrix& v, const std::string& noise) {
    const int n = qubits_for_dim(u.rows());
    return evaluate_cost(k, as_sequence(u), as_sequence(v), noise_from(noise, n, is_fumc(k)), EvalMode::exact()).value;
}

std::string compile_json(const std::string& config, bool write) {
    const ExperimentConfig c = parse_experiment(json::parse(config));
    const CompileResult r = run_compile(c, write);
    return summary_json(c, r).dump();
}

std::string verify_json(const std::string& suite, const std::string& opts) {
    const VerifyResult r = run_verify(suite, opts.empty() ? json::object() : json::parse(opts));
    return r.report.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Noisy variational compiling: costs, noise models, training and verification";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<PauliString>(m, "PauliString")
        .def(py::init(&PauliString::parse), py::arg("text"))
        .def_property_readonly("num_qubits", &PauliString::num_qubits)
        .def_property_readonly("phase", &PauliString::phase)
        .def("dense", &PauliString::dense)
        .def("commutes_with", &PauliString::commutes_with)
        .def("__mul__", &pauli_mul)
        .def("__eq__", [](const PauliString& a, const PauliString& b) { return a == b; })
        .def("__str__", &PauliString::to_string)
        .def("__repr__", [](const PauliString& p) { return "PauliString('" + p.to_string() + "')"; });

    m.def("clifford_conjugate", &clifford_conjugate, py::arg("clifford"), py::arg("pauli"));

    m.def("toffoli", [] { return toffoli().unitary(); });
    m.def("qft", [](int n) { return qft(n).unitary(); }, py::arg("n"));
    m.def("w_state_prep", [] { return w_state_prep().unitary(); });

    for (CostKind k : {CostKind::hst, CostKind::lhst, CostKind::let, CostKind::llet}) {
        m.def((to_string(k) + "_cost").c_str(),
              [k](const Matrix& u, const Matrix& v, const std::string& noise) { return cost(k, u, v, noise); },
              py::arg("u"), py::arg("v"), py::arg("noise_json") = "");
    }
    m.def(
        "average_fidelity",
        [](const Matrix& u, const Matrix& v, std::size_t samples, std::uint64_t seed) {
            const auto f = average_fidelity(u, v, samples, seed);
            return py::make_tuple(f.mean, f.std_error);
        },
        py::arg("u"), py::arg("v"), py::arg("samples"), py::arg("seed") = 0);

    m.def("compile_json", &compile_json, py::arg("config"), py::arg("write") = false,
          py::call_guard<py::gil_scoped_release>());
    m.def("verify_json", &verify_json, py::arg("suite"), py::arg("options") = "",
          py::call_guard<py::gil_scoped_release>());
}
