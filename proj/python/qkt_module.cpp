#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkt/calibrate.hpp"
#include "qkt/cb.hpp"
#include "qkt/config.hpp"
#include "qkt/decompose.hpp"
#include "qkt/parallel.hpp"
#include "qkt/randomu.hpp"
#include "qkt/synthesis.hpp"
#include "qkt/tomography.hpp"
#include "qkt/xeb.hpp"

namespace py = pybind11;
using namespace qkt;

namespace {

Backend make_backend(double twoq_depol_p, double oneq_depol_p, double twoq_overrotation) {
    json noise;
    noise["twoq_depol_p"] = twoq_depol_p;
    noise["oneq_depol_p"] = oneq_depol_p;
    if (twoq_overrotation != 0.0) noise["twoq_overrotation"] = twoq_overrotation;
    Backend b;
    b.noise = config::parse_noise(noise, "backend");
    return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-qutrit cross-Kerr gate simulation, calibration and benchmarking";

    m.def("set_threads", &set_default_threads, py::arg("n"));

    // ---- algebra ----------------------------------------------------------
    py::class_<WeylLabel>(m, "WeylLabel")
        .def(py::init<std::vector<int>, std::vector<int>>(), py::arg("x"), py::arg("z"))
        .def_readonly("x", &WeylLabel::x)
        .def_readonly("z", &WeylLabel::z)
        .def("index", &WeylLabel::index)
        .def_static("from_index", &WeylLabel::from_index, py::arg("index"), py::arg("n"))
        .def("is_identity", &WeylLabel::is_identity)
        .def("__eq__", [](const WeylLabel& a, const WeylLabel& b) { return a == b; })
        .def("__repr__", [](const WeylLabel& l) {
            std::string s = "WeylLabel(x=[";
            for (int v : l.x) s += std::to_string(v) + ",";
            s += "], z=[";
            for (int v : l.z) s += std::to_string(v) + ",";
            return s + "])";
        });

    m.def("weyl_matrix", &weyl_matrix, py::arg("label"));
    m.def("weyl_character", &weyl_character, py::arg("v"), py::arg("w"));
    m.def("gellmann_matrix", &gellmann_matrix, py::arg("index"));
    m.def("unitary_to_ptm", &unitary_to_ptm, py::arg("u"));
    m.def(
        "depolarizing_ptm",
        [](double p, int dim) { return channel_to_ptm(Channel::depolarizing(p, dim)); },
        py::arg("p"), py::arg("dim") = 9);
    m.def(
        "is_clifford",
        [](const Mat& u) -> py::object {
            const auto a = is_clifford(u);
            if (!a) return py::none();
            return py::cast(a->perm);
        },
        py::arg("u"));

    // ---- gates and circuits ------------------------------------------------
    m.def("native_gate", [](const std::string& name) {
        return native_gate_matrix(gate_kind_from_name(name));
    });
    m.def("su3_matrix", &su3_matrix, py::arg("theta8"));
    m.def(
        "decompose_su3",
        [](const Mat& u) {
            std::vector<std::pair<std::string, std::vector<double>>> out;
            for (const auto& g : decompose_su3(u)) out.emplace_back(gate_kind_name(g.kind), g.params);
            return out;
        },
        py::arg("u"));

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<int>(), py::arg("n_qutrits"))
        .def_readwrite("seed", &Circuit::seed)
        .def_readwrite("label", &Circuit::label)
        .def("add_gate",
             [](Circuit& c, const std::string& kind, std::vector<int> targets,
                std::vector<double> params) {
                 c.add(Gate{gate_kind_from_name(kind), std::move(targets), std::move(params)});
                 return &c;
             },
             py::arg("kind"), py::arg("targets"), py::arg("params") = std::vector<double>{},
             py::return_value_policy::reference_internal)
        .def("add_custom",
             [](Circuit& c, std::vector<int> targets, const Mat& u) {
                 c.add(Gate::custom(std::move(targets), u));
                 return &c;
             },
             py::arg("targets"), py::arg("u"), py::return_value_policy::reference_internal)
        .def("unitary", &Circuit::unitary)
        .def("to_json", &Circuit::to_json)
        .def_static("from_json", &Circuit::from_json)
        .def("__len__", [](const Circuit& c) { return c.ops.size(); });

    m.def(
        "run_statevector",
        [](const Circuit& c, std::vector<int> initial) {
            return run(c, basis_state(c.n_qutrits, initial));
        },
        py::arg("circuit"), py::arg("initial"));
    m.def(
        "sample",
        [](const Circuit& c, int shots, std::uint64_t seed, double twoq_depol_p,
           double oneq_depol_p, double twoq_overrotation) {
            Rng rng(seed);
            return make_backend(twoq_depol_p, oneq_depol_p, twoq_overrotation)
                .sample(c, shots, rng);
        },
        py::arg("circuit"), py::arg("shots"), py::arg("seed") = 1, py::arg("twoq_depol_p") = 1.0,
        py::arg("oneq_depol_p") = 1.0, py::arg("twoq_overrotation") = 0.0);
    m.def(
        "haar_su3",
        [](std::uint64_t seed) {
            Rng rng(seed);
            return haar_su3(rng);
        },
        py::arg("seed"));
    m.def(
        "haar_su9",
        [](std::uint64_t seed) {
            Rng rng(seed);
            return haar_su9(rng);
        },
        py::arg("seed"));
    m.def(
        "random_clifford2",
        [](std::uint64_t seed) {
            Rng rng(seed);
            return random_clifford2(rng).unitary;
        },
        py::arg("seed"));

    // ---- device and physics -------------------------------------------------
    py::class_<DeviceParams>(m, "DeviceParams")
        .def_static("preset", &DeviceParams::preset, py::arg("name"))
        .def_static("from_json", &DeviceParams::from_json)
        .def("to_json", &DeviceParams::to_json)
        .def_readwrite("omega_c", &DeviceParams::omega_c)
        .def_readwrite("omega_t", &DeviceParams::omega_t)
        .def_readwrite("eta_c", &DeviceParams::eta_c)
        .def_readwrite("eta_t", &DeviceParams::eta_t)
        .def_readwrite("j_coupling", &DeviceParams::j_coupling)
        .def_readwrite("d_trunc", &DeviceParams::d_trunc)
        .def_property_readonly("omega12_c", &DeviceParams::omega12_c)
        .def_property_readonly("omega12_t", &DeviceParams::omega12_t);

    py::class_<DriveParams>(m, "DriveParams")
        .def(py::init<>())
        .def_readwrite("omega_d", &DriveParams::omega_d)
        .def_readwrite("amp_c", &DriveParams::amp_c)
        .def_readwrite("amp_t", &DriveParams::amp_t)
        .def_readwrite("phi", &DriveParams::phi);

    py::class_<AlphaRates>(m, "AlphaRates")
        .def_readonly("a11", &AlphaRates::a11)
        .def_readonly("a12", &AlphaRates::a12)
        .def_readonly("a21", &AlphaRates::a21)
        .def_readonly("a22", &AlphaRates::a22)
        .def("__repr__", [](const AlphaRates& a) {
            return "AlphaRates(a11=" + std::to_string(a.a11) + ", a12=" + std::to_string(a.a12) +
                   ", a21=" + std::to_string(a.a21) + ", a22=" + std::to_string(a.a22) + ")";
        });

    m.def("rwa_hamiltonian", &rwa_hamiltonian, py::arg("device"), py::arg("drive"));
    m.def("alpha_static", &alpha_static, py::arg("device"));
    m.def("alpha_driven", &alpha_driven, py::arg("device"), py::arg("drive"));

    py::class_<PulseSchedule>(m, "PulseSchedule")
        .def_static("echoed", &PulseSchedule::echoed, py::arg("drive"), py::arg("tau"),
                    py::arg("ramp") = 20e-9)
        .def_static("from_json", &PulseSchedule::from_json)
        .def("to_json", &PulseSchedule::to_json)
        .def("total_time", &PulseSchedule::total_time);

    m.def(
        "propagate_unitary",
        [](const DeviceParams& dev, const PulseSchedule& sched, int steps_per_ramp) {
            PropagateOptions opts;
            opts.steps_per_ramp = steps_per_ramp;
            opts.richardson_check = false;
            return propagate(dev, sched, opts).unitary;
        },
        py::arg("device"), py::arg("schedule"), py::arg("steps_per_ramp") = 384);
    m.def("extract_entangling_phases", &extract_entangling_phases, py::arg("u"),
          py::arg("offdiag_tol") = 1e-2);

    py::class_<CalibrationReport>(m, "CalibrationReport")
        .def_readonly("fidelity", &CalibrationReport::fidelity)
        .def_readonly("gate_time", &CalibrationReport::gate_time)
        .def_readonly("leakage", &CalibrationReport::leakage)
        .def_readonly("converged", &CalibrationReport::converged)
        .def_readonly("schedule", &CalibrationReport::schedule);
    m.def(
        "calibrate_gate",
        [](const DeviceParams& dev, const std::string& target) {
            return calibrate_gate(dev, config::parse_target_name(target));
        },
        py::arg("device"), py::arg("target"));

    // ---- benchmarking -------------------------------------------------------
    m.def(
        "run_cb",
        [](const std::string& cycle, std::vector<int> depths, int n_channels, int n_rand,
           int shots, std::uint64_t seed, double twoq_depol_p, double twoq_overrotation) {
            cb::CBConfig cfg;
            cfg.cycle = config::named_circuit(cycle == "ref" ? "identity" : cycle);
            cfg.depths = std::move(depths);
            cfg.channels =
                (n_channels >= 80) ? cb::all_channels() : cb::channel_subset(n_channels, 0x80u);
            cfg.n_randomizations = n_rand;
            cfg.shots = shots;
            Rng rng(seed);
            const auto res =
                cb::run_cb(cfg, make_backend(twoq_depol_p, 1.0, twoq_overrotation), rng);
            py::dict out;
            out["composite_fidelity"] = res.composite_fidelity;
            out["composite_stderr"] = res.composite_stderr;
            std::vector<double> decays;
            for (const auto& r : res.records) decays.push_back(r.decay);
            out["decays"] = decays;
            try {
                out["unitarity"] = cb::unitarity_from_cb_variance(res).u;
            } catch (const std::exception&) {
                out["unitarity"] = py::none();
            }
            return out;
        },
        py::arg("cycle") = "czdag", py::arg("depths") = std::vector<int>{0, 4, 8},
        py::arg("n_channels") = 80, py::arg("n_rand") = 30, py::arg("shots") = 2048,
        py::arg("seed") = 1, py::arg("twoq_depol_p") = 1.0, py::arg("twoq_overrotation") = 0.0);

    m.def("isolate_gate_error", &cb::isolate_gate_error, py::arg("f_dressed"), py::arg("f_ref"));

    m.def(
        "run_xeb",
        [](const std::string& gate, std::vector<int> depths, int n_random, int shots,
           std::uint64_t seed, double twoq_depol_p, double twoq_overrotation) {
            xeb::XEBConfig cfg;
            cfg.gate = config::parse_gate_name(gate);
            cfg.depths = std::move(depths);
            cfg.n_random = n_random;
            cfg.shots = shots;
            Rng rng(seed);
            const auto res =
                xeb::run_xeb(cfg, make_backend(twoq_depol_p, 1.0, twoq_overrotation), rng);
            py::dict out;
            out["cycle_fidelity"] = res.cycle_fidelity;
            out["purity_limit"] = res.purity_limit;
            out["fidelity_per_depth"] = res.fidelity_per_depth;
            return out;
        },
        py::arg("gate") = "czdag", py::arg("depths") = std::vector<int>{2, 5, 10, 15},
        py::arg("n_random") = 30, py::arg("shots") = 4096, py::arg("seed") = 1,
        py::arg("twoq_depol_p") = 1.0, py::arg("twoq_overrotation") = 0.0);

    m.def("f_xeb", &xeb::f_xeb, py::arg("p_ideal"), py::arg("q_measured"));
    m.def("linear_cross_entropy", &xeb::linear_cross_entropy, py::arg("p1"), py::arg("p2"));
    m.def("speckle_purity", &xeb::speckle_purity, py::arg("probs"), py::arg("shots") = 0);

    // ---- tomography -----------------------------------------------------------
    m.def(
        "state_tomography",
        [](const Circuit& prep, int shots, std::uint64_t seed, double twoq_depol_p) {
            Rng rng(seed);
            const auto rec =
                tomo::state_tomography(prep, make_backend(twoq_depol_p, 1.0, 0.0), shots, rng);
            py::dict out;
            out["estimate"] = rec.estimate;
            out["converged"] = rec.converged;
            out["iterations"] = rec.iterations;
            return out;
        },
        py::arg("prep"), py::arg("shots") = 2000, py::arg("seed") = 1,
        py::arg("twoq_depol_p") = 1.0);
    m.def("state_fidelity", &tomo::state_fidelity, py::arg("rho"), py::arg("target"));
    m.def("process_fidelity", &tomo::process_fidelity, py::arg("e_exp"), py::arg("e_ideal"));

    // ---- synthesis -------------------------------------------------------------
    m.def(
        "synthesize",
        [](const Mat& target, const std::string& gate, int depth, int restarts, double tol,
           std::uint64_t seed) {
            Rng rng(seed);
            synth::SynthesisOptions opts;
            opts.restarts = restarts;
            opts.tol = tol;
            const auto res =
                synth::synthesize(target, config::parse_gate_name(gate), depth, rng, opts);
            py::dict out;
            out["achieved_infidelity"] = res.achieved_infidelity;
            out["converged"] = res.converged;
            out["restarts_used"] = res.restarts_used;
            out["best_params"] = res.best_params;
            return out;
        },
        py::arg("target"), py::arg("gate") = "cz", py::arg("depth") = 1, py::arg("restarts") = 50,
        py::arg("tol") = 1e-6, py::arg("seed") = 1);
    m.def(
        "ansatz_unitary",
        [](const std::string& gate, int depth, const std::vector<double>& params) {
            return synth::ansatz_unitary(synth::Ansatz{depth, config::parse_gate_name(gate)},
                                         params);
        },
        py::arg("gate"), py::arg("depth"), py::arg("params"));
}
