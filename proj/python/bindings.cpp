#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hankelrec/bench.hpp"
#include "hankelrec/hankel_core.hpp"
#include "hankelrec/nd_hankel.hpp"
#include "hankelrec/solvers.hpp"
#include "hankelrec/spectral_signal.hpp"
#include "hankelrec/structured_lowrank.hpp"

namespace py = pybind11;
using namespace hankelrec;

namespace {

SampleSet make_sample_set(Index n, std::vector<Index> indices, const std::string& mode) {
    SampleSet s;
    s.n = n;
    s.indices = std::move(indices);
    s.mode = sampling_mode_from_string(mode);
    s.validate();
    return s;
}

// Full-length vector with the observed values at the sample positions.
CVec scatter(const CVec& values, const SampleSet& omega) {
    if (values.size() != omega.n && values.size() != omega.size()) {
        throw ArgumentError("observed values must have length n or len(indices)");
    }
    CVec out = CVec::Zero(omega.n);
    for (Index k = 0; k < omega.size(); ++k) {
        const Index a = omega.indices[static_cast<std::size_t>(k)];
        out[a] = values.size() == omega.n ? values[a] : values[k];
    }
    return out;
}

SolverConfig make_config(Index r, Index max_iters, double tol_res, double tol_step, const std::string& init,
                         Index resample_rounds, std::optional<double> mu, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.r = r;
    cfg.max_iters = max_iters;
    cfg.tol_residual = tol_res;
    cfg.tol_step = tol_step;
    cfg.init = init_kind_from_string(init);
    cfg.resample_rounds = resample_rounds;
    cfg.mu = mu;
    cfg.seed = seed;
    return cfg;
}

py::dict result_dict(const SolveResult& res) {
    py::list residual, step;
    for (const auto& t : res.trace) {
        residual.append(t.residual);
        step.append(t.step);
    }
    py::dict d;
    d["x_rec"] = res.x_rec;
    d["iterations"] = res.iterations;
    d["converged"] = res.converged;
    d["reason"] = res.reason;
    d["residual"] = residual;
    d["step"] = step;
    return d;
}

} // namespace

PYBIND11_MODULE(_hankelrec, m) {
    m.doc() = "Low-rank Hankel completion of spectrally sparse signals";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<OracleScaleError>(m, "OracleScaleError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

    py::class_<HankelShape>(m, "HankelShape")
        .def_readonly("n", &HankelShape::n)
        .def_readonly("n1", &HankelShape::n1)
        .def_readonly("n2", &HankelShape::n2)
        .def_readonly("weights", &HankelShape::weights)
        .def_readonly("c_s", &HankelShape::c_s)
        .def("__repr__", [](const HankelShape& s) {
            return "HankelShape(n=" + std::to_string(s.n) + ", n1=" + std::to_string(s.n1) +
                   ", n2=" + std::to_string(s.n2) + ")";
        });
    m.def("make_shape", &make_shape, py::arg("n"), py::arg("n1") = py::none());

    m.def("hankel_dense", &hankel_dense, py::arg("z"), py::arg("shape"));
    m.def("hankel_adjoint_dense", &hankel_adjoint_dense, py::arg("Z"), py::arg("shape"));
    m.def("hankel_matvec", &hankel_matvec, py::arg("z"), py::arg("v"), py::arg("shape"));
    m.def("hankel_matvec_adjoint", &hankel_matvec_adjoint, py::arg("z"), py::arg("u"), py::arg("shape"));
    m.def("adjoint_rank_one", &adjoint_rank_one, py::arg("u"), py::arg("v"), py::arg("shape"));
    m.def(
        "pseudo_inverse",
        [](const CMat& U, const RVec& sigma, const CMat& V, const HankelShape& shape) {
            return apply_pseudo_inverse({U, sigma, V}, shape);
        },
        py::arg("U"), py::arg("sigma"), py::arg("V"), py::arg("shape"),
        "Signal whose lift is closest to U diag(sigma) V^* in the Frobenius norm.");
    m.def(
        "partial_svd",
        [](const CVec& z, Index r) {
            const LowRankFactor L = partial_svd_hankel(Hankel1d(make_shape(z.size())), z, r);
            return py::make_tuple(L.U, L.sigma, L.V);
        },
        py::arg("z"), py::arg("r"), "Leading r singular triplets of the lift of z.");

    m.def(
        "generate_signal",
        [](Index n, Index r, double min_separation, std::array<double, 2> damping, std::uint64_t seed) {
            SignalGenConfig cfg;
            cfg.n = n;
            cfg.r = r;
            cfg.min_separation = min_separation;
            cfg.damping_range = damping;
            cfg.seed = seed;
            const SpectralSignal sig = generate_signal(cfg);
            py::list modes;
            for (const auto& md : sig.modes) {
                modes.append(py::make_tuple(md.f, md.tau, md.d));
            }
            return py::make_tuple(sig.samples, modes);
        },
        py::arg("n"), py::arg("r"), py::arg("min_separation") = 0.0,
        py::arg("damping") = std::array<double, 2>{0.0, 0.0}, py::arg("seed") = 0,
        "Random r-mode signal; returns (samples, [(f, tau, d), ...]).");
    m.def(
        "make_signal",
        [](Index n, const std::vector<std::tuple<double, double, cplx>>& modes) {
            std::vector<Mode> list;
            for (const auto& [f, tau, d] : modes) {
                list.push_back({f, tau, d});
            }
            return make_signal(n, std::move(list)).samples;
        },
        py::arg("n"), py::arg("modes"));
    m.def(
        "sample_indices",
        [](Index n, Index count, const std::string& mode, std::uint64_t seed) {
            return sample_indices(n, count, sampling_mode_from_string(mode), seed).indices;
        },
        py::arg("n"), py::arg("m"), py::arg("mode") = "without", py::arg("seed") = 0);

    m.def(
        "solve",
        [](const CVec& observed, const std::vector<Index>& indices, Index n, Index r, const std::string& algo,
           const std::string& mode, Index max_iters, double tol_res, double tol_step, const std::string& init,
           Index resample_rounds, std::optional<double> mu, std::uint64_t seed) {
            const SampleSet omega = make_sample_set(n, indices, mode);
            const SolverConfig cfg = make_config(r, max_iters, tol_res, tol_step, init, resample_rounds, mu, seed);
            SolveResult res;
            {
                py::gil_scoped_release release;
                res = solve(algorithm_from_string(algo), Hankel1d(make_shape(n)), scatter(observed, omega), omega,
                            cfg);
            }
            return result_dict(res);
        },
        py::arg("observed"), py::arg("indices"), py::arg("n"), py::arg("r"), py::arg("algo") = "fiht",
        py::arg("mode") = "without", py::arg("max_iters") = 500, py::arg("tol_res") = 1e-4,
        py::arg("tol_step") = 1e-5, py::arg("init") = "onestep", py::arg("resample_rounds") = 0,
        py::arg("mu") = py::none(), py::arg("seed") = 0,
        "Completes a length-n signal from its values at `indices`.  `observed` holds either n entries or one "
        "value per index.");

    m.def(
        "nd_solve",
        [](const CVec& observed, const std::vector<Index>& indices, const std::vector<Index>& dims, Index r,
           Index max_iters, double tol_res, double tol_step, std::uint64_t seed) {
            const NdHankelShape shape = make_nd_shape(dims);
            const SampleSet omega = make_sample_set(shape.size(), indices, "without");
            const SolverConfig cfg = make_config(r, max_iters, tol_res, tol_step, "onestep", 0, std::nullopt, seed);
            SolveResult res;
            {
                py::gil_scoped_release release;
                res = nd_fiht_solve(scatter(observed, omega), omega, shape, cfg);
            }
            return result_dict(res);
        },
        py::arg("observed"), py::arg("indices"), py::arg("dims"), py::arg("r"), py::arg("max_iters") = 500,
        py::arg("tol_res") = 1e-6, py::arg("tol_step") = 1e-8, py::arg("seed") = 0,
        "FIHT on a row-major flattened d-dimensional array.");
    m.def(
        "nd_hankel_dense", [](const CVec& X, const std::vector<Index>& dims) {
            return nd_hankel_dense(X, make_nd_shape(dims));
        },
        py::arg("X"), py::arg("dims"));
    m.def(
        "nd_generate_signal",
        [](const std::vector<Index>& dims, Index r, double min_separation_cells, std::uint64_t seed) {
            NdSignalGenConfig cfg;
            cfg.dims = dims;
            cfg.r = r;
            cfg.min_separation_cells = min_separation_cells;
            cfg.seed = seed;
            return generate_nd_signal(cfg).entries;
        },
        py::arg("dims"), py::arg("r"), py::arg("min_separation_cells") = 0.0, py::arg("seed") = 0,
        "Row-major flattened entries of a random r-mode d-dimensional signal.");

    m.def(
        "phase_cell",
        [](Index n, Index m_samples, Index r, Index trials, std::uint64_t seed, unsigned threads) {
            bench::ExperimentSpec spec = bench::default_spec(bench::ExperimentKind::phase);
            spec.n_values = {n};
            spec.m_values = {m_samples};
            spec.p_values.clear();
            spec.r_values = {r};
            spec.trials = trials;
            spec.seed = seed;
            spec.threads = threads;
            bench::Table t;
            {
                py::gil_scoped_release release;
                t = bench::run_phase(spec);
            }
            return t.front().success_rate;
        },
        py::arg("n"), py::arg("m"), py::arg("r"), py::arg("trials") = 10, py::arg("seed") = 1,
        py::arg("threads") = 1, "Success rate of one phase-transition cell.");
}
