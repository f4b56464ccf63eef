#include <doctest.h>

#include <filesystem>

#include "hankelrec/io.hpp"
#include "support.hpp"

using namespace hankelrec;
using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "hankelrec_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("signal round trip") {
    const SpectralSignal sig = separated_signal(50, 3, 1);
    const fs::path p = scratch("signal.json");
    io::write_signal(p, sig);
    const SpectralSignal back = io::read_signal(p);
    CHECK(back.n == 50);
    CHECK(back.samples == sig.samples);
    REQUIRE(back.modes.size() == 3);
    CHECK(back.modes[1].f == sig.modes[1].f);
    CHECK(back.modes[1].d == sig.modes[1].d);
}

TEST_CASE("signal from modes only") {
    const SpectralSignal sig = io::signal_from_json(R"({"n": 8, "modes": [{"f": 0.25, "tau": 0, "d_re": 1, "d_im": 0}]})");
    CHECK(std::abs(sig.samples[1] - cplx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("sample set round trip and validation") {
    const SampleSet omega = sample_indices(40, 12, SamplingMode::with_replacement, 3);
    const SampleSet back = io::sample_set_from_json(io::sample_set_to_json(omega));
    CHECK(back.indices == omega.indices);
    CHECK(back.mode == SamplingMode::with_replacement);
    CHECK_THROWS_AS(io::sample_set_from_json(R"({"n": 4, "mode": "without", "indices": [0, 4]})"), IoError);
    CHECK_THROWS_AS(io::sample_set_from_json(R"({"n": 4, "mode": "without", "indices": [1, 1]})"), IoError);
    CHECK_THROWS_AS(io::sample_set_from_json(R"({"n": 4})"), IoError);
    CHECK_THROWS_AS(io::sample_set_from_json("not json"), IoError);
}

TEST_CASE("result round trip") {
    SolveResult res;
    res.x_rec = CVec::Ones(4);
    res.iterations = 2;
    res.converged = true;
    res.reason = "residual";
    res.trace.push_back({0.5, 0.1, 0.2, 1.5});
    res.trace.push_back({0.01, 0.001, std::nullopt, 1.0});
    const SolveResult back = io::result_from_json(io::result_to_json(res));
    CHECK(back.x_rec == res.x_rec);
    CHECK(back.iterations == 2);
    CHECK(back.converged);
    CHECK(back.reason == "residual");
    REQUIRE(back.trace.size() == 2);
    CHECK(back.trace[0].true_err.value() == 0.2);
    CHECK_FALSE(back.trace[1].true_err.has_value());
}

TEST_CASE("multi-dimensional signal round trips in both encodings") {
    NdSignalGenConfig cfg;
    cfg.dims = {4, 5, 6};
    cfg.r = 2;
    cfg.seed = 9;
    const NdSignal sig = generate_nd_signal(cfg);
    for (bool binary : {false, true}) {
        const fs::path p = scratch(binary ? "nd.bin" : "nd.json");
        io::write_nd_signal(p, sig, binary);
        const NdSignal back = io::read_nd_signal(p);
        CHECK(back.dims == sig.dims);
        CHECK(back.entries == sig.entries);
        CHECK(back.modes.size() == 2);
    }
    const fs::path bad = scratch("nd_truncated.bin");
    io::write_nd_signal(bad, sig, true);
    fs::resize_file(bad, fs::file_size(bad) - 8);
    CHECK_THROWS_AS(io::read_nd_signal(bad), IoError);
}

TEST_CASE("atomic writes leave no temporary file") {
    const fs::path p = scratch("atomic.txt");
    io::write_file_atomic(p, "abc");
    CHECK(io::read_file(p) == "abc");
    CHECK_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
    CHECK_THROWS_AS(io::write_file_atomic(scratch("missing_dir") / "x" / "y.txt", "abc"), IoError);
    CHECK_THROWS_AS(io::read_file(scratch("does_not_exist")), IoError);
}
