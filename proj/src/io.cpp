#include "hankelrec/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hankelrec::io {

using nlohmann::json;

namespace {

json complex_array(const CVec& v) {
    json out = json::array();
    for (Index k = 0; k < v.size(); ++k) {
        out.push_back({v[k].real(), v[k].imag()});
    }
    return out;
}

CVec complex_array_from(const json& j, const char* what) {
    if (!j.is_array()) {
        throw IoError(std::string(what) + ": expected an array of [re, im] pairs");
    }
    CVec v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const json& pair = j[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw IoError(std::string(what) + ": entry " + std::to_string(k) + " is not a [re, im] pair");
        }
        v[static_cast<Index>(k)] = {pair[0].get<double>(), pair[1].get<double>()};
    }
    return v;
}

json parse(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

// Wraps nlohmann type errors (missing keys, wrong types) as IoError.
template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

json nd_header(const NdSignal& sig) {
    json modes = json::array();
    for (const auto& m : sig.modes) {
        modes.push_back({{"f", m.f}, {"tau", m.tau}, {"d_re", m.d.real()}, {"d_im", m.d.imag()}});
    }
    return {{"dims", sig.dims}, {"modes", modes}};
}

NdSignal nd_from_header(const json& j) {
    NdSignal sig;
    sig.dims = j.at("dims").get<std::vector<Index>>();
    if (sig.dims.empty()) {
        throw IoError("nd signal: dims must be nonempty");
    }
    for (Index d : sig.dims) {
        if (d < 1) {
            throw IoError("nd signal: dims must be >= 1");
        }
    }
    if (j.contains("modes")) {
        for (const auto& m : j.at("modes")) {
            NdMode mode;
            mode.f = m.at("f").get<std::vector<double>>();
            mode.tau = m.at("tau").get<std::vector<double>>();
            mode.d = {m.at("d_re").get<double>(), m.at("d_im").get<double>()};
            sig.modes.push_back(std::move(mode));
        }
    }
    return sig;
}

Index nd_count(const std::vector<Index>& dims) {
    Index count = 1;
    for (Index d : dims) {
        count *= d;
    }
    return count;
}

} // namespace

std::string signal_to_json(const SpectralSignal& sig) {
    json modes = json::array();
    for (const auto& m : sig.modes) {
        modes.push_back({{"f", m.f}, {"tau", m.tau}, {"d_re", m.d.real()}, {"d_im", m.d.imag()}});
    }
    const json j = {{"n", sig.n}, {"modes", modes}, {"samples", complex_array(sig.samples)}};
    return j.dump();
}

SpectralSignal signal_from_json(std::string_view text) {
    const json j = parse(text, "signal");
    return guarded("signal", [&] {
        const Index n = j.at("n").get<Index>();
        if (n < 1) {
            throw IoError("signal: n must be >= 1");
        }
        std::vector<Mode> modes;
        if (j.contains("modes")) {
            for (const auto& m : j.at("modes")) {
                Mode mode;
                mode.f = m.at("f").get<double>();
                mode.tau = m.at("tau").get<double>();
                mode.d = {m.at("d_re").get<double>(), m.at("d_im").get<double>()};
                modes.push_back(mode);
            }
        }
        if (!j.contains("samples")) {
            if (modes.empty()) {
                throw IoError("signal: neither samples nor modes given");
            }
            return make_signal(n, std::move(modes));
        }
        SpectralSignal sig;
        sig.n = n;
        sig.modes = std::move(modes);
        sig.samples = complex_array_from(j.at("samples"), "signal samples");
        if (sig.samples.size() != n) {
            throw IoError("signal: " + std::to_string(sig.samples.size()) + " samples for n = " + std::to_string(n));
        }
        return sig;
    });
}

std::string sample_set_to_json(const SampleSet& set) {
    const json j = {{"n", set.n}, {"mode", std::string(to_string(set.mode))}, {"indices", set.indices}};
    return j.dump();
}

SampleSet sample_set_from_json(std::string_view text) {
    const json j = parse(text, "sample set");
    return guarded("sample set", [&] {
        SampleSet set;
        set.n = j.at("n").get<Index>();
        set.mode = sampling_mode_from_string(j.at("mode").get<std::string>());
        set.indices = j.at("indices").get<std::vector<Index>>();
        if (set.n < 1) {
            throw IoError("sample set: n must be >= 1");
        }
        set.validate();
        return set;
    });
}

std::string result_to_json(const SolveResult& res) {
    json trace = json::array();
    for (const auto& t : res.trace) {
        trace.push_back({{"residual", t.residual},
                         {"step", t.step},
                         {"true_err", t.true_err ? json(*t.true_err) : json(nullptr)},
                         {"ms", t.ms}});
    }
    const json j = {{"x_rec", complex_array(res.x_rec)},
                    {"iterations", res.iterations},
                    {"converged", {{"flag", res.converged}, {"reason", res.reason}}},
                    {"trace", trace}};
    return j.dump();
}

SolveResult result_from_json(std::string_view text) {
    const json j = parse(text, "result");
    return guarded("result", [&] {
        SolveResult res;
        res.x_rec = complex_array_from(j.at("x_rec"), "result x_rec");
        res.iterations = j.at("iterations").get<Index>();
        res.converged = j.at("converged").at("flag").get<bool>();
        res.reason = j.at("converged").at("reason").get<std::string>();
        for (const auto& t : j.at("trace")) {
            IterRecord rec;
            // Non-finite values are stored as null.
            auto number = [](const json& v) {
                return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
            };
            rec.residual = number(t.at("residual"));
            rec.step = number(t.at("step"));
            if (!t.at("true_err").is_null()) {
                rec.true_err = t.at("true_err").get<double>();
            }
            rec.ms = number(t.at("ms"));
            res.trace.push_back(rec);
        }
        return res;
    });
}

std::string nd_signal_to_json(const NdSignal& sig) {
    json j = nd_header(sig);
    j["entries"] = complex_array(sig.entries);
    return j.dump();
}

NdSignal nd_signal_from_json(std::string_view text) {
    const json j = parse(text, "nd signal");
    return guarded("nd signal", [&] {
        NdSignal sig = nd_from_header(j);
        if (!j.contains("entries")) {
            if (sig.modes.empty()) {
                throw IoError("nd signal: neither entries nor modes given");
            }
            return make_nd_signal(sig.dims, std::move(sig.modes));
        }
        sig.entries = complex_array_from(j.at("entries"), "nd signal entries");
        if (sig.entries.size() != nd_count(sig.dims)) {
            throw IoError("nd signal: entry count does not match dims");
        }
        return sig;
    });
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_signal(const std::filesystem::path& path, const SpectralSignal& sig) {
    write_file_atomic(path, signal_to_json(sig) + "\n");
}

SpectralSignal read_signal(const std::filesystem::path& path) { return signal_from_json(read_file(path)); }

void write_sample_set(const std::filesystem::path& path, const SampleSet& set) {
    write_file_atomic(path, sample_set_to_json(set) + "\n");
}

SampleSet read_sample_set(const std::filesystem::path& path) { return sample_set_from_json(read_file(path)); }

void write_result(const std::filesystem::path& path, const SolveResult& res) {
    write_file_atomic(path, result_to_json(res) + "\n");
}

SolveResult read_result(const std::filesystem::path& path) { return result_from_json(read_file(path)); }

void write_nd_signal(const std::filesystem::path& path, const NdSignal& sig, bool binary) {
    if (!binary) {
        write_file_atomic(path, nd_signal_to_json(sig) + "\n");
        return;
    }
    json header = nd_header(sig);
    header["payload"] = "f64le";
    std::string content = header.dump() + "\n";
    const std::size_t offset = content.size();
    content.resize(offset + static_cast<std::size_t>(sig.entries.size()) * 16);
    char* p = content.data() + offset;
    for (Index k = 0; k < sig.entries.size(); ++k) {
        for (double v : {sig.entries[k].real(), sig.entries[k].imag()}) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            for (int b = 0; b < 8; ++b) {
                *p++ = static_cast<char>((bits >> (8 * b)) & 0xFF);
            }
        }
    }
    write_file_atomic(path, content);
}

NdSignal read_nd_signal(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    const std::size_t eol = content.find('\n');
    if (eol != std::string::npos) {
        const json head = json::parse(std::string_view(content).substr(0, eol), nullptr, false);
        if (head.is_object() && head.contains("payload")) {
            return guarded("nd signal", [&] {
                if (head.at("payload").get<std::string>() != "f64le") {
                    throw IoError("nd signal: unknown payload encoding");
                }
                NdSignal sig = nd_from_header(head);
                const Index count = nd_count(sig.dims);
                const std::size_t need = static_cast<std::size_t>(count) * 16;
                if (content.size() - eol - 1 != need) {
                    throw IoError("nd signal: payload holds " + std::to_string(content.size() - eol - 1) +
                                  " bytes, expected " + std::to_string(need));
                }
                sig.entries.resize(count);
                const auto* p = reinterpret_cast<const unsigned char*>(content.data() + eol + 1);
                auto next = [&p] {
                    std::uint64_t bits = 0;
                    for (int b = 0; b < 8; ++b) {
                        bits |= static_cast<std::uint64_t>(*p++) << (8 * b);
                    }
                    return std::bit_cast<double>(bits);
                };
                for (Index k = 0; k < count; ++k) {
                    const double re = next();
                    sig.entries[k] = {re, next()};
                }
                return sig;
            });
        }
    }
    return nd_signal_from_json(content);
}

} // namespace hankelrec::io
