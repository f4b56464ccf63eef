#pragma once

// JSON (and JSON-headed binary) file formats.
//
//   signal:      {"n", "modes": [{"f", "tau", "d_re", "d_im"}], "samples": [[re, im], ...]}
//   sample set:  {"n", "mode": "with" | "without", "indices": [...]}
//   result:      {"x_rec": [[re, im], ...], "iterations",
//                 "converged": {"flag", "reason"},
//                 "trace": [{"residual", "step", "true_err" | null, "ms"}]}
//   nd signal:   {"dims", "modes": [{"f": [...], "tau": [...], "d_re", "d_im"}],
//                 "entries": [[re, im], ...]}
//                or the same header without "entries", carrying
//                "payload": "f64le" on its first line, followed by the
//                row-major (re, im) pairs as little-endian float64.
//
// Readers throw IoError on unreadable files and on malformed content.

#include <filesystem>
#include <string>
#include <string_view>

#include "hankelrec/nd_hankel.hpp"
#include "hankelrec/sample_set.hpp"
#include "hankelrec/solvers.hpp"
#include "hankelrec/spectral_signal.hpp"

namespace hankelrec::io {

std::string signal_to_json(const SpectralSignal& sig);
/// Modes are optional; samples are required unless modes are given.
SpectralSignal signal_from_json(std::string_view text);

std::string sample_set_to_json(const SampleSet& set);
/// Validates index range and distinctness for "without".
SampleSet sample_set_from_json(std::string_view text);

std::string result_to_json(const SolveResult& res);
SolveResult result_from_json(std::string_view text);

std::string nd_signal_to_json(const NdSignal& sig);
NdSignal nd_signal_from_json(std::string_view text);

void write_signal(const std::filesystem::path& path, const SpectralSignal& sig);
SpectralSignal read_signal(const std::filesystem::path& path);
void write_sample_set(const std::filesystem::path& path, const SampleSet& set);
SampleSet read_sample_set(const std::filesystem::path& path);
void write_result(const std::filesystem::path& path, const SolveResult& res);
SolveResult read_result(const std::filesystem::path& path);

/// `binary` selects the JSON header + float64 payload layout.
void write_nd_signal(const std::filesystem::path& path, const NdSignal& sig, bool binary);
/// Accepts both layouts.
NdSignal read_nd_signal(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace hankelrec::io
