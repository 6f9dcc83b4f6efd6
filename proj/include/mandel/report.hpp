#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "mandel/surface.hpp"
#include "mandel/tau.hpp"
#include "mandel/varcheck.hpp"

namespace mandel::report {

using json = nlohmann::ordered_json;
using cplx = std::complex<double>;

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kConventionTableVersion = "ct-1";

// Batch configuration: genus, modulus, marked points, residues, tolerances.
struct DiagramConfig {
    surface::MarkedSurface ms;
    surface::Tolerances tol;
    uint64_t seed = 42;
    int samples = 24;

    json to_json() const;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses and schema-validates a config document; throws ConfigError with a
// precise message on any violation.
DiagramConfig parse_config(const json& doc);
DiagramConfig parse_config_text(const std::string& text);

json manifest(const DiagramConfig& cfg);

json complex_to_json(cplx v);

json tau_report_json(const tau::TauReport& rep, const DiagramConfig& cfg);
json varcheck_report_json(const varcheck::VarCheckResult& res, const DiagramConfig& cfg,
                          const varcheck::VarCheckConfig& vc);

// Serialize with deterministic float formatting (nlohmann emits shortest
// round-trip representations, stable for identical doubles).
std::string to_text(const json& doc);

// FNV-1a content hash used as the cache key.
uint64_t content_hash(const std::string& text);
std::string hash_hex(uint64_t h);

// Atomic write: write to <path>.tmp then rename.
void atomic_write(const std::string& path, const std::string& text);

} // namespace mandel::report
