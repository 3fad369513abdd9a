#pragma once

// JSON persistence for MmLevyModel. The schema mirrors the struct field by
// field; densities are tagged records:
//   {"kind": "none"}
//   {"kind": "exponential", "rate": r, "weight": w}
//   {"kind": "phase_type", "init": [...], "gen": [[...]], "weight": w}
// U0 and mu are optional and default as in the MmLevyModel constructor.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "mmlevy/model.hpp"

namespace mmlevy {

/// Malformed model file; `path()` names the offending field, e.g. "nu[2].rate".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& path() const { return field_; }

private:
    std::string field_;
};

std::string model_to_json(const MmLevyModel& m);
/// Parses and structurally checks a model; semantic invariants are left to validate().
MmLevyModel model_from_json(const std::string& text);

MmLevyModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const MmLevyModel& m);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace mmlevy
