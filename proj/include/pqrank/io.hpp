#pragma once

#include <filesystem>
#include <stdexcept>

#include "pqrank/builder.hpp"
#include "pqrank/codebook.hpp"

namespace pqrank {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Blob bytes disagree with the manifest (missing file, wrong length or
// checksum mismatch).
struct CorruptionError : IoError {
    using IoError::IoError;
};

// Manifest declares a schema version this build does not understand.
struct UnsupportedFormatError : IoError {
    using IoError::IoError;
};

// Structurally broken container: unreadable manifest, missing fields, or
// declared dimensions that disagree with declared blob sizes.
struct FormatError : IoError {
    using IoError::IoError;
};

// Directory container: manifest.json plus raw little-endian blobs
// (assignments.bin as u16, subemb_<m>.bin and queries.bin as f32), each
// CRC32-checked against the manifest. Inverted indexes are derived data and
// are never persisted; rebuild them from assignments after loading.
void save_codebook(const Codebook& cb, const std::filesystem::path& dir);
Codebook load_codebook(const std::filesystem::path& dir);

void save_workload(const SyntheticWorkload& w, const std::filesystem::path& dir);
SyntheticWorkload load_workload(const std::filesystem::path& dir);

}  // namespace pqrank
