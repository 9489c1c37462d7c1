#include "pqrank/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pqrank {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::uint32_t checksum(std::span<const unsigned char> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < bytes.size()) {
        const std::size_t chunk = std::min<std::size_t>(bytes.size() - off, 1u << 30);
        crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(chunk));
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::vector<unsigned char> encode_u16(std::span<const std::uint16_t> values) {
    std::vector<unsigned char> out(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[2 * i] = static_cast<unsigned char>(values[i] & 0xff);
        out[2 * i + 1] = static_cast<unsigned char>(values[i] >> 8);
    }
    return out;
}

std::vector<unsigned char> encode_f32(std::span<const float> values) {
    std::vector<unsigned char> out(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(values[i]);
        out[4 * i] = static_cast<unsigned char>(u & 0xff);
        out[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
        out[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
        out[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
    }
    return out;
}

std::vector<std::uint16_t> decode_u16(std::span<const unsigned char> bytes) {
    std::vector<std::uint16_t> out(bytes.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint16_t>(bytes[2 * i] |
                                            (bytes[2 * i + 1] << 8));
    }
    return out;
}

std::vector<float> decode_f32(std::span<const unsigned char> bytes) {
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint32_t u =
            static_cast<std::uint32_t>(bytes[4 * i]) |
            (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
            (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
            (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

void write_file(const std::filesystem::path& path,
                std::span<const unsigned char> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open for writing: " + path.string());
    }
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw IoError("short write: " + path.string());
    }
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) {
        throw CorruptionError("missing blob: " + path.string());
    }
    const std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) {
        throw CorruptionError("unreadable blob: " + path.string());
    }
    return bytes;
}

// Writes the blob and records its size and checksum in the manifest table.
void put_blob(json& blobs, const std::filesystem::path& dir,
              const std::string& name, std::span<const unsigned char> bytes) {
    write_file(dir / name, bytes);
    blobs[name] = {{"bytes", bytes.size()}, {"crc32", checksum(bytes)}};
}

// Fetches a blob declared in the manifest. Declared size has to match what
// the container's dimensions demand (else the manifest is inconsistent);
// the bytes on disk have to match the declared size and checksum (else the
// blob is corrupt).
std::vector<unsigned char> get_blob(const json& manifest,
                                    const std::filesystem::path& dir,
                                    const std::string& name,
                                    std::uint64_t expected_bytes) {
    const auto& blobs = manifest.at("blobs");
    if (!blobs.contains(name)) {
        throw FormatError("manifest lists no blob named " + name);
    }
    const std::uint64_t declared = blobs.at(name).at("bytes").get<std::uint64_t>();
    const std::uint32_t crc = blobs.at(name).at("crc32").get<std::uint32_t>();
    if (declared != expected_bytes) {
        throw FormatError("manifest dimensions disagree with blob size of " +
                          name);
    }
    auto bytes = read_file(dir / name);
    if (bytes.size() != declared) {
        throw CorruptionError("blob size mismatch: " + name);
    }
    if (checksum(bytes) != crc) {
        throw CorruptionError("checksum mismatch: " + name);
    }
    return bytes;
}

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
    const std::string text = manifest.dump(2) + "\n";
    write_file(dir / "manifest.json",
               {reinterpret_cast<const unsigned char*>(text.data()),
                text.size()});
}

json read_manifest(const std::filesystem::path& dir,
                   const std::string& expected_kind) {
    std::ifstream f(dir / "manifest.json");
    if (!f) {
        throw FormatError("missing manifest: " + (dir / "manifest.json").string());
    }
    json manifest;
    try {
        manifest = json::parse(f);
    } catch (const json::exception& e) {
        throw FormatError(std::string("unparseable manifest: ") + e.what());
    }
    int version = 0;
    try {
        version = manifest.at("schema_version").get<int>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest without schema_version: ") +
                          e.what());
    }
    if (version != kSchemaVersion) {
        throw UnsupportedFormatError("unsupported schema version " +
                                     std::to_string(version));
    }
    try {
        if (manifest.at("kind").get<std::string>() != expected_kind) {
            throw FormatError("container holds a " +
                              manifest.at("kind").get<std::string>() + ", not a " +
                              expected_kind);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest without kind: ") + e.what());
    }
    return manifest;
}

json codebook_manifest_fields(const Codebook& cb) {
    return {{"num_items", cb.num_items},
            {"num_splits", cb.num_splits},
            {"num_subids", cb.num_subids},
            {"dim", cb.dim}};
}

void save_codebook_blobs(const Codebook& cb, const std::filesystem::path& dir,
                         json& blobs) {
    put_blob(blobs, dir, "assignments.bin", encode_u16(cb.assignments));
    const std::size_t row = static_cast<std::size_t>(cb.num_subids) * cb.sub_dim();
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        put_blob(blobs, dir, "subemb_" + std::to_string(m) + ".bin",
                 encode_f32(std::span<const float>(
                     cb.sub_embeddings.data() + static_cast<std::size_t>(m) * row,
                     row)));
    }
}

Codebook load_codebook_blobs(const json& manifest,
                             const std::filesystem::path& dir) {
    Codebook cb;
    cb.num_items = manifest.at("num_items").get<std::uint32_t>();
    cb.num_splits = manifest.at("num_splits").get<std::uint32_t>();
    cb.num_subids = manifest.at("num_subids").get<std::uint32_t>();
    cb.dim = manifest.at("dim").get<std::uint32_t>();
    if (cb.num_splits == 0 || cb.dim == 0 || cb.dim % cb.num_splits != 0) {
        throw FormatError("manifest with unusable dimensions");
    }

    const std::uint64_t n_assign =
        static_cast<std::uint64_t>(cb.num_items) * cb.num_splits;
    cb.assignments = decode_u16(get_blob(manifest, dir, "assignments.bin",
                                         n_assign * 2));
    const std::uint64_t row =
        static_cast<std::uint64_t>(cb.num_subids) * cb.sub_dim();
    cb.sub_embeddings.reserve(row * cb.num_splits);
    for (std::uint32_t m = 0; m < cb.num_splits; ++m) {
        const auto part = decode_f32(get_blob(
            manifest, dir, "subemb_" + std::to_string(m) + ".bin", row * 4));
        cb.sub_embeddings.insert(cb.sub_embeddings.end(), part.begin(),
                                 part.end());
    }
    try {
        cb.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("container holds an invalid codebook: ") +
                          e.what());
    }
    return cb;
}

}  // namespace

void save_codebook(const Codebook& cb, const std::filesystem::path& dir) {
    cb.validate();
    std::filesystem::create_directories(dir);
    json manifest = codebook_manifest_fields(cb);
    manifest["schema_version"] = kSchemaVersion;
    manifest["kind"] = "codebook";
    manifest["blobs"] = json::object();
    save_codebook_blobs(cb, dir, manifest["blobs"]);
    write_manifest(dir, manifest);
}

Codebook load_codebook(const std::filesystem::path& dir) {
    const json manifest = read_manifest(dir, "codebook");
    try {
        return load_codebook_blobs(manifest, dir);
    } catch (const json::exception& e) {
        throw FormatError(std::string("incomplete manifest: ") + e.what());
    }
}

void save_workload(const SyntheticWorkload& w, const std::filesystem::path& dir) {
    w.codebook.validate();
    if (w.queries.size() != static_cast<std::size_t>(w.num_queries) *
                                w.codebook.dim) {
        throw std::invalid_argument("save_workload: query buffer size mismatch");
    }
    std::filesystem::create_directories(dir);
    json manifest = codebook_manifest_fields(w.codebook);
    manifest["schema_version"] = kSchemaVersion;
    manifest["kind"] = "workload";
    manifest["seed"] = w.seed;
    manifest["skew"] = static_cast<double>(w.skew);
    manifest["num_queries"] = w.num_queries;
    manifest["blobs"] = json::object();
    save_codebook_blobs(w.codebook, dir, manifest["blobs"]);
    put_blob(manifest["blobs"], dir, "queries.bin", encode_f32(w.queries));
    write_manifest(dir, manifest);
}

SyntheticWorkload load_workload(const std::filesystem::path& dir) {
    const json manifest = read_manifest(dir, "workload");
    try {
        SyntheticWorkload w;
        w.codebook = load_codebook_blobs(manifest, dir);
        w.num_queries = manifest.at("num_queries").get<std::uint32_t>();
        w.seed = manifest.at("seed").get<std::uint64_t>();
        w.skew = static_cast<float>(manifest.at("skew").get<double>());
        w.queries = decode_f32(get_blob(
            manifest, dir, "queries.bin",
            static_cast<std::uint64_t>(w.num_queries) * w.codebook.dim * 4));
        return w;
    } catch (const json::exception& e) {
        throw FormatError(std::string("incomplete manifest: ") + e.what());
    }
}

}  // namespace pqrank
