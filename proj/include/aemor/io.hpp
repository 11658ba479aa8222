#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aemor/network.hpp"
#include "aemor/pod.hpp"
#include "aemor/snapshot.hpp"

namespace aemor {

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian and this code writes host bytes");

using json = nlohmann::json;

/// %.17g: shortest text that still round-trips any double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// IEEE CRC-32 (reflected, poly 0xEDB88320). crc32("123456789") == 0xCBF43926.
inline std::uint32_t crc32(const unsigned char* data, std::size_t n) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

inline std::string read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(io_error::kind_t::open, path, "cannot open for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error(io_error::kind_t::open, path, "read failed");
    return bytes;
}

inline void write_binary_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(io_error::kind_t::open, path, "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw io_error(io_error::kind_t::open, path, "write failed");
}

inline void write_text_file(const std::string& path, const std::string& text) {
    write_binary_file(path, text);
}

namespace detail {

/// One named row-major f64 block of a container payload.
struct payload_block {
    std::string name;
    const double* data = nullptr;
    std::size_t rows = 0, cols = 0;
};

inline void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void append_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

/// Container layout: magic | u64 LE header length | UTF-8 JSON header |
/// contiguous f64 LE payload blocks | u32 LE CRC-32 over the payload bytes.
/// The header carries a "payload" index with each block's byte offset.
inline std::string serialize_container(const std::string& magic, json header,
                                       const std::vector<payload_block>& blocks) {
    json index = json::array();
    std::uint64_t offset = 0;
    for (const payload_block& b : blocks) {
        index.push_back({{"name", b.name},
                         {"rows", b.rows},
                         {"cols", b.cols},
                         {"offset", offset}});
        offset += static_cast<std::uint64_t>(b.rows) * b.cols * sizeof(double);
    }
    header["payload"] = std::move(index);
    const std::string header_text = header.dump();

    std::string out;
    out.reserve(magic.size() + 8 + header_text.size() + offset + 4);
    out += magic;
    append_u64_le(out, header_text.size());
    out += header_text;
    const std::size_t payload_start = out.size();
    for (const payload_block& b : blocks) {
        const std::size_t bytes = b.rows * b.cols * sizeof(double);
        const std::size_t at = out.size();
        out.resize(at + bytes);
        if (bytes > 0) std::memcpy(out.data() + at, b.data, bytes);
    }
    const std::uint32_t crc =
        crc32(reinterpret_cast<const unsigned char*>(out.data()) + payload_start,
              out.size() - payload_start);
    append_u32_le(out, crc);
    return out;
}

struct parsed_block {
    std::string name;
    std::size_t rows = 0, cols = 0;
    const double* data = nullptr; // points into the file image
};

struct parsed_container {
    std::string bytes; // keeps block pointers alive
    json header;
    std::vector<parsed_block> blocks;

    const parsed_block& block(const std::string& name, const std::string& path) const {
        for (const parsed_block& b : blocks)
            if (b.name == name) return b;
        throw io_error(io_error::kind_t::structure, path, "missing payload block '" + name + "'");
    }

    matrix block_matrix(const std::string& name, const std::string& path) const {
        const parsed_block& b = block(name, path);
        matrix m(b.rows, b.cols);
        if (b.rows * b.cols > 0)
            std::memcpy(m.storage().data(), b.data, b.rows * b.cols * sizeof(double));
        return m;
    }

    vec block_vec(const std::string& name, const std::string& path) const {
        const parsed_block& b = block(name, path);
        return vec(b.data, b.data + b.rows * b.cols);
    }
};

/// Parse and fully validate a container image. Every malformation maps to a
/// typed io_error; truncated input is detected before any field is trusted.
inline parsed_container parse_container(std::string bytes, const std::string& magic,
                                        const std::string& path) {
    parsed_container pc;
    pc.bytes = std::move(bytes);
    const std::string& buf = pc.bytes;

    if (buf.size() < magic.size())
        throw io_error(io_error::kind_t::truncated, path, "shorter than the magic prefix");
    if (buf.compare(0, magic.size(), magic) != 0)
        throw io_error(io_error::kind_t::magic, path, "bad magic, expected '" + magic + "'");
    if (buf.size() < magic.size() + 8)
        throw io_error(io_error::kind_t::truncated, path, "missing header length");

    std::uint64_t header_len = 0;
    for (int i = 0; i < 8; ++i)
        header_len |= static_cast<std::uint64_t>(
                          static_cast<unsigned char>(buf[magic.size() + static_cast<std::size_t>(i)]))
                      << (8 * i);
    const std::size_t header_start = magic.size() + 8;
    if (header_len > buf.size() - header_start)
        throw io_error(io_error::kind_t::truncated, path, "header length exceeds file size");

    try {
        pc.header = json::parse(buf.substr(header_start, header_len));
    } catch (const json::exception& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("header is not valid JSON: ") + e.what());
    }

    try {
        if (pc.header.at("format_version").get<std::int64_t>() != 1)
            throw io_error(io_error::kind_t::version, path,
                           "unsupported format version " + pc.header["format_version"].dump());

        const std::size_t payload_start = header_start + header_len;
        if (buf.size() < payload_start + 4)
            throw io_error(io_error::kind_t::truncated, path, "no room for the checksum");
        const std::size_t payload_size = buf.size() - payload_start - 4;

        std::uint64_t expect_offset = 0;
        for (const json& e : pc.header.at("payload")) {
            parsed_block b;
            b.name = e.at("name").get<std::string>();
            const std::int64_t rows = e.at("rows").get<std::int64_t>();
            const std::int64_t cols = e.at("cols").get<std::int64_t>();
            const std::int64_t off = e.at("offset").get<std::int64_t>();
            if (rows < 0 || cols < 0 || off < 0 || rows > (1 << 30) || cols > (1 << 30))
                throw io_error(io_error::kind_t::structure, path,
                               "payload block '" + b.name + "' has absurd dimensions");
            if (static_cast<std::uint64_t>(off) != expect_offset)
                throw io_error(io_error::kind_t::structure, path,
                               "payload block '" + b.name + "' offset is not contiguous");
            b.rows = static_cast<std::size_t>(rows);
            b.cols = static_cast<std::size_t>(cols);
            expect_offset += static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) *
                             sizeof(double);
            b.data = reinterpret_cast<const double*>(buf.data() + payload_start +
                                                     static_cast<std::size_t>(off));
            pc.blocks.push_back(std::move(b));
        }
        if (expect_offset > payload_size)
            throw io_error(io_error::kind_t::truncated, path,
                           "payload shorter than the header declares");
        if (expect_offset < payload_size)
            throw io_error(io_error::kind_t::structure, path,
                           "payload longer than the header declares");

        std::uint32_t stored = 0;
        for (int i = 0; i < 4; ++i)
            stored |= static_cast<std::uint32_t>(static_cast<unsigned char>(
                          buf[payload_start + payload_size + static_cast<std::size_t>(i)]))
                      << (8 * i);
        const std::uint32_t actual =
            crc32(reinterpret_cast<const unsigned char*>(buf.data()) + payload_start,
                  payload_size);
        if (stored != actual)
            throw io_error(io_error::kind_t::checksum, path, "payload CRC-32 mismatch");
    } catch (const json::exception& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("malformed header: ") + e.what());
    }
    return pc;
}

inline json spec_to_json(const network_spec& spec) {
    json j;
    j["widths"] = spec.widths;
    json acts = json::array();
    for (activation a : spec.activations) acts.push_back(activation_name(a));
    j["activations"] = std::move(acts);
    return j;
}

inline network_spec spec_from_json(const json& j, const std::string& path) {
    network_spec spec;
    spec.widths = j.at("widths").get<std::vector<std::size_t>>();
    for (const json& a : j.at("activations")) {
        const std::string name = a.get<std::string>();
        try {
            spec.activations.push_back(activation_from_name(name));
        } catch (const contract_error&) {
            throw io_error(io_error::kind_t::structure, path,
                           "unknown activation '" + name + "' in manifest");
        }
    }
    try {
        spec.validate();
    } catch (const contract_error& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("invalid network spec in manifest: ") + e.what());
    }
    return spec;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Snapshot container (magic MORSNAP1)

inline constexpr const char* snapshot_magic = "MORSNAP1";

inline std::string serialize_snapshots(const snapshot_set& set) {
    set.validate();
    json header;
    header["format_version"] = 1;
    header["kind"] = "snapshot-set";
    header["provenance"] = set.provenance;
    header["seed"] = set.seed;
    header["param_names"] = set.param_names;
    header["count"] = set.count();

    std::vector<detail::payload_block> blocks;
    blocks.push_back({"params", set.params.storage().data(), set.params.rows(),
                      set.params.cols()});
    json fields = json::array();
    for (const field_block& f : set.fields) {
        json jf;
        jf["name"] = f.name;
        jf["dofs_per_node"] = f.dofs_per_node;
        jf["full_width"] = f.full_width;
        jf["active"] = f.active;
        jf["prescribed"] = f.prescribed;
        jf["has_coords"] = f.node_coords.rows() > 0;
        fields.push_back(std::move(jf));
        blocks.push_back({"field:" + f.name, f.values.storage().data(), f.values.rows(),
                          f.values.cols()});
        if (f.node_coords.rows() > 0)
            blocks.push_back({"coords:" + f.name, f.node_coords.storage().data(),
                              f.node_coords.rows(), f.node_coords.cols()});
    }
    header["fields"] = std::move(fields);
    if (set.force) {
        header["force_field"] = set.force->field;
        blocks.push_back({"force", set.force->values.storage().data(), set.force->values.rows(),
                          set.force->values.cols()});
    }
    return detail::serialize_container(snapshot_magic, std::move(header), blocks);
}

inline void write_snapshots(const std::string& path, const snapshot_set& set) {
    write_binary_file(path, serialize_snapshots(set));
}

inline snapshot_set parse_snapshots(std::string bytes, const std::string& path) {
    const detail::parsed_container pc =
        detail::parse_container(std::move(bytes), snapshot_magic, path);
    snapshot_set set;
    try {
        if (pc.header.at("kind").get<std::string>() != "snapshot-set")
            throw io_error(io_error::kind_t::structure, path, "container is not a snapshot set");
        set.provenance = pc.header.at("provenance").get<std::string>();
        set.seed = pc.header.at("seed").get<std::uint64_t>();
        set.param_names = pc.header.at("param_names").get<std::vector<std::string>>();
        set.params = pc.block_matrix("params", path);
        for (const json& jf : pc.header.at("fields")) {
            field_block f;
            f.name = jf.at("name").get<std::string>();
            f.dofs_per_node = jf.at("dofs_per_node").get<std::size_t>();
            f.full_width = jf.at("full_width").get<std::size_t>();
            f.active = jf.at("active").get<std::vector<std::size_t>>();
            f.prescribed = jf.at("prescribed").get<std::vector<std::size_t>>();
            f.values = pc.block_matrix("field:" + f.name, path);
            if (jf.at("has_coords").get<bool>())
                f.node_coords = pc.block_matrix("coords:" + f.name, path);
            set.fields.push_back(std::move(f));
        }
        if (pc.header.contains("force_field")) {
            force_block fb;
            fb.field = pc.header.at("force_field").get<std::string>();
            fb.values = pc.block_matrix("force", path);
            set.force = std::move(fb);
        }
    } catch (const json::exception& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("malformed snapshot header: ") + e.what());
    }
    try {
        set.validate();
    } catch (const std::exception& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("inconsistent snapshot data: ") + e.what());
    }
    return set;
}

inline snapshot_set read_snapshots(const std::string& path) {
    return parse_snapshots(read_binary_file(path), path);
}

// ---------------------------------------------------------------------------
// Surrogate bundle container (magic MORBDL1)

inline constexpr const char* bundle_magic = "MORBDL1";

/// One trained network and its place in the architecture ("encoder",
/// "decoder", "regressor", "phi_encoder", "encoder:temperature", ...).
struct trained_net {
    std::string role;
    mlp_params params;
};

inline const std::vector<std::string>& bundle_kinds() {
    static const std::vector<std::string> kinds = {
        "ae", "regressor", "e2e", "force-augmented", "multi-field", "staggered", "pod"};
    return kinds;
}

/// Self-describing trained artifact: manifest (kind, fields, latent dims, net
/// specs, training provenance) plus parameter payloads and an optional
/// reduced basis. Loading re-derives every shape from the manifest and
/// rejects any payload that disagrees.
struct surrogate_bundle {
    std::string kind;
    std::string problem;
    std::vector<std::string> param_names;
    std::vector<std::string> field_order;
    std::vector<std::size_t> latent_dims;
    std::vector<trained_net> nets;
    std::optional<pod_basis_t> basis;
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    double final_loss = 0.0;

    const trained_net* find(const std::string& role) const {
        for (const trained_net& n : nets)
            if (n.role == role) return &n;
        return nullptr;
    }

    const trained_net& require(const std::string& role) const {
        const trained_net* n = find(role);
        if (!n)
            throw data_error("bundle of kind '" + kind + "' is missing a '" + role +
                             "' network");
        return *n;
    }
};

inline std::string serialize_bundle(const surrogate_bundle& b) {
    bool known = false;
    for (const std::string& k : bundle_kinds()) known = known || k == b.kind;
    if (!known) throw contract_error("unknown bundle kind '" + b.kind + "'");

    json header;
    header["format_version"] = 1;
    header["kind"] = b.kind;
    header["problem"] = b.problem;
    header["param_names"] = b.param_names;
    header["field_order"] = b.field_order;
    header["latent_dims"] = b.latent_dims;
    header["provenance"] = {{"seed", b.seed}, {"epochs", b.epochs}, {"final_loss", b.final_loss}};

    std::vector<detail::payload_block> blocks;
    json nets = json::array();
    for (std::size_t n = 0; n < b.nets.size(); ++n) {
        const mlp_params& p = b.nets[n].params;
        p.spec.validate();
        json jn = detail::spec_to_json(p.spec);
        jn["role"] = b.nets[n].role;
        nets.push_back(std::move(jn));
        for (std::size_t l = 0; l < p.spec.layers(); ++l) {
            const std::string tag = "net" + std::to_string(n) + ".";
            blocks.push_back({tag + "w" + std::to_string(l), p.weights[l].storage().data(),
                              p.weights[l].rows(), p.weights[l].cols()});
            blocks.push_back({tag + "b" + std::to_string(l), p.biases[l].data(), 1,
                              p.biases[l].size()});
        }
    }
    header["nets"] = std::move(nets);
    if (b.basis) {
        header["basis_rank"] = b.basis->rank();
        blocks.push_back({"basis.xi", b.basis->xi.storage().data(), b.basis->xi.rows(),
                          b.basis->xi.cols()});
        blocks.push_back({"basis.s", b.basis->singular_values.data(), 1,
                          b.basis->singular_values.size()});
    }
    return detail::serialize_container(bundle_magic, std::move(header), blocks);
}

inline void write_bundle(const std::string& path, const surrogate_bundle& b) {
    write_binary_file(path, serialize_bundle(b));
}

inline surrogate_bundle parse_bundle(std::string bytes, const std::string& path) {
    const detail::parsed_container pc =
        detail::parse_container(std::move(bytes), bundle_magic, path);
    surrogate_bundle b;
    try {
        b.kind = pc.header.at("kind").get<std::string>();
        bool known = false;
        for (const std::string& k : bundle_kinds()) known = known || k == b.kind;
        if (!known)
            throw io_error(io_error::kind_t::structure, path,
                           "unknown bundle kind '" + b.kind + "'");
        b.problem = pc.header.at("problem").get<std::string>();
        b.param_names = pc.header.at("param_names").get<std::vector<std::string>>();
        b.field_order = pc.header.at("field_order").get<std::vector<std::string>>();
        b.latent_dims = pc.header.at("latent_dims").get<std::vector<std::size_t>>();
        const json& prov = pc.header.at("provenance");
        b.seed = prov.at("seed").get<std::uint64_t>();
        b.epochs = prov.at("epochs").get<std::size_t>();
        b.final_loss = prov.at("final_loss").get<double>();

        std::size_t n = 0;
        for (const json& jn : pc.header.at("nets")) {
            trained_net net;
            net.role = jn.at("role").get<std::string>();
            net.params.spec = detail::spec_from_json(jn, path);
            const std::string tag = "net" + std::to_string(n) + ".";
            for (std::size_t l = 0; l < net.params.spec.layers(); ++l) {
                const matrix w = pc.block_matrix(tag + "w" + std::to_string(l), path);
                const vec bias = pc.block_vec(tag + "b" + std::to_string(l), path);
                if (w.rows() != net.params.spec.widths[l + 1] ||
                    w.cols() != net.params.spec.widths[l] ||
                    bias.size() != net.params.spec.widths[l + 1])
                    throw io_error(io_error::kind_t::structure, path,
                                   "net " + std::to_string(n) + " layer " + std::to_string(l) +
                                       " payload shape contradicts its manifest spec");
                net.params.weights.push_back(w);
                net.params.biases.push_back(bias);
            }
            b.nets.push_back(std::move(net));
            ++n;
        }
        if (pc.header.contains("basis_rank")) {
            pod_basis_t basis;
            basis.xi = pc.block_matrix("basis.xi", path);
            basis.singular_values = pc.block_vec("basis.s", path);
            const std::size_t rank = pc.header.at("basis_rank").get<std::size_t>();
            if (basis.xi.cols() != rank || basis.singular_values.size() != rank)
                throw io_error(io_error::kind_t::structure, path,
                               "basis payload shape contradicts manifest rank");
            b.basis = std::move(basis);
        }
    } catch (const json::exception& e) {
        throw io_error(io_error::kind_t::structure, path,
                       std::string("malformed bundle header: ") + e.what());
    }
    return b;
}

inline surrogate_bundle read_bundle(const std::string& path) {
    return parse_bundle(read_binary_file(path), path);
}

} // namespace aemor
