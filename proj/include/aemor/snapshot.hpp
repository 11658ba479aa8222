#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "aemor/matrix.hpp"

namespace aemor {

/// One named solution field. `values` holds only the active DOFs (the network
/// inputs); `active`/`prescribed` index into the full per-field DOF range so
/// full vectors can be reassembled. `node_coords` (optional, one row per node
/// of the full grid) feeds plot-ready exports.
struct field_block {
    std::string name;
    std::size_t dofs_per_node = 1; ///< n_B: components per node
    std::size_t full_width = 0;    ///< active + prescribed DOFs
    std::vector<std::size_t> active;
    std::vector<std::size_t> prescribed;
    matrix values; ///< n_S x active.size()
    matrix node_coords; ///< optional: (full_width / dofs_per_node) x spatial dim

    std::size_t width() const { return active.size(); }

    void validate(std::size_t n_s) const {
        if (values.rows() != n_s)
            throw contract_error("field '" + name + "': " + std::to_string(values.rows()) +
                                 " rows for " + std::to_string(n_s) + " snapshots");
        if (values.cols() != active.size())
            throw contract_error("field '" + name + "': " + std::to_string(values.cols()) +
                                 " columns for " + std::to_string(active.size()) +
                                 " active DOFs");
        if (active.size() + prescribed.size() != full_width)
            throw contract_error("field '" + name + "': masks do not sum to full width");
        std::vector<bool> seen(full_width, false);
        for (std::size_t idx : active) {
            if (idx >= full_width || seen[idx])
                throw contract_error("field '" + name + "': bad or duplicate active index");
            seen[idx] = true;
        }
        for (std::size_t idx : prescribed) {
            if (idx >= full_width || seen[idx])
                throw contract_error("field '" + name + "': active/prescribed masks overlap");
            seen[idx] = true;
        }
        if (dofs_per_node == 0 || full_width % dofs_per_node != 0)
            throw contract_error("field '" + name + "': full width not divisible by DOFs per node");
    }

    /// Scatter one active-DOF row into a full-width vector; prescribed DOFs
    /// take the given fill (their values are not stored).
    vec assemble_full(const vec& active_values, double prescribed_fill = 0.0) const {
        if (active_values.size() != active.size())
            throw contract_error("assemble_full: length " + std::to_string(active_values.size()) +
                                 " for " + std::to_string(active.size()) + " active DOFs");
        vec full(full_width, prescribed_fill);
        for (std::size_t i = 0; i < active.size(); ++i) full[active[i]] = active_values[i];
        return full;
    }
};

/// Boundary force block at the prescribed DOFs of the field it augments.
struct force_block {
    std::string field; ///< name of the field whose prescribed DOFs carry these forces
    matrix values;     ///< n_S x (n_A * n_B)
};

struct snapshot_set {
    matrix params; ///< n_S x param_dim
    std::vector<std::string> param_names;
    std::vector<field_block> fields;
    std::optional<force_block> force;
    std::string provenance = "external";
    std::uint64_t seed = 0;

    std::size_t count() const { return params.rows(); }
    std::size_t param_dim() const { return params.cols(); }

    const field_block& field(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return f;
        throw data_error("snapshot set has no field '" + name + "'");
    }

    std::size_t field_index(const std::string& name) const {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i].name == name) return i;
        throw data_error("snapshot set has no field '" + name + "'");
    }

    int param_index(const std::string& name) const {
        for (std::size_t i = 0; i < param_names.size(); ++i)
            if (param_names[i] == name) return static_cast<int>(i);
        return -1;
    }

    void validate() const {
        if (param_names.size() != params.cols())
            throw contract_error("snapshot set: " + std::to_string(param_names.size()) +
                                 " parameter names for " + std::to_string(params.cols()) +
                                 " columns");
        if (fields.empty()) throw contract_error("snapshot set: no fields");
        for (const auto& f : fields) f.validate(count());
        if (force) {
            if (force->values.rows() != count())
                throw contract_error("snapshot set: force rows != snapshot count");
            const field_block& host = field(force->field);
            if (force->values.cols() != host.prescribed.size())
                throw contract_error("snapshot set: force width " +
                                     std::to_string(force->values.cols()) + " != " +
                                     std::to_string(host.prescribed.size()) +
                                     " prescribed DOFs of field '" + host.name + "'");
        }
    }
};

/// Parameter table as CSV: header from param_names, 17 significant digits.
inline std::string params_csv(const snapshot_set& set) {
    std::string out;
    for (std::size_t j = 0; j < set.param_names.size(); ++j) {
        if (j) out += ',';
        out += set.param_names[j];
    }
    out += '\n';
    char buf[64];
    for (std::size_t i = 0; i < set.params.rows(); ++i) {
        for (std::size_t j = 0; j < set.params.cols(); ++j) {
            if (j) out += ',';
            std::snprintf(buf, sizeof(buf), "%.17g", set.params(i, j));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace aemor
