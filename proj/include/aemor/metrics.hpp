#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aemor/io.hpp"
#include "aemor/snapshot.hpp"

namespace aemor {

/// Error metrics of one predicted field against one reference snapshot.
/// node_err holds the per-node Euclidean norm of the prediction error over
/// the full node range; nodes whose DOFs are all prescribed (and hence never
/// predicted) stay exactly zero.
struct field_eval {
    std::string field;
    double mse = 0.0;
    double vn_mse = 0.0; // mse normalized by the variance of the reference entries
    double max_err = 0.0;
    vec node_err;
};

/// All metrics of one evaluated snapshot. Aggregates: mse is the total squared
/// error over all fields' active DOFs; vn_mse sums the per-field normalized
/// terms (the same weighting the multi-field loss uses); max_err is the worst
/// node over all fields.
struct snapshot_eval {
    std::size_t snapshot = 0;
    vec theta;
    std::vector<field_eval> fields;
    double mse = 0.0;
    double vn_mse = 0.0;
    double max_err = 0.0;
};

inline field_eval eval_field(const field_block& f, std::size_t row, const vec& prediction) {
    if (row >= f.values.rows())
        throw contract_error("eval_field: snapshot index " + std::to_string(row) +
                             " out of range");
    if (prediction.size() != f.active.size())
        throw contract_error("eval_field: prediction width " +
                             std::to_string(prediction.size()) + " does not match the " +
                             std::to_string(f.active.size()) + " active DOFs of field '" +
                             f.name + "'");
    field_eval ev;
    ev.field = f.name;
    const double* truth = f.values.row_ptr(row);
    const std::size_t n_nodes = f.full_width / f.dofs_per_node;
    ev.node_err.assign(n_nodes, 0.0);
    double sq_sum = 0.0;
    for (std::size_t k = 0; k < f.active.size(); ++k) {
        const double d = prediction[k] - truth[k];
        sq_sum += d * d;
        ev.node_err[f.active[k] / f.dofs_per_node] += d * d;
    }
    for (double& e : ev.node_err) e = std::sqrt(e);
    ev.mse = sq_sum / static_cast<double>(f.active.size());
    ev.vn_mse = ev.mse / variance(f.values.row(row));
    ev.max_err = *std::max_element(ev.node_err.begin(), ev.node_err.end());
    return ev;
}

/// Force-block metrics, shaped like a field eval: one err entry per loaded
/// node (Euclidean norm over that node's force components).
inline field_eval eval_force(const snapshot_set& set, std::size_t row, const vec& prediction) {
    if (!set.force) throw data_error("eval_force: snapshot set has no force block");
    const force_block& fb = *set.force;
    if (prediction.size() != fb.values.cols())
        throw contract_error("eval_force: prediction width " +
                             std::to_string(prediction.size()) + " does not match the " +
                             std::to_string(fb.values.cols()) + " stored force entries");
    const field_block& host = set.field(fb.field);
    field_eval ev;
    ev.field = "force(" + fb.field + ")";
    const double* truth = fb.values.row_ptr(row);
    const std::size_t n_nodes = fb.values.cols() / host.dofs_per_node;
    ev.node_err.assign(n_nodes, 0.0);
    double sq_sum = 0.0;
    for (std::size_t k = 0; k < prediction.size(); ++k) {
        const double d = prediction[k] - truth[k];
        sq_sum += d * d;
        ev.node_err[k / host.dofs_per_node] += d * d;
    }
    for (double& e : ev.node_err) e = std::sqrt(e);
    ev.mse = sq_sum / static_cast<double>(prediction.size());
    ev.vn_mse = ev.mse / variance(fb.values.row(row));
    ev.max_err = ev.node_err.empty() ? 0.0 : *std::max_element(ev.node_err.begin(),
                                                               ev.node_err.end());
    return ev;
}

/// Roll per-field metrics into the snapshot-level aggregates.
inline snapshot_eval aggregate_eval(std::size_t snapshot, vec theta,
                                    std::vector<field_eval> fields,
                                    const std::vector<std::size_t>& active_counts) {
    if (fields.size() != active_counts.size())
        throw contract_error("aggregate_eval: one active count per field required");
    snapshot_eval ev;
    ev.snapshot = snapshot;
    ev.theta = std::move(theta);
    double sq_total = 0.0;
    std::size_t n_total = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        sq_total += fields[i].mse * static_cast<double>(active_counts[i]);
        n_total += active_counts[i];
        ev.vn_mse += fields[i].vn_mse;
        ev.max_err = std::max(ev.max_err, fields[i].max_err);
    }
    ev.mse = n_total ? sq_total / static_cast<double>(n_total) : 0.0;
    ev.fields = std::move(fields);
    return ev;
}

/// Wide comparison CSV: one row per (snapshot, field) plus an "(all)"
/// aggregate row, one mse/vn_mse/max_err column triple per bundle.
inline std::string eval_report_csv(const std::vector<std::string>& param_names,
                                   const std::vector<std::string>& bundle_names,
                                   const std::vector<std::vector<snapshot_eval>>& per_bundle) {
    if (bundle_names.empty() || per_bundle.size() != bundle_names.size())
        throw contract_error("eval_report_csv: one eval list per bundle name required");
    for (const auto& evs : per_bundle)
        if (evs.size() != per_bundle.front().size())
            throw contract_error("eval_report_csv: bundles evaluated on different snapshots");

    std::string out = "snapshot";
    for (const std::string& p : param_names) out += "," + p;
    out += ",field";
    for (const std::string& b : bundle_names)
        out += "," + b + "_mse," + b + "_vn_mse," + b + "_max_err";
    out += "\n";

    for (std::size_t s = 0; s < per_bundle.front().size(); ++s) {
        // union of field labels across bundles, first-seen order
        std::vector<std::string> labels;
        for (const auto& evs : per_bundle)
            for (const field_eval& f : evs[s].fields)
                if (std::find(labels.begin(), labels.end(), f.field) == labels.end())
                    labels.push_back(f.field);
        labels.push_back("(all)");

        for (const std::string& label : labels) {
            out += std::to_string(per_bundle.front()[s].snapshot);
            for (double t : per_bundle.front()[s].theta) out += "," + fmt17(t);
            out += "," + label;
            for (const auto& evs : per_bundle) {
                const field_eval* found = nullptr;
                for (const field_eval& f : evs[s].fields)
                    if (f.field == label) found = &f;
                if (label == "(all)") {
                    out += "," + fmt17(evs[s].mse) + "," + fmt17(evs[s].vn_mse) + "," +
                           fmt17(evs[s].max_err);
                } else if (found) {
                    out += "," + fmt17(found->mse) + "," + fmt17(found->vn_mse) + "," +
                           fmt17(found->max_err);
                } else {
                    out += ",,,"; // bundle does not predict this field
                }
            }
            out += "\n";
        }
    }
    return out;
}

/// Plot-ready per-node error CSV: node coordinates (when the set carries
/// them) and one error column per bundle. Only real field blocks appear;
/// force pseudo-fields live in the report CSV.
inline std::string node_error_csv(const snapshot_set& truth,
                                  const std::vector<std::string>& bundle_names,
                                  const std::vector<std::vector<snapshot_eval>>& per_bundle) {
    std::string out = "snapshot,field,node,x,y";
    for (const std::string& b : bundle_names) out += ",err_" + b;
    out += "\n";
    for (std::size_t s = 0; s < per_bundle.front().size(); ++s) {
        const std::size_t row = per_bundle.front()[s].snapshot;
        for (const field_block& f : truth.fields) {
            std::vector<const field_eval*> evs(bundle_names.size(), nullptr);
            bool any = false;
            for (std::size_t b = 0; b < per_bundle.size(); ++b)
                for (const field_eval& fe : per_bundle[b][s].fields)
                    if (fe.field == f.name) {
                        evs[b] = &fe;
                        any = true;
                    }
            if (!any) continue;
            const std::size_t n_nodes = f.full_width / f.dofs_per_node;
            for (std::size_t node = 0; node < n_nodes; ++node) {
                out += std::to_string(row) + "," + f.name + "," + std::to_string(node);
                if (f.node_coords.rows() == n_nodes && f.node_coords.cols() >= 2)
                    out += "," + fmt17(f.node_coords(node, 0)) + "," +
                           fmt17(f.node_coords(node, 1));
                else
                    out += ",,";
                for (const field_eval* fe : evs)
                    out += fe ? "," + fmt17(fe->node_err[node]) : ",";
                out += "\n";
            }
        }
    }
    return out;
}

} // namespace aemor
