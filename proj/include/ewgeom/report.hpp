#pragma once

#include <json.hpp>

#include "ewgeom/checks.hpp"
#include "ewgeom/version.hpp"

namespace ewgeom {

using ordered_json = nlohmann::ordered_json;

// Stable report document. Keys are part of the interchange contract:
// {version, conventions, seed, samples, checks, relations, timings}.
// Timing values are excluded from the determinism guarantee.
inline ordered_json report_document(const SuiteResults& res, const SuiteConfig& cfg) {
    ordered_json doc;
    doc["version"] = kVersion;
    ordered_json conv;
    conv["epsilon_sign"] = "eps_{01} = +1, eps^{01} = +1 (sharp o flat = +id)";
    conv["metric_signature"] = "(+,-,-,-)";
    conv["conjugation"] = "generator-reversing: conj(ab) = conj(b) conj(a)";
    ordered_json rs = ordered_json::object();
    for (const auto& [k, v] : res.resolved_signs) rs[k] = v;
    conv["resolved_signs"] = rs;
    doc["conventions"] = conv;
    doc["seed"] = cfg.seed;
    doc["samples"] = cfg.samples;

    ordered_json checks = ordered_json::array();
    for (const CheckResult& c : res.checks) {
        ordered_json jc;
        jc["name"] = c.asserted ? c.name : cat(c.name, " [reported-only]");
        jc["statistics"] = c.statistics;
        jc["max_rel_residual"] = c.max_rel_residual;
        jc["tol"] = c.tol;
        jc["pass"] = c.pass;
        checks.push_back(jc);
    }
    doc["checks"] = checks;

    ordered_json rels = ordered_json::array();
    for (const RelationResult& r : res.relations) {
        ordered_json jr;
        jr["family"] = r.family;
        jr["statistics"] = r.statistics;
        jr["nullspace_dim"] = r.nullspace_dim;
        ordered_json basis = ordered_json::array();
        for (const auto& v : r.basis) basis.push_back(v);
        jr["basis"] = basis;
        rels.push_back(jr);
    }
    doc["relations"] = rels;

    ordered_json timings;
    timings["total_ms"] = res.total_millis;
    ordered_json per;
    for (const CheckResult& c : res.checks) per[c.name] = c.millis;
    for (const RelationResult& r : res.relations)
        per[cat("relations:", r.family, ":", r.statistics)] = r.millis;
    timings["checks_ms"] = per;
    doc["timings"] = timings;
    return doc;
}

// Strips the timing fields; what remains is byte-stable for equal seeds
// and flags.
inline ordered_json strip_timings(ordered_json doc) {
    doc.erase("timings");
    return doc;
}

}  // namespace ewgeom
