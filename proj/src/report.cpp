#include "mandel/report.hpp"

#include <cstdio>
#include <fstream>

namespace mandel::report {

json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

namespace {

cplx complex_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError("field '" + field + "' must be a [re, im] pair");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

double positive_tol(const json& j, const std::string& name, double fallback) {
    if (!j.contains(name)) return fallback;
    if (!j[name].is_number() || !(j[name].get<double>() > 0.0))
        throw ConfigError("tolerance '" + name + "' must be a positive number");
    return j[name].get<double>();
}

} // namespace

json DiagramConfig::to_json() const {
    json doc;
    doc["genus"] = ms.genus;
    if (ms.genus == 1) doc["B"] = complex_to_json(ms.B);
    doc["points"] = json::array();
    for (const cplx& p : ms.points) doc["points"].push_back(complex_to_json(p));
    doc["residues"] = ms.residues;
    doc["tolerances"] = {
        {"quad", tol.quad_tol},       {"jet", tol.jet_tol},
        {"period", tol.period_tol},   {"series", tol.series_rel_tol},
        {"constancy", tol.constancy_tol}, {"clearance", tol.clearance},
        {"merge", tol.merge_tol},     {"b_min", tol.b_min},
    };
    doc["seed"] = seed;
    doc["samples"] = samples;
    return doc;
}

DiagramConfig parse_config(const json& doc) {
    DiagramConfig cfg;
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (!doc.contains("genus") || !doc["genus"].is_number_integer())
        throw ConfigError("missing integer field 'genus'");
    cfg.ms.genus = doc["genus"].get<int>();
    if (cfg.ms.genus != 0 && cfg.ms.genus != 1)
        throw ConfigError("'genus' must be 0 or 1");
    if (cfg.ms.genus == 1) {
        if (!doc.contains("B")) throw ConfigError("genus 1 requires field 'B'");
        cfg.ms.B = complex_from_json(doc["B"], "B");
    }
    if (!doc.contains("points") || !doc["points"].is_array())
        throw ConfigError("missing array field 'points'");
    for (size_t i = 0; i < doc["points"].size(); ++i)
        cfg.ms.points.push_back(complex_from_json(doc["points"][i], "points"));
    if (!doc.contains("residues") || !doc["residues"].is_array())
        throw ConfigError("missing array field 'residues'");
    for (const auto& r : doc["residues"]) {
        if (!r.is_number()) throw ConfigError("'residues' must be numbers");
        cfg.ms.residues.push_back(r.get<double>());
    }
    if (cfg.ms.points.size() != cfg.ms.residues.size())
        throw ConfigError("'points' and 'residues' must have equal length");
    if (cfg.ms.points.size() < 2) throw ConfigError("need at least two marked points");
    double sum = 0.0, scale = 0.0;
    for (double a : cfg.ms.residues) {
        sum += a;
        scale += std::abs(a);
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale))
        throw ConfigError("residues must sum to zero");
    const json tols = doc.contains("tolerances") ? doc["tolerances"] : json::object();
    if (!tols.is_object()) throw ConfigError("'tolerances' must be an object");
    cfg.tol.quad_tol = positive_tol(tols, "quad", cfg.tol.quad_tol);
    cfg.tol.jet_tol = positive_tol(tols, "jet", cfg.tol.jet_tol);
    cfg.tol.period_tol = positive_tol(tols, "period", cfg.tol.period_tol);
    cfg.tol.series_rel_tol = positive_tol(tols, "series", cfg.tol.series_rel_tol);
    cfg.tol.constancy_tol = positive_tol(tols, "constancy", cfg.tol.constancy_tol);
    cfg.tol.clearance = positive_tol(tols, "clearance", cfg.tol.clearance);
    cfg.tol.merge_tol = positive_tol(tols, "merge", cfg.tol.merge_tol);
    cfg.tol.b_min = positive_tol(tols, "b_min", cfg.tol.b_min);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
            throw ConfigError("'seed' must be an integer");
        cfg.seed = doc["seed"].get<uint64_t>();
    }
    if (doc.contains("samples")) {
        if (!doc["samples"].is_number_integer() || doc["samples"].get<int>() < 4)
            throw ConfigError("'samples' must be an integer >= 4");
        cfg.samples = doc["samples"].get<int>();
    }
    return cfg;
}

DiagramConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json manifest(const DiagramConfig& cfg) {
    json m;
    m["artifact_version"] = kArtifactVersion;
    m["convention_table_version"] = kConventionTableVersion;
    m["config"] = cfg.to_json();
    return m;
}

json tau_report_json(const tau::TauReport& rep, const DiagramConfig& cfg) {
    json payload;
    payload["tau12"] = complex_to_json(rep.tau12);
    payload["abs_tau_sq"] = rep.abs_tau_sq;
    payload["det_im_B"] = rep.det_im_B;
    payload["determinant_up_to_C"] = rep.determinant_up_to_C;
    payload["constancy_spread"] = rep.constancy_spread;
    payload["sample_seed"] = rep.sample_seed;
    payload["n_samples"] = rep.n_samples;
    payload["manifest"] = manifest(cfg);
    return payload;
}

json varcheck_report_json(const varcheck::VarCheckResult& res, const DiagramConfig& cfg,
                          const varcheck::VarCheckConfig& vc) {
    json payload;
    payload["all_pass"] = res.all_pass;
    payload["max_rel_discrepancy"] = res.max_rel_discrepancy;
    payload["jacobian_condition"] = res.jacobian_condition;
    payload["tolerance"] = vc.tolerance;
    payload["fd_steps"] = json::array({vc.fd_step, vc.fd_step_2});
    payload["richardson"] = vc.richardson;
    payload["convention_table"] = {{"version", vc.table.version},
                                   {"stretch_sign", vc.table.stretch_sign},
                                   {"twist_sign", vc.table.twist_sign},
                                   {"closed_sign", vc.table.closed_sign}};
    payload["coordinates"] = json::array();
    for (const auto& r : res.reports) {
        payload["coordinates"].push_back({{"coordinate", r.coordinate},
                                          {"fd_derivative", r.fd_derivative},
                                          {"contour_value", r.contour_value},
                                          {"rel_discrepancy", r.rel_discrepancy},
                                          {"cycle", r.cycle_id},
                                          {"sign", r.sign_applied},
                                          {"pass", r.pass}});
    }
    payload["manifest"] = manifest(cfg);
    return payload;
}

std::string to_text(const json& doc) { return doc.dump(2) + "\n"; }

uint64_t content_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return std::string(buf);
}

void atomic_write(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp + " for writing");
        os << text;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("atomic rename failed for " + path);
}

} // namespace mandel::report
