#include "qsr/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qsr {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Canonical text rendering

void dump_value(const json& j, std::string& out, int depth);

void indent_to(std::string& out, int depth) {
    out.append(static_cast<std::size_t>(2 * depth), ' ');
}

void dump_value(const json& j, std::string& out, int depth) {
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                indent_to(out, depth + 1);
                out += json(it.key()).dump();  // escaped key
                out += ": ";
                dump_value(it.value(), out, depth + 1);
            }
            out += '\n';
            indent_to(out, depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays nested at most two deep (complex numbers, matrix rows)
            // stay on one line; anything deeper gets one element per line.
            bool leaf = true;
            for (const auto& v : j) {
                if (v.is_object()) {
                    leaf = false;
                    break;
                }
                if (v.is_array()) {
                    for (const auto& inner : v) {
                        if (inner.is_object() || inner.is_array()) {
                            leaf = false;
                            break;
                        }
                    }
                    if (!leaf) break;
                }
            }
            if (leaf) {
                out += '[';
                bool first = true;
                for (const auto& v : j) {
                    if (!first) out += ", ";
                    first = false;
                    dump_value(v, out, depth);
                }
                out += ']';
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                indent_to(out, depth + 1);
                dump_value(v, out, depth + 1);
            }
            out += '\n';
            indent_to(out, depth);
            out += ']';
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            // Integers, booleans, strings and null render identically under
            // any conforming serializer.
            out += j.dump();
            return;
    }
}

// ---------------------------------------------------------------------------
// Typed field access with precise error messages

const json& require_field(const json& j, const std::string& name) {
    const auto it = j.find(name);
    if (it == j.end()) {
        throw MalformedInput("document: missing field \"" + name + "\"");
    }
    return *it;
}

double number_from_json(const json& j, const std::string& field) {
    if (!j.is_number()) {
        throw MalformedInput("document: field \"" + field + "\" must be a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw MalformedInput("document: field \"" + field + "\" must be finite");
    }
    return v;
}

Complex complex_from_json(const json& j, const std::string& field) {
    if (j.is_number()) {
        return Complex(number_from_json(j, field), 0.0);
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw MalformedInput("document: field \"" + field +
                             "\" must be a complex number [re, im]");
    }
    const Complex z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw MalformedInput("document: field \"" + field + "\" must be finite");
    }
    return z;
}

Index index_from_json(const json& j, const std::string& field) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
        throw MalformedInput("document: field \"" + field + "\" must be an integer");
    }
    return j.get<Index>();
}

std::map<std::string, std::string> meta_from_json(const json& j) {
    std::map<std::string, std::string> meta;
    const auto it = j.find("meta");
    if (it == j.end()) return meta;
    if (!it->is_object()) {
        throw MalformedInput("document: field \"meta\" must be an object of strings");
    }
    for (auto entry = it->begin(); entry != it->end(); ++entry) {
        if (!entry.value().is_string()) {
            throw MalformedInput("document: field \"meta\" must be an object of strings");
        }
        meta[entry.key()] = entry.value().get<std::string>();
    }
    return meta;
}

// ---------------------------------------------------------------------------
// Payload parsers

QuantumLinearSystem system_from_json(const json& p) {
    QuantumLinearSystem sys(doubled_from_json(require_field(p, "f"), "f"),
                            doubled_from_json(require_field(p, "g"), "g"),
                            doubled_from_json(require_field(p, "h"), "h"),
                            doubled_from_json(require_field(p, "k"), "k"));
    if (p.contains("n_modes") &&
        index_from_json(p["n_modes"], "n_modes") != sys.n_modes()) {
        throw DimensionMismatch("document: \"n_modes\" disagrees with the matrix shapes");
    }
    if (p.contains("m_fields") &&
        index_from_json(p["m_fields"], "m_fields") != sys.m_fields()) {
        throw DimensionMismatch("document: \"m_fields\" disagrees with the matrix shapes");
    }
    return sys;
}

PhysicalParams physical_from_json(const json& p) {
    DoubledMatrix m = doubled_from_json(require_field(p, "m"), "m");
    DoubledMatrix n = doubled_from_json(require_field(p, "n"), "n");
    Matrix s = matrix_from_json(require_field(p, "s"), "s");
    PhysicalParams params =
        PhysicalParams::canonical(std::move(m), std::move(n), std::move(s));
    if (p.contains("theta")) {
        params.Theta = matrix_from_json(p["theta"], "theta");
    }
    validate_physical_params(params);
    return params;
}

PerturbedSystem perturbed_from_json(const json& p) {
    return PerturbedSystem(doubled_from_json(require_field(p, "fa"), "fa"),
                           doubled_from_json(require_field(p, "fb"), "fb"),
                           doubled_from_json(require_field(p, "fc"), "fc"),
                           doubled_from_json(require_field(p, "fd"), "fd"),
                           doubled_from_json(require_field(p, "ga"), "ga"),
                           doubled_from_json(require_field(p, "gb"), "gb"),
                           doubled_from_json(require_field(p, "ha"), "ha"),
                           doubled_from_json(require_field(p, "hb"), "hb"),
                           doubled_from_json(require_field(p, "k"), "k"));
}

SpecialClassParams special_from_json(const json& p) {
    SpecialClassParams params(doubled_from_json(require_field(p, "ma"), "ma"),
                              doubled_from_json(require_field(p, "mb"), "mb"),
                              doubled_from_json(require_field(p, "mc"), "mc"),
                              doubled_from_json(require_field(p, "md"), "md"),
                              doubled_from_json(require_field(p, "na"), "na"),
                              doubled_from_json(require_field(p, "nb"), "nb"),
                              matrix_from_json(require_field(p, "s"), "s"));
    const SpecialClassValidation v = validate_params(params);
    if (!v.pass) {
        const double worst = std::max({v.ma_hermiticity, v.md_hermiticity,
                                       v.mc_adjoint_residual, v.s_unitarity});
        throw StructureViolation(
            "document: special_class payload violates its invariants (worst residual " +
                std::to_string(worst) + ")",
            worst);
    }
    return params;
}

BogoliubovComponent bogoliubov_from_json(const json& p) {
    BogoliubovComponent b{doubled_from_json(require_field(p, "b"), "b")};
    const BogoliubovCheck check = is_bogoliubov(b.B);
    if (!check.pass) {
        throw StructureViolation(
            "document: \"b\" is not a Bogoliubov matrix (residual " +
                std::to_string(check.residual) + ")",
            check.residual);
    }
    return b;
}

CavitySqueezerParams cavity_from_json(const json& p) {
    CavitySqueezerParams params;
    params.k1 = number_from_json(require_field(p, "k1"), "k1");
    params.k2 = number_from_json(require_field(p, "k2"), "k2");
    params.gamma = number_from_json(require_field(p, "gamma"), "gamma");
    params.chi = complex_from_json(require_field(p, "chi"), "chi");
    validate(params);
    return params;
}

// ---------------------------------------------------------------------------
// Payload writers

json system_to_json(const QuantumLinearSystem& sys) {
    json p;
    p["n_modes"] = sys.n_modes();
    p["m_fields"] = sys.m_fields();
    p["f"] = doubled_to_json(sys.F());
    p["g"] = doubled_to_json(sys.G());
    p["h"] = doubled_to_json(sys.H());
    p["k"] = doubled_to_json(sys.K());
    return p;
}

json physical_to_json(const PhysicalParams& params) {
    json p;
    p["n_modes"] = params.n_modes;
    p["m_fields"] = params.m_fields;
    p["theta"] = matrix_to_json(params.Theta);
    p["m"] = doubled_to_json(params.M);
    p["n"] = doubled_to_json(params.N);
    p["s"] = matrix_to_json(params.S);
    return p;
}

json perturbed_to_json(const PerturbedSystem& ps) {
    json p;
    p["n_slow"] = ps.n_slow;
    p["n_fast"] = ps.n_fast;
    p["m_fields"] = ps.m_fields;
    p["fa"] = doubled_to_json(ps.Fa);
    p["fb"] = doubled_to_json(ps.Fb);
    p["fc"] = doubled_to_json(ps.Fc);
    p["fd"] = doubled_to_json(ps.Fd);
    p["ga"] = doubled_to_json(ps.Ga);
    p["gb"] = doubled_to_json(ps.Gb);
    p["ha"] = doubled_to_json(ps.Ha);
    p["hb"] = doubled_to_json(ps.Hb);
    p["k"] = doubled_to_json(ps.K);
    return p;
}

json special_to_json(const SpecialClassParams& params) {
    json p;
    p["n_slow"] = params.n_slow;
    p["n_fast"] = params.n_fast;
    p["m_fields"] = params.m_fields;
    p["ma"] = doubled_to_json(params.Ma);
    p["mb"] = doubled_to_json(params.Mb);
    p["mc"] = doubled_to_json(params.Mc);
    p["md"] = doubled_to_json(params.Md);
    p["na"] = doubled_to_json(params.Na);
    p["nb"] = doubled_to_json(params.Nb);
    p["s"] = matrix_to_json(params.S);
    return p;
}

json cavity_to_json(const CavitySqueezerParams& params) {
    json p;
    p["k1"] = params.k1;
    p["k2"] = params.k2;
    p["gamma"] = params.gamma;
    p["chi"] = complex_to_json(params.chi);
    return p;
}

}  // namespace

std::string format_double(double v) {
    if (v == 0.0) return "0";  // normalizes -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_stable(const nlohmann::json& j) {
    std::string out;
    dump_value(j, out, 0);
    out += '\n';
    return out;
}

nlohmann::json complex_to_json(const Complex& z) {
    return json::array({z.real(), z.imag()});
}

nlohmann::json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json doubled_to_json(const DoubledMatrix& d) {
    json j;
    j["r1"] = matrix_to_json(d.upper_left());
    j["r2"] = matrix_to_json(d.upper_right());
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        throw MalformedInput("document: field \"" + field +
                             "\" must be a non-empty array of rows");
    }
    const Index rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) {
        throw MalformedInput("document: field \"" + field +
                             "\" rows must be non-empty arrays");
    }
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw MalformedInput("document: field \"" + field +
                                 "\" rows must all have the same length");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], field);
        }
    }
    return m;
}

DoubledMatrix doubled_from_json(const nlohmann::json& j, const std::string& field) {
    if (j.is_object()) {
        return DoubledMatrix(matrix_from_json(require_field(j, "r1"), field + ".r1"),
                             matrix_from_json(require_field(j, "r2"), field + ".r2"));
    }
    // Full-matrix form: accepted on input, checked against the block
    // symmetry before use.
    const Matrix full = matrix_from_json(j, field);
    try {
        return contract(full);
    } catch (const StructureViolation& e) {
        throw StructureViolation("document: field \"" + field +
                                     "\" is not conjugate-block symmetric (residual " +
                                     std::to_string(e.residual()) + ")",
                                 e.residual());
    } catch (const DimensionMismatch&) {
        throw DimensionMismatch("document: field \"" + field +
                                "\" must have even, positive dimensions");
    }
}

std::string kind_of(const Document& doc) {
    struct Visitor {
        std::string operator()(const QuantumLinearSystem&) const { return "system"; }
        std::string operator()(const PhysicalParams&) const { return "physical_params"; }
        std::string operator()(const PerturbedSystem&) const { return "perturbed"; }
        std::string operator()(const SpecialClassParams&) const { return "special_class"; }
        std::string operator()(const BogoliubovComponent&) const { return "bogoliubov"; }
        std::string operator()(const CavitySqueezerParams&) const {
            return "cavity_squeezer";
        }
    };
    return std::visit(Visitor{}, doc.payload);
}

nlohmann::json to_json(const Document& doc) {
    struct Visitor {
        json operator()(const QuantumLinearSystem& v) const { return system_to_json(v); }
        json operator()(const PhysicalParams& v) const { return physical_to_json(v); }
        json operator()(const PerturbedSystem& v) const { return perturbed_to_json(v); }
        json operator()(const SpecialClassParams& v) const { return special_to_json(v); }
        json operator()(const BogoliubovComponent& v) const {
            json p;
            p["b"] = doubled_to_json(v.B);
            return p;
        }
        json operator()(const CavitySqueezerParams& v) const { return cavity_to_json(v); }
    };
    json j;
    j["qsr_version"] = kWireVersion;
    j["kind"] = kind_of(doc);
    j["payload"] = std::visit(Visitor{}, doc.payload);
    json meta = json::object();
    for (const auto& [key, value] : doc.meta) meta[key] = value;
    j["meta"] = std::move(meta);
    return j;
}

Document from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw MalformedInput("document: top level must be a JSON object");
    }
    const json& version = require_field(j, "qsr_version");
    if (!version.is_number_integer() || version.get<int>() != kWireVersion) {
        throw MalformedInput("document: unsupported \"qsr_version\" (expected " +
                             std::to_string(kWireVersion) + ")");
    }
    const json& kind = require_field(j, "kind");
    if (!kind.is_string()) {
        throw MalformedInput("document: field \"kind\" must be a string");
    }
    const json& payload = require_field(j, "payload");
    if (!payload.is_object()) {
        throw MalformedInput("document: field \"payload\" must be an object");
    }

    Document doc{.payload = CavitySqueezerParams{}, .meta = meta_from_json(j)};
    const std::string k = kind.get<std::string>();
    if (k == "system") {
        doc.payload = system_from_json(payload);
    } else if (k == "physical_params") {
        doc.payload = physical_from_json(payload);
    } else if (k == "perturbed") {
        doc.payload = perturbed_from_json(payload);
    } else if (k == "special_class") {
        doc.payload = special_from_json(payload);
    } else if (k == "bogoliubov") {
        doc.payload = bogoliubov_from_json(payload);
    } else if (k == "cavity_squeezer") {
        doc.payload = cavity_from_json(payload);
    } else {
        throw MalformedInput("document: unknown kind \"" + k + "\"");
    }
    return doc;
}

std::string document_text(const Document& doc) { return dump_stable(to_json(doc)); }

Document load_document(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        text = buffer.str();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open \"" + path + "\" for reading");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        if (in.bad()) {
            throw IoError("failed while reading \"" + path + "\"");
        }
        text = buffer.str();
    }

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedInput("cannot parse \"" + path + "\": " + e.what());
    }
    return from_json(j);
}

void save_document(const Document& doc, const std::string& path) {
    const std::string text = document_text(doc);
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open \"" + path + "\" for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed while writing \"" + path + "\"");
    }
}

std::string document_digest(const Document& doc) {
    const std::string text = document_text(doc);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit
    for (unsigned char byte : text) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace qsr
