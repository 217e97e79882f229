#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "json.hpp"

#include "qsr/cavity_squeezer.hpp"
#include "qsr/special_class.hpp"

namespace qsr {

// Wire format version stamped on and required of every document.
inline constexpr int kWireVersion = 1;

// A typed document: one of the payload kinds the tools exchange, plus a
// free-form string-valued metadata map. Kind strings on the wire:
// "system", "physical_params", "perturbed", "special_class", "bogoliubov",
// "cavity_squeezer".
struct Document {
    using Payload = std::variant<QuantumLinearSystem, PhysicalParams,
                                 PerturbedSystem, SpecialClassParams,
                                 BogoliubovComponent, CavitySqueezerParams>;
    Payload payload;
    std::map<std::string, std::string> meta;
};

std::string kind_of(const Document& doc);

// Document -> JSON value. Matrices are arrays of rows, complex numbers are
// [re, im] pairs, doubled matrices are {"r1": ..., "r2": ...} upper blocks.
nlohmann::json to_json(const Document& doc);

// JSON value -> Document. Accepts doubled fields either as upper blocks or
// as full 2n x 2m matrices (checked and contracted). Every payload is
// validated against its kind's invariants; failures throw MalformedInput,
// StructureViolation, DimensionMismatch or InvalidParameter.
Document from_json(const nlohmann::json& j);

// Canonical text rendering: two-space indentation, keys sorted, every float
// printed with up to 17 significant digits (value-preserving and
// byte-stable across runs). Ends with a newline.
std::string dump_stable(const nlohmann::json& j);

std::string format_double(double v);

// Convenience wrappers; file problems throw IoError. load_document reads
// from stdin when path is "-".
Document load_document(const std::string& path);
void save_document(const Document& doc, const std::string& path);

std::string document_text(const Document& doc);

// FNV-1a 64-bit digest of a document's canonical text, as "fnv1a:<16 hex>".
// Used to tie reports to their inputs.
std::string document_digest(const Document& doc);

// JSON fragments used by both the serializer and the CLI report writers.
nlohmann::json complex_to_json(const Complex& z);
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json doubled_to_json(const DoubledMatrix& d);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);
DoubledMatrix doubled_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace qsr
