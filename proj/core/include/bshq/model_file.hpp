#ifndef BSHQ_MODEL_FILE_HPP
#define BSHQ_MODEL_FILE_HPP

#include <filesystem>
#include <string_view>

#include "bshq/models.hpp"

namespace bshq {

/// Parse a JSON model document:
///
///   {
///     "name": "ho1d", "kind": "lattice", "dof": 1,
///     "constants": {},
///     "lattice": { "offsets": [0], "constraints": ["A1 >= 0"] },
///     "profiles": { "1": "2*A1" },
///     "hamiltonian": "A1",
///     "observables": { "H": "A1", "chi": "chi1" }
///   }
///
/// Potential models replace lattice/profiles/hamiltonian by
/// "potential": "<V(alpha)>", "domain": "circle" | "line" and, for the line,
/// an optional "window": [lo, hi]. Optional for both kinds: "box" (either
/// "a:b,..." or [[a, b], ...]) and "hbar".
///
/// Errors are ModelError (or ParseError for expression syntax) whose message
/// starts with a JSON pointer into the document.
ModelDefinition parse_model_file(std::string_view text);

ModelDefinition load_model_file(const std::filesystem::path &path);

} // namespace bshq

#endif
