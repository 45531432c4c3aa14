#pragma once

#include <string>

#include "ghostqc/imaging.hpp"

namespace ghostqc::cli {

// Loads a ground-truth object. Accepts "builtin:<kind>:<side>" (kinds: glyph,
// plane, texture), a .csv float image, or a .pgm file.
Image load_object(const std::string& spec);

}  // namespace ghostqc::cli
