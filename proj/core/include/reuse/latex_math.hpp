#pragma once

#include <string>
#include <string_view>

#include "reuse/mathml.hpp"

namespace reuse {

/// Converts math-mode LaTeX (without delimiters) to canonical presentation
/// MathML. Supported: letters and Greek commands (mi), digit runs and
/// decimals (mn), the operators + - = < > / , ( ) [ ] | ! : and
/// \times \cdot \leq \geq \neq \in \sum \int \pm \to (mo), ^ and _ scripts,
/// \frac, \sqrt, brace groups, common function names (\sin, \log, ...),
/// spacing commands and \left/\right (ignored).
///
/// Throws UnsupportedMath with the offending token and its code point
/// offset for anything else.
std::string latex_math_to_mathml(std::string_view latex_math);

mathml::Node latex_math_to_tree(std::string_view latex_math);

}  // namespace reuse
