#ifndef PHKIN_FIELD_IO_HPP
#define PHKIN_FIELD_IO_HPP

#include <string>

#include "phkin/spherical.hpp"

namespace phkin {

/// JSON form: params block, l_max, radial grid arrays, modes as
/// {ell, m, radial: [...]}. Floats round-trip exactly.
std::string field_to_json(const SphericalField& field);
SphericalField field_from_json(const std::string& text);

}  // namespace phkin

#endif
