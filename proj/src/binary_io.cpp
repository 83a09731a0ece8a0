// Header-only helpers live in binary_io.hpp.
#include "binary_io.hpp"
