#pragma once

#include "tyann/adapt.hpp"
#include "tyann/annotate.hpp"
#include "tyann/functor.hpp"
#include "tyann/json_io.hpp"

// Convenience umbrella header pulling in the whole library.
