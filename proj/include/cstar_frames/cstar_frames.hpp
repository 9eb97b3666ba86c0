#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "module_space.hpp"
#include "frames.hpp"
#include "decomposition.hpp"
#include "constructors.hpp"
#include "weaving.hpp"
#include "frame_file.hpp"
