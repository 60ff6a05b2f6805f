// Umbrella header.
#ifndef PEARL_FLOER_PEARL_FLOER_HPP
#define PEARL_FLOER_PEARL_FLOER_HPP

#include "errors.hpp"
#include "geom_kernel.hpp"
#include "gf2.hpp"
#include "floer_complex.hpp"
#include "parallel.hpp"
#include "immersion.hpp"
#include "sphere_example.hpp"
#include "models.hpp"
#include "random.hpp"
#include "datum_io.hpp"
#include "cli.hpp"

#endif
