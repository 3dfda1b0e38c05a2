#ifndef QCMOD_QCMOD_HPP
#define QCMOD_QCMOD_HPP

#include "qcmod/curves.hpp"
#include "qcmod/dilatation.hpp"
#include "qcmod/domain.hpp"
#include "qcmod/errors.hpp"
#include "qcmod/grid.hpp"
#include "qcmod/linalg.hpp"
#include "qcmod/maps.hpp"
#include "qcmod/modulus.hpp"

#endif  // QCMOD_QCMOD_HPP
