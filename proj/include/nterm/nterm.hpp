#ifndef NTERM_NTERM_HPP
#define NTERM_NTERM_HPP

#include <nterm/error.hpp>
#include <nterm/lattice.hpp>
#include <nterm/sequence.hpp>
#include <nterm/weights.hpp>
#include <nterm/functionals.hpp>
#include <nterm/approx.hpp>
#include <nterm/trig_lp.hpp>
#include <nterm/rates.hpp>

#endif
