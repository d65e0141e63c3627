#ifndef ARCHREC_ARCHREC_HPP
#define ARCHREC_ARCHREC_HPP

#include <archrec/aib.hpp>
#include <archrec/cli.hpp>
#include <archrec/clustering.hpp>
#include <archrec/depgraph.hpp>
#include <archrec/dot.hpp>
#include <archrec/error.hpp>
#include <archrec/overlap.hpp>
#include <archrec/pe_imports.hpp>
#include <archrec/significance.hpp>
#include <archrec/synth.hpp>
#include <archrec/trace.hpp>

#endif
