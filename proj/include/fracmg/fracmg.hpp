#pragma once

#include "fracmg/bench/experiment.hpp"
#include "fracmg/bench/output.hpp"
#include "fracmg/bench/run_config.hpp"
#include "fracmg/fem/assembly.hpp"
#include "fracmg/fem/boundary.hpp"
#include "fracmg/fem/grid.hpp"
#include "fracmg/fem/notch_mesh.hpp"
#include "fracmg/increment/energy_norm.hpp"
#include "fracmg/increment/increment.hpp"
#include "fracmg/increment/problem.hpp"
#include "fracmg/material/crack_density.hpp"
#include "fracmg/material/degradation.hpp"
#include "fracmg/material/density.hpp"
#include "fracmg/material/eig_sym.hpp"
#include "fracmg/material/material_model.hpp"
#include "fracmg/material/splitting.hpp"
#include "fracmg/material/sym_tensor.hpp"
#include "fracmg/opsplit/history.hpp"
#include "fracmg/opsplit/solver.hpp"
#include "fracmg/sparse/banded_ldlt.hpp"
#include "fracmg/sparse/block_matrix.hpp"
#include "fracmg/sparse/cg.hpp"
#include "fracmg/sparse/gauss_seidel.hpp"
#include "fracmg/sparse/multigrid.hpp"
#include "fracmg/sparse/truncation.hpp"
#include "fracmg/tnnmg/config.hpp"
#include "fracmg/tnnmg/local_solvers.hpp"
#include "fracmg/tnnmg/solver.hpp"
#include "fracmg/util/errors.hpp"
#include "fracmg/util/small_matrix.hpp"
