#pragma once

#include <string>

#include "uqp/types.hpp"

namespace uqp {

/// Serialize a Hermitian matrix as {"n": ..., "entries_row_major": [[re, im], ...]}.
std::string matrix_to_json(const HermitianMatrix& m);

/// Parse the matrix JSON format; validates shape, finiteness and Hermitian
/// symmetry (within 1e-12 * (1 + ||A||_F), then symmetrized).
HermitianMatrix matrix_from_json(const std::string& text);

void save_matrix(const HermitianMatrix& m, const std::string& path);
HermitianMatrix load_matrix(const std::string& path);

}  // namespace uqp
