#pragma once

#include <string_view>

#include "elk/grid.hpp"

namespace elk {

/// spectral: Fourier multipliers (power-of-two n only).
/// fd4: periodic fourth-order central differences, any n.
enum class Scheme { spectral, fd4 };

Scheme parse_scheme(std::string_view s);

ScalarField derivative(const ScalarField& f, int axis, Scheme scheme = Scheme::spectral);
ScalarField second_derivative(const ScalarField& f, int a, int b, Scheme scheme = Scheme::spectral);

VectorField gradient(const ScalarField& f, Scheme scheme = Scheme::spectral);
/// Entry (i,j) = d_i v_j.
TensorField jacobian(const VectorField& v, Scheme scheme = Scheme::spectral);
/// Entry (a,b) = d_a d_b f.
TensorField hessian(const ScalarField& f, Scheme scheme = Scheme::spectral);

ScalarField laplacian(const ScalarField& f, Scheme scheme = Scheme::spectral);
VectorField laplacian(const VectorField& v, Scheme scheme = Scheme::spectral);

ScalarField divergence(const VectorField& v, Scheme scheme = Scheme::spectral);
/// Component i is sum_j d_j T(i,j).
VectorField tensor_divergence(const TensorField& t, Scheme scheme = Scheme::spectral);

VectorField curl(const VectorField& v, Scheme scheme = Scheme::spectral);

}  // namespace elk
