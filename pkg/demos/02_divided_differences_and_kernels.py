"""Divided differences, confluent nodes, and their B-spline kernels.

Every divided difference of order p is the integral of the p-th
derivative against a piecewise-polynomial kernel of total mass 1/p!.
"""

import numpy as np

from opshift import (
    GaussianFunction,
    PolynomialFunction,
    divided_difference,
    integral_against_derivative,
    peano_kernel,
    weight_multiply,
)

# --- basics -----------------------------------------------------------------

square = PolynomialFunction((0.0, 0.0, 1.0))
print("second divided difference of x^2 (always 1):", divided_difference(square, [0.4, -1.2, 3.0]))

gauss = GaussianFunction(0.0, 1.0)
print("confluent pair (0, 0) gives the derivative:", divided_difference(gauss, [0.0, 0.0]))
print("gaussian value check g'(0) = 0:            ", complex(gauss.eval_deriv(1, 0.0)))

# --- the weight u(x) = x - i --------------------------------------------------

u = PolynomialFunction((-1j, 1.0))
print("\nweight u: first difference", divided_difference(u, [0.0, 2.0]), "second", divided_difference(u, [0.0, 1.0, 2.0]))
gu = weight_multiply(gauss, 1)
x = 0.7
lhs = complex(gu.eval_deriv(1, x))
rhs = complex(gauss.eval_deriv(1, x)) * (x - 1j) + complex(gauss.eval_deriv(0, x))
print("product-rule check for g*u:", abs(lhs - rhs))

# --- kernels ------------------------------------------------------------------

hat = peano_kernel([0.0, 1.0, 2.0])
print("\nhat kernel value at 1 (peak 1/2):", np.real(hat(1.0)))
print("hat kernel mass (1/2! = 0.5):    ", np.real(hat.lebesgue_integral()))

nodes = [-1.0, -0.2, 0.5, 1.7]
k = peano_kernel(nodes)
dd = divided_difference(gauss, nodes)
integral = integral_against_derivative(gauss, 3, k)
print("\nkernel representation of a 3rd difference:")
print("  divided difference:", dd)
print("  kernel integral:   ", integral)
print("  deviation:         ", abs(dd - integral))

taylor = peano_kernel([0.0, 0.0, 0.0, 1.0])
xs = np.linspace(0.05, 0.95, 5)
print("\nrepeated-node kernel vs (1-x)^2/2! (Taylor form):")
print(np.max(np.abs(taylor(xs) - (1 - xs) ** 2 / 2.0)))
