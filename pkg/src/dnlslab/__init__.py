"""dnlslab: pseudospectral laboratory for the derivative NLS equation.

Subpackages:
  spectral     grid, fields, Fourier calculus, norms, test data
  gauge        gauge transformations between the two equation forms
  solver       integrating-factor RK4 evolution and conserved functionals
  multipliers  smoothing multiplier, hyperplane multiplier family, resonant sets
  lambdas      multilinear functionals, modified energies, identity residuals
  bounds       randomized verification of multiplier inequalities
  bourgain     space-time norms and estimate ratio checks
  experiments  scaling studies, identity suite, budget calculator
  cli          command-line interface
"""

__version__ = "0.1.0"
