"""HBVM(k, s) integrators for differential equations with a piecewise
constant delayed argument ``y(floor t)``."""

from hbvm_fdepca.diagnostics import (
    ConvergenceRow,
    DriftSeries,
    coefficient_decay_report,
    convergence_order,
    convergence_table,
    hamiltonian_series,
    last_point_error,
    stroboscopic_sample,
)
from hbvm_fdepca.errors import (
    EvaluationError,
    HbvmError,
    HorizonMismatchError,
    InvalidParameterError,
    StepFailure,
    UndefinedOrderError,
    UnsupportedOperationError,
)
from hbvm_fdepca.integrator import (
    AlignedStep,
    GeneralStep,
    SolveConfig,
    StepRecord,
    Trajectory,
    dense_eval,
    integrate,
)
from hbvm_fdepca.legendre import eval_basis, eval_integrated_basis
from hbvm_fdepca.problem import PROBLEM3_PERIOD, FdepcaProblem, builtin, hamiltonian, hamiltonian_problem
from hbvm_fdepca.quadrature import QuadratureRule, gauss_legendre
from hbvm_fdepca.tableau import HbvmTableau, build_tableau, gauss_collocation_matrix
