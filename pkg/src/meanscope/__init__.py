"""meanscope: invariant means and summability methods on a half-line.

A numerical laboratory for averaging operators (sliding window,
exponential, running mean), the sublinear functionals they induce at
infinity, and the summability-method lattice connecting them, together
with a CLI for traces, verdicts, and chain reports.
"""

from .funcspace import (BoundedFunction, ConjugationDirection, CorpusEntry,
                        DomainMismatchError, DomainTag, SmoothnessHint,
                        UnknownLabelError, conjugate_W, corpus, corpus_lookup,
                        dilate, make_function, shift, sup_norm_estimate)
from .quadrature import QuadratureConfig, QuadratureError
from .operators import (GammaKernel, OperatorKind, cesaro_average,
                        exp_average, exp_average_nested,
                        exp_average_via_kernel, gamma_kernel_eval, iterate,
                        lipschitz_decompose_check, window_average)
from .asymptotics import (FunctionalValue, LimsupEstimate, ThetaSchedule,
                          TowerResult, WindowSchedule, estimate_limits,
                          lower_dual, upper_L1, upper_M1, upper_single,
                          upper_tower_limit)
from .summability import (ChainReport, CheckResult, MeanVerdict, MethodId,
                          chain_report, classify, verdict)

__version__ = "0.1.0"
