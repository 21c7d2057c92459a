"""Free probability on truncated moment sequences.

Spectra are handled through their moments. The package convolves and
deconvolves them in the free additive and multiplicative sense, maps a
signal spectrum to the spectrum of the information-plus-noise matrix
``(1/N)(R + sigma X)(R + sigma X)*`` and back, and evaluates the G2
covariance estimator by two independent routes. A seeded Monte Carlo
harness checks the limits on finite random matrices.
"""

from __future__ import annotations

from freeprob.core import (
    Atomic,
    AtomicMeasure,
    CumulantSequence,
    MarchenkoPastur,
    MomentSequence,
    PointMass,
    Semicircle,
    is_plausible,
    moments_of,
)
from freeprob.errors import (
    ConvergenceError,
    DomainError,
    FreeProbError,
    PoleError,
    ResourceError,
    SingularDeconvolutionError,
    SolverError,
)
from freeprob.estimators import (
    InfoNoiseParams,
    g2_fixed_point,
    g2_moment_route,
    info_noise_forward,
    info_noise_inverse,
    info_noise_support_edge,
)
from freeprob.freeconv import (
    add_conv,
    add_deconv,
    aspect_flip,
    mp_conv,
    mp_deconv,
    mult_conv,
    mult_deconv,
    shift,
)
from freeprob.ncpart import NoncrossingPartition, enumerate_nc, kreweras
from freeprob.series import (
    FormalSeries,
    boxed_convolve,
    cumulants_to_moments,
    moeb,
    moments_to_cumulants,
    zeta,
)

__version__ = "0.1.0"
