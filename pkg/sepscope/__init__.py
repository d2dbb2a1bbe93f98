# SPDX-FileCopyrightText: 2023-present Makedonsky <mashianov@gmail.com>
#
# SPDX-License-Identifier: MIT
from sepscope.__about__ import __version__
from sepscope.classify import ClassifyOptions, SeparabilityReport, Verdict, classify
from sepscope.densmat import (
    BlochVector, DensityMatrix, PauliTensor, ProductEnsemble, delta_distance, make_bell, make_ghz, make_max_entangled,
    make_mixed, mix, pauli_expand, pauli_reconstruct
)
from sepscope.exceptions import (
    CapacityError, DomainError, FrameError, InvalidStateError, NotACertificateError, RangeError, SepscopeError
)

__all__ = [
    '__version__',
    'BlochVector',
    'CapacityError',
    'ClassifyOptions',
    'DensityMatrix',
    'DomainError',
    'FrameError',
    'InvalidStateError',
    'NotACertificateError',
    'PauliTensor',
    'ProductEnsemble',
    'RangeError',
    'SepscopeError',
    'SeparabilityReport',
    'Verdict',
    'classify',
    'delta_distance',
    'make_bell',
    'make_ghz',
    'make_max_entangled',
    'make_mixed',
    'mix',
    'pauli_expand',
    'pauli_reconstruct',
]
