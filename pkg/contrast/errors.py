"""
/*
 * Software Name : CONTRAST
 * SPDX-License-Identifier: MIT
 *
 * This software is distributed under the MIT license,
 * see the "LICENSE" file for more details
 *
 * Authors: see CONTRIBUTORS.md
 * Software description: CONTRAST: teaching active version-space learners with contrastive examples.
 */
"""


class ContrastError(Exception):
    """Base class for every error the package raises on purpose."""


class ProblemFormatError(ContrastError, ValueError):
    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path) if line is None else f"{path}:{line}")
        if field is not None:
            where.append(field)
        prefix = ": ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DuplicateHypothesisError(ProblemFormatError):
    def __init__(self, first, second, path=None):
        self.pair = (first, second)
        super().__init__(
            f"hypotheses {first} and {second} have identical label rows",
            path=path,
            field="labels",
        )


class MissingFeaturesError(ContrastError, ValueError):
    pass


class NoQueryAvailableError(ContrastError, RuntimeError):
    pass


class SolverCapError(ContrastError, RuntimeError):
    pass


class InvalidPrefixError(ContrastError, ValueError):
    pass


class ConvergenceError(ContrastError, RuntimeError):
    pass


class ConstructionError(ContrastError, RuntimeError):
    pass
