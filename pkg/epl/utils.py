from __future__ import annotations

import math
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from .errors import DomainError

# draws for parameters: moduli window and generic phases
PARAM_MODULUS_RANGE = (0.7, 1.4)
SAMPLE_ANNULUS = (0.8, 1.25)
# special-function identities: |p| window and the wider x annulus
ELLIPTIC_BASE_RANGE = (0.01, 0.3)
SPECIAL_ANNULUS = (0.5, 2.0)


def make_rng(seed: Optional[int], stream: int = 0) -> np.random.Generator:
    """Portable seeded generator (PCG64); each stream is an independent sequence."""
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng([int(seed), int(stream)])


def draw_complex(rng: np.random.Generator, r_min: float, r_max: float) -> complex:
    modulus = rng.uniform(r_min, r_max)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return complex(modulus * math.cos(phase), modulus * math.sin(phase))


def sample_points(
    rng: np.random.Generator,
    count: int,
    accept: Callable[[complex], bool],
    annulus: Sequence[float] = SAMPLE_ANNULUS,
    max_attempts: int = 1000,
) -> List[complex]:
    """Points on the annulus, rejecting any the predicate refuses."""
    points: List[complex] = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > max_attempts:
            raise DomainError(f"could not find {count} admissible sample points")
        z = draw_complex(rng, annulus[0], annulus[1])
        if accept(z):
            points.append(z)
    return points


def parse_complex(value: Any) -> complex:
    """Accept numbers, "re,im" / "2+0.1j" strings and [re, im] pairs."""
    if isinstance(value, bool):
        raise DomainError(f"not a complex number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise DomainError(f"complex pairs need exactly two entries, got {value!r}")
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            raise DomainError(f"not a complex pair: {value!r}")
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        try:
            if "," in text:
                re_part, im_part = text.split(",", 1)
                return complex(float(re_part), float(im_part))
            return complex(text.replace("i", "j"))
        except ValueError:
            raise DomainError(f"not a complex number: {value!r}")
    raise DomainError(f"not a complex number: {value!r}")
