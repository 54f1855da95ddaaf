from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .config import DEFAULT_CONFIG, SIZE_PROFILES, load_config
from .errors import DomainError
from .pade import CONSTRAINT_TOL, PadeParams, draw_pade_params
from .painleve import surface_from_pade
from .special_functions import ENV_PRECISION_BITS, Bases, resolve_precision_bits
from .schema import complex_pair
from .utils import make_rng, parse_complex

# stream 0 of the seed is reserved for the parameter draw
PARAMS_STREAM = 0


@dataclass(frozen=True)
class RunConfig:
    bases: Bases
    pade: PadeParams
    gauge: Tuple[Any, ...]
    precision_bits: int
    tolerances: Dict[str, float]
    seed: int
    sizes: Dict[str, int]
    profile: str = "default"
    pade_drawn: bool = False
    out: Optional[str] = None
    log: Optional[str] = None
    verbose: bool = field(default=False, compare=False)

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    def to_dict(self) -> Dict[str, Any]:
        """Everything that determines the numbers of a run, derived values included."""
        b, P = self.bases, self.pade
        S = surface_from_pade(P, self.gauge, b)
        return {
            "bases": {
                "p": complex_pair(b.p),
                "q": complex_pair(b.q),
                "truncation_tol": float(b.truncation_tol),
                "max_terms": b.max_terms,
            },
            "pade": {
                "k": complex_pair(P.k),
                "a": [complex_pair(x) for x in P.a],
                "m": P.m,
                "n": P.n,
                "drawn": self.pade_drawn,
            },
            "gauge": {"c": [complex_pair(x) for x in self.gauge]},
            "surface": {
                "kappa1": complex_pair(S.kappa1),
                "kappa2": complex_pair(S.kappa2),
                "xi": [complex_pair(x) for x in S.xi],
            },
            "precision_bits": self.precision_bits,
            "tolerances": dict(sorted(self.tolerances.items())),
            "seed": self.seed,
            "profile": self.profile,
            "sizes": dict(sorted(self.sizes.items())),
        }


def _arg(args: Any, name: str) -> Any:
    return getattr(args, name, None)


def _int_field(value: Any, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    try:
        result = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if result != value and not isinstance(value, str):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if result < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {result}")
    return result


def _build_pade(section: Dict[str, Any], m: int, n: int, seed: int, b: Bases) -> Tuple[PadeParams, bool]:
    k, a = section.get("k"), section.get("a")
    explicit_a6 = section.get("a6")
    if k is None or a is None:
        if explicit_a6 is not None:
            raise DomainError("a6 given without k and a_1..a_5")
        return draw_pade_params(make_rng(seed, PARAMS_STREAM), m, n, b), True

    if not isinstance(a, list) or len(a) not in (5, 6):
        raise DomainError("pade.a must list a_1..a_5 (a_6 is derived)")
    if len(a) == 6:
        if explicit_a6 is not None:
            raise DomainError("a_6 given twice")
        a, explicit_a6 = a[:5], a[5]
    P = PadeParams.from_free(parse_complex(k), [parse_complex(x) for x in a], m, n, b)
    if explicit_a6 is not None:
        given = b.scalar(parse_complex(explicit_a6))
        if abs(given - P.a[5]) > CONSTRAINT_TOL * abs(P.a[5]):
            raise DomainError(
                f"a6 = {complex(given)} violates a_1...a_6 = k^3 (derived a6 = {complex(P.a[5])})"
            )
    return P, False


def build_settings(args: Any, config_path: Optional[str]) -> RunConfig:
    """
    Build the run configuration using priority:
      DEFAULTS <- config file <- environment <- CLI args (non-None)
    """
    # 1) Load defaults and config file
    if config_path:
        cfg_path = Path(config_path)
        if not cfg_path.exists():
            raise DomainError(f"config file not found: {config_path}")
        cfg = load_config(cfg_path)
    else:
        cfg = copy.deepcopy(DEFAULT_CONFIG)

    # 2) environment, then CLI overrides
    bits = _arg(args, "precision_bits") or os.environ.get(ENV_PRECISION_BITS) or cfg.get("precision_bits")
    bits = resolve_precision_bits(bits)

    seed = _arg(args, "seed")
    seed = _int_field(cfg.get("seed", 0) if seed is None else seed, "seed")
    if seed >= 2 ** 64:
        raise DomainError("seed must fit in 64 bits")

    pade_section = dict(cfg.get("pade") or {})
    m = _int_field(pade_section.get("m", 1) if _arg(args, "m") is None else args.m, "m")
    n = _int_field(pade_section.get("n", 1) if _arg(args, "n") is None else args.n, "n")

    bases_section = cfg.get("bases") or {}
    b = Bases.create(
        parse_complex(bases_section.get("p", DEFAULT_CONFIG["bases"]["p"])),
        parse_complex(bases_section.get("q", DEFAULT_CONFIG["bases"]["q"])),
        precision_bits=bits,
        truncation_tol=bases_section.get("truncation_tol"),
        max_terms=_int_field(bases_section.get("max_terms", 400), "bases.max_terms", 1),
    )

    P, drawn = _build_pade(pade_section, m, n, seed, b)

    gauge = (cfg.get("gauge") or {}).get("c")
    if not isinstance(gauge, list) or len(gauge) != 4:
        raise DomainError("gauge.c must list four constants c_1..c_4")
    gauge = tuple(b.scalar(parse_complex(c)) for c in gauge)
    surface_from_pade(P, gauge, b)

    tolerances = dict(DEFAULT_CONFIG["tolerances"])
    tolerances.update(cfg.get("tolerances") or {})
    if _arg(args, "tol") is not None:
        tolerances = {key: float(args.tol) for key in tolerances}
    tolerances = {key: float(value) for key, value in tolerances.items()}

    profile = _arg(args, "profile") or cfg.get("profile") or "default"
    if not isinstance(profile, str) or profile not in SIZE_PROFILES:
        raise DomainError(f"unknown size profile {profile!r}, expected one of {sorted(SIZE_PROFILES)}")
    sizes = dict(SIZE_PROFILES[profile])
    sizes.update(cfg.get("sizes") or {})
    sizes = {key: _int_field(value, f"sizes.{key}", 1) for key, value in sizes.items()}

    output = cfg.get("output") or {}
    return RunConfig(
        bases=b,
        pade=P,
        gauge=gauge,
        precision_bits=bits,
        tolerances=tolerances,
        seed=seed,
        sizes=sizes,
        profile=profile,
        pade_drawn=drawn,
        out=_arg(args, "out") or output.get("out"),
        log=_arg(args, "log") or output.get("log"),
        verbose=bool(_arg(args, "verbose")),
    )
