"""Bracketed scalar minimization: golden-section search with parabolic steps.

The profile criterion minimized by the model fitter is smooth and univariate,
so a derivative-free bracketed minimizer is enough. ``golden_parabolic_min``
is a classic Brent-style local minimizer; ``scan_minimize`` wraps it with a
coarse grid scan (to pick the right bracket when the function is not known to
be unimodal) and a fixed-stencil parabolic polish that pins the returned
abscissa down to well below the bracketing tolerance, so results are stable
against last-bit perturbations of the objective.
"""

from __future__ import annotations

import math
from typing import Callable

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))  # 0.381966..., golden-section fraction


def golden_parabolic_min(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> tuple[float, float]:
    """Minimize f on [a, b], stopping when the bracket is narrower than tol.

    Uses golden-section steps with successive parabolic interpolation where
    the parabola is trustworthy (Brent's safeguards).

    Args:
        f: objective; must be finite on [a, b].
        a, b: bracket endpoints, a < b.
        tol: absolute width of the final bracket.
        max_iter: hard cap on function evaluations.

    Returns:
        (x, f(x)) at the best point found.
    """
    if not a < b:
        raise ValueError(f"invalid bracket [{a}, {b}]")

    x = a + _GOLDEN * (b - a)
    fx = f(x)
    # v, w: previous and second-previous best points for the parabola
    v, fv = x, fx
    w, fw = x, fx
    d = 0.0   # last step
    e = 0.0   # step before last

    for _ in range(max_iter):
        if (b - a) < tol:
            break
        mid = 0.5 * (a + b)
        step_floor = 1e-12 * (1.0 + abs(x))

        use_golden = True
        if abs(e) > step_floor:
            # Parabola through (x, fx), (w, fw), (v, fv)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            # Accept only if the step is small and lands inside the bracket
            if q > 0.0 and abs(p) < abs(0.5 * q * e_prev) and a * q < x * q + p < b * q:
                d = p / q
                u = x + d
                if (u - a) < tol or (b - u) < tol:
                    d = math.copysign(0.25 * tol, mid - x)
                use_golden = False
        if use_golden:
            e = (b - x) if x < mid else (a - x)
            d = _GOLDEN * e

        u = x + d if abs(d) > step_floor else x + math.copysign(step_floor, d)
        fu = f(u)

        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    return x, fx


def _parabolic_snap(
    f: Callable[[float], float],
    x: float,
    fx: float,
    h: float,
    lo: float,
    hi: float,
) -> tuple[float, float]:
    """One fixed-stencil parabolic vertex step around x.

    Evaluates f at x +/- h and moves to the parabola vertex when the local
    curvature estimate is positive and the step stays within the stencil.
    The stencil width h is large enough that the curvature estimate is immune
    to evaluation round-off, which makes the result reproducible across
    mathematically equivalent inputs.
    """
    if x - h < lo or x + h > hi:
        return x, fx
    f_lo = f(x - h)
    f_hi = f(x + h)
    denom = f_lo - 2.0 * fx + f_hi
    if not denom > 1e-13 * (1.0 + abs(fx)):
        return x, fx
    step = 0.5 * h * (f_lo - f_hi) / denom
    if abs(step) > h:
        return x, fx
    x_new = x + step
    return x_new, f(x_new)


def scan_minimize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n_scan: int = 81,
    tol: float = 1e-8,
    polish_steps: tuple[float, ...] = (1e-4, 1e-5),
) -> tuple[float, float]:
    """Global-ish bracketed minimization on [lo, hi].

    Scans n_scan equally spaced points, refines the best bracket with
    ``golden_parabolic_min``, then applies parabolic polish steps with the
    given stencil widths. The polish leaves boundary optima untouched.

    Returns:
        (x, f(x)) at the minimizer.
    """
    if n_scan < 3:
        raise ValueError("n_scan must be at least 3")
    width = hi - lo
    xs = [lo + width * k / (n_scan - 1) for k in range(n_scan)]
    fs = [f(x) for x in xs]
    k = min(range(n_scan), key=fs.__getitem__)

    a = xs[k - 1] if k > 0 else xs[0]
    b = xs[k + 1] if k < n_scan - 1 else xs[n_scan - 1]
    x, fx = golden_parabolic_min(f, a, b, tol=tol)
    if fs[k] < fx:
        x, fx = xs[k], fs[k]

    for h in polish_steps:
        x, fx = _parabolic_snap(f, x, fx, h, lo, hi)
    return x, fx
