"""Deterministic generators for test spaces and function families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .space import (
    Ball,
    MeasureBased,
    PowerLaw,
    Space,
    check_upper_doubling,
    load_space,
    space_from_arrays,
)

__all__ = ["FixtureSpec", "make_space", "make_function_family", "make_atomic_blocks", "s3"]


@dataclass(frozen=True)
class FixtureSpec:
    """Tagged generator: dyadic_line, cantor, complex_ball, or random_metric."""

    kind: str
    n: int = 0
    kappa: float = 1.0
    c0: float = 2.0
    level: int = 3
    m: float = 1.0
    seed: int = 0
    spacing: float | None = None
    point_mass: float | None = None
    lam: str = "power"


def _dyadic_line(spec: FixtureSpec) -> Space:
    n = spec.n
    if n < 1:
        raise ValueError("dyadic line needs at least one point")
    spacing = spec.spacing if spec.spacing is not None else (1.0 / (n - 1) if n > 1 else 1.0)
    mass = spec.point_mass if spec.point_mass is not None else 1.0 / n
    xs = spacing * np.arange(n, dtype=float)
    D = np.abs(xs[:, None] - xs[None, :])
    w = np.full(n, mass)
    return space_from_arrays(D, w, PowerLaw(spec.c0, spec.kappa), coords=xs[:, None])


def _cantor(spec: FixtureSpec) -> Space:
    level = spec.level
    if level < 1:
        raise ValueError("cantor fixture needs level >= 1")
    pts = np.zeros(1)
    for j in range(1, level + 1):
        pts = np.concatenate([pts, pts + 2.0 * 3.0 ** (-j)])
    pts = np.sort(pts)
    D = np.abs(pts[:, None] - pts[None, :])
    w = np.full(len(pts), 1.0 / len(pts))
    kappa = np.log(2.0) / np.log(3.0)
    return space_from_arrays(D, w, PowerLaw(spec.c0, kappa), coords=pts[:, None])


def _complex_ball(spec: FixtureSpec) -> Space:
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    # radial sampling away from both the origin and the boundary
    radii = 0.15 + 0.7 * rng.random(n)
    angles = 2.0 * np.pi * rng.random(n)
    pts = radii * np.exp(1j * angles)
    doc = {
        "points": [{"id": i, "coords": [float(z.real), float(z.imag)]} for i, z in enumerate(pts)],
        "metric": {"type": "complex_ball"},
        "weights": [1.0] * n,
        "lambda": {"type": "bergman", "m": spec.m},
    }
    space = load_space(doc)
    # rescale the masses so the dominating function really dominates
    worst = 1.0
    for c in range(space.n):
        ix = space.index(c)
        for k in range(len(ix.dvals) - 1):
            lam = float(space.lam.value(space, c, ix.outer[k]))
            worst = max(worst, ix.cumw0[ix.ends[k]] / lam)
    doc["weights"] = [1.0 / (1.001 * worst)] * n
    return load_space(doc)


def _random_metric(spec: FixtureSpec) -> Space:
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    coords = rng.random((n, 2))
    D = np.sqrt(np.sum((coords[:, None, :] - coords[None, :, :]) ** 2, axis=2))
    w = np.exp(rng.uniform(np.log(0.05), np.log(1.0), size=n))
    if spec.lam == "measure":
        return space_from_arrays(D, w, MeasureBased(), coords=coords)
    # fit the power-law constant so mass domination holds at generation
    space = space_from_arrays(D, w, PowerLaw(1.0, spec.kappa), coords=coords)
    worst = 0.0
    for c in range(n):
        ix = space.index(c)
        for k in range(len(ix.dvals) - 1):
            worst = max(worst, ix.cumw0[ix.ends[k]] / ix.outer[k] ** spec.kappa)
    if worst == 0.0:
        worst = 1.0
    return space_from_arrays(D, w, PowerLaw(1.001 * worst, spec.kappa), coords=coords)


def make_space(spec: FixtureSpec) -> Space:
    """Deterministic space for the given spec; rejects fixtures mass domination fails on."""
    builders = {
        "dyadic_line": _dyadic_line,
        "cantor": _cantor,
        "complex_ball": _complex_ball,
        "random_metric": _random_metric,
    }
    if spec.kind not in builders:
        raise ValueError(f"unknown fixture kind {spec.kind!r}")
    space = builders[spec.kind](spec)
    if spec.lam != "measure" or spec.kind != "random_metric":
        report = check_upper_doubling(space)
        if not report.passed:
            raise ValueError(f"fixture {spec} fails mass domination: {report.violations[:3]}")
    return space


def s3() -> Space:
    """Three unit-weight collinear points at unit spacing with lambda = 2r."""
    return make_space(FixtureSpec("dyadic_line", n=3, kappa=1.0, c0=2.0, spacing=1.0, point_mass=1.0))


# ---------------------------------------------------------------------------
# function families


def _indicator_family(space: Space, count: int) -> list[np.ndarray]:
    sets = space.distinct_canonical_sets()
    if len(sets) > count:
        pick = np.linspace(0, len(sets) - 1, count).round().astype(int)
        sets = [sets[i] for i in sorted(set(pick))]
    out = []
    for members in sets:
        f = np.zeros(space.n)
        f[members] = 1.0
        out.append(f)
    return out


def _bump_family(space: Space, count: int) -> list[np.ndarray]:
    diam = max(space.diameter, space.min_positive_distance())
    centers = np.linspace(0, space.n - 1, max(count // 3, 1)).round().astype(int)
    widths = [diam / 2.0, diam / 4.0, diam / 8.0]
    out = []
    for c in sorted(set(centers)):
        for s in widths:
            out.append(np.exp(-((space.D[c] / s) ** 2)))
            if len(out) == count:
                return out
    return out


def make_function_family(space: Space, family: str, count: int, seed: int = 0) -> list[np.ndarray]:
    """Deterministic function family bound to the space.

    Tags: indicators, bumps, signed (random +-1), random (uniform in [-1, 1]),
    nonneg (uniform in [0, 1]), lp_atoms (L^2-normalized indicators), and any
    tag suffixed with '_mean_zero' for the exactly-centered variant.
    """
    if count < 1:
        raise ValueError("count must be positive")
    mean_zero = family.endswith("_mean_zero")
    tag = family[: -len("_mean_zero")] if mean_zero else family
    rng = np.random.default_rng(seed)
    if tag == "indicators":
        fams = _indicator_family(space, count)
    elif tag == "bumps":
        fams = _bump_family(space, count)
    elif tag == "signed":
        fams = [rng.choice([-1.0, 1.0], size=space.n) for _ in range(count)]
    elif tag == "random":
        fams = [rng.uniform(-1.0, 1.0, size=space.n) for _ in range(count)]
    elif tag == "nonneg":
        fams = [rng.uniform(0.0, 1.0, size=space.n) for _ in range(count)]
    elif tag == "lp_atoms":
        from .norms import lp_norm

        fams = []
        for f in _indicator_family(space, count):
            fams.append(f / lp_norm(space, f, 2.0))
    else:
        raise ValueError(f"unknown family tag {family!r}")
    if mean_zero:
        mass = space.total_mass
        fams = [f - np.sum(f * space.w) / mass for f in fams]
    return fams


def make_atomic_blocks(space: Space, count: int, seed: int = 0, rho: float = 2.0):
    """Validated two-piece atomic blocks with sup-norm sized pieces.

    Returns a list of (b, ball, parts) triples ready for validate_atomic_block;
    the pieces are scaled indicators meeting the mass-and-coefficient bound
    with equality, combined so the block has weighted mean zero.
    """
    from .geometry import gap_coefficient
    from .space import mu_ball

    rng = np.random.default_rng(seed)
    sets = space.distinct_canonical_sets()
    whole = Ball(0, np.nextafter(float(np.max(space.D[0])), np.inf)) if space.n > 1 else Ball(0, 1.0)
    blocks = []
    attempts = 0
    while len(blocks) < count and attempts < 50 * count:
        attempts += 1
        ball = whole
        mask = space.ball_mask(ball)
        i1, i2 = rng.integers(0, len(sets), size=2)
        picks = []
        for i in (i1, i2):
            members = sets[i]
            if not np.all(mask[members]):
                break
            c = int(members[0])
            r = float(np.max(space.D[c, members])) if len(members) > 1 else 0.0
            picks.append(Ball(c, np.nextafter(r, np.inf) if r > 0 else space.index(c).inner[0]))
        if len(picks) < 2:
            continue
        b1, b2 = picks
        parts_a = []
        for bj in (b1, b2):
            scale = 1.0 / (
                mu_ball(space, bj.dilate(rho)) * gap_coefficient(space, bj, ball, containment="sets").value
            )
            a = np.where(space.ball_mask(bj), scale, 0.0)
            parts_a.append(a)
        a1, a2 = parts_a
        m1 = float(np.sum(a1 * space.w))
        m2 = float(np.sum(a2 * space.w))
        sigma = float(rng.uniform(0.5, 2.0))
        lam1, lam2 = sigma * m2, -sigma * m1
        b = lam1 * a1 + lam2 * a2
        if np.max(np.abs(b)) == 0:
            continue
        blocks.append((b, ball, (a1, b1, lam1, a2, b2, lam2)))
    return blocks
