"""Ink molecules in potential wells on a 2-D lattice.

Each occupied well holds one molecule in thermal equilibrium over its
internal excitation levels; different wells are orthogonal, so a page is a
product of independent diagonal site densities.  Glyphs are site sets
anchored at a fiducial point and sized by scale factors.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

Site = tuple[int, int]
NEIGHBOURS: tuple[Site, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))


class PageError(ValueError):
    pass


@dataclass(frozen=True)
class LevelSpectrum:
    energies: tuple[float, ...]

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        object.__setattr__(self, "energies", e)
        if not e:
            raise PageError("spectrum needs at least one level")
        if any(x < 0 for x in e):
            raise PageError("excitation energies must be nonnegative")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise PageError("energies must be strictly ascending")


@dataclass(frozen=True)
class DiagonalDensity:
    energies: tuple[float, ...]
    probabilities: tuple[float, ...]
    kT: float | None = None

    @property
    def ground(self) -> float:
        return self.probabilities[0]

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.probabilities)


def thermal_state(levels: LevelSpectrum, kT: float) -> DiagonalDensity:
    """Boltzmann weights e^{-E/kT}/Z over the levels."""
    if not kT > 0:
        raise PageError(f"kT must be positive, got {kT}")
    e = np.asarray(levels.energies)
    w = np.exp(-(e - e[0]) / kT)
    p = w / w.sum()
    return DiagonalDensity(levels.energies, tuple(float(x) for x in p), kT)


# -- glyphs --------------------------------------------------------------------

GLYPH_KINDS = ("vbar", "diag", "tee")


@dataclass(frozen=True)
class Glyph:
    kind: str
    x: int
    y: int
    n: int
    m: int = 0

    def __post_init__(self):
        if self.kind not in GLYPH_KINDS:
            raise PageError(f"unknown glyph kind {self.kind!r}")
        if self.n < 1:
            raise PageError("glyph length n must be at least 1")
        if self.m < 0:
            raise PageError("tee half-arm m must be nonnegative")

    @property
    def fiducial(self) -> Site:
        return (self.x, self.y)

    def scaled(self, factor: int) -> "Glyph":
        return Glyph(self.kind, self.x, self.y, self.n * factor, self.m * factor)


def glyph_sites(g: Glyph) -> frozenset[Site]:
    x, y, n = g.x, g.y, g.n
    if g.kind == "vbar":
        return frozenset((x, y + i) for i in range(n))
    if g.kind == "diag":
        return frozenset((x + i, y + i) for i in range(n))
    stem = {(x, y + i) for i in range(n)}
    arm = {(x + j, y + n - 1) for j in range(-g.m, g.m + 1)}
    return frozenset(stem | arm)


def _cheb(a: Site, b: Site) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def intra_spacing(sites: Iterable[Site]) -> int:
    """Largest nearest-neighbour distance inside a site set (0 for one site)."""
    sites = list(sites)
    if len(sites) < 2:
        return 0
    return max(min(_cheb(a, b) for b in sites if b != a) for a in sites)


def empty_separation(a: Iterable[Site], b: Iterable[Site]) -> int:
    """Number of empty lattice rows/columns between two site sets."""
    return min(_cheb(p, q) for p in a for q in b) - 1


def line_layout(glyphs: Sequence[tuple[str, int, int]], x0: int = 0, y0: int = 0,
                pitch: int = 4) -> list[Glyph]:
    """Place (kind, n, m) glyphs left to right, fiducials ``pitch`` apart."""
    return [Glyph(kind, x0 + i * pitch, y0, n, m) for i, (kind, n, m) in enumerate(glyphs)]


# -- pages ---------------------------------------------------------------------

@dataclass(frozen=True)
class PageState:
    glyphs: tuple[Glyph, ...]
    occupied: frozenset[Site]
    density: DiagonalDensity | None = None
    origin: Mapping[Site, int] = field(default_factory=dict)  # site -> glyph index

    def site_density(self, site: Site) -> DiagonalDensity | None:
        return self.density if site in self.occupied else None

    @property
    def blank(self) -> bool:
        return not self.occupied


def compose_page(glyphs: Sequence[Glyph], spectrum: LevelSpectrum, kT: float) -> PageState:
    """One thermal molecule per occupied well; glyphs must be disjoint and
    spaced further apart than any glyph's own internal spacing."""
    glyphs = tuple(glyphs)
    site_sets = [glyph_sites(g) for g in glyphs]
    spacing = max((intra_spacing(s) for s in site_sets), default=0)
    origin: dict[Site, int] = {}
    for i, sites in enumerate(site_sets):
        for s in sites:
            j = origin.setdefault(s, i)
            if j != i:
                raise PageError(f"glyphs {j} and {i} overlap: {glyphs[j]} / {glyphs[i]}")
    # a separation of at most `spacing` empty sites means another glyph's
    # site lies within Chebyshev distance spacing + 1
    reach = spacing + 1
    for (x, y), i in origin.items():
        for dx in range(-reach, reach + 1):
            for dy in range(-reach, reach + 1):
                j = origin.get((x + dx, y + dy), i)
                if j != i:
                    sep = empty_separation(site_sets[i], site_sets[j])
                    raise PageError(f"glyphs {min(i, j)} and {max(i, j)} are separated by {sep} empty sites, "
                                    f"need more than {spacing}: {glyphs[min(i, j)]} / {glyphs[max(i, j)]}")
    density = thermal_state(spectrum, kT)
    return PageState(glyphs, frozenset(origin), density, origin)


def joint_probability(page: PageState, events: Mapping[Site, Iterable[int]]) -> float:
    """P(each listed site is in one of the given level indices); product form."""
    p = 1.0
    for site, levels in events.items():
        rho = page.site_density(site)
        if rho is None:
            raise PageError(f"site {site} is not occupied")
        p *= sum(rho.probabilities[i] for i in set(levels))
    return p


def joint_density_matrix(page: PageState, sites: Sequence[Site]) -> np.ndarray:
    """Explicit tensor-product density over the listed occupied sites."""
    out = np.ones((1, 1))
    for s in sites:
        rho = page.site_density(s)
        if rho is None:
            raise PageError(f"site {s} is not occupied")
        out = np.kron(out, rho.as_matrix())
    return out


# -- decoherence ------------------------------------------------------------------

def coherent_position_state(amplitudes: Mapping[Site, complex]) -> dict[tuple[Site, Site], complex]:
    """Position density c_x c_y* of a molecule spread over several wells."""
    return {(a, b): complex(ca) * complex(cb).conjugate()
            for a, ca in amplitudes.items() for b, cb in amplitudes.items()}


def decohere(rho: Mapping[tuple[Site, Site], complex], tol: float = 1e-12) -> dict[Site, float]:
    """Drop positional coherences, keeping the well occupation weights |c|^2."""
    for (a, b), v in rho.items():
        w = rho.get((b, a))
        if w is None or abs(complex(v) - complex(w).conjugate()) > tol:
            raise PageError(f"position density is not Hermitian at {(a, b)}")
    diag = {a: float(complex(v).real) for (a, b), v in rho.items() if a == b}
    trace = sum(diag.values())
    if abs(trace - 1.0) > tol:
        raise PageError(f"position density has trace {trace}, expected 1")
    return diag


def as_density(weights: Mapping[Site, float]) -> dict[tuple[Site, Site], complex]:
    """Diagonal mixture written back as a position density."""
    return {(a, a): complex(w) for a, w in weights.items()}


# -- reading ---------------------------------------------------------------------

@dataclass(frozen=True)
class ReadCost:
    rule: str
    total: int
    dominant: int


def read_cost(rule: str, n: int, m: int) -> ReadCost:
    """Alternatives a reading rule must tell apart to read n symbols.

    ``position_only`` locates symbol i+1 from i alone: one unit per symbol.
    ``content_dependent`` locates it from the symbols read so far, which
    means distinguishing m^i alternatives at step i.
    """
    if n < 0 or m < 2:
        raise PageError("need n >= 0 and an alphabet of at least two symbols")
    if rule == "position_only":
        return ReadCost(rule, n, n)
    if rule == "content_dependent":
        return ReadCost(rule, sum(m ** i for i in range(1, n + 1)), m ** n if n else 0)
    raise PageError(f"unknown reading rule {rule!r}")


@dataclass(frozen=True)
class ReadReport:
    reads: int
    flip_prob: float
    molecules: int
    survival_analytic: float
    survival_empirical: float
    standard_error: float
    expected_changed: float
    changed: int
    blocked: int

    def to_record(self) -> dict:
        return dict(self.__dict__)


def repeated_read(page: PageState, reads: int, flip_prob: float, seed: int | None = 0):
    """Each read displaces every molecule with probability ``flip_prob`` to a
    uniformly chosen neighbouring well; moves into occupied wells are blocked.

    Returns the perturbed page and a report comparing the fraction of
    molecules never displaced with (1 - p)^R.
    """
    if not 0.0 <= flip_prob <= 1.0:
        raise PageError("flip probability must lie in [0, 1]")
    if reads < 0:
        raise PageError("read count must be nonnegative")
    rng = np.random.default_rng(seed)
    start = sorted(page.occupied)
    pos = list(start)
    where = set(pos)
    moved = [False] * len(pos)
    blocked = 0
    N = len(pos)
    for _ in range(reads):
        attempts = rng.random(N) < flip_prob
        dirs = rng.integers(0, len(NEIGHBOURS), N)
        for i in np.flatnonzero(attempts):
            dx, dy = NEIGHBOURS[dirs[i]]
            x, y = pos[i]
            target = (x + dx, y + dy)
            if target in where:
                blocked += 1
                continue
            where.discard(pos[i])
            where.add(target)
            pos[i] = target
            moved[i] = True
    analytic = (1.0 - flip_prob) ** reads
    empirical = (N - sum(moved)) / N if N else 1.0
    se = math.sqrt(analytic * (1 - analytic) / N) if N else 0.0
    report = ReadReport(reads, flip_prob, N, analytic, empirical, se, N * (1 - analytic), sum(moved), blocked)
    new_page = PageState(page.glyphs, frozenset(pos), page.density,
                         {p: page.origin.get(s, -1) for p, s in zip(pos, start)})
    return new_page, report


# -- dump ------------------------------------------------------------------------

def dumps_page(page: PageState, margin: int = 0) -> str:
    """CSV x,y,occupied,ground_prob over the page's bounding box."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "occupied", "ground_prob"])
    if page.occupied:
        xs = [s[0] for s in page.occupied]
        ys = [s[1] for s in page.occupied]
        for y in range(max(ys) + margin, min(ys) - margin - 1, -1):
            for x in range(min(xs) - margin, max(xs) + margin + 1):
                occ = (x, y) in page.occupied
                w.writerow([x, y, int(occ), repr(page.density.ground) if occ else ""])
    return buf.getvalue()


def glyphs_from_records(records: Iterable[Mapping]) -> list[Glyph]:
    return [Glyph(r["kind"], int(r["x"]), int(r["y"]), int(r["n"]), int(r.get("m", 0))) for r in records]
