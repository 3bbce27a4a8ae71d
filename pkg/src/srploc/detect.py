"""DOA extraction from spatial spectra.

Two strategies: plain peak detection over the candidate lattice, and
the iterative scheme that repeatedly takes the spectrum's global
maximum as the dominant source, reads its activity weight off the
spectrum value, and subtracts that source's ideal feature contribution
from every pair before searching again. The subtraction separates
sources whose spectral peaks merge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CandidateGrid, Doa, angular_error
from .srp import SteeringTable


@dataclass(frozen=True)
class Detection:
    doa: Doa
    weight: float
    grid_index: int


def peak_detect(
    spectrum: np.ndarray,
    grid: CandidateGrid,
    threshold: float = 0.2,
    k_max: int = 2,
) -> list[Detection]:
    """Local maxima of one spectrum frame, strongest first.

    A candidate is a local maximum when its value is >= all of its
    8-neighbors on the elevation x azimuth lattice, wrapping in
    azimuth. Only maxima with value >= threshold are returned, at most
    ``k_max`` of them.
    """
    spectrum = np.asarray(spectrum)
    if spectrum.shape != (len(grid),):
        raise ValueError(f"spectrum shape {spectrum.shape} != grid size {len(grid)}")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    vals = spectrum[grid.lattice]  # (n_el, n_az)
    n_el = vals.shape[0]
    is_max = np.ones_like(vals, dtype=bool)
    for d_el in (-1, 0, 1):
        if d_el == -1:
            shifted = np.vstack([np.full((1, vals.shape[1]), -np.inf), vals[:-1]])
        elif d_el == 1:
            shifted = np.vstack([vals[1:], np.full((1, vals.shape[1]), -np.inf)])
        else:
            shifted = vals
        for d_az in (-1, 0, 1):
            if d_el == 0 and d_az == 0:
                continue
            is_max &= vals >= np.roll(shifted, d_az, axis=1)
    # a pole row holds one direction replicated across all azimuth
    # columns, so its true neighborhood is the whole adjacent ring
    for i in range(n_el):
        row = grid.lattice[i]
        if not np.all(row == row[0]):
            continue
        pole_max = True
        if i > 0:
            pole_max &= bool(vals[i, 0] >= vals[i - 1].max())
        if i < n_el - 1:
            pole_max &= bool(vals[i, 0] >= vals[i + 1].max())
        is_max[i, :] = pole_max
    candidates = np.unique(grid.lattice[is_max])
    candidates = candidates[spectrum[candidates] >= threshold]
    order = np.lexsort((candidates, -spectrum[candidates]))
    picked = candidates[order][:k_max]
    return [Detection(grid.doa(int(g)), float(spectrum[g]), int(g)) for g in picked]


def iterative_localize(
    features: np.ndarray,
    table: SteeringTable,
    beta_th: float = 0.2,
    k_max: int = 2,
    known_k: int | None = None,
    min_separation: float | None = None,
) -> list[Detection]:
    """Iterative dominant-source detection and removal on one frame.

    ``features`` is the (P, 2F) frame of summed per-pair vectors; it is
    copied, never mutated. Each round: evaluate the spectrum, take the
    argmax as the dominant source with weight = spectrum value there,
    stop if the weight falls below ``beta_th`` (the candidate is
    discarded), otherwise record it and subtract weight * ideal vectors
    of that direction from all pairs. At most ``k_max`` rounds.

    With ``known_k`` set, the threshold is bypassed and exactly that
    many estimates are returned. ``min_separation`` (radians), when
    set, stops the loop if a new estimate lands within that angle of an
    already accepted one.
    """
    if known_k is None and not (0.0 < beta_th <= 1.0):
        raise ValueError("beta_th must be in (0, 1]")
    rounds = k_max if known_k is None else known_k
    if rounds < 1:
        raise ValueError("need at least one detection round")
    work = np.array(features, dtype=np.float64, copy=True)
    if work.shape != (table.values.shape[1], table.values.shape[2]):
        raise ValueError(
            f"features {work.shape} incompatible with table "
            f"(P={table.values.shape[1]}, 2F={table.values.shape[2]})"
        )
    k_cap = float(max(k_max, known_k or 0))
    out: list[Detection] = []
    for _ in range(rounds):
        spec = table.spectrum(work)
        g = int(np.argmax(spec))
        beta = float(spec[g])
        if known_k is None and beta < beta_th:
            break
        doa = table.grid.doa(g)
        if min_separation is not None and any(
            angular_error(doa, d.doa) < min_separation for d in out
        ):
            break
        out.append(Detection(doa, float(np.clip(beta, 0.0, k_cap)), g))
        work -= beta * table.ipd(g)
    return out


def localize_frames(
    features: np.ndarray,
    table: SteeringTable,
    method: str = "iterative",
    beta_th: float = 0.2,
    k_max: int = 2,
    known_k: int | None = None,
    min_separation: float | None = None,
) -> list[list[Detection]]:
    """Run the chosen detector on every frame of an (N', P, 2F) sequence."""
    feats = np.asarray(features)
    if feats.ndim != 3:
        raise ValueError(f"expected (N', P, 2F), got {feats.shape}")
    results = []
    if method == "iterative":
        for frame in feats:
            results.append(
                iterative_localize(
                    frame, table, beta_th=beta_th, k_max=k_max,
                    known_k=known_k, min_separation=min_separation,
                )
            )
    elif method == "peaks":
        spectra = table.spectrum(feats)
        take = known_k if known_k is not None else k_max
        thr = beta_th if known_k is None else 0.0
        for row in spectra:
            dets = peak_detect(row, table.grid, threshold=thr, k_max=take)
            if known_k is not None and len(dets) < known_k:
                # degenerate flat frame: fall back to the global argmax
                g = int(np.argmax(row))
                if all(d.grid_index != g for d in dets):
                    dets.append(Detection(table.grid.doa(g), float(row[g]), g))
            results.append(dets[:take])
    else:
        raise ValueError(f"unknown method {method!r}")
    return results
