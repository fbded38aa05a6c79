import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

import divspec as ds


def _uca_points(count, radius):
    beta = 2.0 * math.pi * np.arange(count) / count
    return tuple(zip((radius * np.cos(beta)).tolist(), (radius * np.sin(beta)).tolist()))


APERTURES = {
    "segment": ds.Segment(1.0),
    "circle": ds.Circle(1.0),
    "disk": ds.Disk(0.5),
    "rectangle": ds.Rectangle(1.0, 0.5),
    "curve": ds.PiecewiseCurve(
        (ds.LinePiece((0.0, 0.0), (0.7, 0.0)), ds.LinePiece((0.7, 0.0), (0.7, 0.5)))
    ),
    "lines": ds.ParallelLines(4, 1.0, 1.0),
    "array": ds.DiscreteArray(_uca_points(8, 0.5)),
}

MODELS = {
    "isotropic": ds.IsotropicPas(),
    "uniform": ds.UniformPas(delta=math.pi / 2, alpha0=math.pi / 6),
    "von_mises": ds.VonMisesPas(kappa=5.0, alpha0=2.1),
}


@dataclass
class SolvedCase:
    name: str
    aperture_key: str
    model_key: str
    spectrum: ds.DiversitySpectrum
    spectrum_refined: ds.DiversitySpectrum  # same scenario at N + 5
    gram_trace: float


@pytest.fixture(scope="session")
def suite_spectra():
    """Every aperture kind crossed with every PAS, solved at N and N + 5."""
    cases = []
    start = time.perf_counter()
    for ap_key, aperture in APERTURES.items():
        for m_key, model in MODELS.items():
            op = ds.build_truncated_operator(aperture, model)
            op5 = ds.build_truncated_operator(aperture, model, N=op.N + 5)
            cases.append(
                SolvedCase(
                    name=f"{ap_key}/{m_key}",
                    aperture_key=ap_key,
                    model_key=m_key,
                    spectrum=ds.solve_spectrum(op),
                    spectrum_refined=ds.solve_spectrum(op5),
                    gram_trace=float(np.trace(op.gram).real),
                )
            )
    elapsed = time.perf_counter() - start
    return {"cases": cases, "elapsed": elapsed}
