"""Shared session fixtures: solved translator profiles and their charts."""

import pytest

from rmcf.charts import Mesh
from rmcf.translators import grim_reaper_chart, rot_chart, solve_rotational_translator

TRANSLATOR_ORDERS = [(2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 3)]

MESH_COUNTS = {
    1: (200,),
    2: (20, 10),
    3: (10, 5, 4),
    4: (5, 4, 5, 2),
}


@pytest.fixture(scope="session")
def profiles():
    return {
        (n, r): solve_rotational_translator(n, r, R_max=100.0, tol=1e-10)
        for (n, r) in TRANSLATOR_ORDERS
    }


@pytest.fixture(scope="session")
def translator_charts(profiles):
    charts = {"grim-reaper": grim_reaper_chart(2, t_halfwidth=12.0)}
    for key, prof in profiles.items():
        charts[key] = rot_chart(prof)
    return charts


@pytest.fixture(scope="session")
def translator_meshes(translator_charts):
    out = {}
    for key, ch in translator_charts.items():
        if key == "grim-reaper":
            out[key] = Mesh.grid(ch, (41, 15))
        else:
            n = ch.n
            counts = {2: (30, 16), 3: (12, 6, 10), 4: (8, 5, 5, 6)}[n]
            out[key] = Mesh.grid(ch, counts)
    return out
