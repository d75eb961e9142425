"""MATPOWER case parsing and per-unit conversion.

Supported blocks: ``mpc.baseMVA``, ``mpc.bus``, ``mpc.gen``, ``mpc.branch``,
``mpc.gencost`` and an optional ``mpc.storage``.  Everything downstream of
the parser is per-unit; cost coefficients are the one MW-domain quantity and
are applied to MW in the OPF objective.

The ``mpc.storage`` layout is this package's own convention (documented in
the README): bus, energy rating (MWh), charge rating (MW), discharge rating
(MW), charge efficiency, discharge efficiency.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

DEG2RAD = math.pi / 180.0


class CaseError(ValueError):
    """Malformed or unsupported case/series input."""


@dataclass
class Bus:
    bus_id: int
    bus_type: int  # 1 PQ, 2 PV, 3 reference
    pd: float
    qd: float
    gs: float
    bs: float
    vmax: float
    vmin: float


@dataclass
class Gen:
    bus_id: int
    pmin: float
    pmax: float
    qmin: float
    qmax: float
    status: int
    c2: float  # $/MW^2 h
    c1: float  # $/MWh
    c0: float  # $/h


@dataclass
class Branch:
    f_bus: int
    t_bus: int
    r: float
    x: float
    b_charging: float
    rate_a: float  # per-unit; 0 means unlimited
    tap: float  # 1.0 when the file says 0
    shift: float  # rad
    status: int
    angmin: float  # rad
    angmax: float  # rad


@dataclass
class Storage:
    bus_id: int
    energy_rating: float  # per-unit hours
    charge_rating: float
    discharge_rating: float
    eta_charge: float
    eta_discharge: float


@dataclass
class CaseData:
    name: str
    base_mva: float
    buses: list[Bus]
    gens: list[Gen]
    branches: list[Branch]
    storage: list[Storage] = dc_field(default_factory=list)

    def bus_index(self) -> dict[int, int]:
        return {b.bus_id: i for i, b in enumerate(self.buses)}

    @property
    def n_bus(self) -> int:
        return len(self.buses)


@dataclass
class BranchAdmittance:
    """Pi-model quantities consumed by the flow kernels.

    ``g + jb`` is the series admittance 1/(r + jx); ``tr``/``ti`` are the
    rectangular parts of the complex tap, ``tm`` its squared magnitude.
    """

    g: float
    b: float
    tr: float
    ti: float
    tm: float
    b_fr: float
    b_to: float
    g_fr: float = 0.0
    g_to: float = 0.0


def branch_admittance(branch: Branch) -> BranchAdmittance:
    d = branch.r * branch.r + branch.x * branch.x
    if d == 0.0:
        raise CaseError(
            f"degenerate branch {branch.f_bus}-{branch.t_bus}: r = x = 0"
        )
    return BranchAdmittance(
        g=branch.r / d,
        b=-branch.x / d,
        tr=branch.tap * math.cos(branch.shift),
        ti=branch.tap * math.sin(branch.shift),
        tm=branch.tap * branch.tap,
        b_fr=branch.b_charging / 2.0,
        b_to=branch.b_charging / 2.0,
    )


_MATRIX_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[(.*?)\]\s*;", re.DOTALL)
_SCALAR_RE = re.compile(r"mpc\.(\w+)\s*=\s*([0-9eE+.\-]+)\s*;")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def _parse_matrix(name: str, body: str) -> np.ndarray:
    rows = []
    width = None
    for chunk in re.split(r"[;\n]", body):
        tokens = chunk.split()
        if not tokens:
            continue
        try:
            row = [float(t) for t in tokens]
        except ValueError as err:
            raise CaseError(f"non-numeric token in mpc.{name}: {err}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise CaseError(
                f"ragged matrix mpc.{name}: row {len(rows)} has {len(row)} "
                f"columns, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise CaseError(f"mpc.{name} is empty")
    return np.array(rows, dtype=np.float64)


def parse_case(text: str, name: str = "case") -> CaseData:
    """Parse MATPOWER-format text into per-unit :class:`CaseData`."""
    clean = _strip_comments(text)
    matrices = {m.group(1): m.group(2) for m in _MATRIX_RE.finditer(clean)}
    scalars = {m.group(1): m.group(2) for m in _SCALAR_RE.finditer(clean)}

    if "baseMVA" not in scalars:
        raise CaseError("missing mpc.baseMVA")
    base = float(scalars["baseMVA"])
    if base <= 0:
        raise CaseError(f"baseMVA must be positive, got {base}")

    for required in ("bus", "gen", "branch", "gencost"):
        if required not in matrices:
            raise CaseError(f"missing mpc.{required} block")

    bus_m = _parse_matrix("bus", matrices["bus"])
    gen_m = _parse_matrix("gen", matrices["gen"])
    branch_m = _parse_matrix("branch", matrices["branch"])
    cost_m = _parse_matrix("gencost", matrices["gencost"])

    if bus_m.shape[1] < 13:
        raise CaseError(f"mpc.bus needs >= 13 columns, got {bus_m.shape[1]}")
    if gen_m.shape[1] < 10:
        raise CaseError(f"mpc.gen needs >= 10 columns, got {gen_m.shape[1]}")
    if branch_m.shape[1] < 13:
        raise CaseError(f"mpc.branch needs >= 13 columns, got {branch_m.shape[1]}")
    if cost_m.shape[0] != gen_m.shape[0]:
        raise CaseError(
            f"mpc.gencost has {cost_m.shape[0]} rows for {gen_m.shape[0]} generators"
        )

    buses = [
        Bus(
            bus_id=int(r[0]),
            bus_type=int(r[1]),
            pd=r[2] / base,
            qd=r[3] / base,
            gs=r[4] / base,
            bs=r[5] / base,
            vmax=r[11],
            vmin=r[12],
        )
        for r in bus_m
    ]

    gens = []
    for r, c in zip(gen_m, cost_m):
        model = int(c[0])
        if model != 2:
            raise CaseError(
                f"unsupported gencost model {model}; only polynomial (2) is supported"
            )
        ncoef = int(c[3])
        if ncoef > 3:
            raise CaseError(f"unsupported polynomial cost with {ncoef} coefficients")
        if 4 + ncoef > c.shape[0]:
            raise CaseError("gencost row shorter than its stated coefficient count")
        coefs = [0.0] * (3 - ncoef) + list(c[4 : 4 + ncoef])
        gens.append(
            Gen(
                bus_id=int(r[0]),
                pmin=r[9] / base,
                pmax=r[8] / base,
                qmin=r[4] / base,
                qmax=r[3] / base,
                status=int(r[7]),
                c2=coefs[0],
                c1=coefs[1],
                c0=coefs[2],
            )
        )

    branches = [
        Branch(
            f_bus=int(r[0]),
            t_bus=int(r[1]),
            r=r[2],
            x=r[3],
            b_charging=r[4],
            rate_a=r[5] / base,
            tap=r[8] if r[8] != 0.0 else 1.0,
            shift=r[9] * DEG2RAD,
            status=int(r[10]),
            angmin=r[11] * DEG2RAD,
            angmax=r[12] * DEG2RAD,
        )
        for r in branch_m
    ]

    storage = []
    if "storage" in matrices:
        st_m = _parse_matrix("storage", matrices["storage"])
        if st_m.shape[1] < 6:
            raise CaseError(f"mpc.storage needs 6 columns, got {st_m.shape[1]}")
        storage = [
            Storage(
                bus_id=int(r[0]),
                energy_rating=r[1] / base,
                charge_rating=r[2] / base,
                discharge_rating=r[3] / base,
                eta_charge=r[4],
                eta_discharge=r[5],
            )
            for r in st_m
        ]

    case = CaseData(name, base, buses, gens, branches, storage)
    errors = validate_case(case)
    if errors:
        raise CaseError(f"invalid case {name}: " + "; ".join(errors))
    return case


def parse_case_file(path: str | Path) -> CaseData:
    path = Path(path)
    return parse_case(path.read_text(), name=path.stem)


def validate_case(case: CaseData) -> list[str]:
    """Accumulated invariant violations; empty means the case is usable."""
    errors: list[str] = []
    ids = [b.bus_id for b in case.buses]
    if len(set(ids)) != len(ids):
        errors.append("duplicate bus ids")
    known = set(ids)

    refs = [b.bus_id for b in case.buses if b.bus_type == 3]
    if len(refs) == 0:
        errors.append("no reference bus (type 3)")
    elif len(refs) > 1:
        errors.append(f"multiple reference buses: {refs}")

    for b in case.buses:
        if b.bus_type not in (1, 2, 3):
            errors.append(f"bus {b.bus_id}: unknown type {b.bus_type}")
        if b.vmin > b.vmax:
            errors.append(f"bus {b.bus_id}: Vmin > Vmax")

    for i, g in enumerate(case.gens):
        if g.bus_id not in known:
            errors.append(f"gen {i}: references absent bus {g.bus_id}")
        if g.status not in (0, 1):
            errors.append(f"gen {i}: status {g.status} not in {{0, 1}}")
        if g.pmin > g.pmax or g.qmin > g.qmax:
            errors.append(f"gen {i}: crossed P/Q limits")

    for i, br in enumerate(case.branches):
        if br.f_bus not in known or br.t_bus not in known:
            errors.append(f"branch {i}: references absent bus")
        if br.status not in (0, 1):
            errors.append(f"branch {i}: status {br.status} not in {{0, 1}}")
        if br.angmin > br.angmax:
            errors.append(f"branch {i}: angmin > angmax")
        if br.status == 1 and br.r == 0.0 and br.x == 0.0:
            errors.append(f"branch {i}: degenerate (r = x = 0)")

    for i, st in enumerate(case.storage):
        if st.bus_id not in known:
            errors.append(f"storage {i}: references absent bus {st.bus_id}")
        if st.eta_charge <= 0.0 or st.eta_discharge <= 0.0:
            errors.append(f"storage {i}: nonpositive efficiency")
        if st.energy_rating <= 0.0:
            errors.append(f"storage {i}: nonpositive energy rating")
        if st.charge_rating < 0.0 or st.discharge_rating < 0.0:
            errors.append(f"storage {i}: negative power rating")

    return errors


def parse_load_series(text: str, n_bus: int, base_mva: float) -> tuple[int, np.ndarray]:
    """Whitespace-separated MW matrix, one period per row, one bus per column.

    Columns follow the case's bus-section order.  Returns the period count
    and the per-unit T x n_bus matrix.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("%", 1)[0].split("#", 1)[0]
        tokens = body.split()
        if not tokens:
            continue
        try:
            row = [float(t) for t in tokens]
        except ValueError:
            raise CaseError(f"non-numeric token in load series at line {lineno}") from None
        if len(row) != n_bus:
            raise CaseError(
                f"load series line {lineno} has {len(row)} columns, expected {n_bus}"
            )
        rows.append(row)
    if not rows:
        raise CaseError("empty load series")
    return len(rows), np.array(rows, dtype=np.float64) / base_mva
