"""CSV ingestion of paired angle data with a replayable preprocessing log.

Each transformation applied by :func:`ingest` appends one JSON-ready entry to
``Dataset.log``. :func:`replay` re-applies a log to the raw file using the
recorded values (for example the imputed angles), so it rebuilds the dataset
without re-deriving anything.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circular import axial_to_circular, mean_direction, wrap_angle
from .exceptions import DataError, DomainError


@dataclass
class Dataset:
    phi: np.ndarray
    theta: np.ndarray
    source: str
    log: list = field(default_factory=list)

    def __len__(self):
        return self.phi.size


def read_angle_columns(path, phi_col="phi", theta_col="theta"):
    """Read two columns of a header CSV as masked float arrays; empty cells are masked."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} has no data rows")
    for col in (phi_col, theta_col):
        if col not in rows[0]:
            raise DataError(f"column {col!r} not found in {path}")

    def column(name):
        vals = np.zeros(len(rows))
        mask = np.zeros(len(rows), bool)
        for i, row in enumerate(rows):
            cell = (row[name] or "").strip()
            if cell == "":
                mask[i] = True
                continue
            try:
                vals[i] = float(cell)
            except ValueError:
                raise DataError(f"row {i}: non-numeric {name!r} value {cell!r}") from None
            if not np.isfinite(vals[i]):
                raise DataError(f"row {i}: non-finite {name!r} value {cell!r}")
        return np.ma.masked_array(vals, mask=mask)

    return column(phi_col), column(theta_col)


def _to_radians(x, unit, multiplier):
    """Convert a masked column to radians, applying the axial multiplier if any."""
    if unit == "deg":
        return axial_to_circular(x, multiplier)
    data = np.where(np.ma.getmaskarray(x), 0.0, np.ma.getdata(x))
    return np.ma.masked_array(wrap_angle(multiplier * data), mask=np.ma.getmaskarray(x))


def ingest(path, unit="deg", axial_multiplier=1, impute=False,
           phi_col="phi", theta_col="theta") -> Dataset:
    """Load, clean and convert a paired-angle CSV.

    Steps, each logged:

    1. read the two columns (empty cell = missing);
    2. drop rows where both angles are missing;
    3. multiply by ``axial_multiplier`` (mod 360 deg / 2*pi) and convert to radians;
    4. with ``impute``, fill each column's gaps with its circular mean,
       otherwise drop the remaining incomplete rows.

    Raises
    ------
    DataError
        Unreadable file, non-numeric cells, a column with no observed values,
        or an unknown unit.
    """
    if unit not in ("deg", "rad"):
        raise DataError(f"unit must be 'deg' or 'rad', got {unit!r}")
    if int(axial_multiplier) != axial_multiplier or axial_multiplier < 1:
        raise DataError("axial multiplier must be a positive integer")
    phi, theta = read_angle_columns(path, phi_col, theta_col)
    log = [{"step": "read", "path": str(path), "columns": [phi_col, theta_col],
            "unit": unit, "rows": int(phi.size)}]

    both = np.ma.getmaskarray(phi) & np.ma.getmaskarray(theta)
    keep = np.flatnonzero(~both)
    log.append({"step": "drop_all_missing", "rows": np.flatnonzero(both).tolist()})
    phi, theta = phi[keep], theta[keep]
    if phi.mask.all() or theta.mask.all():
        raise DataError("an angle column has no observed values")

    phi = _to_radians(phi, unit, int(axial_multiplier))
    theta = _to_radians(theta, unit, int(axial_multiplier))
    log.append({"step": "to_radians", "axial_multiplier": int(axial_multiplier)})

    if impute:
        for name, col in (("phi", phi), ("theta", theta)):
            missing = np.flatnonzero(np.ma.getmaskarray(col))
            try:
                value = mean_direction(col)
            except DomainError as exc:
                raise DataError(f"cannot impute {name}: {exc}") from exc
            log.append({"step": "impute", "column": name, "rows": missing.tolist(),
                        "source_rows": keep[missing].tolist(), "value": value})
        return _apply_tail(phi, theta, log[3:], str(path), log)

    incomplete = np.flatnonzero(np.ma.getmaskarray(phi) | np.ma.getmaskarray(theta))
    log.append({"step": "drop_incomplete", "rows": incomplete.tolist()})
    return _apply_tail(phi, theta, log[3:], str(path), log)


def _apply_tail(phi, theta, steps, source, log) -> Dataset:
    """Apply logged impute/drop steps to masked radian columns."""
    cols = {"phi": np.ma.array(phi, copy=True), "theta": np.ma.array(theta, copy=True)}
    for entry in steps:
        if entry["step"] == "impute":
            col = cols[entry["column"]]
            col[entry["rows"]] = entry["value"]
            if np.any(np.ma.getmaskarray(col)):
                raise DataError(f"imputation log does not cover every gap in {entry['column']}")
        elif entry["step"] == "drop_incomplete":
            keep = np.setdiff1d(np.arange(cols["phi"].size), entry["rows"])
            cols = {k: v[keep] for k, v in cols.items()}
        else:
            raise DataError(f"unknown preprocessing step {entry['step']!r}")
    out_phi = np.ma.getdata(cols["phi"]).astype(float)
    out_theta = np.ma.getdata(cols["theta"]).astype(float)
    if np.ma.is_masked(cols["phi"]) or np.ma.is_masked(cols["theta"]):
        raise DataError("missing values remain after preprocessing")
    return Dataset(out_phi, out_theta, source, log)


def replay(log, path=None) -> Dataset:
    """Rebuild a :class:`Dataset` from the raw file by re-applying ``log``."""
    if not log or log[0].get("step") != "read":
        raise DataError("preprocessing log must start with a 'read' step")
    head = log[0]
    path = path or head["path"]
    phi, theta = read_angle_columns(path, *head["columns"])
    if phi.size != head["rows"]:
        raise DataError("raw file row count differs from the log")
    if log[1].get("step") != "drop_all_missing" or log[2].get("step") != "to_radians":
        raise DataError("unexpected preprocessing log layout")
    keep = np.setdiff1d(np.arange(phi.size), log[1]["rows"])
    mult = log[2]["axial_multiplier"]
    phi = _to_radians(phi[keep], head["unit"], mult)
    theta = _to_radians(theta[keep], head["unit"], mult)
    return _apply_tail(phi, theta, log[3:], str(path), list(log))


# Fitted values quoted for the clinical astigmatism data; used only to make a
# realistic synthetic stand-in, since the real data are not public.
FIXTURE_PARAMS = dict(nu=0.98, kappa=0.98, lam=-1.14, mu1=0.64, mu2=1.47)
FIXTURE_SEED = 20240
FIXTURE_ROWS = 40


def synthetic_fixture_rows(seed=FIXTURE_SEED):
    """Rows ``(theta_deg, phi_deg)`` of axial angles in degrees, ``None`` = missing.

    Pairs are drawn from the dependent model at :data:`FIXTURE_PARAMS`, then
    mapped back to axes by dividing by the axial multiplier 4. Row 7 has both
    values missing and rows 19 and 31 lack ``phi``, mirroring a study with one
    patient lost entirely and two missing the second visit.
    """
    from .dependent import ToroidalParams, sample_joint

    p = ToroidalParams(**FIXTURE_PARAMS)
    phi, theta = sample_joint(p, FIXTURE_ROWS, np.random.default_rng(seed))
    rows = [[round(float(np.degrees(t)) / 4.0, 3), round(float(np.degrees(f)) / 4.0, 3)]
            for t, f in zip(theta, phi)]
    rows[7] = [None, None]
    rows[19][1] = None
    rows[31][1] = None
    return rows


def write_synthetic_fixture(path, seed=FIXTURE_SEED):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "phi"])
        for row in synthetic_fixture_rows(seed):
            w.writerow(["" if v is None else repr(v) for v in row])


def fixture_path() -> Path:
    """Location of the shipped synthetic fixture (axial degrees, multiplier 4)."""
    return Path(__file__).parent / "fixtures" / "synthetic_astigmatism.csv"
