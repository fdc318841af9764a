"""CSV round-tripping of spectrum estimates and atomic file writes."""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from typing import Callable

from .spectrum import SpectrumEstimate, ThetaRecord

__all__ = ["CSV_COLUMNS", "atomic_write", "estimate_to_csv", "csv_to_estimate", "write_csv",
           "read_csv"]

CSV_COLUMNS = ("theta", "assouad_est", "lower_est", "assouad_oracle", "lower_oracle",
               "residual", "dropped_pairs", "witness_x_upper", "witness_x_lower", "R_used",
               "upper_divergent")


def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _g(v) -> str:
    return format(float(v), ".17g")


def estimate_to_csv(est: SpectrumEstimate, oracle: Callable | None = None) -> str:
    """Render an estimate as CSV text; ``oracle(theta) -> (assouad, lower)`` fills the oracle columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in est.records:
        a_or, l_or = oracle(rec.theta) if oracle else (math.nan, math.nan)
        w.writerow([_g(rec.theta), _g(rec.upper_exponent), _g(rec.lower_exponent), _g(a_or),
                    _g(l_or), _g(rec.fit_residual), str(rec.dropped_pairs),
                    _g(rec.witness_x_upper), _g(rec.witness_x_lower),
                    ";".join(_g(R) for R in rec.R_used), str(int(rec.upper_divergent))])
    return buf.getvalue()


def csv_to_estimate(text: str):
    """Parse CSV text back into ``(SpectrumEstimate, oracle_rows)``.

    The returned estimate carries no sweep configuration.
    """
    rows = list(csv.DictReader(io.StringIO(text)))
    recs, oracle_rows = [], []
    for r in rows:
        recs.append(ThetaRecord(
            theta=float(r["theta"]), upper_exponent=float(r["assouad_est"]),
            lower_exponent=float(r["lower_est"]), witness_x_upper=float(r["witness_x_upper"]),
            witness_x_lower=float(r["witness_x_lower"]),
            R_used=tuple(float(v) for v in r["R_used"].split(";") if v),
            dropped_pairs=int(r["dropped_pairs"]), fit_residual=float(r["residual"]),
            upper_divergent=bool(int(r["upper_divergent"]))))
        oracle_rows.append((float(r["assouad_oracle"]), float(r["lower_oracle"])))
    return SpectrumEstimate(tuple(recs), None), oracle_rows


def write_csv(path: str, est: SpectrumEstimate, oracle: Callable | None = None) -> None:
    atomic_write(path, estimate_to_csv(est, oracle))


def read_csv(path: str):
    with open(path, newline="") as fh:
        return csv_to_estimate(fh.read())
