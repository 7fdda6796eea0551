"""Report assembly for the command line tools.

Every record is a plain JSON-ready dict.  Exact values are written as
rational strings; big floats as decimal strings with ``digits`` significant
digits.  No wall-clock data enters a record unless asked for, so identical
inputs give byte-identical reports.
"""

from __future__ import annotations

from fractions import Fraction

from . import __version__
from .electrostatics import CONVENTIONS as ELECTRO_CONVENTIONS
from .electrostatics import build_model, classify
from .errors import LsobError
from .roots import find_roots, zero_location_check
from .sobolev import SobolevConfig, gram_schmidt_oracle, is_sequentially_ordered
from .structure import SIGN_CONVENTIONS, SobolevSequence, classical_tables, is_negligible, lcoef_ledger, ladder_apply, raise_from_constant, ttrr_residual

__all__ = ["fmt", "header", "compute_record", "verify_records", "electro_record", "ORACLE_MAX_N"]

ORACLE_MAX_N = 8
DEFAULT_DIGITS = 40


def fmt(v, digits: int = DEFAULT_DIGITS):
    """JSON-friendly rendering of a scalar."""
    if v is None:
        return None
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, Fraction)):
        return str(v)
    if hasattr(v, "_mpc_"):
        return {"re": fmt(v.real, digits), "im": fmt(v.imag, digits)}
    if hasattr(v, "re") and hasattr(v, "im"):
        if v.im == 0:
            return fmt(v.re, digits)
        return {"re": fmt(v.re, digits), "im": fmt(v.im, digits)}
    if hasattr(v, "_mpf_"):
        from mpmath import nstr

        return nstr(v, digits)
    return str(v)


def header(cfg: SobolevConfig, command: str, source: str | None = None) -> dict:
    return {
        "tool": "lsob",
        "version": __version__,
        "command": command,
        "source": source,
        "config": cfg.describe(),
        "conventions": {"structure": SIGN_CONVENTIONS, "electrostatics": ELECTRO_CONVENTIONS},
    }


def compute_record(cfg: SobolevConfig, n: int, seq: SobolevSequence | None = None, digits: int = DEFAULT_DIGITS) -> dict:
    """``S_n`` coefficients (ascending), its mass derivatives and ``sigma_n``."""
    seq = seq or SobolevSequence(cfg)
    sp = seq.S(n)
    derivs = [
        {"c": fmt(cfg.c(j)), "k": k, "value": fmt(v, digits)}
        for (j, k), v in sorted(sp.derivs_at_masses.items())
    ]
    return {
        "n": n,
        "coefficients": [fmt(c, digits) for c in sp.poly.coeffs],
        "derivatives_at_masses": derivs,
        "sigma": fmt(sp.sigma, digits),
    }


def _check(records, n, name, fn):
    try:
        ok, detail = fn()
    except LsobError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    records.append({"n": n, "check": name, "passed": bool(ok), "detail": detail})
    return ok


def verify_records(cfg: SobolevConfig, n_max: int) -> list:
    """Run the identity suite for ``n = 1..n_max``.

    Building a bundle asserts the connection identities, the reconstructions,
    both divisibilities, the ladder residuals and the ODE residual; those are
    reported under ``structure``.  The remaining checks are the Lcoef ledger,
    the three-term recurrence, ladder round trips, the raising chain, the
    Gram-Schmidt oracle (``n <= 8``) and, without masses, the classical tables.
    """
    seq = SobolevSequence(cfg)
    records = []
    built = {}
    for n in range(1, n_max + 1):
        def structure(n=n):
            built[n] = seq.bundle(n)
            return True, "connection, reconstruction, divisibility, ladder and ODE identities hold"

        if not _check(records, n, "structure", structure):
            continue
        b = built[n]

        def ledger(b=b):
            bad = [e.name for e in lcoef_ledger(b) if not e.passed]
            return not bad, "all entries match" if not bad else f"mismatch: {', '.join(bad)}"

        _check(records, n, "lcoef", ledger)

        def sigma(n=n):
            sp = seq.S(n)
            active = any(v != 0 for v in sp.derivs_at_masses.values())
            if not cfg.masses:
                return sp.sigma == 0, f"sigma = {fmt(sp.sigma)}"
            ok = sp.sigma > 0 if active else sp.sigma == 0
            return ok, f"sigma = {fmt(sp.sigma)}"

        _check(records, n, "sigma", sigma)

        def roundtrip(b=b, n=n):
            down = ladder_apply(b, "down", seq.S(n).poly)
            up = ladder_apply(b, "up", seq.S(n - 1).poly)
            ok = is_negligible(down - seq.S(n - 1).poly, down) and is_negligible(up - seq.S(n).poly, up)
            return ok, "down(S_n) = S_(n-1) and up(S_(n-1)) = S_n"

        _check(records, n, "ladder_roundtrip", roundtrip)

        if n <= ORACLE_MAX_N:
            def oracle(n=n):
                gs = gram_schmidt_oracle(cfg, n, seq.fam)
                return is_negligible(gs - seq.S(n).poly, gs), "Gram-Schmidt oracle agrees"

            _check(records, n, "oracle", oracle)

        if cfg.is_classical:
            def classical(b=b):
                table = classical_tables(b, seq.fam)
                bad = [k for k, v in table.items() if not v]
                return not bad, "classical tables reproduced" if not bad else f"mismatch: {', '.join(bad)}"

            _check(records, n, "classical", classical)

    for n in range(1, n_max):
        if n in built and n + 1 in built:
            def ttrr(n=n):
                r = ttrr_residual(built[n], built[n + 1], seq.S(n - 1), seq.S(n), seq.S(n + 1))
                return is_negligible(r, built[n + 1].q4 * built[n].q0 * seq.S(n + 1).poly), "three-term recurrence residual vanishes"

            _check(records, n, "ttrr", ttrr)

    if n_max >= 1 and n_max in built:
        def chain():
            p = raise_from_constant(seq, n_max)
            return is_negligible(p - seq.S(n_max).poly, p), f"raising chain 1..{n_max} reproduces every S_k"

        _check(records, n_max, "raising_chain", chain)
    return records


def _zero_list(zs, digits):
    return [fmt(r, digits) for r in zs.roots]


def electro_record(cfg: SobolevConfig, n: int, seq: SobolevSequence | None = None, digits: int = DEFAULT_DIGITS, fixed=None):
    """Electrostatic analysis of the zeros of ``S_n``.

    Returns ``(record, report)``; ``report`` is the underlying
    :class:`~lsob.electrostatics.ElectrostaticReport` for CSV output.
    """
    seq = seq or SobolevSequence(cfg)
    bundle = seq.bundle(n)
    zeros = find_roots(bundle.S, f"S_{n}", precision_bits=cfg.precision_bits)
    model = build_model(cfg, bundle, zeros)
    rep = classify(model, fixed)
    loc = zero_location_check(cfg, zeros)
    ordered, witness = is_sequentially_ordered(cfg)
    poles = [
        {"kind": p.kind, "index": p.index + 1, "location": fmt(p.location, digits), "residue": fmt(p.residue, digits)}
        for p in model.poles
    ]
    record = {
        "n": n,
        "zeros": _zero_list(zeros, digits),
        "zeros_simple": all(zeros.simple),
        "zero_residual_bound": fmt(zeros.residual_bound, 6),
        "zero_location": {
            "sequentially_ordered": ordered,
            "ordering_witness": witness,
            "attracted": {str(j + 1): fmt(r, digits) for j, r in loc.attracted.items()},
            "exactly_one_each": loc.exactly_one_each,
            "remaining_positive": loc.remaining_positive,
            "n_positive": loc.n_positive,
        },
        "delta_roots": _zero_list(model.u_roots, digits) if model.u_roots else [],
        "phi1_roots": [{"root": fmt(e, digits), "multiplicity": m} for e, m in model.e_groups],
        "r_values": {k: fmt(v, digits) for k, v in model.r_values.items()},
        "ell1": fmt(model.ell1, digits),
        "ell2": {str(j + 1): fmt(v, digits) for j, v in model.ell2.items()},
        "ell3": {str(i + 1): fmt(v, digits) for i, v in model.ell3.items()},
        "ell4": {str(j + 1): v for j, v in model.ell4.items()},
        "poles": poles,
        "assumptions": {
            "simple_delta": model.assumptions.simple_delta,
            "e_admissible": model.assumptions.e_admissible,
            "residues_positive": model.assumptions.residues_positive,
            "diagnostics": list(model.assumptions.diagnostics),
        },
        "decomposition_valid": model.decomposition_valid,
        "gradient_residual": fmt(rep.gradient_residual, 6),
        "hessian_eigenvalues": [fmt(v, digits) for v in rep.hessian_eigenvalues],
        "classification": rep.classification.kind,
        "negative_indices": list(rep.classification.negative_indices),
        "sufficient_condition": rep.sufficient_condition,
        "external_curvature": [fmt(v, digits) for v in rep.external_curvature],
        "gershgorin_lower": fmt(rep.gershgorin_lower, digits),
        "gershgorin_respected": rep.gershgorin_respected,
    }
    if rep.conditional is not None:
        c = rep.conditional
        record["conditional"] = {
            "fixed": list(c.fixed),
            "eigenvalues": [fmt(v, digits) for v in c.eigenvalues],
            "positive_definite": c.positive_definite,
            "vacuous": c.vacuous,
        }
    return record, rep
