"""Codebook file round-trip.

Codebooks are stored as JSON: a header with ``n``, ``p``, ``q``,
``beta``, ``K`` and the provenance record, then one row per entry holding
the row-major basis matrix as interleaved real/imaginary pairs printed
with 17 significant digits (lossless for doubles).  Loading re-verifies
orthonormality at the library tolerance and pairwise distinctness.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import FormatError, OrthonormalityError
from .manifold import TOL_ORTHO, FieldKind, GrassmannSpec
from .quantization import Codebook, Provenance

FORMAT_NAME = "grassquant-codebook"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _entry_rows(bases: np.ndarray) -> list[str]:
    rows = []
    for b in bases:
        flat = np.asarray(b, dtype=np.complex128).reshape(-1)
        pairs = []
        for z in flat:
            pairs.append(_fmt(z.real))
            pairs.append(_fmt(z.imag))
        rows.append("[" + ", ".join(pairs) + "]")
    return rows


def save_codebook(codebook: Codebook, path: str) -> None:
    """Write a codebook file (deterministic bytes for a given codebook)."""
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n": codebook.code_spec.n,
        "p": codebook.source_spec.p,
        "q": codebook.code_spec.p,
        "beta": codebook.code_spec.beta,
        "K": codebook.size,
        "provenance": codebook.provenance.to_dict(),
    }
    head = json.dumps(header, indent=2, sort_keys=True)
    rows = _entry_rows(codebook.stacked_bases)
    body = ",\n".join("    " + r for r in rows)
    text = head[:-2] + ",\n  \"entries\": [\n" + body + "\n  ]\n}\n"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def load_codebook(path: str) -> Codebook:
    """Read and re-validate a codebook file.

    Structural problems raise :class:`FormatError`; bases failing the
    orthonormality tolerance raise :class:`OrthonormalityError`.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path} is not valid codebook JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise FormatError(f"{path}: missing or wrong format marker")
    try:
        n = int(doc["n"])
        p = int(doc["p"])
        q = int(doc["q"])
        beta = int(doc["beta"])
        k = int(doc["K"])
        entries = doc["entries"]
        prov_doc = doc.get("provenance", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad or missing header field: {exc}") from exc
    if not isinstance(entries, list) or len(entries) != k:
        raise FormatError(
            f"{path}: header K={k} but {len(entries) if isinstance(entries, list) else '?'} entries"
        )
    field = FieldKind.from_beta(beta)
    want = 2 * n * q
    bases = np.empty((k, n, q), dtype=np.complex128)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != want:
            raise FormatError(
                f"{path}: entry {i} has {len(row) if isinstance(row, list) else '?'} numbers, expected {want}"
            )
        vals = np.asarray(row, dtype=float)
        bases[i] = (vals[0::2] + 1j * vals[1::2]).reshape(n, q)
    if field is FieldKind.REAL:
        if np.abs(bases.imag).max(initial=0.0) != 0.0:
            raise FormatError(f"{path}: non-zero imaginary parts in a real-field codebook")
        bases = bases.real.copy()
    gram = np.einsum("knp,knq->kpq", bases.conj(), bases)
    resid = np.sqrt(np.sum(np.abs(gram - np.eye(q)) ** 2, axis=(1, 2)))
    worst = int(np.argmax(resid)) if k else 0
    if k and resid[worst] > TOL_ORTHO:
        raise OrthonormalityError(
            f"{path}: entry {worst} fails orthonormality (residual {resid[worst]:.3e} > {TOL_ORTHO})"
        )
    provenance = Provenance(
        kind=str(prov_doc.get("kind", "loaded")),
        seed=prov_doc.get("seed"),
        path=os.fspath(path),
        trace=prov_doc.get("trace"),
    )
    return Codebook.from_bases(
        GrassmannSpec(n, p, field), GrassmannSpec(n, q, field), bases, provenance
    )
